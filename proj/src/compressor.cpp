#include "padicprob/compressor.hpp"

#include <random>

#include <zlib.h>

namespace padicprob {

DeflateCompressor::DeflateCompressor(int level) : level_(level) {
    if (level < 0 || level > 9) {
        throw std::invalid_argument("deflate level must be in 0..9");
    }
}

std::string DeflateCompressor::id() const {
    return "deflate-" + std::to_string(level_);
}

std::vector<std::uint8_t> DeflateCompressor::compress(std::span<const std::uint8_t> input) const {
    uLongf size = compressBound(static_cast<uLong>(input.size()));
    std::vector<std::uint8_t> out(size);
    if (compress2(out.data(), &size, input.data(), static_cast<uLong>(input.size()), level_) != Z_OK) {
        throw std::runtime_error("deflate failed");
    }
    out.resize(size);
    return out;
}

std::vector<std::uint8_t> DeflateCompressor::decompress(std::span<const std::uint8_t> input,
                                                        std::size_t original_size) const {
    std::vector<std::uint8_t> out(original_size);
    uLongf size = static_cast<uLongf>(original_size);
    if (uncompress(out.data(), &size, input.data(), static_cast<uLong>(input.size())) != Z_OK) {
        throw std::runtime_error("inflate failed");
    }
    out.resize(size);
    return out;
}

CheckedCompressor::CheckedCompressor(const Compressor& compressor) : compressor_(&compressor) {
    std::vector<std::uint8_t> probe(4096);
    std::mt19937 rng(12345);
    for (std::size_t i = 0; i < probe.size(); ++i) {
        probe[i] = i < 2048 ? static_cast<std::uint8_t>(rng()) : static_cast<std::uint8_t>(i % 7);
    }
    bool ok = false;
    try {
        const auto packed = compressor.compress(probe);
        ok = compressor.decompress(packed, probe.size()) == probe;
    } catch (const std::exception&) {
        ok = false;
    }
    if (!ok) {
        throw InvalidCompressor("compressor '" + compressor.id() + "' failed the round-trip probe");
    }
}

std::uint64_t compressor_size(const EventSequence& seq, const CheckedCompressor& compressor) {
    const auto bytes = seq.to_bytes();
    return 8 * static_cast<std::uint64_t>(compressor.get().compress(bytes).size());
}

}  // namespace padicprob
