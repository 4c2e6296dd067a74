#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "padicprob/sequence.hpp"

namespace padicprob {

/// A lossless byte-stream compressor.
class Compressor {
public:
    virtual ~Compressor() = default;
    virtual std::string id() const = 0;
    virtual std::vector<std::uint8_t> compress(std::span<const std::uint8_t> input) const = 0;
    virtual std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> input,
                                                 std::size_t original_size) const = 0;
};

/// zlib deflate.
class DeflateCompressor final : public Compressor {
public:
    explicit DeflateCompressor(int level = 9);
    std::string id() const override;
    std::vector<std::uint8_t> compress(std::span<const std::uint8_t> input) const override;
    std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> input,
                                         std::size_t original_size) const override;

private:
    int level_;
};

class InvalidCompressor : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A compressor whose round trip has been checked on a probe input.
/// Construction throws InvalidCompressor when the round trip fails.
class CheckedCompressor {
public:
    explicit CheckedCompressor(const Compressor& compressor);
    const Compressor& get() const noexcept { return *compressor_; }

private:
    const Compressor* compressor_;
};

/// Compressed size in bits of the packed sequence.
std::uint64_t compressor_size(const EventSequence& seq, const CheckedCompressor& compressor);

}  // namespace padicprob
