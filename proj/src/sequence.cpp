#include "padicprob/sequence.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "padicprob/io.hpp"

namespace padicprob {
namespace {

constexpr char kMagic[4] = {'P', 'B', 'I', 'T'};

}  // namespace

EventSequence::EventSequence(std::size_t length, bool value)
    : words_((length + 63) / 64, value ? ~std::uint64_t{0} : 0), size_(length) {
    if (value && (length & 63) != 0) {
        words_.back() &= (std::uint64_t{1} << (length & 63)) - 1;
    }
}

EventSequence EventSequence::from_string(std::string_view labels) {
    EventSequence seq(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == '1') {
            seq.set(i, true);
        } else if (labels[i] != '0') {
            throw std::invalid_argument("label '" + std::string(1, labels[i]) + "' at position " +
                                        std::to_string(i) + " is not 0 or 1");
        }
    }
    return seq;
}

EventSequence EventSequence::from_labels(std::span<const std::uint8_t> labels) {
    EventSequence seq(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] > 1) {
            throw std::invalid_argument("label at position " + std::to_string(i) + " is not 0 or 1");
        }
        seq.set(i, labels[i] == 1);
    }
    return seq;
}

void EventSequence::set(std::size_t i, bool value) noexcept {
    const std::uint64_t bit = std::uint64_t{1} << (i & 63);
    if (value) {
        words_[i >> 6] |= bit;
    } else {
        words_[i >> 6] &= ~bit;
    }
}

void EventSequence::push_back(bool value) {
    if ((size_ & 63) == 0) {
        words_.push_back(0);
    }
    ++size_;
    set(size_ - 1, value);
}

void EventSequence::fill(std::size_t first, std::size_t last, bool value) {
    if (last > size_ || first > last) {
        throw std::out_of_range("fill range outside sequence");
    }
    while (first < last && (first & 63) != 0) {
        set(first++, value);
    }
    while (last - first >= 64) {
        words_[first >> 6] = value ? ~std::uint64_t{0} : 0;
        first += 64;
    }
    while (first < last) {
        set(first++, value);
    }
}

std::uint64_t EventSequence::count_ones(std::size_t first, std::size_t last) const {
    if (last > size_ || first > last) {
        throw std::out_of_range("count range outside sequence");
    }
    std::uint64_t total = 0;
    while (first < last && (first & 63) != 0) {
        total += (*this)[first++] ? 1 : 0;
    }
    while (last - first >= 64) {
        total += static_cast<std::uint64_t>(std::popcount(words_[first >> 6]));
        first += 64;
    }
    if (first < last) {
        const std::uint64_t mask = (std::uint64_t{1} << (last - first)) - 1;
        total += static_cast<std::uint64_t>(std::popcount(words_[first >> 6] & mask));
    }
    return total;
}

EventSequence EventSequence::prefix(std::size_t n) const {
    if (n > size_) {
        throw std::out_of_range("prefix longer than sequence");
    }
    EventSequence out;
    out.size_ = n;
    out.words_.assign(words_.begin(), words_.begin() + static_cast<std::ptrdiff_t>((n + 63) / 64));
    if ((n & 63) != 0) {
        out.words_.back() &= (std::uint64_t{1} << (n & 63)) - 1;
    }
    return out;
}

std::string EventSequence::to_string() const {
    std::string out(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
        if ((*this)[i]) {
            out[i] = '1';
        }
    }
    return out;
}

std::vector<std::uint8_t> EventSequence::to_bytes() const {
    std::vector<std::uint8_t> bytes((size_ + 7) / 8, 0);
    for (std::size_t j = 0; j < bytes.size(); ++j) {
        bytes[j] = static_cast<std::uint8_t>(words_[j / 8] >> (8 * (j % 8)));
    }
    return bytes;
}

EventSequence EventSequence::from_bytes(std::span<const std::uint8_t> bytes, std::size_t length) {
    if (bytes.size() != (length + 7) / 8) {
        throw std::invalid_argument("packed sequence has " + std::to_string(bytes.size()) +
                                    " bytes, expected " + std::to_string((length + 7) / 8));
    }
    EventSequence seq(length);
    for (std::size_t j = 0; j < bytes.size(); ++j) {
        seq.words_[j / 8] |= static_cast<std::uint64_t>(bytes[j]) << (8 * (j % 8));
    }
    if ((length & 63) != 0 && !seq.words_.empty()) {
        const std::uint64_t mask = (std::uint64_t{1} << (length & 63)) - 1;
        if ((seq.words_.back() & ~mask) != 0) {
            throw std::invalid_argument("packed sequence has set bits past its declared length");
        }
    }
    return seq;
}

EventSequence read_sequence(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open sequence file " + path.string());
    }
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (content.size() >= 12 && std::memcmp(content.data(), kMagic, 4) == 0) {
        std::uint64_t length = 0;
        for (int b = 7; b >= 0; --b) {
            length = (length << 8) | static_cast<unsigned char>(content[4 + static_cast<std::size_t>(b)]);
        }
        const auto* data = reinterpret_cast<const std::uint8_t*>(content.data()) + 12;
        return EventSequence::from_bytes(std::span(data, content.size() - 12), length);
    }
    if (!content.empty() && content.back() == '\n') {
        content.pop_back();
    }
    try {
        return EventSequence::from_string(content);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error("malformed sequence file " + path.string() + ": " + e.what());
    }
}

void write_sequence(const std::filesystem::path& path, const EventSequence& seq) {
    if (path.extension() == ".bits") {
        std::string out(kMagic, 4);
        const std::uint64_t length = seq.size();
        for (int b = 0; b < 8; ++b) {
            out.push_back(static_cast<char>((length >> (8 * b)) & 0xff));
        }
        const auto bytes = seq.to_bytes();
        out.append(bytes.begin(), bytes.end());
        write_file_atomic(path, out);
    } else {
        write_file_atomic(path, seq.to_string());
    }
}

}  // namespace padicprob
