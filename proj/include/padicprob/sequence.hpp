#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace padicprob {

/// A finite record of binary trial outcomes x_1, x_2, ..., stored packed
/// 64 labels per word.
class EventSequence {
public:
    EventSequence() = default;
    explicit EventSequence(std::size_t length, bool value = false);

    /// From a string of '0'/'1' characters; anything else is rejected.
    static EventSequence from_string(std::string_view labels);
    static EventSequence from_labels(std::span<const std::uint8_t> labels);

    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }

    bool operator[](std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool value) noexcept;
    void push_back(bool value);

    /// Sets labels [first, last) to `value`.
    void fill(std::size_t first, std::size_t last, bool value);

    /// Number of ones among the first `n` labels.
    std::uint64_t count_ones(std::size_t n) const { return count_ones(0, n); }

    /// Number of ones among labels [first, last).
    std::uint64_t count_ones(std::size_t first, std::size_t last) const;

    EventSequence prefix(std::size_t n) const;

    std::string to_string() const;

    /// Packed bytes, 8 labels per byte, label 8j+i in bit i of byte j.
    std::vector<std::uint8_t> to_bytes() const;
    static EventSequence from_bytes(std::span<const std::uint8_t> bytes, std::size_t length);

    const std::vector<std::uint64_t>& words() const noexcept { return words_; }

    friend bool operator==(const EventSequence&, const EventSequence&) = default;

private:
    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

/// Sequence files: ASCII '0'/'1' text, or the packed `.bits` form
/// ("PBIT" magic, little-endian uint64 label count, packed bytes).
/// The packed form is chosen by the `.bits` extension on write and by the
/// magic on read.
EventSequence read_sequence(const std::filesystem::path& path);
void write_sequence(const std::filesystem::path& path, const EventSequence& seq);

}  // namespace padicprob
