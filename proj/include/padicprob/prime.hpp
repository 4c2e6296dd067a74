#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "padicprob/rational.hpp"

namespace padicprob {

/// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime(std::uint64_t n);

class InvalidPrime : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A prime p >= 2, validated on construction.
class PrimeBase {
public:
    explicit PrimeBase(std::uint64_t p);

    /// Accepts decimal text; values that do not fit in 64 bits are rejected.
    static PrimeBase parse(std::string_view text);

    std::uint64_t value() const noexcept { return p_; }
    BigInt big() const { return BigInt(static_cast<unsigned long>(p_)); }

    friend bool operator==(PrimeBase a, PrimeBase b) noexcept { return a.p_ == b.p_; }

private:
    std::uint64_t p_;
};

}  // namespace padicprob
