#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "padicprob/prime.hpp"
#include "padicprob/rational.hpp"

namespace padicprob {

/// ord_p of a rational. `std::nullopt` stands for +infinity, the valuation of 0.
using Valuation = std::optional<std::int64_t>;

Valuation valuation(const Rational& q, PrimeBase base);

/// |q|_p = p^(-ord_p q), with |0|_p = 0.
Rational norm(const Rational& q, PrimeBase base);

/// |a - b|_p.
Rational distance(const Rational& a, const Rational& b, PrimeBase base);

/// Division by an approximation that is zero at its known precision.
class PrecisionExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation requested for a prime it does not support (square roots at p = 2).
class UnsupportedBase : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A p-adic number known to finitely many digits:
///
///     x = sum_{j < precision} digits[j] * p^(valuation + j)  +  O(p^(valuation + precision))
///
/// Digits are least-significant first. Nonzero values are normalized so that
/// digits[0] != 0. A value whose known digits are all zero is an approximate
/// zero; it is stored canonically by its absolute precision N (the value is
/// only known to lie in p^N Z_p): valuation 0 with N zero digits when N > 0,
/// otherwise valuation N with no digits.
class PAdicApprox {
public:
    PAdicApprox(PrimeBase base, std::int64_t valuation, std::vector<std::uint64_t> digits);

    static PAdicApprox zero(PrimeBase base, std::int64_t absolute_precision);

    /// Reads `p:<prime> v:<valuation> d:<a0,a1,...>`.
    static PAdicApprox parse(std::string_view text);

    PrimeBase base() const noexcept { return base_; }
    std::int64_t valuation() const noexcept { return valuation_; }
    const std::vector<std::uint64_t>& digits() const noexcept { return digits_; }
    std::int64_t precision() const noexcept { return static_cast<std::int64_t>(digits_.size()); }
    std::int64_t absolute_precision() const noexcept { return valuation_ + precision(); }
    bool is_zero() const noexcept { return zero_; }

    /// sum digits[j] p^j, the integer carrying the known digits.
    BigInt unit_part() const;

    /// Same number with only the first `precision` known digits kept.
    PAdicApprox truncated(std::int64_t precision) const;

    std::string to_literal() const;

    /// Canonical expansion, most significant known digit first, comma as the
    /// radix point: "...a_k...a_0,a_-1...a_-n". Bases above 10 separate
    /// digits with spaces.
    std::string render() const;

    friend bool operator==(const PAdicApprox&, const PAdicApprox&) = default;

private:
    PrimeBase base_;
    std::int64_t valuation_ = 0;
    std::vector<std::uint64_t> digits_;
    bool zero_ = false;
};

/// Expansion of q to `precision` digits past its valuation.
PAdicApprox to_digits(const Rational& q, PrimeBase base, std::int64_t precision);

/// Exact value of the finite digit sum.
Rational from_digits(const PAdicApprox& x);

PAdicApprox operator-(const PAdicApprox& a);
PAdicApprox operator+(const PAdicApprox& a, const PAdicApprox& b);
PAdicApprox operator-(const PAdicApprox& a, const PAdicApprox& b);
PAdicApprox operator*(const PAdicApprox& a, const PAdicApprox& b);
PAdicApprox operator/(const PAdicApprox& a, const PAdicApprox& b);

/// Square root in Q_p for odd p, `precision` digits past its valuation,
/// lifted from the smallest root modulo p. Returns std::nullopt when `a`
/// has no square root in Q_p.
std::optional<PAdicApprox> hensel_sqrt(const Rational& a, PrimeBase base, std::int64_t precision);

/// Smallest x in [0, p) with x^2 = a (mod p), or nullopt for non-residues.
std::optional<BigInt> sqrt_mod_prime(const BigInt& a, PrimeBase base);

/// Exponent of p in a nonzero integer.
std::int64_t integer_valuation(const BigInt& n, PrimeBase base);

}  // namespace padicprob
