#pragma once

#include <random>

#include "padicprob/rational.hpp"
#include "padicprob/sequence.hpp"

namespace test_support {

/// Random rational with numerator and denominator carrying random powers of p,
/// so valuations of both signs occur. Zero appears occasionally.
inline padicprob::Rational random_rational(std::mt19937_64& rng, std::uint64_t p) {
    using padicprob::BigInt;
    if (rng() % 50 == 0) {
        return padicprob::Rational(0);
    }
    auto factor = [&](int max_power) {
        BigInt v(static_cast<unsigned long>(1 + rng() % 1000));
        const int e = static_cast<int>(rng() % (max_power + 1));
        for (int i = 0; i < e; ++i) v *= static_cast<unsigned long>(p);
        return v;
    };
    BigInt num = factor(4);
    if (rng() % 2) num = -num;
    return padicprob::Rational(num, factor(4));
}

inline padicprob::EventSequence coin_flips(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    padicprob::EventSequence seq(n);
    for (std::size_t i = 0; i < n; ++i) {
        seq.set(i, rng() & 1);
    }
    return seq;
}

}  // namespace test_support
