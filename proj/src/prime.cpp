#include "padicprob/prime.hpp"

#include <array>
#include <cctype>
#include <charconv>

namespace padicprob {
namespace {

using u128 = unsigned __int128;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1) {
            result = mul_mod(result, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

}  // namespace

bool is_prime(std::uint64_t n) {
    if (n < 2) {
        return false;
    }
    // First twelve primes form a deterministic witness set below 3.3e24.
    constexpr std::array<std::uint64_t, 12> witnesses{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (auto w : witnesses) {
        if (n % w == 0) {
            return n == w;
        }
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (auto a : witnesses) {
        std::uint64_t x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) {
            continue;
        }
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) {
            return false;
        }
    }
    return true;
}

PrimeBase::PrimeBase(std::uint64_t p) : p_(p) {
    if (!is_prime(p)) {
        throw InvalidPrime("base " + std::to_string(p) + " is not prime");
    }
}

PrimeBase PrimeBase::parse(std::string_view text) {
    std::uint64_t value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc::result_out_of_range) {
        throw InvalidPrime("prime base '" + std::string(text) + "' exceeds 64 bits");
    }
    if (ec != std::errc() || ptr != last) {
        throw ParseError("malformed prime '" + std::string(text) + "'",
                         static_cast<std::size_t>(ptr - first));
    }
    return PrimeBase(value);
}

}  // namespace padicprob
