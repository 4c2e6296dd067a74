#include <doctest.h>

#include <random>

#include "padicprob/padic.hpp"
#include "support.hpp"

using namespace padicprob;

namespace {

// Oracle: strip factors of p by repeated exact division.
std::int64_t naive_int_valuation(BigInt n, std::uint64_t p) {
    std::int64_t v = 0;
    const BigInt bp(static_cast<unsigned long>(p));
    while (n % bp == 0) {
        n /= bp;
        ++v;
    }
    return v;
}

// Oracle: the residue x in [0, p^k) with d x = n (mod p^k), by exhaustive search.
std::uint64_t brute_force_residue(long n, long d, std::uint64_t p, int k) {
    std::uint64_t modulus = 1;
    for (int i = 0; i < k; ++i) modulus *= p;
    const long m = static_cast<long>(modulus);
    for (long x = 0; x < m; ++x) {
        if ((((d * x - n) % m) + m) % m == 0) {
            return static_cast<std::uint64_t>(x);
        }
    }
    return modulus;
}

std::vector<std::uint64_t> base_digits(std::uint64_t value, std::uint64_t p, int k) {
    std::vector<std::uint64_t> out;
    for (int i = 0; i < k; ++i) {
        out.push_back(value % p);
        value /= p;
    }
    return out;
}

}  // namespace

TEST_CASE("valuation, norm and distance on worked values") {
    CHECK(valuation(Rational(12), PrimeBase(2)) == 2);
    CHECK_FALSE(valuation(Rational(0), PrimeBase(5)).has_value());
    CHECK(valuation(Rational(5, 3), PrimeBase(3)) == -1);

    CHECK(norm(Rational(12), PrimeBase(2)) == Rational(1, 4));
    CHECK(norm(Rational(1), PrimeBase(7)) == Rational(1));
    CHECK(norm(Rational(5, 3), PrimeBase(3)) == Rational(3));
    CHECK(norm(Rational(0), PrimeBase(3)) == Rational(0));

    CHECK(distance(Rational(1), Rational(1), PrimeBase(7)) == Rational(0));
    CHECK(distance(Rational(5), Rational(1), PrimeBase(2)) == Rational(1, 4));
    CHECK(distance(Rational(0), Rational(9), PrimeBase(3)) == Rational(1, 9));
}

TEST_CASE("primality matches trial division below 20000") {
    auto trial = [](std::uint64_t n) {
        if (n < 2) return false;
        for (std::uint64_t d = 2; d * d <= n; ++d) {
            if (n % d == 0) return false;
        }
        return true;
    };
    for (std::uint64_t n = 0; n < 20000; ++n) {
        REQUIRE(is_prime(n) == trial(n));
    }
    CHECK(is_prime(18446744073709551557ULL));
    CHECK_FALSE(is_prime(3215031751ULL));  // strong pseudoprime to bases 2, 3, 5, 7
    CHECK_THROWS_AS(PrimeBase(4), InvalidPrime);
    CHECK_THROWS_AS(PrimeBase(1), InvalidPrime);
    CHECK_THROWS(PrimeBase::parse("18446744073709551617"));
}

TEST_CASE("to_digits on worked values") {
    const auto minus_one = to_digits(Rational(-1), PrimeBase(2), 4);
    CHECK(minus_one.valuation() == 0);
    CHECK(minus_one.digits() == std::vector<std::uint64_t>{1, 1, 1, 1});

    const std::uint64_t third = brute_force_residue(1, 3, 2, 6);
    CHECK(third == 43);
    const auto x = to_digits(Rational(1, 3), PrimeBase(2), 6);
    CHECK(x.valuation() == 0);
    CHECK(x.digits() == base_digits(third, 2, 6));
    CHECK(x.digits() == std::vector<std::uint64_t>{1, 1, 0, 1, 0, 1});

    const auto zero = to_digits(Rational(0), PrimeBase(5), 3);
    CHECK(zero.is_zero());
    CHECK(zero.absolute_precision() == 3);
}

TEST_CASE("to_digits agrees with the brute-force residue oracle") {
    for (std::uint64_t p : {2, 3, 5, 7}) {
        for (long n = -20; n <= 20; ++n) {
            for (long d = 1; d <= 12; ++d) {
                if (d % static_cast<long>(p) == 0 || n == 0 || n % static_cast<long>(p) == 0) continue;
                const auto x = to_digits(Rational(n, d), PrimeBase(p), 4);
                REQUIRE(x.valuation() == 0);
                REQUIRE(x.digits() == base_digits(brute_force_residue(n, d, p, 4), p, 4));
            }
        }
    }
}

TEST_CASE("from_digits on worked values") {
    CHECK(from_digits(PAdicApprox(PrimeBase(2), 0, {1, 1, 1, 1})) == Rational(15));
    CHECK(from_digits(PAdicApprox(PrimeBase(3), -1, {2, 1})) == Rational(5, 3));
    CHECK(from_digits(PAdicApprox::zero(PrimeBase(5), 0)) == Rational(0));
}

TEST_CASE("approximation invariants") {
    const PAdicApprox x(PrimeBase(5), 1, {0, 0, 3, 4});
    CHECK(x.valuation() == 3);
    CHECK(x.digits() == std::vector<std::uint64_t>{3, 4});
    CHECK(x.absolute_precision() == 5);
    CHECK_THROWS_AS(PAdicApprox(PrimeBase(3), 0, {3}), std::invalid_argument);

    const PAdicApprox z(PrimeBase(3), 2, {0, 0});
    CHECK(z.is_zero());
    CHECK(z == PAdicApprox::zero(PrimeBase(3), 4));
}

TEST_CASE("arithmetic on worked values") {
    const PrimeBase two(2);
    const auto sum = to_digits(Rational(-1), two, 6) + to_digits(Rational(1), two, 6);
    CHECK(sum.is_zero());
    CHECK(sum.absolute_precision() == 6);

    const auto one = to_digits(Rational(1, 3), two, 6) * to_digits(Rational(3), two, 6);
    CHECK(from_digits(one) == Rational(1));
    CHECK(one.precision() == 6);

    CHECK_THROWS_AS(to_digits(Rational(1), two, 4) / PAdicApprox::zero(two, 5), PrecisionExhausted);
}

TEST_CASE("precision tracking is conservative") {
    const PrimeBase five(5);
    // Cancellation: 1 + 1/5^0 terms agreeing to three digits leave few known digits.
    const auto a = to_digits(Rational(126), five, 5);  // 1 + 5^3
    const auto b = to_digits(Rational(-1), five, 5);
    const auto s = a + b;
    CHECK(s.valuation() == 3);
    CHECK(s.absolute_precision() == 5);
    CHECK(from_digits(s) == Rational(125));

    const auto q = to_digits(Rational(2, 25), five, 3) * to_digits(Rational(10), five, 5);
    CHECK(q.valuation() == -1);
    CHECK(q.precision() == 3);

    const auto zero_times = PAdicApprox::zero(five, 4) * to_digits(Rational(25), five, 2);
    CHECK(zero_times.is_zero());
    CHECK(zero_times.absolute_precision() == 6);
}

TEST_CASE("literal parsing and rendering") {
    const auto x = PAdicApprox::parse("p:3 v:-1 d:2,1");
    CHECK(from_digits(x) == Rational(5, 3));
    CHECK(x.to_literal() == "p:3 v:-1 d:2,1");
    CHECK(PAdicApprox::parse(x.to_literal()) == x);
    CHECK(x.render() == "...1,2");
    CHECK(to_digits(Rational(-1), PrimeBase(2), 4).render() == "...1111");
    CHECK(to_digits(Rational(-1), PrimeBase(13), 2).render() == "...12 12");

    try {
        PAdicApprox::parse("p:3 v:0 d:1,x");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.position() == 12);
    }
    CHECK_THROWS_AS(PAdicApprox::parse("p:4 v:0 d:1"), InvalidPrime);
    CHECK_THROWS_AS(PAdicApprox::parse("p:3 v:0 d:3"), ParseError);
    CHECK_THROWS_AS(PAdicApprox::parse("p:3 d:1"), ParseError);
    try {
        Rational::parse("12/3a");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.position() == 4);
    }
}

TEST_CASE("hensel square roots") {
    // Oracle: every x in [0, 125) with x^2 = -1 mod 125.
    std::vector<long> roots;
    for (long x = 0; x < 125; ++x) {
        if ((x * x + 1) % 125 == 0) roots.push_back(x);
    }
    CHECK(roots == std::vector<long>{57, 68});

    const auto i5 = hensel_sqrt(Rational(-1), PrimeBase(5), 3);
    REQUIRE(i5);
    CHECK(i5->digits() == std::vector<std::uint64_t>{2, 1, 2});
    CHECK(i5->unit_part() == 57);

    const auto two = hensel_sqrt(Rational(4), PrimeBase(7), 2);
    REQUIRE(two);
    CHECK(two->digits() == std::vector<std::uint64_t>{2, 0});

    CHECK_FALSE(hensel_sqrt(Rational(-1), PrimeBase(7), 4).has_value());
    CHECK_FALSE(hensel_sqrt(Rational(3), PrimeBase(3), 4).has_value());  // odd valuation
    CHECK_THROWS_AS(hensel_sqrt(Rational(-1), PrimeBase(2), 4), UnsupportedBase);

    const auto r = hensel_sqrt(Rational(9, 4), PrimeBase(3), 5);
    REQUIRE(r);
    CHECK(r->valuation() == 1);
    const auto square = (*r) * (*r);
    CHECK(distance(from_digits(square), Rational(9, 4), PrimeBase(3)) <= power(BigInt(3), -square.absolute_precision()));
}

TEST_CASE("property: ultrametric inequality, strengthened form, and multiplicativity") {
    std::mt19937_64 rng(101);
    for (std::uint64_t p : {2, 3, 5, 1997}) {
        const PrimeBase base(p);
        for (int i = 0; i < 2000; ++i) {
            const Rational x = test_support::random_rational(rng, p);
            const Rational y = test_support::random_rational(rng, p);
            const Rational nx = norm(x, base), ny = norm(y, base);
            const Rational nsum = norm(x + y, base);
            REQUIRE(nsum <= std::max(nx, ny));
            if (nx != ny) {
                REQUIRE(nsum == std::max(nx, ny));
            }
            REQUIRE(norm(x * y, base) == nx * ny);
            REQUIRE(valuation(x, base) == (x.is_zero() ? Valuation{} :
                    Valuation{naive_int_valuation(x.numerator(), p) - naive_int_valuation(x.denominator(), p)}));
        }
    }
}

TEST_CASE("property: expansion round-trip") {
    std::mt19937_64 rng(202);
    for (std::uint64_t p : {2, 3, 5, 7, 1997}) {
        const PrimeBase base(p);
        for (int i = 0; i < 500; ++i) {
            const Rational q = test_support::random_rational(rng, p);
            const std::int64_t k = 1 + static_cast<std::int64_t>(rng() % 12);
            const auto x = to_digits(q, base, k);
            if (q.is_zero()) {
                REQUIRE(from_digits(x) == Rational(0));
                continue;
            }
            const std::int64_t v = *valuation(q, base);
            REQUIRE(x.valuation() == v);
            REQUIRE(x.precision() == k);
            REQUIRE(distance(q, from_digits(x), base) <= power(base.big(), -(v + k)));
        }
    }
}

TEST_CASE("property: expansion is a ring homomorphism at the tracked precision") {
    std::mt19937_64 rng(303);
    for (std::uint64_t p : {2, 3, 5, 13}) {
        const PrimeBase base(p);
        for (int i = 0; i < 500; ++i) {
            const Rational a = test_support::random_rational(rng, p);
            const Rational b = test_support::random_rational(rng, p);
            const std::int64_t k = 2 + static_cast<std::int64_t>(rng() % 10);
            const auto xa = to_digits(a, base, k);
            const auto xb = to_digits(b, base, k);
            struct Case {
                Rational exact;
                PAdicApprox approx;
            };
            std::vector<Case> cases{{a + b, xa + xb}, {a - b, xa - xb}, {a * b, xa * xb}};
            if (!b.is_zero()) {
                cases.push_back({a / b, xa / xb});
            }
            for (const auto& [exact, approx] : cases) {
                const std::int64_t n = approx.absolute_precision();
                REQUIRE(distance(exact, from_digits(approx), base) <= power(base.big(), -n));
                if (!approx.is_zero()) {
                    REQUIRE(approx == to_digits(exact, base, approx.precision()));
                }
            }
        }
    }
}

TEST_CASE("property: square roots square back and exist exactly per Euler's criterion") {
    std::mt19937_64 rng(404);
    for (std::uint64_t p : {3, 5, 7, 11, 13, 1997}) {
        const PrimeBase base(p);
        for (int i = 0; i < 300; ++i) {
            Rational a = test_support::random_rational(rng, p);
            if (a.is_zero()) continue;
            const std::int64_t k = 1 + static_cast<std::int64_t>(rng() % 8);
            const auto root = hensel_sqrt(a, base, k);
            const std::int64_t v = *valuation(a, base);
            const Rational unit = a * power(base.big(), -v);
            // Euler: a unit u is a square mod p iff u^((p-1)/2) = 1 mod p.
            const BigInt pb = base.big();
            BigInt inv;
            mpz_invert(inv.get_mpz_t(), unit.denominator().get_mpz_t(), pb.get_mpz_t());
            BigInt u = unit.numerator() * inv;
            mpz_mod(u.get_mpz_t(), u.get_mpz_t(), pb.get_mpz_t());
            BigInt e = (pb - 1) / 2, t;
            mpz_powm(t.get_mpz_t(), u.get_mpz_t(), e.get_mpz_t(), pb.get_mpz_t());
            const bool expected = v % 2 == 0 && t == 1;
            REQUIRE(root.has_value() == expected);
            if (root) {
                const auto sq = (*root) * (*root);
                REQUIRE(distance(from_digits(sq), a, base) <= power(pb, -sq.absolute_precision()));
                REQUIRE(sq.absolute_precision() >= v + k);
            }
        }
    }
}
