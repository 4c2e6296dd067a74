#include <doctest.h>

#include "padicprob/frequency.hpp"
#include "padicprob/realization.hpp"

using namespace padicprob;

namespace {

void check_plan_invariants(const CheckpointPlan& pl) {
    std::uint64_t total = 0, ones = 0;
    const auto x = from_digits(pl.target);
    const BigInt shift_power = power(pl.base.big(), pl.shift).numerator();
    for (std::size_t i = 0; i < pl.rows.size(); ++i) {
        const auto& row = pl.rows[i];
        REQUIRE(row.total > total);
        REQUIRE(row.ones >= ones);
        REQUIRE(row.ones <= row.total);
        REQUIRE(row.ones - ones <= row.total - total);
        REQUIRE(BigInt(static_cast<unsigned long>(row.total)) % shift_power == 0);
        const Rational nu(BigInt(static_cast<unsigned long>(row.ones)), BigInt(static_cast<unsigned long>(row.total)));
        REQUIRE(distance(nu, x, pl.base) <= pl.bound(static_cast<std::int64_t>(i + 1)));
        total = row.total;
        ones = row.ones;
    }
}

}  // namespace

TEST_CASE("worked plan for -1 at p = 2") {
    const auto pl = plan(to_digits(Rational(-1), PrimeBase(2), 3), 3);
    CHECK(pl.rows == std::vector<PlanRow>{{3, 1}, {7, 5}, {15, 9}});
    // Oracle rows checked directly with the metric.
    CHECK(distance(Rational(1, 3), Rational(-1), PrimeBase(2)) == Rational(1, 4));
    CHECK(distance(Rational(5, 7), Rational(-1), PrimeBase(2)) == Rational(1, 4));
    CHECK(distance(Rational(9, 15), Rational(-1), PrimeBase(2)) == Rational(1, 8));
    CHECK(pl.to_csv() == "k,N_k,n_k,bound_num,bound_den\n1,3,1,1,2\n2,7,5,1,4\n3,15,9,1,8\n");
    CHECK(parse_plan_csv(pl.to_csv()) == pl.rows);
}

TEST_CASE("target 1 keeps ones congruent to the length") {
    for (std::uint64_t p : {2, 3, 7}) {
        const auto pl = plan(to_digits(Rational(1), PrimeBase(p), 5), 5);
        std::uint64_t modulus = 1;
        for (const auto& row : pl.rows) {
            modulus *= p;
            CHECK((row.total - row.ones) % modulus == 0);
        }
        check_plan_invariants(pl);
        CHECK(verify(generate(pl), pl.target, 5, pl.rows).pass);
    }
}

TEST_CASE("target 5/3 at p = 3 forces 3 | N_k") {
    const auto target = to_digits(Rational(5, 3), PrimeBase(3), 4);
    const auto pl = plan(target, 2);
    CHECK(pl.shift == 1);
    for (const auto& row : pl.rows) {
        CHECK(row.total % 3 == 0);
    }
    check_plan_invariants(pl);
    CHECK_THROWS_AS(plan(to_digits(Rational(5, 3), PrimeBase(3), 2), 2), PrecisionInsufficient);
}

TEST_CASE("plans satisfy their invariants across targets, primes and growth") {
    for (std::uint64_t p : {2, 3, 5, 7}) {
        const PrimeBase base(p);
        for (const Rational& q : {Rational(-1), Rational(2), Rational(100), Rational(5, 3), Rational(1, 2),
                                  Rational(0), Rational(-7, 25)}) {
            for (double growth : {1.0, 1.7}) {
                const auto v = valuation(q, base);
                const std::int64_t shift = v && *v < 0 ? -*v : 0;
                const auto pl = plan(to_digits(q, base, 6 + shift), 6, growth);
                check_plan_invariants(pl);
                if (growth > 1) {
                    for (std::size_t i = 1; i < pl.rows.size(); ++i) {
                        CHECK(static_cast<double>(pl.rows[i].total) >= growth * static_cast<double>(pl.rows[i - 1].total));
                    }
                }
            }
        }
    }
}

TEST_CASE("square root of -1 at p = 5 and 13 is realizable") {
    for (std::uint64_t p : {5, 13}) {
        const PrimeBase base(p);
        const auto root = hensel_sqrt(Rational(-1), base, 6);
        REQUIRE(root);
        const auto pl = plan(*root, 5);
        check_plan_invariants(pl);
        CHECK(verify(generate(pl), *root, 5, pl.rows).pass);
    }
}

TEST_CASE("generate honours the counts under every fill") {
    const auto pl = plan(to_digits(Rational(-1), PrimeBase(2), 3), 3);
    const auto block = generate(pl, FillPolicy::parse("block"));
    CHECK(block.size() == 15);
    CHECK(block.count_ones(3) == 1);
    CHECK(block.count_ones(7) == 5);
    CHECK(block.count_ones(15) == 9);

    const auto depth_one = plan(to_digits(Rational(-1), PrimeBase(2), 1), 1);
    CHECK(generate(depth_one).to_string() == "100");

    const auto deep = plan(to_digits(Rational(100), PrimeBase(3), 9), 9);
    const auto reference = trace(generate(deep), deep.checkpoints());
    for (const char* mode : {"spread", "shuffle:1", "shuffle:99"}) {
        const auto seq = generate(deep, FillPolicy::parse(mode));
        const auto tr = trace(seq, deep.checkpoints());
        CHECK(tr.ones == reference.ones);
        CHECK(tr.freq1 == reference.freq1);
    }
    CHECK(generate(deep, FillPolicy::parse("shuffle:5")) == generate(deep, FillPolicy::parse("shuffle:5")));
    CHECK_FALSE(generate(deep, FillPolicy::parse("shuffle:5")) == generate(deep, FillPolicy::parse("spread")));
    CHECK_THROWS(FillPolicy::parse("zigzag"));
    CHECK(FillPolicy::parse("shuffle:7").to_string() == "shuffle:7");
}

TEST_CASE("verification catches a corrupted label in the last window") {
    const auto target = to_digits(Rational(-1), PrimeBase(2), 3);
    const auto pl = plan(target, 3);
    auto seq = generate(pl);
    REQUIRE(verify(seq, target, 3, pl.rows).pass);
    seq.set(10, !seq[10]);
    const auto report = verify(seq, target, 3, pl.rows);
    CHECK_FALSE(report.pass);
    CHECK(report.rows[0].pass);
    CHECK(report.rows[1].pass);
    CHECK_FALSE(report.rows[2].pass);

    const EventSequence short_seq(5, true);
    CHECK_THROWS(verify(short_seq, target, 3, pl.rows));
}

TEST_CASE("zero target and depth validation") {
    const auto zero = to_digits(Rational(0), PrimeBase(3), 4);
    const auto pl = plan(zero, 4);
    std::uint64_t modulus = 1;
    for (const auto& row : pl.rows) {
        modulus *= 3;
        CHECK(row.ones % modulus == 0);
    }
    check_plan_invariants(pl);
    CHECK_THROWS_AS(plan(zero, 5), PrecisionInsufficient);
    CHECK_THROWS(plan(zero, 0));
    CHECK_THROWS(plan(to_digits(Rational(1), PrimeBase(2), 3), 3, 0.5));
}
