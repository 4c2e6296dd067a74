#include <doctest.h>

#include <cmath>
#include <string>

#include "padicprob/complexity.hpp"
#include "padicprob/realization.hpp"
#include "support.hpp"

using namespace padicprob;

namespace {

// Oracle: the Kaspar-Schuster scan for the 1976 Lempel-Ziv phrase count.
std::size_t kaspar_schuster(const std::string& s) {
    const std::size_t n = s.size();
    if (n == 1) return 1;
    std::size_t c = 1, l = 1, i = 0, k = 1, kmax = 1;
    while (true) {
        if (s[i + k - 1] == s[l + k - 1]) {
            ++k;
            if (l + k > n) {
                ++c;
                break;
            }
        } else {
            kmax = std::max(k, kmax);
            ++i;
            if (i == l) {
                ++c;
                l += kmax;
                if (l + 1 > n) break;
                i = 0;
                k = 1;
                kmax = 1;
            } else {
                k = 1;
            }
        }
    }
    return c;
}

ComplexityProfile synthetic(double (*f)(double)) {
    ComplexityProfile pr{"synthetic", {}};
    for (int i = 1; i <= 12; ++i) {
        const auto n = static_cast<std::uint64_t>(1) << i;
        pr.points.push_back({n, f(static_cast<double>(n))});
    }
    return pr;
}

}  // namespace

TEST_CASE("lz76 on worked values") {
    CHECK(lz76(EventSequence::from_string("0")) == 1);
    CHECK(lz76(EventSequence::from_string("0000000000")) == 2);
    CHECK(lz76(EventSequence::from_string("0001101001000101")) == 6);
    CHECK_THROWS(lz76(EventSequence{}));
    CHECK(lz76_phrase_starts(EventSequence::from_string("0000000000")) == std::vector<std::uint64_t>{0, 1});
}

TEST_CASE("lz76 agrees with the Kaspar-Schuster scan") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t n = 1 + rng() % 300;
        std::string s;
        const int style = trial % 4;
        for (std::size_t i = 0; i < n; ++i) {
            char c = '0';
            switch (style) {
                case 0: c = (rng() & 1) ? '1' : '0'; break;
                case 1: c = (rng() % 10 == 0) ? '1' : '0'; break;
                case 2: c = ((i / (1 + trial % 7)) % 2) ? '1' : '0'; break;
                default: c = (i * i + trial) % 5 < 2 ? '1' : '0'; break;
            }
            s.push_back(c);
        }
        REQUIRE(lz76(EventSequence::from_string(s)) == kaspar_schuster(s));
    }
    // Every prefix of one long string, through the phrase-start profile.
    std::string s;
    for (int i = 0; i < 600; ++i) s.push_back((rng() % 3 == 0) ? '1' : '0');
    const auto starts = lz76_phrase_starts(EventSequence::from_string(s));
    for (std::size_t n = 1; n <= s.size(); ++n) {
        const auto count = static_cast<std::size_t>(std::lower_bound(starts.begin(), starts.end(), n) - starts.begin());
        REQUIRE(count == kaspar_schuster(s.substr(0, n)));
    }
}

TEST_CASE("lz76 bounds and prefix monotonicity") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto seq = test_support::coin_flips(2000, seed);
        const auto c = lz76(seq);
        CHECK(c >= 1);
        CHECK(c <= seq.size());
        for (std::size_t n : {1, 10, 100, 1000}) {
            CHECK(lz76(seq.prefix(n)) <= c);
        }
    }
}

TEST_CASE("normalized lz76 of fair coins") {
    const std::size_t n = 1 << 16;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const double c = static_cast<double>(lz76(test_support::coin_flips(n, seed)));
        const double normalized = c * std::log2(static_cast<double>(n)) / static_cast<double>(n);
        CHECK(normalized >= 0.8);
        CHECK(normalized <= 1.3);
    }
}

TEST_CASE("compressor proxy") {
    const DeflateCompressor deflate;
    const CheckedCompressor checked(deflate);
    const std::size_t n = 1 << 16;
    const EventSequence zeros(n);
    CHECK(static_cast<double>(compressor_size(zeros, checked)) < 0.02 * n);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto coin = test_support::coin_flips(n, seed);
        CHECK(static_cast<double>(compressor_size(coin, checked)) >= 0.95 * n);
    }
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto s = test_support::coin_flips(4096, 100 + seed);
        EventSequence doubled = s;
        for (std::size_t i = 0; i < s.size(); ++i) doubled.push_back(s[i]);
        CHECK(compressor_size(s, checked) <= compressor_size(doubled, checked));
    }

    struct Lossy final : Compressor {
        std::string id() const override { return "lossy"; }
        std::vector<std::uint8_t> compress(std::span<const std::uint8_t> in) const override {
            return {in.begin(), in.begin() + static_cast<std::ptrdiff_t>(in.size() / 2)};
        }
        std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> in, std::size_t size) const override {
            std::vector<std::uint8_t> out(in.begin(), in.end());
            out.resize(size);
            return out;
        }
    };
    const Lossy lossy;
    CHECK_THROWS_AS(CheckedCompressor{lossy}, InvalidCompressor);
}

TEST_CASE("profiles") {
    const EventSequence zeros(1 << 12);
    const auto pr = profile(zeros, 2.0);
    for (std::size_t i = 0; i < pr.points.size(); ++i) {
        if (i > 0) CHECK(pr.points[i].n > pr.points[i - 1].n);
        if (pr.points[i].n >= 2) CHECK(pr.points[i].complexity == 2.0);
    }
    CHECK(pr.to_csv().rfind("n,C\n1,1\n2,2\n", 0) == 0);
    CHECK_THROWS(profile(EventSequence(10), 2.0));

    const auto coin = test_support::coin_flips(1 << 12, 5);
    const auto cp = profile(coin, 2.0);
    for (std::size_t i = 1; i < cp.points.size(); ++i) {
        CHECK(cp.points[i].complexity >= cp.points[i - 1].complexity);
    }
}

TEST_CASE("fit_growth on synthetic profiles") {
    const auto linear = fit_growth(synthetic([](double n) { return n; }));
    CHECK(linear.kind == GrowthClass::linear);
    CHECK(linear.linear_fit.residual == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(linear.linear_fit.scale == doctest::Approx(1.0));

    const auto logarithmic = fit_growth(synthetic([](double n) { return std::log2(n); }));
    CHECK(logarithmic.kind == GrowthClass::logarithmic);
    CHECK(logarithmic.log_fit.residual == doctest::Approx(0.0).epsilon(1e-12));

    const auto flat = fit_growth(synthetic([](double) { return 2.0; }));
    CHECK(flat.kind == GrowthClass::logarithmic);
    CHECK(flat.flat);

    const auto saturated = fit_growth(synthetic([](double n) { return std::min(n, 16.0); }));
    CHECK(saturated.kind == GrowthClass::logarithmic);
    CHECK(saturated.flat);
    // A single equal pair at the top is not saturation.
    const auto late = fit_growth(synthetic([](double n) { return std::min(n, 2048.0); }));
    CHECK_FALSE(late.flat);

    const auto decreasing = fit_growth(synthetic([](double n) { return 100.0 - std::log2(n); }));
    CHECK(decreasing.linear_fit.scale == 0.0);
    CHECK(decreasing.log_fit.scale == 0.0);
    CHECK(decreasing.kind == GrowthClass::inconclusive);

    const auto sqrt_growth = fit_growth(synthetic([](double n) { return std::sqrt(n); }));
    CHECK(sqrt_growth.power_exponent == doctest::Approx(0.5));

    ComplexityProfile short_profile{"x", {{1, 1}, {2, 2}}};
    CHECK_THROWS(fit_growth(short_profile));
    CHECK(fit_growth(synthetic([](double n) { return n; })).to_json() == linear.to_json());
}

TEST_CASE("realization sequences grow logarithmically, coins linearly") {
    const auto pl = plan(to_digits(Rational(-1), PrimeBase(2), 14), 14);
    const auto seq = generate(pl);
    CHECK(fit_growth(profile(seq, 2.0)).kind == GrowthClass::logarithmic);
    CHECK(fit_growth(profile(test_support::coin_flips(1 << 16, 1), 2.0)).kind == GrowthClass::linear);
}
