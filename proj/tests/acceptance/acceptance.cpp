// One line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "padicprob/complexity.hpp"
#include "padicprob/interference.hpp"
#include "padicprob/io.hpp"
#include "padicprob/padic.hpp"
#include "padicprob/realization.hpp"
#include "padicprob/scenario.hpp"
#include "padicprob/stats.hpp"
#include "support.hpp"

using namespace padicprob;
namespace fs = std::filesystem;

namespace {

// Pinned thresholds.
constexpr std::size_t kUltrametricPairs = 100000;
constexpr double kUltrametricSeconds = 10;

constexpr std::int64_t kRealizeMaxDepth = 12;
// Sequence length grows like p^K; for p = 13 the depth stops where N_K stays below 2^30.
constexpr std::int64_t kRealizeDepth13 = 8;
constexpr double kRealizeSeconds = 30;

constexpr int kSeparationTrials = 30;
constexpr std::size_t kCoinLength = 1 << 16;
constexpr double kSeparationAccuracy = 0.95;
constexpr double kSeparationSeconds = 120;

constexpr int kFidelitySeeds = 10;
constexpr std::uint64_t kFidelityTrials = 100000;
constexpr std::uint64_t kFreshTrials = 1000000;
constexpr double kFidelityAlpha = 0.01;
constexpr double kCoherentVisibility = 0.95;
constexpr double kFreshVisibility = 0.05;
constexpr double kFidelitySeconds = 60;

constexpr int kTrendSeeds = 10;
constexpr std::uint64_t kTrendTrials = 1000000;
constexpr double kTrendNoiseFloor = 0.02;
constexpr double kTrendSeconds = 300;

constexpr int kDispersionReplicas = 200;
constexpr std::size_t kDispersionWindows = 1000;
constexpr std::size_t kPowerWindows = 10000;
constexpr double kDispersionAlpha = 0.01;
constexpr double kBurstFraction = 0.02;
constexpr double kAcceptTarget = 0.99;
constexpr double kAcceptTolerance = 0.015;
constexpr double kMinPower = 0.5;
constexpr double kDispersionSeconds = 120;

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

Outcome timed(double budget, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o = body();
    const double elapsed = seconds_since(start);
    o.detail += "; " + fixed(elapsed, 1) + " s of " + fixed(budget, 0) + " s";
    o.pass = o.pass && elapsed < budget;
    return o;
}

Outcome ultrametric() {
    std::size_t violations = 0;
    std::string worst;
    for (std::uint64_t p : {2, 3, 5, 1997}) {
        const PrimeBase base(p);
        std::mt19937_64 rng(1000 + p);
        for (std::size_t i = 0; i < kUltrametricPairs; ++i) {
            const auto x = test_support::random_rational(rng, p);
            const auto y = test_support::random_rational(rng, p);
            const auto nx = norm(x, base), ny = norm(y, base);
            const bool strong = norm(x + y, base) <= std::max(nx, ny);
            const bool multiplicative = norm(x * y, base) == nx * ny;
            if (!strong || !multiplicative) {
                ++violations;
                worst = "p=" + std::to_string(p) + " x=" + x.to_string() + " y=" + y.to_string();
            }
        }
    }
    return {violations == 0, std::to_string(4 * kUltrametricPairs) + " pairs, " + std::to_string(violations) +
                                 " violations" + (worst.empty() ? "" : " (" + worst + ")")};
}

Outcome realization_soundness() {
    std::size_t plans = 0, failures = 0;
    std::string failed;
    auto check = [&](const PAdicApprox& target, std::int64_t depth, const std::string& label) {
        const auto pl = plan(target, depth);
        const auto report = verify(generate(pl), target, depth, pl.rows);
        ++plans;
        if (!report.pass) {
            ++failures;
            failed = label + " K=" + std::to_string(depth);
        }
    };
    for (std::uint64_t p : {2, 3, 5}) {
        const PrimeBase base(p);
        for (const Rational& q : {Rational(-1), Rational(2), Rational(100), Rational(5, 3)}) {
            const auto v = valuation(q, base);
            const std::int64_t shift = v && *v < 0 ? -*v : 0;
            const auto target = to_digits(q, base, kRealizeMaxDepth + shift);
            for (std::int64_t k = 1; k <= kRealizeMaxDepth; ++k) {
                check(target, k, q.to_string() + " p=" + std::to_string(p));
            }
        }
    }
    for (std::uint64_t p : {5, 13}) {
        const std::int64_t max_depth = p == 13 ? kRealizeDepth13 : kRealizeMaxDepth;
        const auto root = hensel_sqrt(Rational(-1), PrimeBase(p), max_depth);
        if (!root) return {false, "no square root of -1 at p=" + std::to_string(p)};
        for (std::int64_t k = 1; k <= max_depth; ++k) {
            check(*root, k, "sqrt(-1) p=" + std::to_string(p));
        }
    }
    const auto worked = plan(to_digits(Rational(-1), PrimeBase(2), 3), 3);
    const bool rows_ok = worked.rows == std::vector<PlanRow>{{3, 1}, {7, 5}, {15, 9}};
    return {failures == 0 && rows_ok,
            std::to_string(plans) + " plans (p=13 to depth " + std::to_string(kRealizeDepth13) + "), " +
                std::to_string(failures) + " failed" + (failed.empty() ? "" : " (" + failed + ")") +
                ", worked rows " + (rows_ok ? "(3,1),(7,5),(15,9)" : "differ")};
}

Outcome separation() {
    // Rows: truth (iid, realization); columns: verdict (linear, logarithmic, inconclusive).
    int confusion[2][3] = {};
    auto column = [](GrowthClass c) { return c == GrowthClass::linear ? 0 : c == GrowthClass::logarithmic ? 1 : 2; };
    for (int trial = 0; trial < kSeparationTrials; ++trial) {
        const auto coin = test_support::coin_flips(kCoinLength, 5000 + trial);
        ++confusion[0][column(fit_growth(profile(coin, 2.0)).kind)];

        std::mt19937_64 rng(7000 + trial);
        const std::uint64_t p = trial % 2 == 0 ? 2 : 3;
        const std::int64_t depth = p == 2 ? 12 + static_cast<std::int64_t>(rng() % 5) : 12;
        const Rational q(BigInt(static_cast<long>(rng() % 201) - 100), BigInt(static_cast<unsigned long>(1 + rng() % 9)));
        const PrimeBase base(p);
        const auto v = valuation(q, base);
        const std::int64_t shift = v && *v < 0 ? -*v : 0;
        const auto pl = plan(to_digits(q, base, depth + shift), depth);
        ++confusion[1][column(fit_growth(profile(generate(pl), static_cast<double>(p))).kind)];
    }
    const double iid_accuracy = confusion[0][0] / static_cast<double>(kSeparationTrials);
    const double real_accuracy = confusion[1][1] / static_cast<double>(kSeparationTrials);
    std::ostringstream detail;
    detail << "accuracy iid " << fixed(iid_accuracy, 3) << ", realization " << fixed(real_accuracy, 3)
           << "; confusion [linear, logarithmic, inconclusive] iid [" << confusion[0][0] << ", " << confusion[0][1]
           << ", " << confusion[0][2] << "] realization [" << confusion[1][0] << ", " << confusion[1][1] << ", "
           << confusion[1][2] << "]";
    return {iid_accuracy >= kSeparationAccuracy && real_accuracy >= kSeparationAccuracy, detail.str()};
}

ScenarioSpec fidelity_spec(const char* scenario, std::uint64_t seed, std::uint64_t trials, double strength) {
    nlohmann::json doc{{"scenario", scenario},
                       {"seed", seed},
                       {"trials", trials},
                       {"rate", 1000.0},
                       {"kernel", {{"strength", strength}}}};
    return ScenarioSpec::from_json(doc);
}

Outcome simulator_fidelity() {
    bool pass = true;
    double first_p = 0, min_coherent = 1, max_fresh = 0;
    for (int s = 1; s <= kFidelitySeeds; ++s) {
        const auto seq = fidelity_spec("sequential", s, kFidelityTrials, 0.0);
        const auto records = run_scenario(seq);
        const auto h = aggregate(records, GroupBy::none, seq.apparatus.screen_bins).front();
        if (s == 1) {
            const std::vector<std::uint32_t> open{seq.xi, seq.eta};
            first_p = chi_square_gof(h.counts, quantum_distribution(seq.apparatus, open)).p_value;
            pass = pass && first_p > kFidelityAlpha;
        }
        const double v_coherent = visibility(h, seq.analysis.smoothing_window);

        const auto fresh = fidelity_spec("fresh-apparatus-ensemble", s, kFreshTrials, 1.0);
        const auto fh = aggregate(run_scenario(fresh), GroupBy::none, fresh.apparatus.screen_bins).front();
        const double v_fresh = visibility(fh, fresh.analysis.smoothing_window);

        min_coherent = std::min(min_coherent, v_coherent);
        max_fresh = std::max(max_fresh, v_fresh);
        pass = pass && v_coherent >= kCoherentVisibility && v_fresh <= kFreshVisibility && v_fresh < v_coherent;
    }
    return {pass, "chi-square p " + fixed(first_p) + " (seed 1), min sequential visibility " + fixed(min_coherent) +
                      ", max fresh visibility " + fixed(max_fresh) + " over " + std::to_string(kFidelitySeeds) +
                      " seeds"};
}

Outcome two_slit_trend() {
    bool pass = true;
    std::ostringstream detail;
    for (int s = 1; s <= kTrendSeeds; ++s) {
        std::vector<double> v;
        for (std::uint32_t n : {4u, 16u, 64u}) {
            nlohmann::json doc{{"scenario", "random-two-slit"},
                               {"seed", s},
                               {"trials", kTrendTrials},
                               {"rate", 1000.0},
                               {"slits", n},
                               {"kernel", {{"strength", 0.2}, {"time_constant", 1.0}, {"window", 50}}}};
            const auto spec = ScenarioSpec::from_json(doc);
            v.push_back(mean_pair_visibility(run_scenario(spec), spec.apparatus, spec.analysis.phase_bins));
        }
        const bool ok = v[1] <= v[0] + kTrendNoiseFloor && v[2] <= v[1] + kTrendNoiseFloor;
        pass = pass && ok;
        if (s > 1) detail << ", ";
        detail << "seed " << s << " [" << fixed(v[0], 3) << " " << fixed(v[1], 3) << " " << fixed(v[2], 3) << "]"
               << (ok ? "" : " VIOLATION");
    }
    return {pass, "mean pair visibility at N=4,16,64: " + detail.str()};
}

Outcome dispersion_calibration() {
    std::mt19937_64 rng(42);
    std::poisson_distribution<std::uint64_t> poisson(10.0);
    int accepted = 0;
    for (int r = 0; r < kDispersionReplicas; ++r) {
        std::vector<std::uint64_t> counts(kDispersionWindows);
        for (auto& c : counts) c = poisson(rng);
        accepted += poisson_dispersion_test(counts, kDispersionAlpha).reject ? 0 : 1;
    }
    int detected = 0;
    for (int r = 0; r < kDispersionReplicas; ++r) {
        std::vector<std::uint64_t> counts(kPowerWindows);
        for (auto& c : counts) c = poisson(rng);
        const auto burst = inject_burst_duplication(counts, kBurstFraction, rng);
        const auto report = poisson_dispersion_test(burst, kDispersionAlpha);
        detected += report.reject && report.verdict == DispersionVerdict::over_dispersed ? 1 : 0;
    }
    const double rate = accepted / static_cast<double>(kDispersionReplicas);
    const double power = detected / static_cast<double>(kDispersionReplicas);
    return {std::abs(rate - kAcceptTarget) <= kAcceptTolerance && power >= kMinPower,
            "acceptance " + fixed(rate, 3) + " (target " + fixed(kAcceptTarget, 2) + " +- " +
                fixed(kAcceptTolerance, 3) + "), power " + fixed(power, 3) + " at " + std::to_string(kPowerWindows) +
                " windows"};
}

/// Every regular file under `dir`, relative path to contents.
std::vector<std::pair<std::string, std::string>> snapshot(const fs::path& dir) {
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file()) {
            files.emplace_back(fs::relative(entry.path(), dir).string(), read_file(entry.path()));
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

Outcome reproducibility() {
    const fs::path root = fs::absolute("acceptance-reproducibility");
    fs::remove_all(root);
    fs::create_directories(root);
    write_file_atomic(root / "random.json", R"({"scenario": "random-two-slit", "seed": 11, "trials": 20000,
        "rate": 1000, "slits": 8, "kernel": {"strength": 0.2, "time_constant": 1.0, "window": 50}})");
    write_file_atomic(root / "sweep.json", R"({"scenario": "rate-sweep", "seed": 12, "trials": 5000,
        "rates": [100, 1000, 10000], "kernel": {"strength": 0.1, "site": "source"}})");

    const fs::path dir = root / "out";
    // Each entry is a chain of command lines run into the same output directory.
    const std::vector<std::vector<std::vector<std::string>>> runs{
        {{"realize", "-p", "3", "-q", "5/3", "-K", "9", "--fill", "shuffle:4", "-o", dir.string()},
         {"analyze", (dir / "sequence.bits").string(), "-p", "3", "--plan", (dir / "plan.csv").string(),
          "--compressor", "-o", dir.string()}},
        {{"simulate", (root / "random.json").string(), "--replicas", "3", "-o", dir.string()},
         {"report", (dir / "replica-0").string()}},
        {{"simulate", (root / "sweep.json").string(), "-o", dir.string()}, {"report", dir.string()}},
    };
    std::size_t compared = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        std::vector<std::vector<std::pair<std::string, std::string>>> outputs;
        std::vector<std::string> stdouts;
        for (int repetition = 0; repetition < 2; ++repetition) {
            fs::remove_all(dir);
            std::ostringstream out, err;
            for (const auto& args : runs[i]) {
                if (cli::run(args, out, err) != cli::ok) {
                    return {false, args[0] + " failed: " + err.str()};
                }
            }
            outputs.push_back(snapshot(dir));
            stdouts.push_back(out.str());
        }
        if (outputs[0] != outputs[1] || stdouts[0] != stdouts[1]) {
            return {false, "command chain " + std::to_string(i) + " differs between repetitions"};
        }
        compared += outputs[0].size();
    }
    fs::remove_all(root);
    return {true, std::to_string(runs.size()) + " command chains repeated, " + std::to_string(compared) +
                      " output files and stdout byte-identical"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget;
        std::function<Outcome()> body;
    };
    const std::vector<Criterion> criteria{
        {1, "ultrametric property suite", kUltrametricSeconds, ultrametric},
        {2, "realization soundness", kRealizeSeconds, realization_soundness},
        {3, "complexity-growth separation", kSeparationSeconds, separation},
        {4, "simulator fidelity", kFidelitySeconds, simulator_fidelity},
        {5, "random two-slit visibility trend", kTrendSeconds, two_slit_trend},
        {6, "dispersion test calibration", kDispersionSeconds, dispersion_calibration},
        {7, "CLI reproducibility", 600, reproducibility},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = timed(c.budget, c.body);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " " << c.name << ": " << o.detail
                  << std::endl;
        failed += o.pass ? 0 : 1;
    }
    std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
