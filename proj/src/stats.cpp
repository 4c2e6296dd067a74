#include "padicprob/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <json.hpp>

namespace padicprob {
namespace {

double upper_tail(double statistic, std::size_t dof) {
    if (dof == 0) {
        return 1.0;
    }
    boost::math::chi_squared dist(static_cast<double>(dof));
    return boost::math::cdf(boost::math::complement(dist, statistic));
}

}  // namespace

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed, std::span<const double> probabilities,
                               double min_expected) {
    if (observed.size() != probabilities.size() || observed.empty()) {
        throw std::invalid_argument("observed and expected cell counts differ");
    }
    double total = 0;
    for (auto o : observed) {
        total += static_cast<double>(o);
    }
    struct Cell {
        double observed;
        double expected;
    };
    std::vector<Cell> cells;
    Cell pending{0, 0};
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (probabilities[i] <= 0.0) {
            if (observed[i] > 0) {
                return {std::numeric_limits<double>::infinity(), observed.size() - 1, 0.0};
            }
            continue;
        }
        pending.observed += static_cast<double>(observed[i]);
        pending.expected += total * probabilities[i];
        if (pending.expected >= min_expected) {
            cells.push_back(pending);
            pending = {0, 0};
        }
    }
    if (pending.expected > 0) {
        if (cells.empty()) {
            cells.push_back(pending);
        } else {
            cells.back().observed += pending.observed;
            cells.back().expected += pending.expected;
        }
    }
    ChiSquareResult result;
    for (const auto& cell : cells) {
        const double d = cell.observed - cell.expected;
        result.statistic += d * d / cell.expected;
    }
    result.dof = cells.empty() ? 0 : cells.size() - 1;
    result.p_value = upper_tail(result.statistic, result.dof);
    return result;
}

ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                                      double min_pooled) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("two-sample chi-square needs histograms over the same cells");
    }
    double na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += static_cast<double>(a[i]);
        nb += static_cast<double>(b[i]);
    }
    if (na == 0 || nb == 0) {
        throw std::invalid_argument("two-sample chi-square on an empty histogram");
    }
    const double ka = std::sqrt(nb / na);
    const double kb = std::sqrt(na / nb);
    std::vector<std::pair<double, double>> cells;
    std::pair<double, double> pending{0, 0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        pending.first += static_cast<double>(a[i]);
        pending.second += static_cast<double>(b[i]);
        if (pending.first + pending.second >= min_pooled) {
            cells.push_back(pending);
            pending = {0, 0};
        }
    }
    if (pending.first + pending.second > 0) {
        if (cells.empty()) {
            cells.push_back(pending);
        } else {
            cells.back().first += pending.first;
            cells.back().second += pending.second;
        }
    }
    ChiSquareResult result;
    for (const auto& [x, y] : cells) {
        const double d = ka * x - kb * y;
        result.statistic += d * d / (x + y);
    }
    result.dof = cells.empty() ? 0 : cells.size() - 1;
    result.p_value = upper_tail(result.statistic, result.dof);
    return result;
}

std::string to_string(DispersionVerdict v) {
    switch (v) {
        case DispersionVerdict::consistent: return "consistent";
        case DispersionVerdict::under_dispersed: return "under-dispersed";
        case DispersionVerdict::over_dispersed: return "over-dispersed";
    }
    return "consistent";
}

std::string DispersionReport::to_json() const {
    nlohmann::ordered_json doc{{"mean", mean},           {"variance", variance}, {"dispersion", dispersion},
                               {"statistic", statistic}, {"dof", dof},           {"p_value", p_value},
                               {"alpha", alpha},         {"reject", reject},     {"verdict", to_string(verdict)}};
    return doc.dump();
}

DispersionReport poisson_dispersion_test(std::span<const std::uint64_t> counts, double alpha) {
    if (counts.size() < 20) {
        throw std::invalid_argument("dispersion test needs at least 20 count windows, got " +
                                    std::to_string(counts.size()));
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("alpha must lie in (0, 1)");
    }
    DispersionReport report;
    report.alpha = alpha;
    const double n = static_cast<double>(counts.size());
    double sum = 0;
    for (auto c : counts) {
        sum += static_cast<double>(c);
    }
    report.mean = sum / n;
    if (report.mean == 0.0) {
        throw std::invalid_argument("dispersion test on windows with zero mean count");
    }
    double ss = 0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - report.mean;
        ss += d * d;
    }
    report.variance = ss / (n - 1);
    report.dispersion = report.variance / report.mean;
    report.dof = counts.size() - 1;
    report.statistic = static_cast<double>(report.dof) * report.dispersion;
    boost::math::chi_squared dist(static_cast<double>(report.dof));
    const double lower = boost::math::cdf(dist, report.statistic);
    const double upper = boost::math::cdf(boost::math::complement(dist, report.statistic));
    report.p_value = std::min(1.0, 2.0 * std::min(lower, upper));
    report.reject = report.p_value < alpha;
    if (report.reject) {
        report.verdict = report.statistic < static_cast<double>(report.dof) ? DispersionVerdict::under_dispersed
                                                                            : DispersionVerdict::over_dispersed;
    }
    return report;
}

std::vector<std::uint64_t> inject_burst_duplication(std::span<const std::uint64_t> counts, double fraction,
                                                    std::mt19937_64& rng) {
    std::bernoulli_distribution hit(fraction);
    std::vector<std::uint64_t> out(counts.begin(), counts.end());
    for (auto& c : out) {
        if (hit(rng)) {
            c *= 2;
        }
    }
    return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace padicprob
