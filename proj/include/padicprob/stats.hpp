#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace padicprob {

struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
};

/// Pearson goodness of fit of observed counts against a distribution.
/// Adjacent cells are pooled until each pooled cell expects at least
/// `min_expected` events. Counts in a zero-probability cell give p = 0.
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed, std::span<const double> probabilities,
                               double min_expected = 5.0);

/// Two-sample chi-square homogeneity test of two histograms over the same cells.
ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                                      double min_pooled = 10.0);

enum class DispersionVerdict { consistent, under_dispersed, over_dispersed };

std::string to_string(DispersionVerdict v);

struct DispersionReport {
    double mean = 0.0;
    double variance = 0.0;
    /// Index of dispersion D = variance / mean.
    double dispersion = 0.0;
    /// (n - 1) D, chi-square with n - 1 degrees of freedom under the Poisson null.
    double statistic = 0.0;
    std::size_t dof = 0;
    /// Two-sided.
    double p_value = 1.0;
    double alpha = 0.0;
    bool reject = false;
    DispersionVerdict verdict = DispersionVerdict::consistent;

    std::string to_json() const;
};

/// Index-of-dispersion test of counting-window totals against Poisson
/// statistics. Needs at least 20 windows and a positive mean.
DispersionReport poisson_dispersion_test(std::span<const std::uint64_t> counts, double alpha);

/// Each window independently, with probability `fraction`, has its burst
/// recorded twice (count doubled).
std::vector<std::uint64_t> inject_burst_duplication(std::span<const std::uint64_t> counts, double fraction,
                                                    std::mt19937_64& rng);

/// SplitMix64 finalizer, used to derive independent replica seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace padicprob
