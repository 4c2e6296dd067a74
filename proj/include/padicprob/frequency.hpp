#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "padicprob/padic.hpp"
#include "padicprob/sequence.hpp"

namespace padicprob {

/// Exact relative frequencies nu_N(0), nu_N(1) = n(alpha)/N at checkpoints.
struct FrequencyTrace {
    std::vector<std::uint64_t> checkpoints;
    std::vector<std::uint64_t> ones;
    std::vector<Rational> freq0;
    std::vector<Rational> freq1;

    std::size_t size() const noexcept { return checkpoints.size(); }

    /// CSV with header `N,n1,nu1_num,nu1_den`.
    std::string to_csv() const;
};

/// Checkpoints must be nonempty, strictly increasing, positive and no longer
/// than the sequence.
FrequencyTrace trace(const EventSequence& seq, std::span<const std::uint64_t> checkpoints);

/// ceil(scale * base^k) for k = 0, 1, ... while within `length`, deduplicated.
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t length, double base, double scale = 1.0);

enum class StabilizationStatus { stabilized, not_stabilized, undecided };

std::string to_string(StabilizationStatus status);

struct StabilizationVerdict {
    /// nullopt for the real topology, otherwise the prime of the p-adic one.
    std::optional<PrimeBase> prime;
    StabilizationStatus status = StabilizationStatus::undecided;
    std::optional<Rational> real_limit;
    std::optional<PAdicApprox> padic_limit;
    /// Real: largest pairwise |nu_N - nu_M| over the tail.
    /// p-adic: largest |nu_N - limit|_p over the tail.
    Rational evidence;

    bool stabilized() const noexcept { return status == StabilizationStatus::stabilized; }
};

/// Cauchy test of nu_N(1) in the real metric over the last `tail` checkpoints.
StabilizationVerdict real_stabilization(const FrequencyTrace& tr, double tolerance, std::size_t tail);

/// Digit-stabilization test in Q_p: the first `target_digits` p-adic digits of
/// nu_N(1) must coincide over the last `tail` checkpoints.
StabilizationVerdict padic_stabilization(const FrequencyTrace& tr, PrimeBase base,
                                         std::int64_t target_digits, std::size_t tail = 2);

enum class CollectiveClass { mises, padic, both, neither };

std::string to_string(CollectiveClass c);

struct CollectiveParams {
    /// Empty means geometric_checkpoints(length, p).
    std::vector<std::uint64_t> checkpoints;
    double tolerance = 1e-3;
    std::size_t tail = 3;
    std::int64_t digits = 8;
    /// Cap on the number of frequencies examined for the real verdict.
    std::size_t dense_points = 4096;
};

struct CollectiveReport {
    CollectiveClass kind = CollectiveClass::neither;
    StabilizationVerdict real;
    StabilizationVerdict padic;
    FrequencyTrace trace;
};

/// Combines both verdicts. The p-adic verdict is taken at the checkpoints;
/// the real verdict is taken over every N (strided to `dense_points`) in
/// the span of the last `tail` checkpoints, since real convergence concerns
/// the whole frequency sequence rather than a subsequence.
CollectiveReport classify_collective(const EventSequence& seq, PrimeBase base,
                                     const CollectiveParams& params = {});

}  // namespace padicprob
