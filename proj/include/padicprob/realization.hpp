#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "padicprob/padic.hpp"
#include "padicprob/sequence.hpp"

namespace padicprob {

class PrecisionInsufficient : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct PlanRow {
    std::uint64_t total = 0;  // N_k
    std::uint64_t ones = 0;   // n_k
    friend bool operator==(const PlanRow&, const PlanRow&) = default;
};

/// Checkpoints (N_k, n_k), k = 1..depth, with |n_k/N_k - target|_p <= p^-k.
struct CheckpointPlan {
    PrimeBase base;
    PAdicApprox target;
    std::int64_t depth = 0;
    /// v = max(0, -ord_p target); every N_k is divisible by p^v.
    std::int64_t shift = 0;
    std::vector<PlanRow> rows;

    /// p^-k for row k (1-based).
    Rational bound(std::int64_t k) const;

    std::vector<std::uint64_t> checkpoints() const;

    /// CSV with header `k,N_k,n_k,bound_num,bound_den`.
    std::string to_csv() const;
};

/// Rows of a plan CSV; only the N_k and n_k columns are read.
std::vector<PlanRow> parse_plan_csv(std::string_view csv);

/// Builds the plan by residue windows. With P_k = p^(k+v):
///   N_k: the least multiple of p^v, with cofactor prime to p, that is at
///        least max(N_{k-1} + P_k, growth * N_{k-1});
///   n_k: the unique integer in (n_{k-1}, n_{k-1} + P_k] congruent to
///        target * N_k modulo P_k.
/// The window N_k - N_{k-1} >= P_k keeps every row feasible.
CheckpointPlan plan(const PAdicApprox& target, std::int64_t depth, double growth = 1.0);

enum class FillMode { block, spread, seeded_shuffle };

/// Order of the labels inside each window; never changes the counts.
struct FillPolicy {
    FillMode mode = FillMode::block;
    std::uint64_t seed = 0;

    /// "block", "spread" or "shuffle[:seed]".
    static FillPolicy parse(std::string_view text);
    std::string to_string() const;
};

/// The prefix of length N_k holds exactly n_k ones, for every k.
EventSequence generate(const CheckpointPlan& plan, const FillPolicy& fill = {});

struct VerificationRow {
    std::int64_t k = 0;
    std::uint64_t total = 0;
    std::uint64_t ones = 0;
    Rational frequency;
    Rational distance;
    Rational bound;
    bool pass = false;
};

struct VerificationReport {
    std::vector<VerificationRow> rows;
    bool pass = false;

    std::string to_json() const;
};

/// Counts ones in the sequence at each N_k and checks
/// |nu_{N_k}(1) - target|_p <= p^-k exactly.
VerificationReport verify(const EventSequence& seq, const PAdicApprox& target, std::int64_t depth,
                          std::span<const PlanRow> rows);

}  // namespace padicprob
