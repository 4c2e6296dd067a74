#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "padicprob/interference.hpp"

namespace padicprob {

enum class ScenarioKind {
    sequential,
    fresh_apparatus_ensemble,
    cycle_reset,
    rate_sweep,
    exponential_schedule,
    random_two_slit,
};

std::string to_string(ScenarioKind kind);

/// Every schema violation found in a document, in document order.
class SpecError : public std::invalid_argument {
public:
    explicit SpecError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// Analysis settings carried with the spec so a run's metrics are reproducible.
struct AnalysisSettings {
    std::size_t smoothing_window = 1;
    std::size_t phase_bins = 8;
    /// Poisson counting window in seconds; 0 selects 10 / rate.
    double count_window = 0.0;
    double alpha = 0.01;
};

/// A complete, validated simulation request. The JSON schema is documented in
/// docs/scenario-schema.md; `to_json` emits the canonical form with every
/// default filled in, which is what the spec hash covers.
struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::sequential;
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    /// Mean arrivals per second.
    double rate = 1000.0;
    ApparatusConfig apparatus;
    MemoryKernel kernel;
    /// Open slits for every scenario except random-two-slit; equal indices open one slit.
    std::uint32_t xi = 0;
    std::uint32_t eta = 1;
    /// fresh-apparatus-ensemble: which components are replaced after every particle.
    std::vector<MemorySite> renew{MemorySite::source, MemorySite::aperture, MemorySite::screen};
    /// cycle-reset: particles per measurement cycle.
    std::uint64_t cycle_length = 0;
    /// rate-sweep: one setting per rate, `trials` particles each.
    std::vector<double> rates;
    /// exponential-schedule: particle n arrives at time_unit * base^n.
    std::uint64_t base = 2;
    double time_unit = 1.0;
    /// random-two-slit: number of slits, a power of two.
    std::uint32_t slits = 0;
    AnalysisSettings analysis;

    static ScenarioSpec from_json(const nlohmann::json& doc);
    static ScenarioSpec parse(const std::string& text);
    nlohmann::json to_json() const;
    std::string hash() const;
    double count_window() const;
};

/// Runs the scenario as one sequential state machine seeded by `spec.seed`.
std::vector<TrialRecord> run_scenario(const ScenarioSpec& spec);

/// {"spec_hash", "seed", "version", "scenario"}.
nlohmann::ordered_json provenance(const ScenarioSpec& spec);

/// Provenance line followed by one `{t,time,xi,eta,bin,apparatus}` line per record.
std::string to_ndjson(const ScenarioSpec& spec, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> parse_ndjson(const std::string& text);

/// Grouping a scenario's metrics use by default.
GroupBy default_grouping(ScenarioKind kind);

/// Visibility per group, mean per-configuration visibility for
/// random-two-slit, and the Poisson dispersion verdict on arrival counts.
nlohmann::ordered_json scenario_metrics(const ScenarioSpec& spec, const std::vector<TrialRecord>& records);

}  // namespace padicprob
