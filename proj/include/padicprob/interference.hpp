#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace padicprob {

/// Point slits on a shield and a binned screen in the far field.
struct ApparatusConfig {
    std::vector<double> slit_positions;  // meters, on the shield
    double wavelength = 500e-9;          // meters
    double screen_distance = 1.0;        // meters
    double screen_min = -0.05;           // meters
    double screen_max = 0.05;
    std::size_t screen_bins = 65;

    /// Throws std::invalid_argument describing the first violated invariant.
    void validate() const;

    double bin_width() const { return (screen_max - screen_min) / static_cast<double>(screen_bins); }
    double bin_center(std::size_t bin) const { return screen_min + (static_cast<double>(bin) + 0.5) * bin_width(); }

    /// Two slits at +-spacing/2; the screen spans `periods` fringe periods on
    /// each side of the axis, with `bins_per_period` bins per period and a
    /// bin centered on the axis.
    static ApparatusConfig two_slit(double spacing = 20e-6, double wavelength = 500e-9, double distance = 1.0,
                                    std::size_t periods = 2, std::size_t bins_per_period = 16);

    /// `count` slits spaced `spacing` apart; the screen spans one fringe period
    /// of the unit spacing, so a pair s slits apart shows exactly s periods.
    static ApparatusConfig slit_array(std::size_t count, double spacing = 20e-6, double wavelength = 500e-9,
                                      double distance = 1.0, std::size_t bins = 512);
};

/// |sum_j exp(i 2 pi y_j Y / (lambda L))|^2 at the center of `bin`.
double intensity(const ApparatusConfig& cfg, std::span<const std::uint32_t> open, std::size_t bin);

/// sum_j |phasor_j|^2: the same slits without the cross terms.
double classical_intensity(const ApparatusConfig& cfg, std::span<const std::uint32_t> open, std::size_t bin);

/// Per-bin probabilities of the interference pattern, summing to 1.
std::vector<double> quantum_distribution(const ApparatusConfig& cfg, std::span<const std::uint32_t> open);
std::vector<double> classical_distribution(const ApparatusConfig& cfg, std::span<const std::uint32_t> open);

/// (1 - coherence) classical + coherence quantum.
std::vector<double> mixture_distribution(const ApparatusConfig& cfg, std::span<const std::uint32_t> open,
                                         double coherence);

enum class MemorySite { source, aperture, screen };

std::string to_string(MemorySite site);
MemorySite parse_memory_site(const std::string& text);

/// Inter-trial memory. With strength g, saturation g_eff, time constant tau
/// and recency window W, the coherence of a trial is
///
///     c = g_eff (1 - (1 - g)^m),   m = sum over the last W prior trials with
///                                      the same memory key of exp(-dt/tau).
///
/// g = 0 is the identity kernel: every trial is fully coherent (standard
/// quantum sampling).
struct MemoryKernel {
    MemorySite site = MemorySite::aperture;
    double strength = 0.0;
    double saturation = 1.0;
    double time_constant = std::numeric_limits<double>::infinity();
    std::size_t window = 64;

    void validate() const;
    bool identity() const noexcept { return strength == 0.0; }
};

/// Identity of the exchangeable parts of an apparatus.
struct ComponentIds {
    std::uint64_t source = 0;
    std::uint64_t shield = 0;
    std::uint64_t screen = 0;
};

struct TrialRecord {
    std::uint64_t index = 0;
    double time = 0.0;
    std::uint32_t xi = 0;
    std::uint32_t eta = 0;
    std::uint32_t bin = 0;
    std::uint64_t apparatus = 0;

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// What is known about a trial before its detection is sampled.
struct TrialSetup {
    std::uint64_t index = 0;
    double time = 0.0;
    std::uint32_t xi = 0;
    std::uint32_t eta = 1;
    ComponentIds components;
    std::uint64_t apparatus = 0;
};

/// Sequential detection sampler with memory. Trials are order dependent;
/// one instance drives one run.
class Simulator {
public:
    Simulator(ApparatusConfig cfg, MemoryKernel kernel);

    /// Coherence the next trial with this setup would see.
    double coherence(const TrialSetup& setup) const;

    /// Samples the detection bin from the mixture and records the trial in memory.
    TrialRecord sample_trial(const TrialSetup& setup, std::mt19937_64& rng);

    const ApparatusConfig& config() const noexcept { return cfg_; }
    const MemoryKernel& kernel() const noexcept { return kernel_; }

private:
    using Key = std::pair<std::uint32_t, std::uint32_t>;

    std::uint64_t site_component(const ComponentIds& ids) const;
    Key memory_key(const TrialSetup& setup) const;
    double memory_mass(const TrialSetup& setup) const;
    const std::vector<double>& cdf(bool coherent, std::uint32_t xi, std::uint32_t eta);

    ApparatusConfig cfg_;
    MemoryKernel kernel_;
    std::uint64_t current_component_ = 0;
    bool seen_component_ = false;
    std::map<Key, std::vector<double>> history_;
    std::map<std::pair<Key, bool>, std::vector<double>> cdf_cache_;
};

/// Inverse transform: index of the first cell whose cumulative mass exceeds u.
std::size_t sample_index(std::span<const double> cdf, double u);

struct Histogram {
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;
    std::string key;
};

enum class GroupBy { slit_pair, apparatus, none };

GroupBy parse_group_by(const std::string& text);

/// Partitions records into per-group screen histograms. Slit-pair groups are
/// ordered pairs (xi, eta), keyed "xi-eta"; apparatus groups "apparatus-<id>";
/// the single ungrouped histogram "all".
std::vector<Histogram> aggregate(std::span<const TrialRecord> records, GroupBy group_by, std::size_t bins);

/// CSV `bin_center,count`.
std::string histogram_csv(const Histogram& h, const ApparatusConfig& cfg);

/// (I_max - I_min) / (I_max + I_min) of the moving average (odd window, full
/// windows only) of the histogram.
double visibility(const Histogram& h, std::size_t smoothing_window = 1);

/// Re-bins a pair's screen histogram by fringe phase frac((y_xi - y_eta) Y / (lambda L))
/// into `phase_bins` cells, so every pair's fringes land on a common axis.
Histogram fold_fringe_phase(const Histogram& h, const ApparatusConfig& cfg, std::uint32_t xi, std::uint32_t eta,
                            std::size_t phase_bins = 8);

/// Mean over two-slit configurations (xi != eta) of the phase-folded visibility.
double mean_pair_visibility(std::span<const TrialRecord> records, const ApparatusConfig& cfg,
                            std::size_t phase_bins = 8);

/// Arrivals per consecutive window of `width` seconds, from time 0 to the last arrival.
std::vector<std::uint64_t> window_counts(std::span<const TrialRecord> records, double width);

}  // namespace padicprob
