#include "padicprob/interference.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace padicprob {
namespace {

std::complex<double> phasor(const ApparatusConfig& cfg, std::uint32_t slit, double y) {
    const double phase = 2.0 * std::numbers::pi * cfg.slit_positions[slit] * y / (cfg.wavelength * cfg.screen_distance);
    return std::polar(1.0, phase);
}

void check_open(const ApparatusConfig& cfg, std::span<const std::uint32_t> open) {
    if (open.empty()) {
        throw std::invalid_argument("no open slits");
    }
    for (auto s : open) {
        if (s >= cfg.slit_positions.size()) {
            throw std::invalid_argument("slit index " + std::to_string(s) + " out of range");
        }
    }
}

std::vector<double> normalized(std::vector<double> weights) {
    double total = 0;
    for (double w : weights) {
        total += w;
    }
    if (!(total > 0)) {
        throw std::invalid_argument("intensity vanishes on every screen bin");
    }
    for (double& w : weights) {
        w /= total;
    }
    return weights;
}

std::vector<double> cumulative(const std::vector<double>& probabilities) {
    std::vector<double> cdf(probabilities.size());
    double acc = 0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        acc += probabilities[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;
    return cdf;
}

double fractional(double x) {
    return x - std::floor(x);
}

}  // namespace

void ApparatusConfig::validate() const {
    if (slit_positions.empty()) {
        throw std::invalid_argument("apparatus needs at least one slit");
    }
    if (!(wavelength > 0) || !std::isfinite(wavelength)) {
        throw std::invalid_argument("wavelength must be positive");
    }
    if (!(screen_distance > 0) || !std::isfinite(screen_distance)) {
        throw std::invalid_argument("screen distance must be positive");
    }
    if (!(screen_max > screen_min) || !std::isfinite(screen_min) || !std::isfinite(screen_max)) {
        throw std::invalid_argument("screen interval must be non-empty");
    }
    if (screen_bins < 8) {
        throw std::invalid_argument("screen needs at least 8 bins");
    }
    for (double y : slit_positions) {
        if (!std::isfinite(y)) {
            throw std::invalid_argument("slit positions must be finite");
        }
    }
}

ApparatusConfig ApparatusConfig::two_slit(double spacing, double wavelength, double distance, std::size_t periods,
                                          std::size_t bins_per_period) {
    if (!(spacing > 0) || periods == 0 || bins_per_period < 2) {
        throw std::invalid_argument("two-slit geometry needs positive spacing, periods and bins per period");
    }
    ApparatusConfig cfg;
    cfg.slit_positions = {-spacing / 2, spacing / 2};
    cfg.wavelength = wavelength;
    cfg.screen_distance = distance;
    const double width = wavelength * distance / spacing / static_cast<double>(bins_per_period);
    const double half_bins = static_cast<double>(periods * bins_per_period);
    cfg.screen_bins = 2 * periods * bins_per_period + 1;
    cfg.screen_min = -(half_bins + 0.5) * width;
    cfg.screen_max = (half_bins + 0.5) * width;
    cfg.validate();
    return cfg;
}

ApparatusConfig ApparatusConfig::slit_array(std::size_t count, double spacing, double wavelength, double distance,
                                            std::size_t bins) {
    if (count == 0 || !(spacing > 0)) {
        throw std::invalid_argument("slit array needs at least one slit and positive spacing");
    }
    ApparatusConfig cfg;
    for (std::size_t j = 0; j < count; ++j) {
        cfg.slit_positions.push_back(static_cast<double>(j) * spacing);
    }
    cfg.wavelength = wavelength;
    cfg.screen_distance = distance;
    const double period = wavelength * distance / spacing;
    cfg.screen_min = -period / 2;
    cfg.screen_max = period / 2;
    cfg.screen_bins = bins;
    cfg.validate();
    return cfg;
}

double intensity(const ApparatusConfig& cfg, std::span<const std::uint32_t> open, std::size_t bin) {
    check_open(cfg, open);
    const double y = cfg.bin_center(bin);
    std::complex<double> amplitude{0, 0};
    for (auto s : open) {
        amplitude += phasor(cfg, s, y);
    }
    return std::norm(amplitude);
}

double classical_intensity(const ApparatusConfig& cfg, std::span<const std::uint32_t> open, std::size_t bin) {
    check_open(cfg, open);
    const double y = cfg.bin_center(bin);
    double total = 0;
    for (auto s : open) {
        total += std::norm(phasor(cfg, s, y));
    }
    return total;
}

std::vector<double> quantum_distribution(const ApparatusConfig& cfg, std::span<const std::uint32_t> open) {
    std::vector<double> weights(cfg.screen_bins);
    for (std::size_t b = 0; b < cfg.screen_bins; ++b) {
        weights[b] = intensity(cfg, open, b);
    }
    return normalized(std::move(weights));
}

std::vector<double> classical_distribution(const ApparatusConfig& cfg, std::span<const std::uint32_t> open) {
    std::vector<double> weights(cfg.screen_bins);
    for (std::size_t b = 0; b < cfg.screen_bins; ++b) {
        weights[b] = classical_intensity(cfg, open, b);
    }
    return normalized(std::move(weights));
}

std::vector<double> mixture_distribution(const ApparatusConfig& cfg, std::span<const std::uint32_t> open,
                                         double coherence) {
    if (!(coherence >= 0.0 && coherence <= 1.0)) {
        throw std::invalid_argument("coherence must lie in [0, 1]");
    }
    const auto q = quantum_distribution(cfg, open);
    const auto c = classical_distribution(cfg, open);
    std::vector<double> mix(q.size());
    for (std::size_t b = 0; b < q.size(); ++b) {
        mix[b] = (1.0 - coherence) * c[b] + coherence * q[b];
    }
    return mix;
}

std::string to_string(MemorySite site) {
    switch (site) {
        case MemorySite::source: return "source";
        case MemorySite::aperture: return "aperture";
        case MemorySite::screen: return "screen";
    }
    return "aperture";
}

MemorySite parse_memory_site(const std::string& text) {
    if (text == "source") return MemorySite::source;
    if (text == "aperture") return MemorySite::aperture;
    if (text == "screen") return MemorySite::screen;
    throw std::invalid_argument("unknown memory site '" + text + "' (expected source, aperture or screen)");
}

void MemoryKernel::validate() const {
    if (!(strength >= 0.0 && strength <= 1.0)) {
        throw std::invalid_argument("memory strength must lie in [0, 1]");
    }
    if (!(saturation >= 0.0 && saturation <= 1.0)) {
        throw std::invalid_argument("memory saturation must lie in [0, 1]");
    }
    if (!(time_constant > 0.0)) {
        throw std::invalid_argument("memory time constant must be positive");
    }
    if (window == 0) {
        throw std::invalid_argument("memory window must be at least 1");
    }
}

Simulator::Simulator(ApparatusConfig cfg, MemoryKernel kernel) : cfg_(std::move(cfg)), kernel_(kernel) {
    cfg_.validate();
    kernel_.validate();
}

std::uint64_t Simulator::site_component(const ComponentIds& ids) const {
    switch (kernel_.site) {
        case MemorySite::source: return ids.source;
        case MemorySite::aperture: return ids.shield;
        case MemorySite::screen: return ids.screen;
    }
    return ids.shield;
}

Simulator::Key Simulator::memory_key(const TrialSetup& setup) const {
    // Only the aperture remembers which configuration it was in.
    if (kernel_.site == MemorySite::aperture) {
        return {std::min(setup.xi, setup.eta), std::max(setup.xi, setup.eta)};
    }
    return {0, 0};
}

double Simulator::memory_mass(const TrialSetup& setup) const {
    if (!seen_component_ || current_component_ != site_component(setup.components)) {
        return 0.0;
    }
    const auto it = history_.find(memory_key(setup));
    if (it == history_.end()) {
        return 0.0;
    }
    double mass = 0;
    for (double t : it->second) {
        mass += std::isinf(kernel_.time_constant) ? 1.0 : std::exp(-(setup.time - t) / kernel_.time_constant);
    }
    return mass;
}

double Simulator::coherence(const TrialSetup& setup) const {
    if (kernel_.identity()) {
        return 1.0;
    }
    const double m = memory_mass(setup);
    return kernel_.saturation * (1.0 - std::pow(1.0 - kernel_.strength, m));
}

const std::vector<double>& Simulator::cdf(bool coherent, std::uint32_t xi, std::uint32_t eta) {
    const Key key{xi, eta};
    auto it = cdf_cache_.find({key, coherent});
    if (it == cdf_cache_.end()) {
        std::vector<std::uint32_t> open{xi};
        if (eta != xi) {
            open.push_back(eta);
        }
        auto probabilities = coherent ? quantum_distribution(cfg_, open) : classical_distribution(cfg_, open);
        it = cdf_cache_.emplace(std::pair{key, coherent}, cumulative(probabilities)).first;
    }
    return it->second;
}

TrialRecord Simulator::sample_trial(const TrialSetup& setup, std::mt19937_64& rng) {
    if (setup.xi >= cfg_.slit_positions.size() || setup.eta >= cfg_.slit_positions.size()) {
        throw std::invalid_argument("slit index out of range");
    }
    const double c = coherence(setup);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    bool coherent = c >= 1.0;
    if (c > 0.0 && c < 1.0) {
        coherent = unit(rng) < c;
    }
    const std::size_t bin = sample_index(cdf(coherent, setup.xi, setup.eta), unit(rng));

    if (!kernel_.identity()) {
        const auto component = site_component(setup.components);
        if (!seen_component_ || component != current_component_) {
            // A replaced component carries no memory and is never reused.
            history_.clear();
            current_component_ = component;
            seen_component_ = true;
        }
        auto& times = history_[memory_key(setup)];
        times.push_back(setup.time);
        if (times.size() > kernel_.window) {
            times.erase(times.begin());
        }
    }
    return TrialRecord{setup.index, setup.time, setup.xi, setup.eta, static_cast<std::uint32_t>(bin), setup.apparatus};
}

std::size_t sample_index(std::span<const double> cdf, double u) {
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) {
        return cdf.size() - 1;
    }
    return static_cast<std::size_t>(it - cdf.begin());
}

GroupBy parse_group_by(const std::string& text) {
    if (text == "slit-pair") return GroupBy::slit_pair;
    if (text == "apparatus") return GroupBy::apparatus;
    if (text == "none") return GroupBy::none;
    throw std::invalid_argument("unknown grouping '" + text + "' (expected slit-pair, apparatus or none)");
}

std::vector<Histogram> aggregate(std::span<const TrialRecord> records, GroupBy group_by, std::size_t bins) {
    std::map<std::pair<std::uint64_t, std::uint64_t>, Histogram> groups;
    for (const auto& r : records) {
        if (r.bin >= bins) {
            throw std::invalid_argument("record bin " + std::to_string(r.bin) + " outside a " +
                                        std::to_string(bins) + "-bin screen");
        }
        std::pair<std::uint64_t, std::uint64_t> key{0, 0};
        if (group_by == GroupBy::slit_pair) {
            key = {r.xi, r.eta};
        } else if (group_by == GroupBy::apparatus) {
            key = {r.apparatus, 0};
        }
        auto& h = groups[key];
        if (h.counts.empty()) {
            h.counts.assign(bins, 0);
            switch (group_by) {
                case GroupBy::slit_pair: h.key = std::to_string(r.xi) + "-" + std::to_string(r.eta); break;
                case GroupBy::apparatus: h.key = "apparatus-" + std::to_string(r.apparatus); break;
                case GroupBy::none: h.key = "all"; break;
            }
        }
        ++h.counts[r.bin];
        ++h.total;
    }
    std::vector<Histogram> out;
    for (auto& [key, h] : groups) {
        out.push_back(std::move(h));
    }
    if (out.empty() && group_by == GroupBy::none) {
        out.push_back(Histogram{std::vector<std::uint64_t>(bins, 0), 0, "all"});
    }
    return out;
}

std::string histogram_csv(const Histogram& h, const ApparatusConfig& cfg) {
    if (h.counts.size() != cfg.screen_bins) {
        throw std::invalid_argument("histogram does not match the screen binning");
    }
    std::ostringstream out;
    out.precision(17);
    out << "bin_center,count\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        out << cfg.bin_center(b) << ',' << h.counts[b] << '\n';
    }
    return out.str();
}

double visibility(const Histogram& h, std::size_t smoothing_window) {
    if (smoothing_window == 0 || smoothing_window % 2 == 0) {
        throw std::invalid_argument("smoothing window must be odd");
    }
    if (h.counts.size() < smoothing_window) {
        throw std::invalid_argument("histogram narrower than the smoothing window");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double running = 0;
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        running += static_cast<double>(h.counts[b]);
        if (b >= smoothing_window) {
            running -= static_cast<double>(h.counts[b - smoothing_window]);
        }
        if (b + 1 >= smoothing_window) {
            lo = std::min(lo, running);
            hi = std::max(hi, running);
        }
    }
    if (hi <= 0) {
        throw std::invalid_argument("visibility of an empty histogram");
    }
    return (hi - lo) / (hi + lo);
}

Histogram fold_fringe_phase(const Histogram& h, const ApparatusConfig& cfg, std::uint32_t xi, std::uint32_t eta,
                            std::size_t phase_bins) {
    if (h.counts.size() != cfg.screen_bins) {
        throw std::invalid_argument("histogram does not match the screen binning");
    }
    if (xi >= cfg.slit_positions.size() || eta >= cfg.slit_positions.size()) {
        throw std::invalid_argument("slit index out of range");
    }
    if (phase_bins < 2) {
        throw std::invalid_argument("phase fold needs at least 2 cells");
    }
    const double separation = cfg.slit_positions[xi] - cfg.slit_positions[eta];
    Histogram folded{std::vector<std::uint64_t>(phase_bins, 0), h.total, h.key};
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        const double phase = fractional(separation * cfg.bin_center(b) / (cfg.wavelength * cfg.screen_distance));
        const auto cell = std::min(phase_bins - 1, static_cast<std::size_t>(phase * static_cast<double>(phase_bins)));
        folded.counts[cell] += h.counts[b];
    }
    return folded;
}

double mean_pair_visibility(std::span<const TrialRecord> records, const ApparatusConfig& cfg, std::size_t phase_bins) {
    const auto groups = aggregate(records, GroupBy::slit_pair, cfg.screen_bins);
    double sum = 0;
    std::size_t used = 0;
    for (const auto& h : groups) {
        const auto dash = h.key.find('-');
        const auto xi = static_cast<std::uint32_t>(std::stoul(h.key.substr(0, dash)));
        const auto eta = static_cast<std::uint32_t>(std::stoul(h.key.substr(dash + 1)));
        if (xi == eta || h.total == 0) {
            continue;
        }
        sum += visibility(fold_fringe_phase(h, cfg, xi, eta, phase_bins));
        ++used;
    }
    if (used == 0) {
        throw std::invalid_argument("no two-slit configurations among the records");
    }
    return sum / static_cast<double>(used);
}

std::vector<std::uint64_t> window_counts(std::span<const TrialRecord> records, double width) {
    if (!(width > 0)) {
        throw std::invalid_argument("counting window must be positive");
    }
    double last = 0;
    for (const auto& r : records) {
        last = std::max(last, r.time);
    }
    const double span = std::floor(last / width);
    if (span > 1e8) {
        throw std::invalid_argument("counting window is too narrow for the arrival span");
    }
    const auto windows = static_cast<std::size_t>(span);
    std::vector<std::uint64_t> counts(windows, 0);
    for (const auto& r : records) {
        const auto w = static_cast<std::size_t>(std::floor(r.time / width));
        if (w < windows) {
            ++counts[w];
        }
    }
    return counts;
}

}  // namespace padicprob
