#include "padicprob/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "padicprob/io.hpp"
#include "padicprob/stats.hpp"

namespace padicprob {
namespace {

using nlohmann::json;

constexpr const char* kScenarioNames[] = {
    "sequential", "fresh-apparatus-ensemble", "cycle-reset", "rate-sweep", "exponential-schedule", "random-two-slit",
};

/// Pulls typed fields out of a JSON object, recording every problem instead
/// of stopping at the first.
class Reader {
public:
    Reader(const json& doc, std::string path, std::vector<std::string>& problems)
        : doc_(doc), path_(std::move(path)), problems_(problems) {}

    bool has(const char* key) const { return doc_.is_object() && doc_.contains(key); }

    const json* field(const char* key, bool required) {
        if (!has(key)) {
            if (required) {
                problem(key, "is required");
            }
            return nullptr;
        }
        return &doc_.at(key);
    }

    void number(const char* key, double& out, bool required, bool positive) {
        const json* v = field(key, required);
        if (!v) return;
        if (!v->is_number()) {
            problem(key, "must be a number");
        } else if (positive && !(v->get<double>() > 0)) {
            problem(key, "must be positive");
        } else {
            out = v->get<double>();
        }
    }

    template <class Int>
    void integer(const char* key, Int& out, bool required, std::uint64_t min = 0) {
        const json* v = field(key, required);
        if (!v) return;
        if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
            problem(key, "must be a non-negative integer");
            return;
        }
        const auto value = v->get<std::uint64_t>();
        if (value < min) {
            problem(key, "must be at least " + std::to_string(min));
        } else if (value > std::numeric_limits<Int>::max()) {
            problem(key, "is too large");
        } else {
            out = static_cast<Int>(value);
        }
    }

    void text(const char* key, std::string& out, bool required) {
        const json* v = field(key, required);
        if (!v) return;
        if (!v->is_string()) {
            problem(key, "must be a string");
        } else {
            out = v->get<std::string>();
        }
    }

    void problem(const std::string& key, const std::string& what) { problems_.push_back(path_ + key + " " + what); }

    void unknown_keys(std::initializer_list<const char*> known) {
        if (!doc_.is_object()) return;
        for (const auto& [key, value] : doc_.items()) {
            bool ok = false;
            for (const char* k : known) {
                ok = ok || key == k;
            }
            if (!ok) {
                problem(key, "is not a recognized field");
            }
        }
    }

    std::string path() const { return path_; }

private:
    const json& doc_;
    std::string path_;
    std::vector<std::string>& problems_;
};

std::optional<ScenarioKind> parse_kind(const std::string& name) {
    for (std::size_t i = 0; i < std::size(kScenarioNames); ++i) {
        if (name == kScenarioNames[i]) {
            return static_cast<ScenarioKind>(i);
        }
    }
    return std::nullopt;
}

bool is_power_of_two(std::uint64_t n) {
    return n >= 1 && (n & (n - 1)) == 0;
}

void read_geometry(const json& doc, ScenarioSpec& spec, std::vector<std::string>& problems) {
    Reader r(doc, "geometry.", problems);
    if (!doc.is_object()) {
        problems.push_back("geometry must be an object");
        return;
    }
    std::string layout = "two-slit";
    r.text("layout", layout, false);
    double spacing = 20e-6, wavelength = 500e-9, distance = 1.0;
    r.number("wavelength", wavelength, false, true);
    r.number("screen_distance", distance, false, true);
    if (layout == "two-slit") {
        r.unknown_keys({"layout", "spacing", "wavelength", "screen_distance", "periods", "bins_per_period"});
        std::size_t periods = 2, per_period = 16;
        r.number("spacing", spacing, false, true);
        r.integer("periods", periods, false, 1);
        r.integer("bins_per_period", per_period, false, 4);
        spec.apparatus = ApparatusConfig::two_slit(spacing, wavelength, distance, periods, per_period);
    } else if (layout == "array") {
        r.unknown_keys({"layout", "count", "spacing", "wavelength", "screen_distance", "screen_bins"});
        std::size_t count = spec.slits > 0 ? spec.slits : 2, bins = 512;
        r.integer("count", count, spec.slits == 0, 1);
        r.number("spacing", spacing, false, true);
        r.integer("screen_bins", bins, false, 8);
        spec.apparatus = ApparatusConfig::slit_array(count, spacing, wavelength, distance, bins);
    } else if (layout == "explicit") {
        r.unknown_keys({"layout", "slit_positions", "wavelength", "screen_distance", "screen_min", "screen_max",
                        "screen_bins"});
        ApparatusConfig cfg;
        cfg.wavelength = wavelength;
        cfg.screen_distance = distance;
        if (const json* slits = r.field("slit_positions", true)) {
            if (!slits->is_array() || slits->empty()) {
                r.problem("slit_positions", "must be a non-empty array of numbers");
            } else {
                for (const auto& y : *slits) {
                    if (!y.is_number()) {
                        r.problem("slit_positions", "must contain only numbers");
                        break;
                    }
                    cfg.slit_positions.push_back(y.get<double>());
                }
            }
        }
        r.number("screen_min", cfg.screen_min, true, false);
        r.number("screen_max", cfg.screen_max, true, false);
        r.integer("screen_bins", cfg.screen_bins, true, 8);
        if (cfg.screen_max <= cfg.screen_min) {
            r.problem("screen_max", "must exceed screen_min");
        }
        spec.apparatus = cfg;
    } else {
        r.problem("layout", "must be one of two-slit, array, explicit");
    }
}

void read_kernel(const json& doc, MemoryKernel& kernel, std::vector<std::string>& problems) {
    Reader r(doc, "kernel.", problems);
    if (!doc.is_object()) {
        problems.push_back("kernel must be an object");
        return;
    }
    r.unknown_keys({"site", "strength", "saturation", "time_constant", "window"});
    std::string site = to_string(kernel.site);
    r.text("site", site, false);
    try {
        kernel.site = parse_memory_site(site);
    } catch (const std::invalid_argument&) {
        r.problem("site", "must be one of source, aperture, screen");
    }
    r.number("strength", kernel.strength, true, false);
    if (kernel.strength < 0 || kernel.strength > 1) {
        r.problem("strength", "must lie in [0, 1]");
    }
    r.number("saturation", kernel.saturation, false, false);
    if (kernel.saturation < 0 || kernel.saturation > 1) {
        r.problem("saturation", "must lie in [0, 1]");
    }
    if (r.has("time_constant") && doc.at("time_constant").is_string()) {
        if (doc.at("time_constant").get<std::string>() == "inf") {
            kernel.time_constant = std::numeric_limits<double>::infinity();
        } else {
            r.problem("time_constant", "must be a positive number or \"inf\"");
        }
    } else {
        r.number("time_constant", kernel.time_constant, false, true);
    }
    r.integer("window", kernel.window, false, 1);
}

void read_analysis(const json& doc, AnalysisSettings& analysis, std::vector<std::string>& problems) {
    Reader r(doc, "analysis.", problems);
    if (!doc.is_object()) {
        problems.push_back("analysis must be an object");
        return;
    }
    r.unknown_keys({"smoothing_window", "phase_bins", "count_window", "alpha"});
    r.integer("smoothing_window", analysis.smoothing_window, false, 1);
    if (analysis.smoothing_window % 2 == 0) {
        r.problem("smoothing_window", "must be odd");
    }
    r.integer("phase_bins", analysis.phase_bins, false, 2);
    r.number("count_window", analysis.count_window, false, true);
    r.number("alpha", analysis.alpha, false, true);
    if (analysis.alpha >= 1) {
        r.problem("alpha", "must lie in (0, 1)");
    }
}

json kernel_json(const MemoryKernel& k) {
    json doc{{"site", to_string(k.site)}, {"strength", k.strength}, {"saturation", k.saturation}, {"window", k.window}};
    doc["time_constant"] = std::isinf(k.time_constant) ? json("inf") : json(k.time_constant);
    return doc;
}

json geometry_json(const ApparatusConfig& cfg) {
    return json{{"layout", "explicit"},         {"slit_positions", cfg.slit_positions},
                {"wavelength", cfg.wavelength}, {"screen_distance", cfg.screen_distance},
                {"screen_min", cfg.screen_min}, {"screen_max", cfg.screen_max},
                {"screen_bins", cfg.screen_bins}};
}

}  // namespace

std::string to_string(ScenarioKind kind) {
    return kScenarioNames[static_cast<std::size_t>(kind)];
}

SpecError::SpecError(std::vector<std::string> problems)
    : std::invalid_argument([&] {
          std::string all = "invalid scenario spec:";
          for (const auto& p : problems) {
              all += "\n  " + p;
          }
          return all;
      }()),
      problems_(std::move(problems)) {}

ScenarioSpec ScenarioSpec::from_json(const json& doc) {
    std::vector<std::string> problems;
    ScenarioSpec spec;
    if (!doc.is_object()) {
        throw SpecError({"document must be a JSON object"});
    }
    Reader r(doc, "", problems);
    r.unknown_keys({"scenario", "seed", "trials", "rate", "geometry", "kernel", "open", "renew", "cycle_length",
                    "rates", "base", "time_unit", "slits", "analysis"});

    std::string name;
    r.text("scenario", name, true);
    if (!name.empty()) {
        if (auto kind = parse_kind(name)) {
            spec.kind = *kind;
        } else {
            r.problem("scenario", "names unknown scenario '" + name + "'");
        }
    }
    r.integer("seed", spec.seed, true);
    r.integer("trials", spec.trials, true, 1);
    const bool fixed_rate = spec.kind != ScenarioKind::exponential_schedule && spec.kind != ScenarioKind::rate_sweep;
    if (fixed_rate) {
        r.number("rate", spec.rate, true, true);
    } else if (r.has("rate")) {
        r.problem("rate", "does not apply to " + name);
    }

    if (spec.kind == ScenarioKind::random_two_slit) {
        r.integer("slits", spec.slits, true, 1);
        if (spec.slits > 0 && !is_power_of_two(spec.slits)) {
            r.problem("slits", "must be a power of two, got " + std::to_string(spec.slits));
        }
    }

    try {
        if (const json* g = r.field("geometry", false)) {
            read_geometry(*g, spec, problems);
        } else if (spec.kind == ScenarioKind::random_two_slit && spec.slits > 0) {
            spec.apparatus = ApparatusConfig::slit_array(spec.slits);
        } else {
            spec.apparatus = ApparatusConfig::two_slit();
        }
        spec.apparatus.validate();
    } catch (const std::invalid_argument& e) {
        problems.push_back(std::string("geometry ") + e.what());
    }

    if (const json* k = r.field("kernel", true)) {
        read_kernel(*k, spec.kernel, problems);
    }
    if (const json* a = r.field("analysis", false)) {
        read_analysis(*a, spec.analysis, problems);
    }

    const auto slit_count = spec.apparatus.slit_positions.size();
    if (spec.kind == ScenarioKind::random_two_slit) {
        if (r.has("open")) r.problem("open", "does not apply to random-two-slit");
        if (spec.slits > 0 && slit_count != spec.slits) {
            r.problem("slits", "disagrees with the geometry's " + std::to_string(slit_count) + " slits");
        }
    } else if (const json* open = r.field("open", false)) {
        auto index = [](const json& v) { return v.is_number_integer() && v.get<std::int64_t>() >= 0; };
        if (!open->is_array() || open->size() != 2 || !index((*open)[0]) || !index((*open)[1])) {
            r.problem("open", "must be a pair of slit indices");
        } else {
            spec.xi = (*open)[0].get<std::uint32_t>();
            spec.eta = (*open)[1].get<std::uint32_t>();
        }
    } else if (slit_count == 1) {
        spec.eta = 0;
    }
    if (spec.kind != ScenarioKind::random_two_slit && (spec.xi >= slit_count || spec.eta >= slit_count)) {
        r.problem("open", "names a slit outside the geometry's " + std::to_string(slit_count) + " slits");
    }

    switch (spec.kind) {
        case ScenarioKind::fresh_apparatus_ensemble:
            if (const json* renew = r.field("renew", false)) {
                spec.renew.clear();
                if (!renew->is_array()) {
                    r.problem("renew", "must be an array of component names");
                } else {
                    for (const auto& item : *renew) {
                        try {
                            spec.renew.push_back(parse_memory_site(item.is_string() ? item.get<std::string>() : ""));
                        } catch (const std::invalid_argument&) {
                            r.problem("renew", "entries must be source, aperture or screen");
                        }
                    }
                }
            }
            break;
        case ScenarioKind::cycle_reset:
            r.integer("cycle_length", spec.cycle_length, true, 1);
            break;
        case ScenarioKind::rate_sweep:
            if (const json* rates = r.field("rates", true)) {
                if (!rates->is_array() || rates->empty()) {
                    r.problem("rates", "must be a non-empty array of positive numbers");
                } else {
                    for (const auto& v : *rates) {
                        if (!v.is_number() || !(v.get<double>() > 0)) {
                            r.problem("rates", "must contain only positive numbers");
                            break;
                        }
                        spec.rates.push_back(v.get<double>());
                    }
                }
            }
            break;
        case ScenarioKind::exponential_schedule:
            r.integer("base", spec.base, true, 2);
            r.number("time_unit", spec.time_unit, false, true);
            if (spec.base >= 2 &&
                static_cast<double>(spec.trials) * std::log(static_cast<double>(spec.base)) > 700.0) {
                r.problem("trials", "overflows the exponential schedule (base^trials exceeds double range)");
            }
            break;
        default:
            break;
    }

    if (!problems.empty()) {
        throw SpecError(std::move(problems));
    }
    return spec;
}

ScenarioSpec ScenarioSpec::parse(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecError({std::string("malformed JSON: ") + e.what()});
    }
    return from_json(doc);
}

json ScenarioSpec::to_json() const {
    json doc{{"scenario", to_string(kind)},   {"seed", seed},
             {"trials", trials},              {"geometry", geometry_json(apparatus)},
             {"kernel", kernel_json(kernel)}, {"analysis", json{{"smoothing_window", analysis.smoothing_window},
                                                                {"phase_bins", analysis.phase_bins},
                                                                {"count_window", count_window()},
                                                                {"alpha", analysis.alpha}}}};
    if (kind != ScenarioKind::exponential_schedule && kind != ScenarioKind::rate_sweep) {
        doc["rate"] = rate;
    }
    if (kind != ScenarioKind::random_two_slit) {
        doc["open"] = {xi, eta};
    }
    switch (kind) {
        case ScenarioKind::fresh_apparatus_ensemble: {
            json renewed = json::array();
            for (auto site : renew) {
                renewed.push_back(to_string(site));
            }
            doc["renew"] = renewed;
            break;
        }
        case ScenarioKind::cycle_reset: doc["cycle_length"] = cycle_length; break;
        case ScenarioKind::rate_sweep: doc["rates"] = rates; break;
        case ScenarioKind::exponential_schedule:
            doc["base"] = base;
            doc["time_unit"] = time_unit;
            break;
        case ScenarioKind::random_two_slit: doc["slits"] = slits; break;
        default: break;
    }
    return doc;
}

std::string ScenarioSpec::hash() const {
    return fnv1a_hex(to_json().dump());
}

double ScenarioSpec::count_window() const {
    if (analysis.count_window > 0) {
        return analysis.count_window;
    }
    if (kind == ScenarioKind::exponential_schedule) {
        return time_unit;
    }
    if (kind == ScenarioKind::rate_sweep && !rates.empty()) {
        return 10.0 / *std::min_element(rates.begin(), rates.end());
    }
    return 10.0 / rate;
}

std::vector<TrialRecord> run_scenario(const ScenarioSpec& spec) {
    Simulator sim(spec.apparatus, spec.kernel);
    std::mt19937_64 rng(spec.seed);
    std::vector<TrialRecord> records;

    double time = 0.0;
    std::uint64_t index = 0;
    auto arrive = [&](double rate) {
        std::exponential_distribution<double> gap(rate);
        time += gap(rng);
    };
    auto run = [&](TrialSetup setup) {
        setup.index = index++;
        setup.time = time;
        records.push_back(sim.sample_trial(setup, rng));
    };

    const std::size_t total = spec.kind == ScenarioKind::rate_sweep ? spec.trials * spec.rates.size() : spec.trials;
    records.reserve(total);

    switch (spec.kind) {
        case ScenarioKind::sequential:
            for (std::uint64_t n = 0; n < spec.trials; ++n) {
                arrive(spec.rate);
                run(TrialSetup{0, 0, spec.xi, spec.eta, {}, 0});
            }
            break;
        case ScenarioKind::fresh_apparatus_ensemble: {
            auto renewed = [&](MemorySite site) {
                return std::find(spec.renew.begin(), spec.renew.end(), site) != spec.renew.end();
            };
            const bool source = renewed(MemorySite::source);
            const bool shield = renewed(MemorySite::aperture);
            const bool screen = renewed(MemorySite::screen);
            const bool any = source || shield || screen;
            for (std::uint64_t n = 0; n < spec.trials; ++n) {
                arrive(spec.rate);
                ComponentIds ids{source ? n : 0, shield ? n : 0, screen ? n : 0};
                run(TrialSetup{0, 0, spec.xi, spec.eta, ids, any ? n : 0});
            }
            break;
        }
        case ScenarioKind::cycle_reset:
            for (std::uint64_t n = 0; n < spec.trials; ++n) {
                arrive(spec.rate);
                const std::uint64_t cycle = n / spec.cycle_length;
                run(TrialSetup{0, 0, spec.xi, spec.eta, {cycle, cycle, cycle}, cycle});
            }
            break;
        case ScenarioKind::rate_sweep:
            for (std::uint64_t setting = 0; setting < spec.rates.size(); ++setting) {
                for (std::uint64_t n = 0; n < spec.trials; ++n) {
                    arrive(spec.rates[setting]);
                    run(TrialSetup{0, 0, spec.xi, spec.eta, {setting, setting, setting}, setting});
                }
            }
            break;
        case ScenarioKind::exponential_schedule:
            for (std::uint64_t n = 0; n < spec.trials; ++n) {
                time = spec.time_unit * std::pow(static_cast<double>(spec.base), static_cast<double>(n));
                run(TrialSetup{0, 0, spec.xi, spec.eta, {}, 0});
            }
            break;
        case ScenarioKind::random_two_slit: {
            std::uniform_int_distribution<std::uint32_t> slit(0, spec.slits - 1);
            for (std::uint64_t n = 0; n < spec.trials; ++n) {
                arrive(spec.rate);
                const std::uint32_t xi = slit(rng);
                const std::uint32_t eta = slit(rng);
                // The shield persists; each trial exposes a fresh screen.
                run(TrialSetup{0, 0, xi, eta, {0, 0, n}, n});
            }
            break;
        }
    }
    return records;
}

nlohmann::ordered_json provenance(const ScenarioSpec& spec) {
    return nlohmann::ordered_json{{"spec_hash", spec.hash()},
                                  {"seed", spec.seed},
                                  {"version", PADICPROB_VERSION},
                                  {"scenario", to_string(spec.kind)}};
}

std::string to_ndjson(const ScenarioSpec& spec, const std::vector<TrialRecord>& records) {
    std::string out = nlohmann::ordered_json{{"provenance", provenance(spec)}}.dump() + "\n";
    for (const auto& r : records) {
        out += nlohmann::ordered_json{{"t", r.index},   {"time", r.time}, {"xi", r.xi},
                                      {"eta", r.eta},   {"bin", r.bin},   {"apparatus", r.apparatus}}
                   .dump();
        out += '\n';
    }
    return out;
}

std::vector<TrialRecord> parse_ndjson(const std::string& text) {
    std::vector<TrialRecord> records;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json doc;
        try {
            doc = json::parse(line);
        } catch (const json::parse_error& e) {
            throw std::invalid_argument("ndjson line " + std::to_string(line_no) + ": " + e.what());
        }
        if (doc.contains("provenance")) continue;
        try {
            records.push_back(TrialRecord{doc.at("t").get<std::uint64_t>(), doc.at("time").get<double>(),
                                          doc.at("xi").get<std::uint32_t>(), doc.at("eta").get<std::uint32_t>(),
                                          doc.at("bin").get<std::uint32_t>(),
                                          doc.at("apparatus").get<std::uint64_t>()});
        } catch (const json::exception& e) {
            throw std::invalid_argument("ndjson line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

GroupBy default_grouping(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::cycle_reset:
        case ScenarioKind::rate_sweep: return GroupBy::apparatus;
        case ScenarioKind::random_two_slit: return GroupBy::slit_pair;
        default: return GroupBy::none;
    }
}

namespace {

nlohmann::ordered_json dispersion_json(const std::vector<TrialRecord>& records, double width, double alpha) {
    const auto counts = window_counts(records, width);
    nlohmann::ordered_json out;
    if (counts.size() < 20) {
        out = {{"verdict", "skipped"}, {"reason", "fewer than 20 counting windows"}};
    } else {
        out = nlohmann::ordered_json::parse(poisson_dispersion_test(counts, alpha).to_json());
    }
    out["count_window"] = width;
    out["windows"] = counts.size();
    return out;
}

}  // namespace

nlohmann::ordered_json scenario_metrics(const ScenarioSpec& spec, const std::vector<TrialRecord>& records) {
    nlohmann::ordered_json out;
    out["provenance"] = provenance(spec);
    out["trials"] = records.size();
    const auto& cfg = spec.apparatus;
    const auto all = aggregate(records, GroupBy::none, cfg.screen_bins).front();
    out["visibility"] = all.total > 0 ? visibility(all, spec.analysis.smoothing_window) : 0.0;

    const auto grouping = default_grouping(spec.kind);
    if (grouping == GroupBy::apparatus) {
        nlohmann::ordered_json groups = nlohmann::ordered_json::array();
        for (const auto& h : aggregate(records, grouping, cfg.screen_bins)) {
            groups.push_back({{"group", h.key}, {"total", h.total}, {"visibility", visibility(h, spec.analysis.smoothing_window)}});
        }
        out["groups"] = groups;
    } else if (grouping == GroupBy::slit_pair) {
        out["mean_pair_visibility"] = mean_pair_visibility(records, cfg, spec.analysis.phase_bins);
        out["phase_bins"] = spec.analysis.phase_bins;
    }

    if (spec.kind == ScenarioKind::exponential_schedule) {
        out["poisson"] = {{"count_window", spec.count_window()},
                          {"verdict", "skipped"},
                          {"reason", "arrival times are scheduled, not a counting process"}};
        return out;
    }
    if (spec.kind != ScenarioKind::rate_sweep) {
        out["poisson"] = dispersion_json(records, spec.count_window(), spec.analysis.alpha);
        return out;
    }
    // Each setting is its own counting process, timed from the end of the previous one.
    nlohmann::ordered_json settings = nlohmann::ordered_json::array();
    std::string verdict = "skipped";
    double origin = 0.0;
    for (std::uint64_t setting = 0; setting < spec.rates.size(); ++setting) {
        std::vector<TrialRecord> part;
        for (const auto& r : records) {
            if (r.apparatus == setting) {
                part.push_back(r);
                part.back().time -= origin;
            }
        }
        if (!part.empty()) {
            origin += part.back().time;
        }
        const double width = spec.analysis.count_window > 0 ? spec.analysis.count_window : 10.0 / spec.rates[setting];
        auto report = dispersion_json(part, width, spec.analysis.alpha);
        const std::string v = report["verdict"];
        if (v != "skipped" && (verdict == "skipped" || verdict == "consistent")) {
            verdict = v;
        }
        nlohmann::ordered_json entry{{"rate", spec.rates[setting]}};
        entry.update(report);
        settings.push_back(entry);
    }
    out["poisson"] = {{"verdict", verdict}, {"settings", settings}};
    return out;
}

}  // namespace padicprob
