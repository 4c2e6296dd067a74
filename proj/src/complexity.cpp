#include "padicprob/complexity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "padicprob/frequency.hpp"

namespace padicprob {
namespace {

/// Online suffix automaton over {0, 1}.
class SuffixAutomaton {
public:
    struct State {
        std::int64_t len = 0;
        std::int64_t link = -1;
        std::array<std::int64_t, 2> next{-1, -1};
    };

    struct Split {
        std::int64_t original = -1;
        std::int64_t clone = -1;
    };

    explicit SuffixAutomaton(std::size_t capacity) {
        states_.reserve(2 * capacity + 2);
        states_.push_back(State{});
    }

    Split extend(int c) {
        const auto cur = static_cast<std::int64_t>(states_.size());
        states_.push_back(State{states_[last_].len + 1, 0, {-1, -1}});
        std::int64_t p = last_;
        while (p != -1 && states_[p].next[c] == -1) {
            states_[p].next[c] = cur;
            p = states_[p].link;
        }
        Split split;
        if (p != -1) {
            const std::int64_t q = states_[p].next[c];
            if (states_[p].len + 1 == states_[q].len) {
                states_[cur].link = q;
            } else {
                const auto clone = static_cast<std::int64_t>(states_.size());
                State copy = states_[q];
                copy.len = states_[p].len + 1;
                states_.push_back(copy);
                while (p != -1 && states_[p].next[c] == q) {
                    states_[p].next[c] = clone;
                    p = states_[p].link;
                }
                states_[q].link = clone;
                states_[cur].link = clone;
                split = {q, clone};
            }
        }
        last_ = cur;
        return split;
    }

    std::int64_t next(std::int64_t state, int c) const { return states_[state].next[c]; }
    std::int64_t len(std::int64_t state) const { return states_[state].len; }

private:
    std::vector<State> states_;
    std::int64_t last_ = 0;
};

struct Moments {
    double slope;
    double intercept;
};

Moments least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double m = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxx > 0 ? sxy / sxx : 0.0;
    return {slope, my - slope * mx};
}

CurveFit constrained_fit(const std::vector<double>& x, const std::vector<double>& y, double spread) {
    auto [slope, intercept] = least_squares(x, y);
    if (slope < 0) {
        slope = 0;
        intercept = 0;
        for (double v : y) {
            intercept += v;
        }
        intercept /= static_cast<double>(y.size());
    }
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (slope * x[i] + intercept);
        rss += r * r;
    }
    const double rms = std::sqrt(rss / static_cast<double>(x.size()));
    return {slope, intercept, spread > 0 ? rms / spread : 0.0};
}

void require_points(std::size_t count) {
    if (count < 5) {
        throw std::invalid_argument("complexity profile needs at least 5 points, sequence yields " +
                                    std::to_string(count));
    }
}

}  // namespace

std::vector<std::uint64_t> lz76_phrase_starts(const EventSequence& seq) {
    const std::size_t n = seq.size();
    std::vector<std::uint64_t> starts;
    if (n == 0) {
        return starts;
    }
    SuffixAutomaton automaton(n);
    std::size_t built = 0;
    std::size_t pos = 0;
    while (pos < n) {
        starts.push_back(pos);
        std::int64_t state = 0;
        std::size_t matched = 0;
        // Extend the match while s[pos .. pos+matched] occurs inside s[0 .. pos+matched).
        while (pos + matched < n) {
            while (built < pos + matched) {
                const auto split = automaton.extend(seq[built] ? 1 : 0);
                ++built;
                if (split.original == state && static_cast<std::int64_t>(matched) <= automaton.len(split.clone)) {
                    state = split.clone;
                }
            }
            const std::int64_t to = automaton.next(state, seq[pos + matched] ? 1 : 0);
            if (to == -1) {
                break;
            }
            state = to;
            ++matched;
        }
        pos += matched + 1;
    }
    return starts;
}

std::size_t lz76(const EventSequence& seq) {
    if (seq.empty()) {
        throw std::invalid_argument("LZ76 complexity of an empty sequence");
    }
    return lz76_phrase_starts(seq).size();
}

std::string ComplexityProfile::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "n,C\n";
    for (const auto& point : points) {
        out << point.n << ',' << point.complexity << '\n';
    }
    return out.str();
}

std::vector<std::uint64_t> profile_lengths(std::uint64_t length, double growth_base) {
    auto lengths = geometric_checkpoints(length, growth_base);
    require_points(lengths.size());
    return lengths;
}

ComplexityProfile profile(const EventSequence& seq, double growth_base) {
    const auto lengths = profile_lengths(seq.size(), growth_base);
    const auto starts = lz76_phrase_starts(seq);
    ComplexityProfile pr{"lz76", {}};
    for (auto n : lengths) {
        const auto count = std::lower_bound(starts.begin(), starts.end(), n) - starts.begin();
        pr.points.push_back({n, static_cast<double>(count)});
    }
    return pr;
}

ComplexityProfile profile(const EventSequence& seq, double growth_base, const CheckedCompressor& compressor) {
    const auto lengths = profile_lengths(seq.size(), growth_base);
    ComplexityProfile pr{"compressor:" + compressor.get().id(), {}};
    for (auto n : lengths) {
        pr.points.push_back({n, static_cast<double>(compressor_size(seq.prefix(n), compressor))});
    }
    return pr;
}

std::string to_string(GrowthClass c) {
    switch (c) {
        case GrowthClass::linear: return "Linear";
        case GrowthClass::logarithmic: return "Logarithmic";
        case GrowthClass::inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

GrowthVerdict fit_growth(const ComplexityProfile& pr, const GrowthThresholds& thresholds) {
    require_points(pr.points.size());
    std::vector<double> n, log_n, c;
    for (std::size_t i = 0; i < pr.points.size(); ++i) {
        const auto& point = pr.points[i];
        if (i > 0 && point.n <= pr.points[i - 1].n) {
            throw std::invalid_argument("profile lengths must be strictly increasing");
        }
        n.push_back(static_cast<double>(point.n));
        log_n.push_back(std::log(static_cast<double>(point.n)));
        c.push_back(point.complexity);
    }
    const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
    const double spread = *hi - *lo;

    GrowthVerdict verdict;
    verdict.linear_fit = constrained_fit(n, c, spread);
    verdict.log_fit = constrained_fit(log_n, c, spread);

    std::vector<double> px, py;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] > 0) {
            px.push_back(log_n[i]);
            py.push_back(std::log(c[i]));
        }
    }
    if (px.size() >= 2) {
        verdict.power_exponent = least_squares(px, py).slope;
    }

    const double lin = verdict.linear_fit.residual;
    const double log = verdict.log_fit.residual;
    verdict.ratio = log > 0 ? lin / log : (lin > 0 ? std::numeric_limits<double>::infinity() : 1.0);

    // Bounded complexity: the upper half of the profile (at least 3 points) is constant.
    const std::size_t tail = std::max<std::size_t>(3, (c.size() + 1) / 2);
    const bool saturated = std::all_of(c.end() - static_cast<std::ptrdiff_t>(tail), c.end(),
                                       [&](double v) { return v == c.back(); });

    std::ostringstream why;
    if (spread == 0) {
        verdict.flat = true;
        verdict.kind = GrowthClass::logarithmic;
        why << "flat profile (all C equal)";
    } else if (saturated) {
        verdict.flat = true;
        verdict.kind = GrowthClass::logarithmic;
        why << "saturated profile (last " << tail << " points equal C = " << c.back() << ")";
    } else if (lin > thresholds.ceiling && log > thresholds.ceiling) {
        verdict.kind = GrowthClass::inconclusive;
        why << "both residuals above ceiling " << thresholds.ceiling;
    } else if (lin < thresholds.dead_zone * log) {
        verdict.kind = GrowthClass::linear;
        why << "linear residual " << lin << " < " << thresholds.dead_zone << " x log residual " << log;
    } else if (log < thresholds.dead_zone * lin) {
        verdict.kind = GrowthClass::logarithmic;
        why << "log residual " << log << " < " << thresholds.dead_zone << " x linear residual " << lin;
    } else {
        verdict.kind = GrowthClass::inconclusive;
        why << "residual ratio " << verdict.ratio << " inside dead zone";
    }
    verdict.decision = why.str();
    return verdict;
}

std::string GrowthVerdict::to_json() const {
    nlohmann::ordered_json doc;
    doc["class"] = to_string(kind);
    doc["linear_slope"] = linear_fit.scale;
    doc["linear_intercept"] = linear_fit.intercept;
    doc["linear_residual"] = linear_fit.residual;
    doc["log_scale"] = log_fit.scale;
    doc["log_intercept"] = log_fit.intercept;
    doc["log_residual"] = log_fit.residual;
    doc["ratio"] = std::isfinite(ratio) ? nlohmann::ordered_json(ratio) : nlohmann::ordered_json("inf");
    doc["flat"] = flat;
    doc["power_exponent"] = power_exponent;
    doc["decision"] = decision;
    return doc.dump();
}

}  // namespace padicprob
