#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "padicprob/compressor.hpp"
#include "padicprob/sequence.hpp"

namespace padicprob {

/// Lempel-Ziv (1976) complexity: the number of phrases in the exhaustive
/// history parsing. Each phrase is the longest prefix of the remainder that
/// already occurs starting at an earlier position (overlap allowed), plus one
/// new symbol; a final incomplete phrase counts.
std::size_t lz76(const EventSequence& seq);

/// Start offsets of the phrases of the parsing above. The complexity of the
/// prefix of length n is the number of starts below n.
std::vector<std::uint64_t> lz76_phrase_starts(const EventSequence& seq);

struct ProfilePoint {
    std::uint64_t n = 0;
    double complexity = 0.0;
};

struct ComplexityProfile {
    /// "lz76" or "compressor:<id>".
    std::string proxy;
    std::vector<ProfilePoint> points;

    /// CSV with header `n,C`.
    std::string to_csv() const;
};

/// Proxy evaluated at prefix lengths ceil(g^i) within the sequence. Needs at
/// least five distinct points.
ComplexityProfile profile(const EventSequence& seq, double growth_base);
ComplexityProfile profile(const EventSequence& seq, double growth_base, const CheckedCompressor& compressor);

std::vector<std::uint64_t> profile_lengths(std::uint64_t length, double growth_base);

struct CurveFit {
    double scale = 0.0;      // a
    double intercept = 0.0;  // b
    /// RMS residual divided by the spread (max - min) of the profile values.
    double residual = 0.0;
};

enum class GrowthClass { linear, logarithmic, inconclusive };

std::string to_string(GrowthClass c);

struct GrowthThresholds {
    /// A model wins when its residual is below `dead_zone` times the other's.
    double dead_zone = 0.5;
    /// Both residuals above this ceiling means neither model fits.
    double ceiling = 0.25;
};

struct GrowthVerdict {
    GrowthClass kind = GrowthClass::inconclusive;
    CurveFit linear_fit;  // C = a n + b
    CurveFit log_fit;     // C = a ln n + b
    /// linear residual / log residual.
    double ratio = 0.0;
    /// Profile constant throughout, or over its upper half: bounded
    /// complexity, reported as Logarithmic.
    bool flat = false;
    /// Free exponent gamma of C = a n^gamma; diagnostic only.
    double power_exponent = 0.0;
    std::string decision;

    /// Flat JSON object with both fits and the decision trace.
    std::string to_json() const;
};

/// Least squares fits of the linear and logarithmic growth models, both with
/// a >= 0, classified by residual ratio.
GrowthVerdict fit_growth(const ComplexityProfile& pr, const GrowthThresholds& thresholds = {});

}  // namespace padicprob
