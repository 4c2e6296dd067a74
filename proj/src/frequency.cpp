#include "padicprob/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace padicprob {

std::string FrequencyTrace::to_csv() const {
    std::ostringstream out;
    out << "N,n1,nu1_num,nu1_den\n";
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        out << checkpoints[i] << ',' << ones[i] << ',' << freq1[i].numerator().get_str() << ','
            << freq1[i].denominator().get_str() << '\n';
    }
    return out.str();
}

FrequencyTrace trace(const EventSequence& seq, std::span<const std::uint64_t> checkpoints) {
    if (checkpoints.empty()) {
        throw std::invalid_argument("trace needs at least one checkpoint");
    }
    FrequencyTrace tr;
    tr.checkpoints.reserve(checkpoints.size());
    std::uint64_t previous = 0;
    std::uint64_t ones = 0;
    for (auto n : checkpoints) {
        if (n <= previous) {
            throw std::invalid_argument("checkpoints must be positive and strictly increasing");
        }
        if (n > seq.size()) {
            throw std::invalid_argument("checkpoint " + std::to_string(n) + " exceeds sequence length " +
                                        std::to_string(seq.size()));
        }
        ones += seq.count_ones(previous, n);
        const BigInt total(static_cast<unsigned long>(n));
        tr.checkpoints.push_back(n);
        tr.ones.push_back(ones);
        tr.freq1.emplace_back(BigInt(static_cast<unsigned long>(ones)), total);
        tr.freq0.emplace_back(BigInt(static_cast<unsigned long>(n - ones)), total);
        previous = n;
    }
    return tr;
}

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t length, double base, double scale) {
    if (base <= 1.0 || scale <= 0.0) {
        throw std::invalid_argument("geometric schedule needs base > 1 and scale > 0");
    }
    std::vector<std::uint64_t> out;
    for (int k = 0;; ++k) {
        const long double value = std::ceil(static_cast<long double>(scale) * std::pow(static_cast<long double>(base), k));
        if (value > static_cast<long double>(length)) {
            break;
        }
        const auto n = static_cast<std::uint64_t>(value);
        if (n > 0 && (out.empty() || n > out.back())) {
            out.push_back(n);
        }
    }
    return out;
}

std::string to_string(StabilizationStatus status) {
    switch (status) {
        case StabilizationStatus::stabilized: return "stabilized";
        case StabilizationStatus::not_stabilized: return "not-stabilized";
        case StabilizationStatus::undecided: return "undecided";
    }
    return "undecided";
}

std::string to_string(CollectiveClass c) {
    switch (c) {
        case CollectiveClass::mises: return "mises";
        case CollectiveClass::padic: return "p-adic";
        case CollectiveClass::both: return "both";
        case CollectiveClass::neither: return "neither";
    }
    return "neither";
}

namespace {

void check_tail(const FrequencyTrace& tr, std::size_t tail) {
    if (tail == 0 || tail > tr.size()) {
        throw std::invalid_argument("tail window of " + std::to_string(tail) + " for a trace of " +
                                    std::to_string(tr.size()) + " checkpoints");
    }
}

}  // namespace

StabilizationVerdict real_stabilization(const FrequencyTrace& tr, double tolerance, std::size_t tail) {
    check_tail(tr, tail);
    if (!(tolerance > 0.0)) {
        throw std::invalid_argument("tolerance must be positive");
    }
    StabilizationVerdict verdict;
    const auto first = tr.freq1.end() - static_cast<std::ptrdiff_t>(tail);
    const auto [lo, hi] = std::minmax_element(first, tr.freq1.end());
    verdict.evidence = *hi - *lo;
    if (tail < 2) {
        return verdict;
    }
    if (verdict.evidence <= Rational(mpq_class(tolerance))) {
        verdict.status = StabilizationStatus::stabilized;
        verdict.real_limit = tr.freq1.back();
    } else {
        verdict.status = StabilizationStatus::not_stabilized;
    }
    return verdict;
}

StabilizationVerdict padic_stabilization(const FrequencyTrace& tr, PrimeBase base,
                                         std::int64_t target_digits, std::size_t tail) {
    check_tail(tr, tail);
    if (target_digits <= 0) {
        throw std::invalid_argument("target digit count must be positive");
    }
    StabilizationVerdict verdict;
    verdict.prime = base;
    const std::size_t start = tr.size() - tail;
    const PAdicApprox reference = to_digits(tr.freq1.back(), base, target_digits);
    const Rational limit = from_digits(reference);
    bool agree = true;
    for (std::size_t i = start; i < tr.size(); ++i) {
        verdict.evidence = std::max(verdict.evidence, distance(tr.freq1[i], limit, base));
        if (!(to_digits(tr.freq1[i], base, target_digits) == reference)) {
            agree = false;
        }
    }
    if (tail < 2) {
        return verdict;
    }
    if (agree) {
        verdict.status = StabilizationStatus::stabilized;
        verdict.padic_limit = reference;
    } else {
        verdict.status = StabilizationStatus::not_stabilized;
    }
    return verdict;
}

CollectiveReport classify_collective(const EventSequence& seq, PrimeBase base, const CollectiveParams& params) {
    CollectiveReport report;
    std::vector<std::uint64_t> checkpoints = params.checkpoints;
    if (checkpoints.empty()) {
        checkpoints = geometric_checkpoints(seq.size(), static_cast<double>(base.value()));
    }
    report.trace = trace(seq, checkpoints);
    const std::size_t tail = std::min(params.tail, report.trace.size());
    report.padic = padic_stabilization(report.trace, base, params.digits, tail);

    const std::uint64_t from = checkpoints[checkpoints.size() - tail];
    const std::uint64_t to = checkpoints.back();
    const std::uint64_t span = to - from + 1;
    const std::uint64_t points = std::max<std::uint64_t>(2, std::min<std::uint64_t>(span, params.dense_points));
    std::vector<std::uint64_t> dense;
    dense.reserve(points);
    for (std::uint64_t i = 0; i < points; ++i) {
        const std::uint64_t n = from + (span - 1) * i / (points - 1);
        if (dense.empty() || n > dense.back()) {
            dense.push_back(n);
        }
    }
    const FrequencyTrace dense_trace = trace(seq, dense);
    report.real = real_stabilization(dense_trace, params.tolerance,
                                     tail < 2 ? std::size_t{1} : dense_trace.size());

    const bool mises = report.real.stabilized();
    const bool padic = report.padic.stabilized();
    report.kind = mises && padic ? CollectiveClass::both
                : mises          ? CollectiveClass::mises
                : padic          ? CollectiveClass::padic
                                 : CollectiveClass::neither;
    return report;
}

}  // namespace padicprob
