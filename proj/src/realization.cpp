#include "padicprob/realization.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

namespace padicprob {
namespace {

BigInt pow_p(PrimeBase base, std::int64_t k) {
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), base.big().get_mpz_t(), static_cast<unsigned long>(k));
    return r;
}

std::uint64_t to_u64(const BigInt& value) {
    if (value < 0 || !value.fits_ulong_p()) {
        throw std::overflow_error("plan checkpoint exceeds 64 bits; reduce depth");
    }
    return value.get_ui();
}

BigInt big(std::uint64_t v) {
    return BigInt(static_cast<unsigned long>(v));
}

}  // namespace

Rational CheckpointPlan::bound(std::int64_t k) const {
    return power(base.big(), -k);
}

std::vector<std::uint64_t> CheckpointPlan::checkpoints() const {
    std::vector<std::uint64_t> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        out.push_back(row.total);
    }
    return out;
}

std::string CheckpointPlan::to_csv() const {
    std::ostringstream out;
    out << "k,N_k,n_k,bound_num,bound_den\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Rational b = bound(static_cast<std::int64_t>(i + 1));
        out << (i + 1) << ',' << rows[i].total << ',' << rows[i].ones << ',' << b.numerator().get_str() << ','
            << b.denominator().get_str() << '\n';
    }
    return out.str();
}

std::vector<PlanRow> parse_plan_csv(std::string_view csv) {
    std::vector<PlanRow> rows;
    std::istringstream in{std::string(csv)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.rfind("k,", 0) == 0) {
            continue;
        }
        std::istringstream fields(line);
        std::string k, total, ones;
        if (!std::getline(fields, k, ',') || !std::getline(fields, total, ',') || !std::getline(fields, ones, ',')) {
            throw std::invalid_argument("plan CSV line " + std::to_string(line_no) + " has too few columns");
        }
        try {
            rows.push_back({std::stoull(total), std::stoull(ones)});
        } catch (const std::exception&) {
            throw std::invalid_argument("plan CSV line " + std::to_string(line_no) + " is not numeric");
        }
    }
    return rows;
}

CheckpointPlan plan(const PAdicApprox& target, std::int64_t depth, double growth) {
    if (depth < 1) {
        throw std::invalid_argument("plan depth must be at least 1");
    }
    if (!(growth >= 1.0)) {
        throw std::invalid_argument("growth factor must be at least 1");
    }
    const PrimeBase base = target.base();
    CheckpointPlan result{base, target, depth, 0, {}};
    if (target.is_zero()) {
        if (target.absolute_precision() < depth) {
            throw PrecisionInsufficient("zero target known to absolute precision " +
                                        std::to_string(target.absolute_precision()) + " < depth " +
                                        std::to_string(depth));
        }
    } else {
        result.shift = std::max<std::int64_t>(0, -target.valuation());
        if (target.precision() < depth + result.shift) {
            throw PrecisionInsufficient("target has " + std::to_string(target.precision()) +
                                        " digits, plan of depth " + std::to_string(depth) + " needs " +
                                        std::to_string(depth + result.shift));
        }
    }
    const std::int64_t v = result.shift;
    const BigInt scale = pow_p(base, v);
    const BigInt p = base.big();

    // target * p^v as an integer modulo p^(depth + v).
    BigInt scaled = 0;
    if (!target.is_zero()) {
        scaled = target.unit_part() * pow_p(base, target.valuation() + v);
    }

    BigInt total = 0;
    BigInt ones = 0;
    for (std::int64_t k = 1; k <= depth; ++k) {
        const BigInt window = pow_p(base, k + v);
        BigInt least = total + window;
        BigInt grown;
        mpz_set_d(grown.get_mpz_t(), std::ceil(growth * total.get_d()));
        if (grown > least) {
            least = grown;
        }
        BigInt cofactor;
        mpz_cdiv_q(cofactor.get_mpz_t(), least.get_mpz_t(), scale.get_mpz_t());
        if (cofactor % p == 0) {
            cofactor += 1;
        }
        const BigInt next_total = cofactor * scale;
        BigInt residue;
        const BigInt wanted = scaled * cofactor;
        mpz_mod(residue.get_mpz_t(), wanted.get_mpz_t(), window.get_mpz_t());
        BigInt offset = residue - ones - 1;
        mpz_mod(offset.get_mpz_t(), offset.get_mpz_t(), window.get_mpz_t());
        const BigInt next_ones = ones + 1 + offset;
        total = next_total;
        ones = next_ones;
        result.rows.push_back({to_u64(total), to_u64(ones)});
    }
    return result;
}

FillPolicy FillPolicy::parse(std::string_view text) {
    if (text == "block") {
        return {FillMode::block, 0};
    }
    if (text == "spread") {
        return {FillMode::spread, 0};
    }
    if (text.rfind("shuffle", 0) == 0) {
        FillPolicy policy{FillMode::seeded_shuffle, 0};
        if (text.size() > 7) {
            if (text[7] != ':') {
                throw std::invalid_argument("fill policy '" + std::string(text) + "'");
            }
            policy.seed = std::stoull(std::string(text.substr(8)));
        }
        return policy;
    }
    throw std::invalid_argument("unknown fill policy '" + std::string(text) + "' (block, spread, shuffle:<seed>)");
}

std::string FillPolicy::to_string() const {
    switch (mode) {
        case FillMode::block: return "block";
        case FillMode::spread: return "spread";
        case FillMode::seeded_shuffle: return "shuffle:" + std::to_string(seed);
    }
    return "block";
}

EventSequence generate(const CheckpointPlan& plan, const FillPolicy& fill) {
    if (plan.rows.empty()) {
        throw std::invalid_argument("empty plan");
    }
    EventSequence seq(plan.rows.back().total);
    std::uint64_t start = 0;
    std::uint64_t before = 0;
    std::mt19937_64 rng(fill.seed);
    for (const auto& row : plan.rows) {
        if (row.total <= start || row.ones < before || row.ones - before > row.total - start) {
            throw std::invalid_argument("plan rows violate window feasibility");
        }
        const std::uint64_t width = row.total - start;
        const std::uint64_t count = row.ones - before;
        switch (fill.mode) {
            case FillMode::block:
                seq.fill(start, start + count, true);
                break;
            case FillMode::spread:
                for (std::uint64_t i = 0; i < width; ++i) {
                    using u128 = unsigned __int128;
                    const bool one = static_cast<u128>(i + 1) * count / width != static_cast<u128>(i) * count / width;
                    if (one) {
                        seq.set(start + i, true);
                    }
                }
                break;
            case FillMode::seeded_shuffle: {
                // Selection sampling: a uniformly random subset of `count` positions.
                std::uint64_t left = count;
                for (std::uint64_t i = 0; i < width && left > 0; ++i) {
                    std::uniform_int_distribution<std::uint64_t> pick(0, width - i - 1);
                    if (pick(rng) < left) {
                        seq.set(start + i, true);
                        --left;
                    }
                }
                break;
            }
        }
        start = row.total;
        before = row.ones;
    }
    return seq;
}

std::string VerificationReport::to_json() const {
    nlohmann::ordered_json doc;
    doc["pass"] = pass;
    auto& list = doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        list.push_back({{"k", row.k},
                        {"N", row.total},
                        {"n1", row.ones},
                        {"frequency", row.frequency.to_string()},
                        {"distance", row.distance.to_string()},
                        {"bound", row.bound.to_string()},
                        {"pass", row.pass}});
    }
    return doc.dump(2) + "\n";
}

VerificationReport verify(const EventSequence& seq, const PAdicApprox& target, std::int64_t depth,
                          std::span<const PlanRow> rows) {
    if (depth < 1 || static_cast<std::size_t>(depth) > rows.size()) {
        throw std::invalid_argument("verification depth " + std::to_string(depth) + " with " +
                                    std::to_string(rows.size()) + " plan rows");
    }
    if (seq.size() < rows[static_cast<std::size_t>(depth - 1)].total) {
        throw std::invalid_argument("sequence of length " + std::to_string(seq.size()) +
                                    " is shorter than the last checkpoint");
    }
    const Rational x = from_digits(target);
    VerificationReport report;
    report.pass = true;
    std::uint64_t previous = 0;
    std::uint64_t ones = 0;
    for (std::int64_t k = 1; k <= depth; ++k) {
        const std::uint64_t n = rows[static_cast<std::size_t>(k - 1)].total;
        if (n <= previous) {
            throw std::invalid_argument("plan checkpoints are not increasing");
        }
        ones += seq.count_ones(previous, n);
        previous = n;
        VerificationRow row;
        row.k = k;
        row.total = n;
        row.ones = ones;
        row.frequency = Rational(big(ones), big(n));
        row.distance = distance(row.frequency, x, target.base());
        row.bound = power(target.base().big(), -k);
        row.pass = row.distance <= row.bound;
        report.pass = report.pass && row.pass;
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace padicprob
