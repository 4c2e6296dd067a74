#include "padicprob/padic.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace padicprob {
namespace {

BigInt pow_p(PrimeBase base, std::int64_t k) {
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), base.big().get_mpz_t(), static_cast<unsigned long>(std::max<std::int64_t>(k, 0)));
    return r;
}

BigInt mod(const BigInt& a, const BigInt& m) {
    BigInt r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

BigInt inverse_mod(const BigInt& a, const BigInt& m) {
    BigInt r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) {
        throw std::domain_error("value is not invertible modulo p^k");
    }
    return r;
}

std::vector<std::uint64_t> base_p_digits(BigInt value, PrimeBase base, std::int64_t count) {
    std::vector<std::uint64_t> digits;
    digits.reserve(static_cast<std::size_t>(count));
    const BigInt p = base.big();
    BigInt q, r;
    for (std::int64_t j = 0; j < count; ++j) {
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), value.get_mpz_t(), p.get_mpz_t());
        digits.push_back(r.get_ui());
        value = q;
    }
    return digits;
}

/// x = value * p^v, known modulo p^absolute.
PAdicApprox make(PrimeBase base, std::int64_t v, BigInt value, std::int64_t absolute) {
    if (absolute <= v) {
        return PAdicApprox::zero(base, absolute);
    }
    value = mod(value, pow_p(base, absolute - v));
    if (value == 0) {
        return PAdicApprox::zero(base, absolute);
    }
    const std::int64_t shift = integer_valuation(value, base);
    if (shift > 0) {
        mpz_divexact(value.get_mpz_t(), value.get_mpz_t(), pow_p(base, shift).get_mpz_t());
    }
    v += shift;
    return PAdicApprox(base, v, base_p_digits(value, base, absolute - v));
}

void require_same_base(const PAdicApprox& a, const PAdicApprox& b) {
    if (!(a.base() == b.base())) {
        throw std::invalid_argument("p-adic operands have different bases");
    }
}

}  // namespace

std::int64_t integer_valuation(const BigInt& n, PrimeBase base) {
    if (n == 0) {
        throw std::domain_error("valuation of zero integer");
    }
    BigInt rest = n;
    return static_cast<std::int64_t>(
        mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), base.big().get_mpz_t()));
}

Valuation valuation(const Rational& q, PrimeBase base) {
    if (q.is_zero()) {
        return std::nullopt;
    }
    return integer_valuation(q.numerator(), base) - integer_valuation(q.denominator(), base);
}

Rational norm(const Rational& q, PrimeBase base) {
    const auto v = valuation(q, base);
    if (!v) {
        return Rational(0);
    }
    return power(base.big(), -*v);
}

Rational distance(const Rational& a, const Rational& b, PrimeBase base) {
    return norm(a - b, base);
}

PAdicApprox::PAdicApprox(PrimeBase base, std::int64_t valuation, std::vector<std::uint64_t> digits)
    : base_(base), valuation_(valuation), digits_(std::move(digits)) {
    for (auto d : digits_) {
        if (d >= base.value()) {
            throw std::invalid_argument("digit " + std::to_string(d) + " out of range for base " +
                                        std::to_string(base.value()));
        }
    }
    const auto first = std::find_if(digits_.begin(), digits_.end(), [](auto d) { return d != 0; });
    if (first == digits_.end()) {
        *this = zero(base, valuation + static_cast<std::int64_t>(digits_.size()));
        return;
    }
    const auto lead = first - digits_.begin();
    digits_.erase(digits_.begin(), first);
    valuation_ += lead;
}

PAdicApprox PAdicApprox::zero(PrimeBase base, std::int64_t absolute_precision) {
    PAdicApprox z(base, 0, {1});
    z.zero_ = true;
    if (absolute_precision > 0) {
        z.valuation_ = 0;
        z.digits_.assign(static_cast<std::size_t>(absolute_precision), 0);
    } else {
        z.valuation_ = absolute_precision;
        z.digits_.clear();
    }
    return z;
}

BigInt PAdicApprox::unit_part() const {
    BigInt value = 0;
    const BigInt p = base_.big();
    for (auto it = digits_.rbegin(); it != digits_.rend(); ++it) {
        value = value * p + static_cast<unsigned long>(*it);
    }
    return value;
}

PAdicApprox PAdicApprox::truncated(std::int64_t precision) const {
    if (precision >= this->precision()) {
        return *this;
    }
    if (zero_) {
        return zero(base_, valuation_ + std::max<std::int64_t>(precision, 0));
    }
    return PAdicApprox(base_, valuation_,
                       std::vector<std::uint64_t>(digits_.begin(),
                                                  digits_.begin() + std::max<std::int64_t>(precision, 0)));
}

std::string PAdicApprox::to_literal() const {
    std::string out = "p:" + std::to_string(base_.value()) + " v:" + std::to_string(valuation_) + " d:";
    for (std::size_t j = 0; j < digits_.size(); ++j) {
        if (j > 0) {
            out += ',';
        }
        out += std::to_string(digits_[j]);
    }
    return out;
}

std::string PAdicApprox::render() const {
    const bool wide = base_.value() > 10;
    const std::int64_t top = absolute_precision() - 1;
    const std::int64_t bottom = std::min<std::int64_t>(valuation_, 0);
    std::string out = "...";
    bool first = true;
    auto emit = [&](const std::string& digit) {
        if (wide && !first && out.back() != ',') {
            out += ' ';
        }
        out += digit;
        first = false;
    };
    if (top < 0) {
        out += ',';
        // Positions between the radix point and the first known digit are unknown.
        for (std::int64_t pos = -1; pos > top; --pos) {
            emit("?");
        }
    }
    for (std::int64_t pos = top; pos >= bottom; --pos) {
        std::uint64_t d = 0;
        if (pos >= valuation_ && pos <= top) {
            d = digits_[static_cast<std::size_t>(pos - valuation_)];
        }
        emit(std::to_string(d));
        if (pos == 0 && bottom < 0) {
            out += ',';
        }
    }
    return out;
}

PAdicApprox PAdicApprox::parse(std::string_view text) {
    std::optional<PrimeBase> base;
    std::optional<std::int64_t> v;
    std::optional<std::vector<std::uint64_t>> digits;
    std::size_t i = 0;
    while (i < text.size()) {
        if (std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) {
            ++end;
        }
        const std::string_view token = text.substr(i, end - i);
        if (token.size() < 2 || token[1] != ':') {
            throw ParseError("expected 'p:', 'v:' or 'd:' field", i);
        }
        const std::string_view body = token.substr(2);
        const std::size_t at = i + 2;
        switch (token[0]) {
            case 'p':
                try {
                    base = PrimeBase::parse(body);
                } catch (const ParseError& e) {
                    throw ParseError("malformed prime", at + e.position());
                }
                break;
            case 'v': {
                const BigInt value = parse_integer(body, at);
                if (!value.fits_slong_p()) {
                    throw ParseError("valuation out of range", at);
                }
                v = value.get_si();
                break;
            }
            case 'd': {
                std::vector<std::uint64_t> ds;
                std::size_t j = 0;
                while (j < body.size()) {
                    std::size_t comma = body.find(',', j);
                    if (comma == std::string_view::npos) {
                        comma = body.size();
                    }
                    std::uint64_t d = 0;
                    const auto* first = body.data() + j;
                    const auto* last = body.data() + comma;
                    const auto [ptr, ec] = std::from_chars(first, last, d);
                    if (ec != std::errc() || ptr != last || first == last) {
                        throw ParseError("malformed digit", at + static_cast<std::size_t>(ptr - body.data()));
                    }
                    ds.push_back(d);
                    j = comma + 1;
                }
                digits = std::move(ds);
                break;
            }
            default:
                throw ParseError("unknown field", i);
        }
        i = end;
    }
    if (!base || !v || !digits) {
        throw ParseError("p-adic literal needs p:, v: and d: fields", text.size());
    }
    for (std::size_t j = 0; j < digits->size(); ++j) {
        if ((*digits)[j] >= base->value()) {
            throw ParseError("digit " + std::to_string((*digits)[j]) + " not below the base",
                             text.find("d:") + 2);
        }
    }
    return PAdicApprox(*base, *v, std::move(*digits));
}

PAdicApprox to_digits(const Rational& q, PrimeBase base, std::int64_t precision) {
    if (precision <= 0) {
        throw std::invalid_argument("precision must be positive");
    }
    const auto v = valuation(q, base);
    if (!v) {
        return PAdicApprox::zero(base, precision);
    }
    // Unit part n/d with p dividing neither; its expansion is n * d^-1 mod p^k.
    const Rational unit = q * power(base.big(), -*v);
    const BigInt modulus = pow_p(base, precision);
    const BigInt value = mod(unit.numerator() * inverse_mod(unit.denominator(), modulus), modulus);
    return PAdicApprox(base, *v, base_p_digits(value, base, precision));
}

Rational from_digits(const PAdicApprox& x) {
    if (x.is_zero()) {
        return Rational(0);
    }
    return Rational(x.unit_part()) * power(x.base().big(), x.valuation());
}

PAdicApprox operator-(const PAdicApprox& a) {
    if (a.is_zero()) {
        return a;
    }
    return make(a.base(), a.valuation(), -a.unit_part(), a.absolute_precision());
}

PAdicApprox operator+(const PAdicApprox& a, const PAdicApprox& b) {
    require_same_base(a, b);
    const std::int64_t absolute = std::min(a.absolute_precision(), b.absolute_precision());
    const std::int64_t low = std::min(a.valuation(), b.valuation());
    const BigInt value = a.unit_part() * pow_p(a.base(), a.valuation() - low) +
                         b.unit_part() * pow_p(b.base(), b.valuation() - low);
    return make(a.base(), low, value, absolute);
}

PAdicApprox operator-(const PAdicApprox& a, const PAdicApprox& b) {
    return a + (-b);
}

PAdicApprox operator*(const PAdicApprox& a, const PAdicApprox& b) {
    require_same_base(a, b);
    if (a.is_zero() && b.is_zero()) {
        return PAdicApprox::zero(a.base(), a.absolute_precision() + b.absolute_precision());
    }
    if (a.is_zero()) {
        return PAdicApprox::zero(a.base(), a.absolute_precision() + b.valuation());
    }
    if (b.is_zero()) {
        return PAdicApprox::zero(a.base(), b.absolute_precision() + a.valuation());
    }
    const std::int64_t v = a.valuation() + b.valuation();
    const std::int64_t relative = std::min(a.precision(), b.precision());
    return make(a.base(), v, a.unit_part() * b.unit_part(), v + relative);
}

PAdicApprox operator/(const PAdicApprox& a, const PAdicApprox& b) {
    require_same_base(a, b);
    if (b.is_zero()) {
        throw PrecisionExhausted("divisor is zero to its known precision (absolute precision " +
                                 std::to_string(b.absolute_precision()) + ")");
    }
    if (a.is_zero()) {
        return PAdicApprox::zero(a.base(), a.absolute_precision() - b.valuation());
    }
    const std::int64_t v = a.valuation() - b.valuation();
    const std::int64_t relative = std::min(a.precision(), b.precision());
    const BigInt modulus = pow_p(a.base(), relative);
    const BigInt value = a.unit_part() * inverse_mod(b.unit_part(), modulus);
    return make(a.base(), v, value, v + relative);
}

std::optional<BigInt> sqrt_mod_prime(const BigInt& a, PrimeBase base) {
    const BigInt p = base.big();
    const BigInt r = mod(a, p);
    if (r == 0) {
        return BigInt(0);
    }
    if (p == 2) {
        return r;
    }
    BigInt e = (p - 1) / 2;
    BigInt t;
    mpz_powm(t.get_mpz_t(), r.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    if (t != 1) {
        return std::nullopt;
    }
    // Tonelli-Shanks: p - 1 = q * 2^s with q odd.
    BigInt q = p - 1;
    unsigned long s = mpz_scan1(q.get_mpz_t(), 0);
    mpz_fdiv_q_2exp(q.get_mpz_t(), q.get_mpz_t(), s);
    BigInt z = 2;
    for (;; ++z) {
        mpz_powm(t.get_mpz_t(), z.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
        if (t == p - 1) {
            break;
        }
    }
    BigInt c, x, b, exp;
    mpz_powm(c.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    exp = (q + 1) / 2;
    mpz_powm(x.get_mpz_t(), r.get_mpz_t(), exp.get_mpz_t(), p.get_mpz_t());
    mpz_powm(t.get_mpz_t(), r.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    unsigned long m = s;
    while (t != 1) {
        unsigned long i = 0;
        BigInt t2 = t;
        while (t2 != 1) {
            t2 = mod(t2 * t2, p);
            ++i;
        }
        b = c;
        for (unsigned long j = 0; j + 1 < m - i; ++j) {
            b = mod(b * b, p);
        }
        x = mod(x * b, p);
        c = mod(b * b, p);
        t = mod(t * c, p);
        m = i;
    }
    const BigInt other = p - x;
    return x < other ? x : other;
}

std::optional<PAdicApprox> hensel_sqrt(const Rational& a, PrimeBase base, std::int64_t precision) {
    if (base.value() == 2) {
        throw UnsupportedBase("square roots at p = 2 are not supported");
    }
    if (precision <= 0) {
        throw std::invalid_argument("precision must be positive");
    }
    const auto v = valuation(a, base);
    if (!v) {
        return PAdicApprox::zero(base, precision);
    }
    if (*v % 2 != 0) {
        return std::nullopt;
    }
    const Rational unit = a * power(base.big(), -*v);
    const BigInt modulus = pow_p(base, precision);
    const BigInt u = mod(unit.numerator() * inverse_mod(unit.denominator(), modulus), modulus);
    auto root = sqrt_mod_prime(u, base);
    if (!root) {
        return std::nullopt;
    }
    // Newton lifting x <- x - (x^2 - u) / (2x); the correct digit count doubles each step.
    BigInt x = *root;
    std::int64_t known = 1;
    while (known < precision) {
        known = std::min(2 * known, precision);
        const BigInt m = pow_p(base, known);
        const BigInt correction = mod((x * x - u) * inverse_mod(2 * x, m), m);
        x = mod(x - correction, m);
    }
    return PAdicApprox(base, *v / 2, base_p_digits(x, base, precision));
}

}  // namespace padicprob
