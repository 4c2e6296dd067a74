#include "padicprob/rational.hpp"

#include <cctype>

namespace padicprob {

Rational::Rational(const BigInt& num, const BigInt& den) {
    if (den == 0) {
        throw std::domain_error("rational with zero denominator");
    }
    value_ = mpq_class(num, den);
    value_.canonicalize();
}

Rational::Rational(const mpq_class& value) : value_(value) {
    value_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero()) {
        throw std::domain_error("division by zero");
    }
    value_ /= o.value_;
    return *this;
}

std::string Rational::to_string() const {
    if (value_.get_den() == 1) {
        return value_.get_num().get_str();
    }
    return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

Rational abs(const Rational& q) {
    return q.sign() < 0 ? -q : q;
}

Rational power(const BigInt& base, std::int64_t exponent) {
    BigInt magnitude;
    const auto e = static_cast<unsigned long>(exponent < 0 ? -exponent : exponent);
    mpz_pow_ui(magnitude.get_mpz_t(), base.get_mpz_t(), e);
    if (exponent >= 0) {
        return Rational(magnitude);
    }
    return Rational(BigInt(1), magnitude);
}

BigInt parse_integer(std::string_view text, std::size_t offset) {
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
        negative = text[i] == '-';
        ++i;
    }
    if (i == text.size()) {
        throw ParseError("expected digits", offset + i);
    }
    for (std::size_t j = i; j < text.size(); ++j) {
        if (!std::isdigit(static_cast<unsigned char>(text[j]))) {
            throw ParseError(std::string("unexpected character '") + text[j] + "'", offset + j);
        }
    }
    BigInt value(std::string(text.substr(i)), 10);
    return negative ? BigInt(-value) : value;
}

Rational Rational::parse(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        return Rational(parse_integer(text));
    }
    const BigInt num = parse_integer(text.substr(0, slash));
    const BigInt den = parse_integer(text.substr(slash + 1), slash + 1);
    if (den == 0) {
        throw ParseError("zero denominator", slash + 1);
    }
    return Rational(num, den);
}

}  // namespace padicprob
