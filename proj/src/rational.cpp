#include "bvpair/rational.hpp"

#include "bvpair/error.hpp"

#include <cctype>
#include <cmath>

namespace bvpair {

namespace {

bool is_integer_literal(std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

} // namespace

Rational parse_rational(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    const auto slash = s.find('/');
    std::string_view num = s.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view("1") : s.substr(slash + 1);
    if (!is_integer_literal(num) || !is_integer_literal(den) || den[0] == '-' || den[0] == '+')
        throw Error(ErrorCode::Parse, "not a rational literal: '" + std::string(text) + "'");
    std::string n(num);
    if (n[0] == '+') n.erase(0, 1);
    mpz_class p(n, 10), q(std::string(den), 10);
    if (q == 0) throw Error(ErrorCode::Parse, "zero denominator in '" + std::string(text) + "'");
    Rational r(p, q);
    r.canonicalize();
    return r;
}

std::string to_string(const Rational& r) { return r.get_str(10); }

Rational pow_q(const Rational& base, long exponent) {
    Rational result = 1;
    Rational b = base;
    unsigned long e = exponent < 0 ? static_cast<unsigned long>(-exponent) : static_cast<unsigned long>(exponent);
    while (e) {
        if (e & 1u) result *= b;
        b *= b;
        e >>= 1u;
    }
    if (exponent < 0) result = 1 / result;
    return result;
}

Rational from_double(double value) {
    if (!std::isfinite(value)) throw Error(ErrorCode::InvalidArgument, "non-finite tolerance");
    Rational r(value);  // mpq from double is exact
    r.canonicalize();
    return r;
}

} // namespace bvpair
