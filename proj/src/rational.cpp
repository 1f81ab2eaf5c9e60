#include "etc/rational.hpp"

#include <cctype>
#include <cstdio>

#include "etc/errors.hpp"

namespace etc {

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

}  // namespace

Rational parse_rational(const std::string& text) {
    std::string s = text;
    // trim
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    if (s.empty()) throw ParseError("empty rational", 0, 0);

    bool negative = false;
    if (s[0] == '+' || s[0] == '-') {
        negative = s[0] == '-';
        s.erase(s.begin());
    }
    if (s.empty()) throw ParseError("malformed rational '" + text + "'", 0, 0);

    Rational q;
    auto slash = s.find('/');
    auto dot = s.find('.');
    if (slash != std::string::npos) {
        std::string num = s.substr(0, slash);
        std::string den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            throw ParseError("malformed rational '" + text + "'", 0, 0);
        BigInt d(den);
        if (d == 0) throw ParseError("zero denominator in '" + text + "'", 0, 0);
        q = Rational(BigInt(num), d);
    } else if (dot != std::string::npos) {
        std::string whole = s.substr(0, dot);
        std::string frac = s.substr(dot + 1);
        if (whole.empty() && frac.empty())
            throw ParseError("malformed rational '" + text + "'", 0, 0);
        if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)))
            throw ParseError("malformed rational '" + text + "'", 0, 0);
        BigInt num = whole.empty() ? BigInt(0) : BigInt(whole);
        BigInt den = 1;
        for (char c : frac) {
            num = num * 10 + (c - '0');
            den *= 10;
        }
        q = Rational(num, den);
    } else {
        if (!all_digits(s)) throw ParseError("malformed rational '" + text + "'", 0, 0);
        q = Rational(BigInt(s));
    }
    q.canonicalize();
    if (negative) q = -q;
    return q;
}

std::string rational_str(const Rational& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string to_decimal(const Rational& q) {
    return to_decimal(q.get_d());
}

std::string to_decimal(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

BigInt binomial(unsigned long n, unsigned long k) {
    BigInt r;
    if (k > n) return BigInt(0);
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

}  // namespace etc
