#pragma once

#include <gmpxx.h>

#include <string>

namespace etc {

// All statistic arithmetic is exact; floating point appears only at
// presentation boundaries (to_decimal) and in the simulation generators.
using BigInt = mpz_class;
using Rational = mpq_class;

// Parses "3", "-2", "1/3", "0.25", ".5" into an exact rational. Decimal
// strings convert with a base-10 denominator, never through binary floating
// point. Throws ParseError on malformed input.
Rational parse_rational(const std::string& text);

// Canonical "num/den" rendering (den always printed, e.g. "1/2", "3/1").
std::string rational_str(const Rational& q);

// Decimal rendering with 17 significant digits: round-trippable through
// double, deterministic across platforms.
std::string to_decimal(const Rational& q);
std::string to_decimal(double x);

BigInt binomial(unsigned long n, unsigned long k);

}  // namespace etc
