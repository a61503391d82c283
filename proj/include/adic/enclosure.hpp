#pragma once

#include <string>

#include "adic/rational.hpp"

namespace adic {

// Closed interval [lo, hi] known to contain a real quantity. Arithmetic on
// enclosures is exact; transcendental functions round outward through MPFR.
struct Enclosure {
  Rational lo;
  Rational hi;

  Enclosure() = default;
  explicit Enclosure(const Rational& exact) : lo(exact), hi(exact) {}
  Enclosure(Rational l, Rational h);

  Rational width() const { return hi - lo; }
  Rational mid() const { return (lo + hi) / Rational(2); }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  // Sign when the enclosure excludes zero (or is exactly zero), else nullopt-like 2.
  int certain_sign() const;
  std::string str() const;
};

Enclosure operator+(const Enclosure& a, const Enclosure& b);
Enclosure operator-(const Enclosure& a, const Enclosure& b);
Enclosure operator*(const Enclosure& a, const Enclosure& b);
Enclosure operator/(const Enclosure& a, const Enclosure& b);
Enclosure operator*(const Rational& c, const Enclosure& a);

constexpr int kUncertain = 2;

// Default working precision in bits.
constexpr long kDefaultPrecision = 128;

Enclosure log_enclosure(const Rational& x, long precision = kDefaultPrecision);
Enclosure log_enclosure(const Enclosure& x, long precision = kDefaultPrecision);
Enclosure exp_enclosure(const Enclosure& x, long precision = kDefaultPrecision);
// n-th root of a nonnegative enclosure.
Enclosure root_enclosure(const Enclosure& x, unsigned long n, long precision = kDefaultPrecision);
// x^r for x > 0 and rational r.
Enclosure pow_enclosure(const Rational& x, const Rational& r, long precision = kDefaultPrecision);
Enclosure pow_enclosure(const Enclosure& x, const Rational& r, long precision = kDefaultPrecision);

double to_double(const Enclosure& e);

}  // namespace adic
