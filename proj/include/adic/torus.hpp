#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adic/enclosure.hpp"
#include "adic/rational.hpp"

namespace adic {

struct BaseWitness {
  long base = 0;
  BigInt r;              // nearest integer to x log_base 2
  int sign = 0;          // sign of 2^x - base^r
  bool power_of_two = false;
};

// x with |2^x / n_i^r_i - 1| < epsilon for every listed base, checked exactly as
// eps_den |2^x - n^r| < eps_num n^r.
struct XCertificate {
  long x = 0;
  Rational epsilon;
  std::vector<long> bases;
  std::vector<BaseWitness> witnesses;
};

// If n = 2^e returns e, else 0.
long power_of_two_exponent(long n);

// Exact test of eps_den |2^x - n^r| < eps_num n^r.
bool relative_gap_below(long x, long n, const BigInt& r, const Rational& epsilon);

// Exact re-check: the inequality for every base, r minimal among r-1, r, r+1,
// and the stored signs and flags.
bool verify_x_certificate(const XCertificate& cert, std::string* reason = nullptr);

struct FindXOptions {
  long workers = 1;  // shards of the x range searched concurrently
};

// First x in [x_min, x_max] that certifies; SearchExhausted otherwise.
XCertificate find_x(const std::vector<long>& bases, const Rational& epsilon, long x_min, long x_max,
                    const FindXOptions& options = {});

// Fractional parts {x log_n 2} with rational enclosures.
struct OrbitPoint {
  long x = 0;
  std::vector<long> bases;
  std::vector<Enclosure> coordinates;
  long precision_bits = 0;
};

OrbitPoint orbit_point(long x, const std::vector<long>& bases, long precision_bits = 64);

// sum_i a_i log_{n_i} 2 = c with integer a_i, c.
struct DependenceRelation {
  std::vector<BigInt> coefficients;
  BigInt constant;
  std::string certificate;  // the exact multiplicative identity used
};

// n = root^exponent with the exponent maximal.
std::pair<BigInt, long> perfect_power_root(long n);

std::optional<DependenceRelation> rational_dependence_scan(const std::vector<long>& bases, long coeff_bound);
// Exact check of a relation by root-class decomposition.
bool verify_relation(const std::vector<long>& bases, const DependenceRelation& relation);

struct TorusDistance {
  Enclosure partial;  // enclosure of the first `terms` summands
  Rational tail;      // bound on the remaining summands, 2^-terms
  Enclosure total() const { return {partial.lo, partial.hi + tail}; }
};

// d(x, y) = sum_k |x_k - y_k| / 2^k with |.| the distance on R/Z.
TorusDistance torus_metric(const std::vector<Enclosure>& x, const std::vector<Enclosure>& y, long terms);
TorusDistance torus_metric(const std::vector<Rational>& x, const std::vector<Rational>& y, long terms);

}  // namespace adic
