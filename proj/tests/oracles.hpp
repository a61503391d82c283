#pragma once

// Brute-force references used only by the tests. Nothing here calls into the
// library's number theory, so agreement is an independent check.

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include <gmpxx.h>

namespace oracle {

using Z = mpz_class;
using Q = mpq_class;

inline Z zpow(long b, long e) {
  Z out = 1;
  for (long i = 0; i < e; ++i) out *= b;
  return out;
}

inline long phi(long n) {
  long out = 0;
  for (long i = 1; i <= n; ++i) {
    long a = i, b = n;
    while (b) {
      long t = a % b;
      a = b;
      b = t;
    }
    if (a == 1) ++out;
  }
  return out;
}

// Least t >= 1 with a^t = 1 mod m by repeated multiplication.
inline Z order(const Z& a, const Z& m) {
  Z x = a % m;
  Z t = 1;
  while (x != 1 % m) {
    x = (x * a) % m;
    ++t;
  }
  return t;
}

// O_m(u, v) for m = 1..depth.
inline std::vector<Z> orders(long u, long v, long depth) {
  const Z g = zpow(v, phi(u));
  std::vector<Z> out;
  for (long m = 1; m <= depth; ++m) out.push_back(order(g, zpow(u, m)));
  return out;
}

// Smallest m with v^phi(u) != 1 mod u^(m+1).
inline long m_uv(long u, long v) {
  const Z g = zpow(v, phi(u));
  long m = 0;
  while (g % zpow(u, m + 1) == 1) ++m;
  return m;
}

struct Pair {
  long m2;
  Z j;
};

// Every m2 <= max_m2 for which k v^(m2 phi(u)) - 1 is divisible by
// u^(m1 phi(v)), with the quotient j.
inline std::vector<Pair> pairs(long u, long v, long m1, const Z& k, long max_m2) {
  const Z M = zpow(u, m1 * phi(v));
  std::vector<Pair> out;
  for (long m2 = 1; m2 <= max_m2; ++m2) {
    const Z lhs = k * zpow(v, m2 * phi(u)) - 1;
    if (lhs % M == 0) out.push_back({m2, lhs / M});
  }
  return out;
}

// |2^x / n^r - 1| < eps for some r, checking every r near x log_n 2.
inline std::optional<long> approx_witness(long x, long n, const Q& eps, bool exhaustive) {
  const Z two = zpow(2, x);
  long lo = 0, hi = x;
  if (!exhaustive) {
    const double c = x * std::log(2.0) / std::log(static_cast<double>(n));
    lo = std::max(0L, static_cast<long>(std::floor(c)) - 2);
    hi = static_cast<long>(std::ceil(c)) + 2;
  }
  std::optional<long> best;
  Q best_gap;
  for (long r = lo; r <= hi; ++r) {
    const Z p = zpow(n, r);
    Q gap = Q(two, p) - 1;
    gap = abs(gap);
    if (!best || gap < best_gap) {
      best = r;
      best_gap = gap;
    }
  }
  if (best && best_gap < eps) return best;
  return std::nullopt;
}

inline std::optional<long> first_x(const std::vector<long>& bases, const Q& eps, long x_max, bool exhaustive) {
  for (long x = 1; x <= x_max; ++x) {
    bool ok = true;
    for (long n : bases) {
      if (!approx_witness(x, n, eps, exhaustive)) {
        ok = false;
        break;
      }
    }
    if (ok) return x;
  }
  return std::nullopt;
}

// All n in [1, n_max] with (k1 q^n - 1) p2^m2 = (k2 q^n - 1) p1^m1.
inline std::set<long> three_base(long p1, long m1, const Z& k1, long p2, long m2, const Z& k2, long q, long n_max) {
  std::set<long> out;
  const Z P1 = zpow(p1, m1), P2 = zpow(p2, m2);
  Z qn = 1;
  for (long n = 1; n <= n_max; ++n) {
    qn *= q;
    if ((k1 * qn - 1) * P2 == (k2 * qn - 1) * P1) out.insert(n);
  }
  return out;
}

// Integral of a step density by summing over a uniform grid of 2^-depth
// cells; density(x) is evaluated at each cell's left endpoint.
template <typename Density>
Q integrate(const Density& density, const Q& left, const Q& right, long depth) {
  const Q h(1, zpow(2, depth));
  Q total = 0;
  for (Q x = left; x < right; x += h) total += density(x) * h;
  return total;
}

}  // namespace oracle
