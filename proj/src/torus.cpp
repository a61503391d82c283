#include "adic/torus.hpp"

#include <gmp.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <numeric>

#include "adic/error.hpp"
#include "adic/number_theory.hpp"

namespace adic {

namespace {

struct BaseConstants {
  long n = 0;
  long two_exponent = 0;     // n = 2^two_exponent, or 0
  long double theta = 0;     // log_n 2
  long double log_n = 0;
};

BaseConstants constants_for(long n) {
  BaseConstants c;
  c.n = n;
  c.two_exponent = power_of_two_exponent(n);
  mpfr_t a, b;
  mpfr_inits2(128, a, b, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_si(b, n, MPFR_RNDN);
  mpfr_log(b, b, MPFR_RNDN);
  c.log_n = mpfr_get_ld(b, MPFR_RNDN);
  mpfr_const_log2(a, MPFR_RNDN);
  mpfr_div(a, a, b, MPFR_RNDN);
  c.theta = mpfr_get_ld(a, MPFR_RNDN);
  mpfr_clears(a, b, static_cast<mpfr_ptr>(nullptr));
  return c;
}

BigInt two_pow(long x) { return BigInt(1) << static_cast<unsigned long>(x); }

// Nearest integer to the rational x / e, halves rounding up.
BigInt nearest(const Rational& value) { return (value + Rational(1, 2)).floor(); }

BigInt candidate_r(long x, const BaseConstants& c) {
  if (c.two_exponent > 0) return nearest(Rational(x, c.two_exponent));
  long double t = static_cast<long double>(x) * c.theta;
  return BigInt(static_cast<long>(std::floor(t + 0.5L)));
}

// Cheap necessary condition; rejects x only when the gap certainly exceeds epsilon.
bool prefilter(long x, const BaseConstants& c, double eps) {
  if (c.two_exponent > 0) return true;
  long double t = static_cast<long double>(x) * c.theta;
  long double s = std::fabs((t - std::floor(t + 0.5L)) * c.log_n);
  long double lower = s / (1 + s);
  return lower <= static_cast<long double>(eps) * (1 + 1e-6L) + 1e-9L;
}

// |2^x - n^a| n^b < |2^x - n^b| n^a, i.e. gap(a) < gap(b).
bool gap_less(const BigInt& two_x, long n, const BigInt& a, const BigInt& b) {
  BigInt na = pow(BigInt(n), a.get_ui());
  BigInt nb = pow(BigInt(n), b.get_ui());
  return abs(BigInt(two_x - na)) * nb < abs(BigInt(two_x - nb)) * na;
}

std::optional<XCertificate> certify(long x, const std::vector<BaseConstants>& consts, const Rational& epsilon,
                                    double eps) {
  for (const auto& c : consts) {
    if (!prefilter(x, c, eps)) return std::nullopt;
  }
  XCertificate cert;
  cert.x = x;
  cert.epsilon = epsilon;
  BigInt two_x = two_pow(x);
  for (const auto& c : consts) {
    BigInt r = candidate_r(x, c);
    if (!relative_gap_below(x, c.n, r, epsilon)) return std::nullopt;
    BigInt nr = pow(BigInt(c.n), r.get_ui());
    cert.bases.push_back(c.n);
    cert.witnesses.push_back({c.n, r, sgn(BigInt(two_x - nr)), c.two_exponent > 0});
  }
  return cert;
}

std::optional<XCertificate> scan_range(long lo, long hi, const std::vector<BaseConstants>& consts,
                                       const Rational& epsilon, double eps) {
  for (long x = lo; x <= hi; ++x) {
    if (auto cert = certify(x, consts, epsilon, eps)) return cert;
  }
  return std::nullopt;
}

}  // namespace

long power_of_two_exponent(long n) {
  if (n < 2 || (n & (n - 1)) != 0) return 0;
  long e = 0;
  while (n > 1) {
    n >>= 1;
    ++e;
  }
  return e;
}

bool relative_gap_below(long x, long n, const BigInt& r, const Rational& epsilon) {
  require(r >= 0, "exponent r must be nonnegative");
  BigInt nr = pow(BigInt(n), r.get_ui());
  return abs(BigInt(two_pow(x) - nr)) * epsilon.denominator() < epsilon.numerator() * nr;
}

bool verify_x_certificate(const XCertificate& cert, std::string* reason) {
  auto bad = [&](const std::string& why) {
    if (reason) *reason = why;
    return false;
  };
  if (cert.x < 0) return bad("x must be nonnegative");
  if (!(cert.epsilon.sign() > 0 && cert.epsilon < Rational(1))) return bad("epsilon must lie in (0, 1)");
  if (cert.bases.size() != cert.witnesses.size()) return bad("one witness per base required");
  BigInt two_x = two_pow(cert.x);
  for (std::size_t i = 0; i < cert.bases.size(); ++i) {
    const auto& w = cert.witnesses[i];
    const long n = cert.bases[i];
    const std::string tag = "base " + std::to_string(n) + ": ";
    if (w.base != n) return bad(tag + "witness base mismatch");
    if (w.r < 0) return bad(tag + "negative exponent");
    if (!relative_gap_below(cert.x, n, w.r, cert.epsilon)) return bad(tag + "gap not below epsilon");
    if (gap_less(two_x, n, BigInt(w.r + 1), w.r)) return bad(tag + "r + 1 is closer");
    if (w.r >= 1 && gap_less(two_x, n, BigInt(w.r - 1), w.r)) return bad(tag + "r - 1 is closer");
    if (w.sign != sgn(BigInt(two_x - pow(BigInt(n), w.r.get_ui())))) return bad(tag + "wrong sign");
    if (w.power_of_two != (power_of_two_exponent(n) > 0)) return bad(tag + "wrong power-of-two flag");
  }
  return true;
}

XCertificate find_x(const std::vector<long>& bases, const Rational& epsilon, long x_min, long x_max,
                    const FindXOptions& options) {
  require(!bases.empty(), "at least one base required");
  for (long n : bases) require(n >= 2, "bases must be at least 2");
  require(epsilon.sign() > 0 && epsilon < Rational(1), "epsilon must lie in (0, 1)");
  require(x_min >= 1, "x_min must be at least 1");
  require(x_max >= x_min, "x_max must be at least x_min");
  std::vector<BaseConstants> consts;
  for (long n : bases) consts.push_back(constants_for(n));
  const double eps = epsilon.to_double();

  const long workers = std::max<long>(1, options.workers);
  if (workers == 1) {
    if (auto cert = scan_range(x_min, x_max, consts, epsilon, eps)) return *cert;
  } else {
    constexpr long kChunk = 8192;
    for (long start = x_min; start <= x_max; start += kChunk * workers) {
      std::vector<std::future<std::optional<XCertificate>>> jobs;
      for (long w = 0; w < workers; ++w) {
        long lo = start + w * kChunk;
        if (lo > x_max) break;
        long hi = std::min(x_max, lo + kChunk - 1);
        jobs.push_back(std::async(std::launch::async, [=, &consts] { return scan_range(lo, hi, consts, epsilon, eps); }));
      }
      // Chunks are in increasing order, so the first hit is the minimum.
      std::optional<XCertificate> best;
      for (auto& job : jobs) {
        auto got = job.get();
        if (!best && got) best = std::move(got);
      }
      if (best) return *best;
    }
  }
  fail(ErrorKind::SearchExhausted, "no x in [" + std::to_string(x_min) + ", " + std::to_string(x_max) +
                                       "] certifies epsilon = " + epsilon.str());
}

OrbitPoint orbit_point(long x, const std::vector<long>& bases, long precision_bits) {
  require(precision_bits >= 64, "precision_bits must be at least 64");
  require(x >= 0, "x must be nonnegative");
  OrbitPoint out;
  out.x = x;
  out.bases = bases;
  out.precision_bits = precision_bits;
  const Rational target = power_of(2, -(precision_bits / 2));
  for (long n : bases) {
    require(n >= 2, "bases must be at least 2");
    long e = power_of_two_exponent(n);
    if (e > 0 || x == 0) {
      Rational v = e > 0 ? Rational(x, e) : Rational(0);
      Rational frac = v - Rational(v.floor());
      out.coordinates.emplace_back(frac);
      continue;
    }
    long bits = precision_bits + 64 + static_cast<long>(mpz_sizeinbase(BigInt(x).get_mpz_t(), 2));
    bool done = false;
    for (int attempt = 0; attempt < 6 && !done; ++attempt, bits *= 2) {
      Enclosure ln2 = log_enclosure(Rational(2), bits);
      Enclosure lnn = log_enclosure(Rational(n), bits);
      Enclosure value = Rational(x) * (ln2 / lnn);
      BigInt fl = value.lo.floor();
      if (fl != value.hi.floor()) continue;
      Enclosure frac(value.lo - Rational(fl), value.hi - Rational(fl));
      if (frac.width() < target) {
        out.coordinates.push_back(frac);
        done = true;
      }
    }
    if (!done) {
      fail(ErrorKind::BoundaryStraddle, "cannot separate {" + std::to_string(x) + " log_" + std::to_string(n) +
                                            " 2} from an integer");
    }
  }
  return out;
}

std::pair<BigInt, long> perfect_power_root(long n) {
  require(n >= 2, "perfect_power_root needs n >= 2");
  const BigInt value(n);
  long max_e = static_cast<long>(mpz_sizeinbase(value.get_mpz_t(), 2));
  for (long e = max_e; e >= 2; --e) {
    BigInt root;
    if (mpz_root(root.get_mpz_t(), value.get_mpz_t(), static_cast<unsigned long>(e)) != 0) {
      if (pow(root, static_cast<unsigned long>(e)) == value) return {root, e};
    }
  }
  return {value, 1};
}

bool verify_relation(const std::vector<long>& bases, const DependenceRelation& relation) {
  if (relation.coefficients.size() != bases.size()) return false;
  bool nonzero = false;
  // Per root class, sum a_i / e_i; the class of 2 contributes a rational constant.
  std::map<BigInt, Rational> per_class;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    if (relation.coefficients[i] == 0) continue;
    nonzero = true;
    auto [root, e] = perfect_power_root(bases[i]);
    if (pow(root, static_cast<unsigned long>(e)) != BigInt(bases[i])) return false;
    per_class[root] += Rational(relation.coefficients[i], BigInt(e));
  }
  if (!nonzero) return false;
  Rational constant(0);
  for (const auto& [root, sum] : per_class) {
    if (root == 2) {
      constant += sum;
    } else if (sum.sign() != 0) {
      return false;
    }
  }
  return constant == Rational(relation.constant);
}

std::optional<DependenceRelation> rational_dependence_scan(const std::vector<long>& bases, long coeff_bound) {
  require(coeff_bound >= 1, "coeff_bound must be at least 1");
  const std::size_t n = bases.size();
  std::vector<std::pair<BigInt, long>> roots;
  for (long b : bases) roots.push_back(perfect_power_root(b));

  std::optional<DependenceRelation> best;
  BigInt best_norm;
  auto consider = [&](DependenceRelation rel, BigInt norm) {
    if (abs(rel.constant) > coeff_bound || norm > coeff_bound) return;
    if (!verify_relation(bases, rel)) return;
    if (!best || norm < best_norm) {
      best = std::move(rel);
      best_norm = norm;
    }
  };
  // Minimal-support relations generate all others: a single power of 2, or a
  // pair of bases sharing a root.
  for (std::size_t i = 0; i < n; ++i) {
    if (roots[i].first == 2) {
      DependenceRelation rel{std::vector<BigInt>(n, BigInt(0)), BigInt(1), ""};
      rel.coefficients[i] = roots[i].second;
      rel.certificate = std::to_string(bases[i]) + " = 2^" + std::to_string(roots[i].second);
      consider(std::move(rel), BigInt(roots[i].second));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (roots[i].first != roots[j].first || roots[i].first == 2) continue;
      long ei = roots[i].second, ej = roots[j].second;
      long g = std::gcd(ei, ej);
      DependenceRelation rel{std::vector<BigInt>(n, BigInt(0)), BigInt(0), ""};
      rel.coefficients[i] = ei / g;
      rel.coefficients[j] = -(ej / g);
      rel.certificate = std::to_string(bases[i]) + "^" + std::to_string(ej / g) + " = " + std::to_string(bases[j]) +
                        "^" + std::to_string(ei / g);
      consider(std::move(rel), BigInt(std::max(ei, ej) / g));
    }
  }
  return best;
}

namespace {

// Range of t -> dist(t, Z) over an enclosure of t.
Enclosure circle_distance(const Enclosure& d) {
  auto f = [](const Rational& t) {
    Rational frac = t - Rational(t.floor());
    return min(frac, Rational(1) - frac);
  };
  Rational lo = min(f(d.lo), f(d.hi));
  Rational hi = max(f(d.lo), f(d.hi));
  if (d.hi.floor() > d.lo.floor() || d.lo.is_integer()) lo = Rational(0);
  Rational shifted_lo = d.lo - Rational(1, 2), shifted_hi = d.hi - Rational(1, 2);
  if (shifted_hi.floor() > shifted_lo.floor() || shifted_lo.is_integer()) hi = Rational(1, 2);
  return {lo, hi};
}

}  // namespace

TorusDistance torus_metric(const std::vector<Enclosure>& x, const std::vector<Enclosure>& y, long terms) {
  require(terms >= 1, "terms must be at least 1");
  TorusDistance out{Enclosure(Rational(0)), power_of(2, -terms)};
  for (long k = 1; k <= terms; ++k) {
    auto idx = static_cast<std::size_t>(k - 1);
    Enclosure xk = idx < x.size() ? x[idx] : Enclosure(Rational(0));
    Enclosure yk = idx < y.size() ? y[idx] : Enclosure(Rational(0));
    out.partial = out.partial + power_of(2, -k) * circle_distance(xk - yk);
  }
  return out;
}

TorusDistance torus_metric(const std::vector<Rational>& x, const std::vector<Rational>& y, long terms) {
  std::vector<Enclosure> ex, ey;
  for (const auto& v : x) ex.emplace_back(v);
  for (const auto& v : y) ey.emplace_back(v);
  return torus_metric(ex, ey, terms);
}

}  // namespace adic
