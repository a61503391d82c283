#include "adic/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adic/error.hpp"

namespace adic {

namespace {

BigInt ipow(long base, long exponent) { return pow(BigInt(base), static_cast<unsigned long>(exponent)); }

// Writes zeta = N / B^L with L minimal; zeta is the right endpoint of child
// N mod B of the level L-1 interval.
TargetRecord make_target(long multiplier, long base, const Rational& zeta, const AdicInterval& I) {
  const BigInt den = zeta.denominator();
  BigInt scale = 1;
  long level = 0;
  while (!mpz_divisible_p(scale.get_mpz_t(), den.get_mpz_t())) {
    scale *= base;
    ++level;
    require(level < 1000000, "zeta is not a base-adic point");
  }
  require(level >= 1, "zeta must not be an integer");
  BigInt numer = zeta.numerator() * (scale / den);
  BigInt y = mod(numer, BigInt(base));
  require(y != 0, "zeta level is not minimal");
  TargetRecord t;
  t.multiplier = multiplier;
  t.base = base;
  t.J = AdicInterval(base, level - 1, BigInt((numer - y) / base + 1));
  t.zeta = zeta;
  t.child = y.get_si();
  t.gap = zeta - z_point(I);
  return t;
}

double log2_big(const BigInt& x) {
  long e = 0;
  double m = mpz_get_d_2exp(&e, x.get_mpz_t());
  return std::log2(m) + static_cast<double>(e);
}

// Smallest t2 >= 1 with v^(t2 phi_u) M > ((v-1) M + 1) B^T, i.e. the
// strict inequality (v-1)/V + 1/(M V) < 1/B^T.
long required_t2(long v, long phi_u, const BigInt& M, const BigInt& bmax_pow) {
  const BigInt rhs = ((v - 1) * M + 1) * bmax_pow;
  const BigInt step = ipow(v, phi_u);
  BigInt V = step;
  long t2 = 1;
  while (V * M <= rhs) {
    V *= step;
    ++t2;
  }
  return t2;
}

std::string fail_reason(std::string* reason, const std::string& why) {
  if (reason) *reason = why;
  return why;
}

// Conditions shared by every selection: I inside J~, zeta interior to I and
// to a child boundary of J, J minimal, and 0 < gap <= eps |I|.
bool verify_common(const SelectionCertificate& c, std::string* reason) {
  auto bad = [&](const std::string& why) {
    fail_reason(reason, why);
    return false;
  };
  if (c.I.base() != c.base_v) return bad("I must be base v");
  if (!c.j_tilde.contains(c.I.plain())) return bad("I is not inside J~");
  if (c.j_prime.base() != c.base_v || !(c.j_prime == largest_contained(c.base_v, c.j_tilde))) {
    return bad("J' is not the largest v-adic interval inside J~");
  }
  if (c.targets.empty()) return bad("no targets");
  const Rational z = z_point(c.I);
  for (const auto& t : c.targets) {
    const std::string tag = "target base " + std::to_string(t.base) + ": ";
    if (t.J.base() != t.base) return bad(tag + "J has the wrong base");
    if (t.child < 1 || t.child > t.base - 1) return bad(tag + "zeta is not an interior child endpoint");
    if (t.zeta != t.J.left() + Rational(t.child) * grid_step(t.base, t.J.level() + 1)) {
      return bad(tag + "zeta does not match the stated child");
    }
    // (1) zeta to the right of Z(I)
    if (t.gap != t.zeta - z || t.gap.sign() <= 0) return bad(tag + "gap must equal zeta - Z(I) > 0");
    // (2) I inside J
    if (!t.J.plain().contains(c.I.plain())) return bad(tag + "I is not inside J");
    // (3) zeta interior to I, so J is the smallest containing interval
    if (!(c.I.left() < t.zeta && t.zeta < c.I.right())) return bad(tag + "zeta is not interior to I");
    if (!(smallest_containing(t.base, c.I.plain()) == t.J)) return bad(tag + "J is not minimal");
    // (4) closeness
    if (t.gap > c.epsilon * c.I.length()) return bad(tag + "gap exceeds eps |I|");
  }
  return true;
}

bool verify_revolving(const SelectionCertificate& c, std::string* reason) {
  auto bad = [&](const std::string& why) {
    fail_reason(reason, why);
    return false;
  };
  const long phi_u = totient(c.base_u), phi_v = totient(c.base_v);
  const BigInt M = ipow(c.base_u, c.t1 * phi_v);
  const BigInt V = ipow(c.base_v, c.t2 * phi_u);
  if (c.k * V - c.j * M != 1) return bad("k v^(t2 phi(u)) - j u^(t1 phi(v)) != 1");
  if (mod(BigInt(c.j + 1), BigInt(c.base_v)) != 0) return bad("j is not -1 mod v");
  OrderProfile prof = scan_order_profile(c.base_u, c.base_v, 0);
  if (c.t1 * phi_v <= prof.m_uv) return bad("t1 too small");
  if (mod(c.k, ipow(c.base_u, prof.c_uv + 1)) != 1) return bad("k is not 1 mod u^(C+1)");
  if (z_point(c.I) != Rational(c.j, V)) return bad("Z(I) != j / v^(t2 phi(u))");
  const Rational gap(BigInt(1), BigInt(M * V));
  for (const auto& t : c.targets) {
    if (t.base != c.base_u * t.multiplier) return bad("target base is not u c'");
    if (t.zeta != Rational(c.k, M)) return bad("zeta != k / u^(t1 phi(v))");
    if (t.gap != gap) return bad("gap != 1/(u^(t1 phi(v)) v^(t2 phi(u)))");
  }
  return true;
}

bool verify_two_base(const SelectionCertificate& c, std::string* reason) {
  auto bad = [&](const std::string& why) {
    fail_reason(reason, why);
    return false;
  };
  const long p = c.base_u, q = c.base_v;
  if (c.targets.size() != 1) return bad("two-base certificate has one target");
  if (c.m < 1 || c.n < 0 || (c.t1 * (q - 1)) % c.m != 0) return bad("bad exponents");
  const long s = c.t1 * (q - 1) / c.m;
  const BigInt B = ipow(p, c.m) * ipow(q, c.n);
  const BigInt P = ipow(p, c.t1 * (q - 1));
  const BigInt Q = ipow(q, c.t2 * (p - 1));
  const auto& t = c.targets.front();
  if (t.base != B) return bad("target base is not p^m q^n");
  if (t.zeta != Rational(c.k, pow(B, static_cast<unsigned long>(s)))) return bad("Y(J) != k / (p^m q^n)^s");
  if (t.zeta != y_point(t.J)) return bad("zeta is not Y(J)");
  if (c.k * Q - c.j * P != 1) return bad("k q^(m2(p-1)) - j p^(m1(q-1)) != 1");
  if (mod(BigInt(c.j + 1), BigInt(q)) != 0) return bad("j is not -1 mod q");
  const BigInt qns = ipow(q, c.n * s);
  if (z_point(c.I) != Rational(c.j, BigInt(qns * Q))) return bad("Z(I) != j / q^(ns + m2(p-1))");
  if (t.gap != Rational(BigInt(1), BigInt(P * Q * qns))) return bad("gap does not match the closed form");
  if (!(Q > 10 * q * P)) return bad("q^(m2(p-1)) > 10 q p^(m1(q-1)) fails");
  if (!(t.zeta - c.I.left() < Rational(BigInt(1), BigInt(10 * pow(B, static_cast<unsigned long>(s)))))) {
    return bad("|[l(I), Y(J)]| is not below (p^m q^n)^-s / 10");
  }
  return true;
}

}  // namespace

bool verify_selection(const SelectionCertificate& cert, std::string* reason) {
  try {
    if (!verify_common(cert, reason)) return false;
    return cert.kind == SelectionKind::Revolving ? verify_revolving(cert, reason) : verify_two_base(cert, reason);
  } catch (const Error& e) {
    fail_reason(reason, e.what());
    return false;
  }
}

std::vector<long> non_coprime_multipliers(long u, const std::vector<long>& multipliers) {
  std::vector<std::pair<long, std::size_t>> keyed;
  for (std::size_t i = 0; i < multipliers.size(); ++i) {
    if (std::gcd(u, multipliers[i]) > 1) keyed.emplace_back(multipliers[i], i);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<long> out;
  for (const auto& [c, i] : keyed) out.push_back(c);
  return out;
}

SelectionCertificate select_revolving(long u, long v, const std::vector<long>& multipliers,
                                      const PlainInterval& j_tilde, const Rational& epsilon,
                                      const SelectionOptions& options) {
  require(!multipliers.empty(), "at least one multiplier required");
  for (long c : multipliers) {
    if (c < 1) fail(ErrorKind::MultiplierDegenerate, "u c' = " + std::to_string(u * c) + " is not a valid base");
  }
  require(v < u, "v must be smaller than u");
  require(epsilon.sign() > 0, "epsilon must be positive");
  require(PlainInterval(0, 1).contains(j_tilde) || (j_tilde.left.sign() >= 0 && j_tilde.right <= Rational(1)),
          "J~ must lie in [0, 1]");

  const OrderProfile prof = scan_order_profile(u, v, 0);
  const AdicInterval jp = largest_contained(v, j_tilde);
  const long bmax = u * *std::max_element(multipliers.begin(), multipliers.end());

  long t1_min = std::max({prof.m_uv / prof.phi_v + 1, jp.level() + 1, 1L});
  while (!(Rational(BigInt(1), ipow(u, t1_min * prof.phi_v)) < epsilon * Rational(v))) {
    ++t1_min;
    if (t1_min > options.max_t1) {
      fail(ErrorKind::EpsilonTooCoarse, "t1 would exceed the cap " + std::to_string(options.max_t1));
    }
  }
  const long t1_max = t1_min + options.t1_window;

  auto build = [&](long t1, const BigInt& k, long t2) {
    SelectionCertificate c;
    c.kind = SelectionKind::Revolving;
    c.epsilon = epsilon;
    c.base_u = u;
    c.base_v = v;
    c.j_tilde = j_tilde;
    c.j_prime = jp;
    c.k = k;
    c.t1 = t1;
    c.t2 = t2;
    const BigInt M = ipow(u, t1 * prof.phi_v);
    const BigInt V = ipow(v, t2 * prof.phi_u);
    c.j = pair_j(prof, t1, k, t2);
    c.I = AdicInterval(v, t2 * prof.phi_u - 1, BigInt((c.j + 1) / v));
    const Rational zeta(k, M);
    for (long mult : multipliers) c.targets.push_back(make_target(mult, u * mult, zeta, c.I));
    std::string why;
    if (!verify_selection(c, &why)) fail(ErrorKind::VerificationFailed, "selection certificate: " + why);
    return c;
  };
  auto fits = [&](const BigInt& k, const BigInt& M) {
    return Rational(BigInt(k - 1), M) >= jp.left() && Rational(BigInt(k + u - 1), M) <= jp.right();
  };

  // Smallest k in J', then the smallest admissible t2 from the discrete log.
  // Only tried while the order of v^phi(u) is small enough that the
  // logarithm has a fair chance of landing under the exponent cap.
  bool any_k = false;
  const double t2_cap = static_cast<double>(options.max_exponent_bits) /
                        (static_cast<double>(prof.phi_u) * std::log2(static_cast<double>(v)));
  for (long t1 = t1_min; t1 <= t1_max; ++t1) {
    const BigInt M = ipow(u, t1 * prof.phi_v);
    const BigInt order = multiplicative_order(mod(pair_generator(prof), M), M);
    if (log2_big(order) > std::log2(t2_cap) + 6) break;
    const long t2_req = required_t2(v, prof.phi_u, M, ipow(bmax, t1 * prof.phi_v));
    for (const BigInt& k : subgroup_members_in(prof, t1, jp.plain(), options.k_candidates)) {
      if (Rational(BigInt(k + u - 1), M) > jp.right()) break;
      if (!fits(k, M)) continue;
      any_k = true;
      PairProgression prog;
      try {
        prog = pair_progression(prof, t1, k);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotInSubgroup) throw;
        continue;
      }
      BigInt t2 = prog.first;
      if (t2 < t2_req) {
        BigInt gap = BigInt(t2_req) - t2;
        BigInt steps = (gap + prog.step - 1) / prog.step;
        t2 += steps * prog.step;
      }
      double bits = log2_big(t2) + std::log2(static_cast<double>(prof.phi_u) * std::log2(static_cast<double>(v)));
      if (bits > std::log2(static_cast<double>(options.max_exponent_bits))) continue;
      return build(t1, k, t2.get_si());
    }
  }

  // Walk t2 upward from the smallest admissible value and take k = v^(-t2 phi(u)).
  for (long t1 = t1_min; t1 <= t1_max; ++t1) {
    const BigInt M = ipow(u, t1 * prof.phi_v);
    const long t2_req = required_t2(v, prof.phi_u, M, ipow(bmax, t1 * prof.phi_v));
    BigInt g_inv;
    mpz_invert(g_inv.get_mpz_t(), BigInt(mod(pair_generator(prof), M)).get_mpz_t(), M.get_mpz_t());
    BigInt k = powmod(g_inv, BigInt(t2_req), M);
    for (long t2 = t2_req; t2 < t2_req + options.t2_scan_budget; ++t2) {
      if (fits(k, M)) return build(t1, k, t2);
      k = mod(BigInt(k * g_inv), M);
    }
  }
  fail(ErrorKind::NoValidK, std::string(any_k ? "no admissible (k, t2)" : "no k = 1 mod u^(C+1)") +
                                " found with k / u^(t1 phi(v)) in J' = " + jp.plain().str());
}

SelectionCertificate select_two_base(long p, long q, long m, long n, const PlainInterval& j_tilde,
                                     const Rational& epsilon, const SelectionOptions& options) {
  require(is_prime(p) && is_prime(q), "p and q must be primes");
  require(p > q, "p must exceed q");
  require(m >= 1 && n >= 0, "need m >= 1 and n >= 0");
  require(epsilon.sign() > 0, "epsilon must be positive");
  require(j_tilde.left.sign() >= 0 && j_tilde.right <= Rational(1), "J~ must lie in [0, 1]");

  const OrderProfile prof = scan_order_profile(p, q, 0);
  const AdicInterval jp = largest_contained(q, j_tilde);
  const long mprime = jp.level();
  const BigInt B = ipow(p, m) * ipow(q, n);
  const BigInt Bc = pow(B, static_cast<unsigned long>(prof.c_uv + 1));

  // m1 > max{m(p,q)/(q-1), m', (m' + C + 1)/(p-1)}, m | m1, p^-(m1(q-1)) < eps.
  long m1 = std::max({prof.m_uv / (q - 1), mprime, (mprime + prof.c_uv + 1) / (p - 1)}) + 1;
  auto admissible = [&](long cand) {
    return cand % m == 0 && Rational(BigInt(1), ipow(p, cand * (q - 1))) < epsilon;
  };
  while (!admissible(m1)) {
    ++m1;
    if (m1 > options.max_t1) fail(ErrorKind::EpsilonTooCoarse, "m1 would exceed the cap " + std::to_string(options.max_t1));
  }

  for (long tries = 0; tries <= options.t1_window; ++tries, m1 += m) {
    const long s = m1 * (q - 1) / m;
    const BigInt Bs = pow(B, static_cast<unsigned long>(s));
    const BigInt P = ipow(p, m1 * (q - 1));
    // k = 1 + t B^(C+1) with J = [(k-1)/B^s, (k-1+B)/B^s] inside J'.
    BigInt t = (jp.left() * Rational(Bs) / Rational(Bc)).ceil();
    if (t < 0) t = 0;
    for (long count = 0; count < options.k_candidates; ++count, ++t) {
      BigInt k = 1 + t * Bc;
      if (Rational(BigInt(k - 1 + B), Bs) > jp.right()) break;
      PairProgression prog;
      try {
        prog = pair_progression(prof, m1, mod(k, P));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotInSubgroup) throw;
        continue;
      }
      // Smallest m2 in the progression with q^(m2(p-1)) > 10 q p^(m1(q-1)).
      const BigInt bound = 10 * q * P;
      long m2_req = 1;
      while (!(ipow(q, m2_req * (p - 1)) > bound)) ++m2_req;
      BigInt m2 = prog.first;
      if (m2 < m2_req) m2 += ((BigInt(m2_req) - m2 + prog.step - 1) / prog.step) * prog.step;
      double bits = log2_big(m2) + std::log2(static_cast<double>(p - 1) * std::log2(static_cast<double>(q)));
      if (bits > std::log2(static_cast<double>(options.max_exponent_bits))) continue;

      SelectionCertificate c;
      c.kind = SelectionKind::TwoBase;
      c.epsilon = epsilon;
      c.base_u = p;
      c.base_v = q;
      c.m = m;
      c.n = n;
      c.j_tilde = j_tilde;
      c.j_prime = jp;
      c.k = k;
      c.t1 = m1;
      c.t2 = m2.get_si();
      const BigInt Q = ipow(q, c.t2 * (p - 1));
      BigInt num = k * Q - 1;
      require(mpz_divisible_p(num.get_mpz_t(), P.get_mpz_t()), "Bezout identity failed");
      c.j = num / P;
      c.I = AdicInterval(q, n * s + c.t2 * (p - 1) - 1, BigInt((c.j + 1) / q));
      TargetRecord target;
      target.multiplier = 1;
      target.base = B.get_si();
      target.J = AdicInterval(target.base, s - 1, BigInt((k - 1) / B + 1));
      target.zeta = Rational(k, Bs);
      target.child = 1;
      target.gap = target.zeta - z_point(c.I);
      c.targets.push_back(target);
      std::string why;
      if (!verify_selection(c, &why)) fail(ErrorKind::VerificationFailed, "two-base certificate: " + why);
      return c;
    }
  }
  fail(ErrorKind::NoValidK, "no k = 1 mod (p^m q^n)^(C+1) with an admissible m2 in J' = " + jp.plain().str());
}

Rational spacing_overhead_bound(long u, long d) {
  require(u >= 2 && d >= 1, "need u >= 2 and d >= 1");
  return Rational(BigInt(2), BigInt(ipow(u, d) - 1));
}

SelectionFamily build_family(long u, long v, const std::vector<long>& multipliers, const std::vector<long>& alphas,
                             const PlainInterval& domain, const EpsilonSchedule& schedule,
                             const SelectionOptions& options) {
  require(!alphas.empty(), "at least one alpha required");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    require(alphas[i] >= 1, "alphas must be positive");
    if (i > 0) require(alphas[i] > alphas[i - 1], "alphas must be strictly increasing");
  }
  SelectionFamily fam;
  fam.u = u;
  fam.v = v;
  fam.multipliers = multipliers;
  fam.domain = domain;
  fam.schedule = schedule;
  fam.spacing_rule = "consecutive outer u-adic intervals separated by one interval of their own length";

  // Finest level needed to host 2 count - 1 consecutive slots.
  const long slots = 2 * static_cast<long>(alphas.size()) - 1;
  long d = 1;
  BigInt first, last;
  for (;; ++d) {
    if (d > 64) fail(ErrorKind::DomainExhausted, "domain cannot host " + std::to_string(alphas.size()) + " entries");
    const Rational step = grid_step(u, d);
    first = (domain.left / step).ceil() + 1;
    last = (domain.right / step).floor();
    if (last - first + 1 >= slots) break;
  }
  fam.outer_level = d;

  const std::vector<long> nested_mults = non_coprime_multipliers(u, multipliers);
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    FamilyEntry entry;
    entry.alpha = alphas[i];
    entry.outer = AdicInterval(u, d, BigInt(first + 2 * static_cast<long>(i)));
    PlainInterval current = entry.outer.plain();
    for (long c : nested_mults) {
      AdicInterval inner = largest_contained(u * c, current);
      entry.nested.push_back(inner);
      current = inner.plain();
    }
    entry.certificate = select_revolving(u, v, multipliers, current, schedule.at(v, alphas[i]), options);
    fam.entries.push_back(std::move(entry));
  }
  std::string why;
  if (!verify_family(fam, &why)) fail(ErrorKind::VerificationFailed, "family: " + why);
  return fam;
}

bool verify_family(const SelectionFamily& fam, std::string* reason) {
  auto bad = [&](const std::string& why) {
    fail_reason(reason, why);
    return false;
  };
  for (std::size_t i = 0; i < fam.entries.size(); ++i) {
    const auto& e = fam.entries[i];
    const auto& c = e.certificate;
    if (i > 0 && !(e.alpha > fam.entries[i - 1].alpha)) return bad("alphas not increasing");
    if (c.epsilon > fam.schedule.at(fam.v, e.alpha)) return bad("epsilon above the schedule");
    if (c.base_u != fam.u || c.base_v != fam.v) return bad("certificate bases differ from the family");
    if (!verify_selection(c, reason)) return false;
    if (e.outer.base() != fam.u || e.outer.level() != fam.outer_level) return bad("outer interval misplaced");
    if (!fam.domain.contains(e.outer.plain())) return bad("outer interval outside the domain");
    PlainInterval current = e.outer.plain();
    for (const auto& inner : e.nested) {
      if (!current.contains(inner.plain())) return bad("nested interval escapes its parent");
      current = inner.plain();
    }
    if (!current.contains(c.I.plain())) return bad("I escapes the innermost interval");
    if (i > 0) {
      const auto& prev = fam.entries[i - 1].outer;
      if (e.outer.left() - prev.right() < prev.length()) return bad("outer intervals too close");
    }
  }
  // Pairwise disjointness of every J across entries, checked exactly.
  for (std::size_t a = 0; a < fam.entries.size(); ++a) {
    for (std::size_t b = a + 1; b < fam.entries.size(); ++b) {
      for (const auto& ta : fam.entries[a].certificate.targets) {
        for (const auto& tb : fam.entries[b].certificate.targets) {
          if (ta.J.intersects(tb.J)) return bad("J intervals of entries " + std::to_string(a) + " and " +
                                                std::to_string(b) + " intersect");
        }
      }
    }
  }
  return true;
}

}  // namespace adic
