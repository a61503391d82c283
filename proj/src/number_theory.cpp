#include "adic/number_theory.hpp"

#include <algorithm>
#include <map>

#include "adic/error.hpp"

namespace adic {

namespace {

constexpr unsigned long kTrialLimit = 100000;

bool probably_prime(const BigInt& n) { return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0; }

// Brent's variant of Pollard rho; returns a nontrivial factor of composite n.
BigInt pollard_rho(const BigInt& n) {
  if (mpz_even_p(n.get_mpz_t())) return BigInt(2);
  for (unsigned long c = 1;; ++c) {
    BigInt y = 2, x, g = 1, q = 1, ys;
    unsigned long r = 1;
    auto step = [&](const BigInt& z) { return mod(BigInt(z * z + c), n); };
    while (g == 1) {
      x = y;
      for (unsigned long i = 0; i < r; ++i) y = step(y);
      unsigned long k = 0;
      while (k < r && g == 1) {
        ys = y;
        unsigned long batch = std::min<unsigned long>(128, r - k);
        for (unsigned long i = 0; i < batch; ++i) {
          y = step(y);
          q = mod(BigInt(q * abs(BigInt(x - y))), n);
        }
        g = gcd(q, n);
        k += batch;
      }
      r *= 2;
    }
    if (g == n) {
      do {
        ys = step(ys);
        g = gcd(abs(BigInt(x - ys)), n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_into(const BigInt& n, std::map<BigInt, unsigned long>& out) {
  if (n == 1) return;
  if (probably_prime(n)) {
    ++out[n];
    return;
  }
  if (mpz_sizeinbase(n.get_mpz_t(), 2) > 128) {
    fail(ErrorKind::FactorizationLimit, "cofactor " + to_string(n) + " exceeds 128 bits");
  }
  BigInt d = pollard_rho(n);
  factor_into(d, out);
  factor_into(BigInt(n / d), out);
}

// Order of g modulo `modulus` when it is known to be a power of p.
BigInt p_power_order(const BigInt& g, const BigInt& modulus, long p, long* exponent) {
  BigInt y = mod(g, modulus);
  BigInt order = 1;
  long e = 0;
  while (y != mod(BigInt(1), modulus)) {
    y = powmod(y, BigInt(p), modulus);
    order *= p;
    ++e;
    require(e < 100000, "order search did not terminate");
  }
  if (exponent) *exponent = e;
  return order;
}

// Solves g^x = h modulo `modulus` where g has order p^e (Pohlig-Hellman).
std::optional<BigInt> p_power_log(const BigInt& g, const BigInt& h, const BigInt& modulus, long p, long e) {
  if (e == 0) {
    if (mod(h, modulus) == mod(BigInt(1), modulus)) return BigInt(0);
    return std::nullopt;
  }
  BigInt gamma = powmod(g, pow(BigInt(p), static_cast<unsigned long>(e - 1)), modulus);
  BigInt g_inv;
  require(mpz_invert(g_inv.get_mpz_t(), g.get_mpz_t(), modulus.get_mpz_t()) != 0, "generator not invertible");
  BigInt x = 0;
  BigInt p_i = 1;
  for (long i = 0; i < e; ++i) {
    BigInt reduced = mod(BigInt(powmod(g_inv, x, modulus) * h), modulus);
    BigInt target = powmod(reduced, pow(BigInt(p), static_cast<unsigned long>(e - 1 - i)), modulus);
    BigInt cur = mod(BigInt(1), modulus);
    long digit = -1;
    for (long d = 0; d < p; ++d) {
      if (cur == target) {
        digit = d;
        break;
      }
      cur = mod(BigInt(cur * gamma), modulus);
    }
    if (digit < 0) return std::nullopt;
    x += p_i * digit;
    p_i *= p;
  }
  if (powmod(g, x, modulus) != mod(h, modulus)) return std::nullopt;
  return x;
}

}  // namespace

BigInt gcd(const BigInt& a, const BigInt& b) {
  BigInt out;
  mpz_gcd(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

BigInt powmod(const BigInt& base, const BigInt& exponent, const BigInt& modulus) {
  require(exponent >= 0, "powmod needs a nonnegative exponent");
  BigInt out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exponent.get_mpz_t(), modulus.get_mpz_t());
  return out;
}

BigInt mod(const BigInt& a, const BigInt& m) {
  BigInt out;
  mpz_mod(out.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return out;
}

bool is_prime(long n) { return n >= 2 && probably_prime(BigInt(n)); }

Factorization factorize(const BigInt& n) {
  require(n >= 1, "factorize needs n >= 1");
  std::map<BigInt, unsigned long> found;
  BigInt rest = n;
  for (unsigned long d = 2; d <= kTrialLimit && BigInt(d) * d <= rest; d += (d == 2 ? 1 : 2)) {
    while (mpz_divisible_ui_p(rest.get_mpz_t(), d)) {
      ++found[BigInt(d)];
      rest /= d;
    }
  }
  factor_into(rest, found);
  return {found.begin(), found.end()};
}

BigInt totient(const BigInt& n) {
  BigInt out = n;
  for (const auto& [p, e] : factorize(n)) out = out / p * (p - 1);
  return out;
}

long totient(long n) {
  require(n >= 1, "totient needs n >= 1");
  return totient(BigInt(n)).get_si();
}

BigInt multiplicative_order(const BigInt& a, const BigInt& modulus, const Factorization& group_order) {
  require(modulus >= 1, "modulus must be positive");
  if (gcd(a, modulus) != 1) {
    fail(ErrorKind::NotCoprime, "gcd(" + to_string(a) + ", " + to_string(modulus) + ") != 1");
  }
  if (modulus == 1) return BigInt(1);
  BigInt t = 1;
  for (const auto& [p, e] : group_order) t *= pow(p, e);
  BigInt one = mod(BigInt(1), modulus);
  require(powmod(a, t, modulus) == one, "supplied group order is not a multiple of the order");
  for (const auto& [p, e] : group_order) {
    for (unsigned long i = 0; i < e; ++i) {
      BigInt candidate = t / p;
      if (powmod(a, candidate, modulus) != one) break;
      t = candidate;
    }
  }
  return t;
}

BigInt multiplicative_order(const BigInt& a, const BigInt& modulus) {
  require(modulus >= 1, "modulus must be positive");
  if (gcd(a, modulus) != 1) {
    fail(ErrorKind::NotCoprime, "gcd(" + to_string(a) + ", " + to_string(modulus) + ") != 1");
  }
  if (modulus == 1) return BigInt(1);
  // phi(modulus) factored from the factorization of the modulus itself.
  std::map<BigInt, unsigned long> phi;
  for (const auto& [p, e] : factorize(modulus)) {
    if (e > 1) phi[p] += e - 1;
    for (const auto& [r, f] : factorize(BigInt(p - 1))) phi[r] += f;
  }
  return multiplicative_order(a, modulus, Factorization(phi.begin(), phi.end()));
}

std::optional<std::pair<long, long>> prime_power_decomposition(long u) {
  if (u < 2) return std::nullopt;
  auto f = factorize(BigInt(u));
  if (f.size() != 1) return std::nullopt;
  return std::make_pair(f[0].first.get_si(), static_cast<long>(f[0].second));
}

OrderProfile scan_order_profile(long u, long v, long probe_depth) {
  auto pk = prime_power_decomposition(u);
  require(pk.has_value(), "u = " + std::to_string(u) + " is not a prime power");
  require(v >= 1, "v must be positive");
  if (gcd(BigInt(u), BigInt(v)) != 1) {
    fail(ErrorKind::NotCoprime, "gcd(" + std::to_string(u) + ", " + std::to_string(v) + ") != 1");
  }
  require(v >= 2, "v must be at least 2");
  OrderProfile prof;
  prof.u = u;
  prof.v = v;
  prof.p = pk->first;
  prof.k = pk->second;
  prof.phi_u = totient(u);
  prof.phi_v = totient(v);
  const BigInt g = pow(BigInt(v), static_cast<unsigned long>(prof.phi_u));
  const BigInt U(u);

  long m = 0;
  while (mod(g, pow(U, static_cast<unsigned long>(m + 1))) == 1) {
    ++m;
    require(m < 10000, "v^phi(u) is too close to 1");
  }
  prof.m_uv = m;
  if (probe_depth <= 0) probe_depth = std::max(12L, m + 2);
  require(probe_depth >= m + 2, "probe_depth must be at least m(u,v) + 2 = " + std::to_string(m + 2));
  prof.probe_depth = probe_depth;

  const BigInt top = pow(U, static_cast<unsigned long>(m + 1));
  long n0 = 0;
  for (long n = 1; n <= m; ++n) {
    if (powmod(g, pow(U, static_cast<unsigned long>(n)), top) == 1) {
      n0 = n;
      break;
    }
  }
  if (n0 == 0) fail(ErrorKind::VerificationFailed, "no N0 in [1, m(u,v)]");
  prof.n0 = n0;
  prof.c_uv = m - n0;

  for (long level = 1; level <= probe_depth; ++level) {
    prof.orders.push_back(p_power_order(g, pow(U, static_cast<unsigned long>(level)), prof.p, nullptr));
  }
  auto formula_holds = [&](long level) {
    long e = level - 1 - prof.c_uv;
    return e >= 0 && prof.orders[static_cast<std::size_t>(level - 1)] == pow(U, static_cast<unsigned long>(e));
  };
  bool tail_ok = true;
  for (long level = m + 1; level <= probe_depth; ++level) tail_ok = tail_ok && formula_holds(level);
  prof.stabilized = tail_ok;
  if (tail_ok) {
    long s = m + 1;
    while (s > 1 && formula_holds(s - 1)) --s;
    prof.stabilization_level = s;
  }
  return prof;
}

OrderProfile order_profile(long u, long v, long probe_depth) {
  OrderProfile prof = scan_order_profile(u, v, probe_depth);
  if (!prof.stabilized) {
    const BigInt U(u);
    for (long level = prof.m_uv + 1; level <= probe_depth; ++level) {
      BigInt expected = pow(U, static_cast<unsigned long>(level - 1 - prof.c_uv));
      const BigInt& got = prof.orders[static_cast<std::size_t>(level - 1)];
      if (got != expected) {
        fail(ErrorKind::VerificationFailed, "O_" + std::to_string(level) + "(" + std::to_string(u) + "," +
                                                std::to_string(v) + ") = " + to_string(got) + " but u^(m-1-C) = " +
                                                to_string(expected));
      }
    }
  }
  return prof;
}

BigInt pair_generator(const OrderProfile& profile) {
  return pow(BigInt(profile.v), static_cast<unsigned long>(profile.phi_u));
}

BigInt pair_modulus(const OrderProfile& profile, long m1) {
  return pow(BigInt(profile.u), static_cast<unsigned long>(m1 * profile.phi_v));
}

PairProgression pair_progression(const OrderProfile& profile, long m1, const BigInt& k) {
  require(m1 >= 1 && m1 * profile.phi_v > profile.m_uv,
          "m1 must exceed m(u,v)/phi(v) = " + std::to_string(profile.m_uv) + "/" + std::to_string(profile.phi_v));
  require(k >= 1, "k must be positive");
  const BigInt step_mod = pow(BigInt(profile.u), static_cast<unsigned long>(profile.c_uv + 1));
  if (mod(k, step_mod) != 1) {
    fail(ErrorKind::NotInSubgroup, "k = " + to_string(k) + " is not 1 mod u^(C+1) = " + to_string(step_mod));
  }
  const BigInt modulus = pair_modulus(profile, m1);
  const BigInt g = mod(pair_generator(profile), modulus);
  long e = 0;
  BigInt order = p_power_order(g, modulus, profile.p, &e);
  BigInt h;
  mpz_invert(h.get_mpz_t(), BigInt(mod(k, modulus)).get_mpz_t(), modulus.get_mpz_t());
  auto x = p_power_log(g, h, modulus, profile.p, e);
  if (!x) {
    fail(ErrorKind::NotInSubgroup, "k = " + to_string(k) + " is not a power of v^phi(u) mod " + to_string(modulus));
  }
  return {*x == 0 ? order : *x, order};
}

BigInt pair_j(const OrderProfile& profile, long m1, const BigInt& k, long m2) {
  BigInt lhs = k * pow(BigInt(profile.v), static_cast<unsigned long>(m2 * profile.phi_u)) - 1;
  BigInt modulus = pair_modulus(profile, m1);
  if (!mpz_divisible_p(lhs.get_mpz_t(), modulus.get_mpz_t())) {
    fail(ErrorKind::VerificationFailed, "k v^(m2 phi(u)) - 1 is not divisible by u^(m1 phi(v))");
  }
  return lhs / modulus;
}

bool verify_pair(const OrderProfile& profile, const CongruencePair& pair) {
  BigInt lhs = pair.k * pow(BigInt(profile.v), static_cast<unsigned long>(pair.m2 * profile.phi_u)) -
               pair.j * pair_modulus(profile, pair.m1);
  return lhs == 1 && mod(BigInt(pair.j + 1), BigInt(profile.v)) == 0;
}

std::vector<CongruencePair> solve_pairs(const OrderProfile& profile, long m1, const BigInt& k, long count) {
  require(count >= 0, "count must be nonnegative");
  PairProgression prog = pair_progression(profile, m1, k);
  std::vector<CongruencePair> out;
  for (long i = 0; i < count; ++i) {
    BigInt m2 = prog.first + prog.step * i;
    require(m2.fits_slong_p(), "m2 = " + to_string(m2) + " is too large to materialize");
    CongruencePair pair{m2.get_si(), pair_j(profile, m1, k, m2.get_si()), m1, k};
    if (!verify_pair(profile, pair)) fail(ErrorKind::VerificationFailed, "pair failed the Bezout identity");
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<BigInt> subgroup_members_in(const OrderProfile& profile, long m1, const PlainInterval& window,
                                        long limit) {
  const BigInt modulus = pair_modulus(profile, m1);
  const BigInt s = pow(BigInt(profile.u), static_cast<unsigned long>(profile.c_uv + 1));
  // k = 1 + t s with left <= k / modulus < right.
  Rational lo = (window.left * Rational(modulus) - Rational(1)) / Rational(s);
  BigInt t = max(Rational(lo.ceil()), Rational(0)).numerator();
  std::vector<BigInt> out;
  for (; static_cast<long>(out.size()) < limit; ++t) {
    BigInt k = 1 + t * s;
    if (k > modulus) break;
    if (!(Rational(k, modulus) < window.right)) break;
    out.push_back(k);
  }
  return out;
}

FarCheck far_number_check(const Rational& delta, long n, long max_level) {
  require(max_level >= 1, "max_level must be at least 1");
  require(n >= 2, "base must be at least 2");
  FarCheck out;
  out.max_level = max_level;
  bool first = true;
  for (long m = 0; m <= max_level; ++m) {
    Rational scaled = delta * power_of(n, m);
    BigInt lo = scaled.floor();
    Rational dl = scaled - Rational(lo);
    Rational dh = Rational(BigInt(lo + 1)) - scaled;
    Rational dist = min(dl, dh);
    BigInt nearest = dl <= dh ? lo : BigInt(lo + 1);
    if (first || dist < out.value) {
      out.value = dist;
      out.level = m;
      out.index = nearest;
      first = false;
    }
    if (dist.sign() == 0) {
      out.adic = true;
      return out;
    }
  }
  return out;
}

std::optional<long> unique_three_base_solution(long p1, long m1, const BigInt& k1, long p2, long m2,
                                               const BigInt& k2, long q) {
  require(is_prime(p1) && is_prime(p2) && is_prime(q), "p1, p2, q must be primes");
  require(p1 != p2 && p1 != q && p2 != q, "p1, p2, q must be distinct");
  require(k1 >= 1 && k2 >= 1, "k1, k2 must be positive");
  require(m1 >= 0 && m2 >= 0, "exponents must be nonnegative");
  BigInt a = pow(BigInt(p1), static_cast<unsigned long>(m1));
  BigInt b = pow(BigInt(p2), static_cast<unsigned long>(m2));
  BigInt num = a - b;
  BigInt den = k2 * a - k1 * b;
  if (den == 0) fail(ErrorKind::DegenerateDenominator, "k2 p1^m1 = k1 p2^m2");
  if (num == 0) return std::nullopt;
  if (!mpz_divisible_p(num.get_mpz_t(), den.get_mpz_t())) return std::nullopt;
  BigInt value = num / den;
  if (value < 1) return std::nullopt;
  long n = 0;
  while (value > 1) {
    if (!mpz_divisible_ui_p(value.get_mpz_t(), static_cast<unsigned long>(q))) return std::nullopt;
    value /= q;
    ++n;
  }
  if (n < 1) return std::nullopt;
  return n;
}

}  // namespace adic
