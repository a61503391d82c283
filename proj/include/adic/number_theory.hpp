#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "adic/interval.hpp"
#include "adic/rational.hpp"

namespace adic {

using Factorization = std::vector<std::pair<BigInt, unsigned long>>;

// Prime factorization by trial division and Pollard rho. Cofactors above 128
// bits that are not prime raise FactorizationLimit.
Factorization factorize(const BigInt& n);

BigInt totient(const BigInt& n);
long totient(long n);

BigInt gcd(const BigInt& a, const BigInt& b);
BigInt powmod(const BigInt& base, const BigInt& exponent, const BigInt& modulus);
BigInt mod(const BigInt& a, const BigInt& m);

// Least t >= 1 with a^t = 1 (mod modulus). Throws NotCoprime.
BigInt multiplicative_order(const BigInt& a, const BigInt& modulus);
// Same, with the factorization of a multiple of the order supplied.
BigInt multiplicative_order(const BigInt& a, const BigInt& modulus, const Factorization& group_order);

// u = p^k with p prime, k >= 1.
std::optional<std::pair<long, long>> prime_power_decomposition(long u);

struct OrderProfile {
  long u = 0;
  long v = 0;
  long p = 0;  // u = p^k
  long k = 0;
  long phi_u = 0;
  long phi_v = 0;
  long m_uv = 0;  // smallest m with v^phi(u) != 1 mod u^(m+1)
  long n0 = 0;
  long c_uv = 0;  // m_uv - n0
  long probe_depth = 0;
  // Smallest level from which O_m = u^(m-1-C) held through probe_depth; 0 if it never did.
  long stabilization_level = 0;
  bool stabilized = false;
  std::vector<BigInt> orders;  // orders[m-1] = O_m(u, v)
};

// Computes the profile and the measured orders without asserting the
// stabilized formula. probe_depth <= 0 picks max(12, m(u,v) + 2).
OrderProfile scan_order_profile(long u, long v, long probe_depth = 12);
// As above, but throws VerificationFailed if some probed m >= m_uv + 1
// violates O_m = u^(m-1-C).
OrderProfile order_profile(long u, long v, long probe_depth = 12);

// Solutions k v^(m2 phi(u)) - j u^(m1 phi(v)) = 1.
struct CongruencePair {
  long m2 = 0;
  BigInt j;
  long m1 = 0;
  BigInt k;
};

// The admissible m2 form first, first + step, first + 2 step, ...
struct PairProgression {
  BigInt first;
  BigInt step;
};

// Generator v^phi(u) and modulus u^(m1 phi(v)) for a profile.
BigInt pair_generator(const OrderProfile& profile);
BigInt pair_modulus(const OrderProfile& profile, long m1);

// Throws NotInSubgroup if k is not a power of v^phi(u) modulo u^(m1 phi(v)),
// which includes k failing k = 1 (mod u^(C+1)).
PairProgression pair_progression(const OrderProfile& profile, long m1, const BigInt& k);

std::vector<CongruencePair> solve_pairs(const OrderProfile& profile, long m1, const BigInt& k, long count);

// j for a given m2, without checking anything.
BigInt pair_j(const OrderProfile& profile, long m1, const BigInt& k, long m2);

// Exact identity and j = -1 (mod v).
bool verify_pair(const OrderProfile& profile, const CongruencePair& pair);

// Members k = 1 (mod u^(C+1)) of [1, u^(m1 phi(v))] with k / u^(m1 phi(v))
// in the window, in increasing order, at most `limit` of them.
std::vector<BigInt> subgroup_members_in(const OrderProfile& profile, long m1, const PlainInterval& window,
                                        long limit);

struct FarCheck {
  bool adic = false;  // delta lies on the grid; witness below
  Rational value;     // min over m <= max_level of n^m dist(delta, n^-m Z)
  long level = 0;     // level attaining the minimum (or the witness level)
  BigInt index;       // nearest grid numerator at that level
  long max_level = 0;
};

FarCheck far_number_check(const Rational& delta, long n, long max_level);

// n = log_q((p1^m1 - p2^m2) / (k2 p1^m1 - k1 p2^m2)) when that is a positive
// integer; DegenerateDenominator if k2 p1^m1 = k1 p2^m2.
std::optional<long> unique_three_base_solution(long p1, long m1, const BigInt& k1, long p2, long m2,
                                               const BigInt& k2, long q);

bool is_prime(long n);

}  // namespace adic
