#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adic/interval.hpp"
#include "adic/number_theory.hpp"
#include "adic/rational.hpp"

namespace adic {

struct TargetRecord {
  long multiplier = 1;  // c_i'; the target base is u * c_i'
  long base = 0;
  AdicInterval J;
  Rational zeta;   // interior child endpoint of J
  long child = 0;  // zeta is the right endpoint of this child of J
  Rational gap;    // zeta - Z(I)
};

enum class SelectionKind { Revolving, TwoBase };

struct SelectionCertificate {
  SelectionKind kind = SelectionKind::Revolving;
  Rational epsilon;
  long base_u = 0;  // u, or p for the two-base case
  long base_v = 0;  // v, or q
  long m = 0;       // two-base exponents of p^m q^n
  long n = 0;
  PlainInterval j_tilde;
  AdicInterval j_prime;  // largest v-adic interval inside j_tilde
  AdicInterval I;        // base v
  std::vector<TargetRecord> targets;
  BigInt k;
  long t1 = 0;  // m1 in the two-base case
  long t2 = 0;  // m2 in the two-base case
  BigInt j;
};

struct SelectionOptions {
  long t1_window = 64;          // t1 values tried past the smallest admissible one
  long max_t1 = 4096;           // EpsilonTooCoarse beyond this
  long max_exponent_bits = 1L << 16;  // largest v^(t2 phi(u)) materialized by the discrete-log route
  long t2_scan_budget = 1L << 16;     // t2 values tried per t1 by the scanning route
  long k_candidates = 4096;     // k values tried per t1 by the discrete-log route
};

// Re-checks the closeness, containment and minimality conditions and the
// exact gap identity using interval arithmetic only.
bool verify_selection(const SelectionCertificate& cert, std::string* reason = nullptr);

SelectionCertificate select_two_base(long p, long q, long m, long n, const PlainInterval& j_tilde,
                                     const Rational& epsilon, const SelectionOptions& options = {});

SelectionCertificate select_revolving(long u, long v, const std::vector<long>& multipliers,
                                      const PlainInterval& j_tilde, const Rational& epsilon,
                                      const SelectionOptions& options = {});

// epsilon_alpha = v^-(scale alpha + offset)
struct EpsilonSchedule {
  long scale = 100;
  long offset = 0;
  Rational at(long base, long alpha) const { return power_of(base, -(scale * alpha + offset)); }
};

struct FamilyEntry {
  long alpha = 0;
  AdicInterval outer;                // u-adic interval the entry was selected in
  std::vector<AdicInterval> nested;  // (u c')-adic intervals for c' sharing a factor with u
  SelectionCertificate certificate;
};

struct SelectionFamily {
  long u = 0;
  long v = 0;
  std::vector<long> multipliers;
  PlainInterval domain;
  EpsilonSchedule schedule;
  long outer_level = 0;
  std::string spacing_rule;
  std::vector<FamilyEntry> entries;
};

SelectionFamily build_family(long u, long v, const std::vector<long>& multipliers, const std::vector<long>& alphas,
                             const PlainInterval& domain, const EpsilonSchedule& schedule = {},
                             const SelectionOptions& options = {});

bool verify_family(const SelectionFamily& family, std::string* reason = nullptr);

// 2 / (u^d - 1), the total spacing overhead of outer intervals of length u^-d.
Rational spacing_overhead_bound(long u, long d);

// Multipliers sharing a factor with u, ordered by value then by position.
std::vector<long> non_coprime_multipliers(long u, const std::vector<long>& multipliers);

}  // namespace adic
