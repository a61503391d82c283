#include "doctest.h"

#include "adic/error.hpp"
#include "adic/selection.hpp"

using namespace adic;

namespace {

const PlainInterval kUnit(Rational(0), Rational(1));

// Closeness, containment, minimality and the exact gap identity, recomputed
// here from the interval geometry alone.
void check_conditions(const SelectionCertificate& c) {
  CHECK(c.j_tilde.contains(c.I.plain()));
  for (const auto& t : c.targets) {
    CAPTURE(t.base);
    CHECK(t.J.contains(c.I));
    CHECK(smallest_containing(t.base, c.I.plain()) == t.J);
    CHECK(t.gap == t.zeta - z_point(c.I));
    CHECK(t.gap.sign() > 0);
    CHECK(t.gap <= c.epsilon * c.I.length());
    CHECK(c.I.left() < t.zeta);
    CHECK(t.zeta < c.I.right());
  }
}

}  // namespace

TEST_CASE("classic revolving selection") {
  const SelectionCertificate c = select_revolving(3, 2, {1}, kUnit, Rational(1, 16));
  CHECK(c.I.plain() == PlainInterval(Rational(6, 64), Rational(8, 64)));
  REQUIRE(c.targets.size() == 1);
  CHECK(c.targets[0].J.plain() == PlainInterval(Rational(0), Rational(1, 3)));
  CHECK(c.targets[0].gap == Rational(1, 576));
  CHECK(c.targets[0].zeta == y_point(c.targets[0].J));
  CHECK(c.t2 == 3);
  CHECK(c.j == 7);
  CHECK(c.targets[0].gap == Rational(BigInt(1), pow(BigInt(3), static_cast<unsigned long>(c.t1)) *
                                                      pow(BigInt(2), static_cast<unsigned long>(2 * c.t2))));
  check_conditions(c);
  std::string why;
  CHECK(verify_selection(c, &why));
  CHECK(why.empty());
}

TEST_CASE("two-base selection enforces the 10q bound") {
  const SelectionCertificate c = select_two_base(3, 2, 1, 0, kUnit, Rational(1, 16));
  // (m1, m2) = (2, 3) fails 2^6 > 10 * 2 * 9, so the first admissible m1 is 3.
  CHECK(c.t1 == 3);
  CHECK(c.t2 == 9);
  CHECK(c.j == 9709);
  CHECK(c.I.plain() == PlainInterval(Rational(9708, 262144), Rational(9710, 262144)));
  CHECK(c.targets[0].gap == Rational(1, 27 * 262144));
  CHECK(pow(BigInt(2), static_cast<unsigned long>(2 * c.t2)) > 10 * 2 * pow(BigInt(3), static_cast<unsigned long>(c.t1)));
  CHECK(c.targets[0].zeta - c.I.left() < Rational(1, 10));
  check_conditions(c);
  CHECK(verify_selection(c));
}

TEST_CASE("revolving points across multipliers") {
  const SelectionCertificate c = select_revolving(9, 2, {1, 2}, kUnit, Rational(1, 1024));
  REQUIRE(c.targets.size() == 2);
  CHECK(c.targets[0].base == 9);
  CHECK(c.targets[1].base == 18);
  // The gap does not depend on the multiplier.
  CHECK(c.targets[0].gap == c.targets[1].gap);
  CHECK(c.targets[0].zeta == y_point(c.targets[0].J));
  check_conditions(c);
  CHECK(verify_selection(c));
}

TEST_CASE("tampered certificates are rejected") {
  const SelectionCertificate good = select_revolving(3, 2, {1}, kUnit, Rational(1, 16));
  SelectionCertificate c = good;
  c.k += 1;
  CHECK_FALSE(verify_selection(c));
  c = good;
  c.targets[0].gap += Rational(1, 1000000);
  CHECK_FALSE(verify_selection(c));
  c = good;
  c.I = c.I.parent();
  CHECK_FALSE(verify_selection(c));
  c = good;
  c.epsilon = Rational(1, 10000);
  CHECK_FALSE(verify_selection(c));
}

TEST_CASE("selection errors") {
  CHECK_THROWS_AS(select_revolving(3, 2, {0}, kUnit, Rational(1, 16)), Error);
  CHECK_THROWS_AS(select_revolving(2, 3, {1}, kUnit, Rational(1, 16)), Error);  // v must be below u
  CHECK_THROWS_AS(select_revolving(3, 2, {1}, kUnit, Rational(0)), Error);
  SelectionOptions tight;
  tight.max_t1 = 2;
  try {
    select_revolving(3, 2, {1}, kUnit, power_of(2, -40), tight);
    FAIL("expected EpsilonTooCoarse");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EpsilonTooCoarse);
  }
}

TEST_CASE("small epsilons stay fast and certified") {
  const SelectionCertificate c = select_revolving(3, 2, {1, 2}, kUnit, power_of(2, -100));
  check_conditions(c);
  CHECK(verify_selection(c));
}

TEST_CASE("families are nested, spaced and pairwise disjoint") {
  const SelectionFamily f = build_family(9, 2, {1}, {1, 2, 3}, kUnit);
  REQUIRE(f.entries.size() == 3);
  std::string why;
  CHECK(verify_family(f, &why));
  for (std::size_t i = 0; i < f.entries.size(); ++i) {
    const auto& e = f.entries[i];
    CHECK(e.certificate.epsilon <= power_of(2, -100 * e.alpha));
    check_conditions(e.certificate);
    for (std::size_t j = i + 1; j < f.entries.size(); ++j) {
      for (const auto& a : e.certificate.targets) {
        for (const auto& b : f.entries[j].certificate.targets) CHECK_FALSE(a.J.intersects(b.J));
      }
    }
  }

  const SelectionFamily g = build_family(3, 2, {1, 2, 3}, {1, 2}, kUnit);
  CHECK(verify_family(g));
  for (const auto& e : g.entries) {
    // 3 is the only multiplier sharing a factor with u = 3.
    REQUIRE(e.nested.size() == 1);
    CHECK(e.nested[0].base() == 9);
    CHECK(e.outer.contains(e.nested[0]));
    CHECK(e.nested[0].contains(e.certificate.j_tilde.left));
  }

  SelectionFamily bad = f;
  bad.entries[1].certificate = bad.entries[0].certificate;
  CHECK_FALSE(verify_family(bad));
}

TEST_CASE("spacing overhead bound") {
  CHECK(spacing_overhead_bound(3, 2) == Rational(1, 4));
  CHECK(spacing_overhead_bound(2, 5) == Rational(2, 31));
  CHECK(non_coprime_multipliers(6, {5, 4, 1, 3, 2}) == std::vector<long>{2, 3, 4});
}
