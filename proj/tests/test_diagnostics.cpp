#include "doctest.h"

#include "adic/diagnostics.hpp"
#include "adic/error.hpp"

using namespace adic;

namespace {

const PlainInterval kUnit(Rational(0), Rational(1));
const PlainInterval kLeftHalf(Rational(0), Rational(1, 2));

// Density 1/2 on [0, 1/2) and 3/2 on [1/2, 1).
MeasureTree two_piece() {
  MeasureTree tree;
  tree.split(AdicInterval(2, 0, 1), {Rational(1, 2), Rational(3, 2)});
  return tree;
}

}  // namespace

TEST_CASE("log values are exact") {
  const LogValue l6 = log_of(Rational(6));
  CHECK(l6 == log_of(Rational(2)) + log_of(Rational(3)));
  CHECK((log_of(Rational(3, 4)) - log_of(Rational(3)) + Rational(2) * log_of(Rational(2))).is_zero());
  CHECK(log_of(Rational(1)).is_zero());
  CHECK(log_of(Rational(3, 2)).sign() == 1);
  CHECK(log_of(Rational(2, 3)).sign() == -1);
  const LogValue close = log_of(Rational(3)) - Rational(1, 1000) * log_of(Rational(2));
  CHECK(close.sign() == 1);
  CHECK(log_of(Rational(8)).enclose().contains(Rational(2079441, 1000000)) == false);
  CHECK(log_of(Rational(8)).enclose().lo < Rational(2079442, 1000000));
  CHECK_THROWS_AS(log_of(Rational(0)), Error);
}

TEST_CASE("two-piece density: reverse Hoelder and A_p") {
  const MeasureTree tree = two_piece();
  const WeightView view(tree);
  CHECK(view.mean_power(kUnit, 1) == Rational(1));
  CHECK(view.mean_power(kUnit, 2) == Rational(5, 4));
  CHECK(view.mean_power(kUnit, -1) == Rational(4, 3));

  const FunctionalValue rh = rh_functional(view, kUnit, Rational(2));
  REQUIRE(rh.power.has_value());
  CHECK(rh.exponent == 2);
  CHECK(*rh.power == Rational(5, 4));
  CHECK(rh.value.lo * rh.value.lo <= Rational(5, 4));
  CHECK(rh.value.hi * rh.value.hi >= Rational(5, 4));

  const FunctionalValue ap = ap_functional(view, kUnit, Rational(2));
  REQUIRE(ap.power.has_value());
  CHECK(*ap.power == Rational(4, 3));
  CHECK(ap.value.contains(Rational(4, 3)));

  // Constant density on one piece.
  CHECK(rh_functional(view, kLeftHalf, Rational(3)).value.contains(Rational(1)));
  CHECK(ap_functional(view, kLeftHalf, Rational(3, 2)).value.contains(Rational(1)));

  // Fractional r still gives a certified enclosure.
  const FunctionalValue frac = rh_functional(view, kUnit, Rational(3, 2));
  CHECK(frac.value.lo > Rational(1));
  CHECK(frac.value.hi < rh.value.hi);
  CHECK_THROWS_AS(ap_functional(view, kUnit, Rational(1)), Error);
}

TEST_CASE("mean oscillation of a two-piece logarithm") {
  const MeasureTree tree = two_piece();
  const Oscillation o = log_oscillation(WeightView(tree), kUnit);
  CHECK(o.symbolic == Rational(1, 2) * log_of(Rational(3)));
  CHECK(o.mean == Rational(1, 2) * log_of(Rational(3, 4)));
  CHECK(o.value.width() < Rational(1, 1000000000));
  CHECK(log_oscillation(WeightView(tree), kLeftHalf).symbolic.is_zero());
}

TEST_CASE("family descriptors") {
  CHECK(FamilyDescriptor::parse("all").kind == FamilyDescriptor::Kind::All);
  const FamilyDescriptor d = FamilyDescriptor::parse("adic:3");
  CHECK(d.kind == FamilyDescriptor::Kind::Adic);
  CHECK(d.base == 3);
  CHECK(d.str() == "adic:3");
  CHECK_THROWS_AS(FamilyDescriptor::parse("adic:1"), Error);
  CHECK_THROWS_AS(FamilyDescriptor::parse("dyadic"), Error);
  CHECK(parse_functional("bmo") == FunctionalKind::BMO);
  CHECK(std::string(to_string(FunctionalKind::RH)) == "rh");
  CHECK_THROWS_AS(parse_functional("xyz"), Error);
}

TEST_CASE("adic families only contain intervals meeting a breakpoint") {
  const MeasureTree tree = build_two_sided_measure({1, 2});
  const auto fam = enumerate_family(tree, FamilyDescriptor::parse("adic:3"));
  CHECK_FALSE(fam.empty());
  for (const auto& j : fam) {
    bool inside = false;
    for (const auto& x : tree.breakpoints(j)) inside = inside || (j.left < x && x < j.right);
    CHECK(inside);
  }
}

TEST_CASE("BMO grows with alpha on the full family") {
  const MeasureTree tree = build_two_sided_measure({1, 2, 3, 4});
  const FamilyDescriptor all = FamilyDescriptor::parse("all");
  Rational prev(0);
  for (long alpha = 1; alpha <= 4; ++alpha) {
    CAPTURE(alpha);
    const OscillationReport r = bmo_oscillation(tree, all, alpha);
    REQUIRE(r.symbolic.has_value());
    const LogValue bound = bmo_lower_bound(tree.params(), alpha);
    CHECK(bound == Rational(alpha, 4) * log_of(Rational(3)));
    CHECK((*r.symbolic - bound).sign() == 1);
    CHECK(r.supremum.lo > prev);
    prev = r.supremum.lo;
  }
}

TEST_CASE("adic families stay bounded across stages") {
  const MeasureTree tree = build_two_sided_measure({1, 2, 3, 4, 5, 6});
  const FamilyDescriptor adic2 = FamilyDescriptor::parse("adic:2");
  for (const FunctionalKind kind : {FunctionalKind::BMO, FunctionalKind::RH, FunctionalKind::AP}) {
    CAPTURE(to_string(kind));
    const Rational first = scan_functional(tree, kind, adic2, Rational(2), 1).supremum.hi;
    for (long alpha = 2; alpha <= 6; ++alpha) {
      CHECK(scan_functional(tree, kind, adic2, Rational(2), alpha).supremum.hi <= Rational(2) * first);
    }
  }
}

TEST_CASE("rows are reported on request") {
  const MeasureTree tree = build_two_sided_measure({1});
  const OscillationReport r =
      scan_functional(tree, FunctionalKind::AP, FamilyDescriptor::parse("adic:2"), Rational(2), std::nullopt, true);
  CHECK(r.intervals_checked > 0);
  CHECK(static_cast<long>(r.rows.size()) == r.intervals_checked);
  REQUIRE(r.witness.has_value());
  CHECK(r.supremum.lo >= Rational(1));
  for (const auto& row : r.rows) CHECK(row.value.hi <= r.supremum.hi);
  // Trees without stages have nothing to scan.
  CHECK(scan_functional(two_piece(), FunctionalKind::AP, FamilyDescriptor::parse("adic:2")).intervals_checked == 0);
}

TEST_CASE("step function oscillation") {
  CHECK(step_oscillation(PlainInterval(Rational(-1), Rational(1))) == Rational(1, 2));
  CHECK(step_oscillation(PlainInterval(Rational(-1), Rational(3))) == Rational(3, 8));
  CHECK(step_oscillation(PlainInterval(Rational(1), Rational(2))) == Rational(0));
  const auto rows = vmo_step_diagnostic({Rational(1), Rational(1, 1000)}, {2, 3});
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.symmetric == Rational(1, 2));
    CHECK(row.asymmetric == Rational(3, 8));
    CHECK(row.far == Rational(0));
    for (const auto& [base, value] : row.adic) CHECK(value == Rational(0));
    CHECK(row.adic.size() == 2);
  }
}
