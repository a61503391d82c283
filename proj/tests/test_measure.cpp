#include "doctest.h"

#include <random>
#include <set>

#include "adic/error.hpp"
#include "adic/measure.hpp"
#include "oracles.hpp"

using namespace adic;

namespace {

const Rational kHalf(1, 2), kThreeHalves(3, 2);

// Density from the records alone: the product over every split node that
// contains x of the factor on the child holding x.
Rational record_density(const MeasureTree& tree, const Rational& x) {
  Rational d(1);
  for (const auto& [node, factors] : tree.records()) {
    if (!node.contains(x)) continue;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      if (node.child(static_cast<long>(i) + 1).contains(x)) d *= factors[i];
    }
  }
  return d;
}

MeasureTree random_tree(std::mt19937_64& rng, long max_level) {
  MeasureTree tree;
  const long roots = 1 + static_cast<long>(rng() % 3);
  std::vector<AdicInterval> open;
  for (long r = 0; r < roots; ++r) {
    const long level = static_cast<long>(rng() % 3);
    const AdicInterval node(2, level, BigInt(static_cast<long>(rng() % (1L << level)) + 1));
    if (tree.intersects_record(node.plain())) continue;
    open.push_back(node);
    const Rational f(1 + static_cast<long>(rng() % 15), 8);
    tree.split(node, {f, Rational(2) - f});
  }
  for (int step = 0; step < 12 && !open.empty(); ++step) {
    const AdicInterval parent = open[rng() % open.size()];
    const AdicInterval node = parent.child(1 + static_cast<long>(rng() % 2));
    if (node.level() > max_level || tree.is_split(node)) continue;
    const Rational f(1 + static_cast<long>(rng() % 15), 8);
    tree.split(node, {f, Rational(2) - f});
    open.push_back(node);
  }
  return tree;
}

}  // namespace

TEST_CASE("weight parameters") {
  const WeightParams p = WeightParams::defaults(2);
  CHECK(p.a == kHalf);
  CHECK(p.b == kThreeHalves);
  const WeightParams t = WeightParams::defaults(3);
  CHECK(t.a * Rational(2) + t.b == Rational(3));
  CHECK_NOTHROW(WeightParams::make(4, Rational(1, 3), Rational(3)));
  CHECK_THROWS_AS(WeightParams::make(2, kHalf, Rational(2)), Error);
  CHECK_THROWS_AS(WeightParams::make(2, Rational(3, 2), kHalf), Error);
  CHECK_THROWS_AS(WeightParams::make(1, kHalf, kHalf), Error);
}

TEST_CASE("Lebesgue tree") {
  const MeasureTree tree;
  CHECK(tree.measure(PlainInterval(Rational(-7, 3), Rational(5, 2))) == Rational(29, 6));
  CHECK(tree.density_at(Rational(123)) == Rational(1));
  const DoublingReport r = scan_doubling(tree, {2});
  CHECK(r.worst_ratio == Rational(1));
  CHECK(r.levels.size() > 0);
}

TEST_CASE("single reweighting step") {
  MeasureTree tree;
  const StageTrace s = reweight_two_sided(tree, AdicInterval(2, 0, 1), 1);
  CHECK(tree.measure(PlainInterval(Rational(0), kHalf)) == Rational(1, 4));
  CHECK(tree.measure(PlainInterval(kHalf, Rational(1))) == Rational(3, 4));
  CHECK(s.H[0].plain() == PlainInterval(Rational(0), kHalf));
  CHECK(s.G[0].plain() == PlainInterval(kHalf, Rational(1)));
  CHECK(tree.measure(s.G[0]) / tree.measure(s.H[0]) == Rational(3));
  CHECK(tree.check_conservation());
  CHECK(tree.measure(PlainInterval(Rational(0), Rational(1))) == Rational(1));
}

TEST_CASE("two-sided stages: identities and invariants") {
  for (const long q : {2L, 3L, 5L}) {
    CAPTURE(q);
    const WeightParams p = WeightParams::defaults(q);
    const MeasureTree tree = build_two_sided_measure({1, 2, 3, 4, 5, 6}, p);
    CHECK(tree.check_conservation());
    for (const auto& s : tree.stages()) {
      CAPTURE(s.alpha);
      REQUIRE(s.H.size() == static_cast<std::size_t>(2 * s.alpha));
      for (std::size_t k = 0; k < s.H.size(); ++k) CHECK(adjacent_equal_pair(s.H[k], s.G[k]));
      const AdicInterval& h = s.H[s.alpha - 1];
      const AdicInterval& g = s.G[s.alpha - 1];
      const Rational scale = s.I.length() / pow(Rational(q), s.alpha);
      CHECK(tree.measure(h) == pow(p.a, s.alpha) * scale);
      CHECK(tree.measure(g) == pow(p.b, s.alpha) * scale);
      CHECK(tree.measure(g) / tree.measure(h) == pow(p.b / p.a, s.alpha));
      CHECK(tree.measure(s.I) == s.I.length());
    }
    // Sibling factor ratios are 1, a/b or b/a.
    const std::set<Rational> allowed{Rational(1), p.a / p.b, p.b / p.a};
    for (const auto& [node, factors] : tree.records()) {
      for (std::size_t i = 0; i < factors.size(); ++i) {
        for (std::size_t j = 0; j < factors.size(); ++j) CHECK(allowed.count(factors[i] / factors[j]) == 1);
      }
    }
    const auto [lo, hi] = tree.density_range();
    CHECK(lo.sign() > 0);
    CHECK(hi >= lo);
  }
}

TEST_CASE("reverse steps leave the witness pair unchanged") {
  // Measures of H^(alpha), G^(alpha) after the forward phase alone equal those
  // after all 2 alpha steps; the forward-only value is a^alpha |I| / q^alpha.
  for (long alpha = 1; alpha <= 6; ++alpha) {
    const MeasureTree tree = build_two_sided_measure({alpha});
    const auto& s = tree.stages()[0];
    for (long k = alpha; k < 2 * alpha; ++k) {
      CHECK(tree.measure(s.H[k]) <= tree.measure(s.H[alpha - 1]));
      CHECK(s.H[alpha - 1].contains(s.H[k]));
      CHECK(s.G[alpha - 1].contains(s.G[k]));
    }
  }
}

TEST_CASE("overlapping stages are rejected") {
  MeasureTree tree;
  reweight_two_sided(tree, AdicInterval(2, 0, 1), 2);
  try {
    reweight_two_sided(tree, AdicInterval(2, 0, 1), 1);
    FAIL("expected OverlapError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OverlapError);
  }
  CHECK_THROWS_AS(reweight_two_sided(tree, AdicInterval(2, -1, 1), 1), Error);
  CHECK_THROWS_AS(tree.split(AdicInterval(2, 0, 1), {Rational(1), Rational(1)}), Error);
  CHECK_THROWS_AS(tree.split(AdicInterval(2, 3, 9), {Rational(1), Rational(2)}), Error);
  CHECK_NOTHROW(reweight_two_sided(tree, AdicInterval(2, 0, 2), 1));
}

TEST_CASE("measure agrees with a brute-force integrator") {
  std::mt19937_64 rng(314159);
  for (int trial = 0; trial < 40; ++trial) {
    const MeasureTree tree = random_tree(rng, 9);
    CHECK(tree.check_conservation());
    for (int q = 0; q < 6; ++q) {
      long a = static_cast<long>(rng() % 4096), b = static_cast<long>(rng() % 4096);
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      const Rational left(a, 4096), right(b, 4096);
      const auto dens = [&](const oracle::Q& x) { return record_density(tree, Rational(x)).raw(); };
      const oracle::Q expect = oracle::integrate(dens, left.raw(), right.raw(), 12);
      CHECK(tree.measure(PlainInterval(left, right)).raw() == expect);
    }
    // Density agrees with the record walk; pieces reproduce the measure.
    for (int q = 0; q < 20; ++q) {
      const Rational x(static_cast<long>(rng() % 8192), 4096);
      CHECK(tree.density_at(x) == record_density(tree, x));
    }
    const PlainInterval window(Rational(-1, 3), Rational(7, 5));
    Rational sum(0);
    for (const auto& piece : tree.pieces(window)) sum += piece.density * piece.interval.length();
    CHECK(sum == tree.measure(window));
  }
}

TEST_CASE("measure is additive") {
  const MeasureTree tree = build_two_sided_measure({1, 2, 3});
  std::mt19937_64 rng(2718);
  for (int i = 0; i < 200; ++i) {
    Rational a(static_cast<long>(rng() % 5000), 1000), b(static_cast<long>(rng() % 5000), 1000),
        c(static_cast<long>(rng() % 5000), 1000);
    if (a == b || b == c || a == c) continue;
    std::vector<Rational> v{a, b, c};
    std::sort(v.begin(), v.end());
    CHECK(tree.measure(PlainInterval(v[0], v[2])) ==
          tree.measure(PlainInterval(v[0], v[1])) + tree.measure(PlainInterval(v[1], v[2])));
  }
}

TEST_CASE("finite-base construction for base 3 at x = 84") {
  const XCertificate cert = find_x({3}, Rational(1, 100), 1, 1000);
  REQUIRE(cert.x == 84);
  const MeasureTree tree = build_finite_base_measure({3}, {1}, {cert});
  const auto& s = tree.stages()[0];
  CHECK(s.I.plain() == PlainInterval(Rational(1), Rational(1) + power_of(2, -83)));
  REQUIRE(s.companions.size() == 1);
  const Companion& c = s.companions[0];
  CHECK(c.J.plain() == PlainInterval(Rational(1), Rational(1) + power_of(3, -52)));
  CHECK(c.contained);
  CHECK(c.J.contains(s.I));
  CHECK(c.slack.sign() > 0);
  CHECK(c.closeness == abs(y_point(c.J) - z_point(s.I)));
  CHECK(c.closeness <= cert.epsilon * s.I.length());
  CHECK(tree.density_at(Rational(7, 4)) == Rational(1));
  CHECK(tree.measure(PlainInterval(Rational(3, 2), Rational(2))) == kHalf);
}

TEST_CASE("finite-base stages for bases 3 and 5") {
  const std::vector<long> alphas{1, 2, 3};
  const auto certs = certify_stages({3, 5}, alphas, XSchedule{}, 1L << 20);
  const MeasureTree tree = build_finite_base_measure({3, 5}, alphas, certs);
  CHECK(tree.check_conservation());
  for (const auto& s : tree.stages()) {
    CHECK(s.certificate->epsilon == power_of(2, -(2 * s.alpha + 1)));
    for (const auto& c : s.companions) {
      CHECK(c.J.contains(s.I));
      CHECK(c.closeness <= s.certificate->epsilon * s.I.length());
    }
    CHECK(tree.measure(PlainInterval(Rational(s.alpha) + kHalf, Rational(s.alpha + 1))) == kHalf);
  }
  for (const auto& c : case_checks(tree)) {
    CAPTURE(c.base);
    CAPTURE(c.alpha);
    CHECK(c.holds);
  }
}

TEST_CASE("coarse certificates fail containment") {
  const XCertificate cert = find_x({3}, kHalf, 4, 4);
  REQUIRE(cert.witnesses[0].r == 3);
  try {
    build_finite_base_measure({3}, {1}, {cert}, {}, XSchedule{0, 1});
    FAIL("expected ContainmentFailure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ContainmentFailure);
  }
  // The default schedule demands 2^-3, which 1/2 does not meet.
  CHECK_THROWS_AS(build_finite_base_measure({3}, {1}, {cert}), Error);
  CHECK_THROWS_AS(build_finite_base_measure({4}, {1}, {cert}), Error);
}

TEST_CASE("compactified construction conserves total mass") {
  for (const auto& alphas : std::vector<std::vector<long>>{{1}, {1, 2}, {1, 2, 3}}) {
    const MeasureTree tree = build_compactified({3, 5}, alphas);
    CHECK(tree.check_conservation());
    REQUIRE(tree.domain().has_value());
    CHECK(tree.measure(*tree.domain()) == Rational(1));
    CHECK(tree.measure(PlainInterval(Rational(0), Rational(1))) == Rational(1));
    for (std::size_t i = 1; i < tree.stages().size(); ++i) {
      const long prev = tree.stages()[i - 1].certificate->x, prev_alpha = tree.stages()[i - 1].alpha;
      CHECK(tree.stages()[i].certificate->x >= prev + 2 * prev_alpha + 1);
      // Records of distinct stages sit at disjoint dyadic scales.
      CHECK(tree.stages()[i].I.level() > deepest_level(tree.stages()[i - 1]));
    }
  }
  // The repaired first step: densities 1, a, (3 - a) / 2 on the three pieces.
  const MeasureTree one = build_compactified({3}, {1});
  const long x = one.stages()[0].certificate->x;
  const Rational u = power_of(2, -x - 1);
  CHECK(one.measure(PlainInterval(Rational(0), u)) == u);
  CHECK(one.measure(PlainInterval(u, Rational(2) * u)) == kHalf * u);
  CHECK(one.measure(PlainInterval(Rational(2) * u, Rational(4) * u)) == Rational(5, 4) * Rational(2) * u);
}

TEST_CASE("compactified schedules are checked") {
  const auto good = certify_stages({3}, {1, 2}, XSchedule{}, 1L << 20);
  CHECK_NOTHROW(build_compactified({3}, {1, 2}, {}, good));
  // x = 19 serves both stages, but the second x must exceed 19 + 2 + 1.
  const std::vector<XCertificate> close{find_x({3}, power_of(2, -3), 19, 100), find_x({3}, power_of(2, -5), 1, 100)};
  REQUIRE(close[0].x == 19);
  REQUIRE(close[1].x == 19);
  try {
    build_compactified({3}, {1, 2}, {}, close);
    FAIL("expected ScheduleError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ScheduleError);
  }
  std::vector<XCertificate> coarse = good;
  coarse[1].epsilon = power_of(2, -3);
  CHECK_THROWS_AS(build_compactified({3}, {1, 2}, {}, coarse), Error);
}

TEST_CASE("doubling scan on two-sided stages") {
  const MeasureTree tree = build_two_sided_measure({1, 2, 3, 4, 5});
  const DoublingReport r = scan_doubling(tree, {2});
  CHECK(r.worst_ratio >= Rational(243));
  for (const auto& s : r.stages) CHECK(s.worst.ratio == pow(Rational(3), s.alpha));
  const auto& last = r.stages.back();
  CHECK(adjacent_equal_pair(last.worst.left, last.worst.right));
  for (const auto& sib : r.siblings) {
    for (const auto& d : sib.distinct) CHECK((d == Rational(1) || d == Rational(3) || d == Rational(1, 3)));
  }
}
