#include "doctest.h"

#include <random>

#include "adic/enclosure.hpp"
#include "adic/error.hpp"
#include "adic/interval.hpp"
#include "adic/rational.hpp"

using namespace adic;

TEST_CASE("rationals stay in lowest terms") {
  const Rational x(6, -8);
  CHECK(x.numerator() == -3);
  CHECK(x.denominator() == 4);
  CHECK(x.str() == "-3/4");
  CHECK(Rational::parse("10/4") == Rational(5, 2));
  CHECK(Rational::parse("-7") == Rational(-7));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(2, 3) * Rational(9, 4) == Rational(3, 2));
  CHECK(Rational(1, 3) / Rational(2) == Rational(1, 6));
  CHECK(Rational(-5, 2).floor() == -3);
  CHECK(Rational(-5, 2).ceil() == -2);
  CHECK(power_of(3, -2) == Rational(1, 9));
  CHECK(pow(Rational(2, 3), -2) == Rational(9, 4));
}

TEST_CASE("rational parse rejects junk") {
  CHECK_THROWS_AS(Rational::parse("1/0"), Error);
  CHECK_THROWS_AS(Rational::parse("abc"), Error);
  CHECK_THROWS_AS(Rational::parse(""), Error);
  CHECK_THROWS_AS(Rational::parse("1/2/3"), Error);
}

TEST_CASE("children tile the parent") {
  const AdicInterval unit(2, 0, 1);
  const auto halves = unit.children();
  REQUIRE(halves.size() == 2);
  CHECK(halves[0].plain() == PlainInterval(Rational(0), Rational(1, 2)));
  CHECK(halves[1].plain() == PlainInterval(Rational(1, 2), Rational(1)));

  const AdicInterval third(3, 1, 1);
  const auto ninths = third.children();
  REQUIRE(ninths.size() == 3);
  CHECK(ninths[0].plain() == PlainInterval(Rational(0), Rational(1, 9)));
  CHECK(ninths[1].plain() == PlainInterval(Rational(1, 9), Rational(2, 9)));
  CHECK(ninths[2].plain() == PlainInterval(Rational(2, 9), Rational(1, 3)));

  const AdicInterval shifted(5, 0, 2);  // [1, 2)
  const auto fifths = shifted.children();
  REQUIRE(fifths.size() == 5);
  for (long i = 0; i < 5; ++i) {
    CHECK(fifths[i].left() == Rational(1) + Rational(i, 5));
    CHECK(fifths[i].length() == Rational(1, 5));
  }
}

TEST_CASE("distinguished points") {
  CHECK(y_point(AdicInterval(3, 1, 1)) == Rational(1, 9));
  CHECK(y_point(AdicInterval(3, 0, 1)) == Rational(1, 3));
  CHECK(y_point(AdicInterval(2, 1, 2)) == Rational(3, 4));
  CHECK(z_point(AdicInterval(2, 0, 1)) == Rational(1, 2));
  CHECK(z_point(AdicInterval(3, 0, 1)) == Rational(2, 3));
  CHECK(z_point(interval_at(2, 5, Rational(6, 64))) == Rational(7, 64));
}

TEST_CASE("smallest containing interval") {
  CHECK(smallest_containing(2, {Rational(1, 3), Rational(2, 5)}).plain() ==
        PlainInterval(Rational(1, 4), Rational(1, 2)));
  CHECK(smallest_containing(3, {Rational(0), Rational(1, 9)}).plain() == PlainInterval(Rational(0), Rational(1, 9)));
  CHECK(smallest_containing(2, {Rational(3, 8), Rational(5, 8)}).plain() == PlainInterval(Rational(0), Rational(1)));
  // Far from the unit interval and at negative levels.
  CHECK(smallest_containing(2, {Rational(5), Rational(7)}).plain() == PlainInterval(Rational(4), Rational(8)));
  CHECK(smallest_containing(3, {Rational(-2, 9), Rational(-1, 9)}).plain() ==
        PlainInterval(Rational(-2, 9), Rational(-1, 9)));
  // Zero is an endpoint at every level.
  CHECK_THROWS_AS(smallest_containing(2, {Rational(-1, 4), Rational(1, 4)}), Error);
}

TEST_CASE("largest contained interval") {
  const AdicInterval j = largest_contained(2, {Rational(1, 3), Rational(1)});
  CHECK(j.plain() == PlainInterval(Rational(1, 2), Rational(1)));
  CHECK(largest_contained(3, {Rational(0), Rational(1)}).plain() == PlainInterval(Rational(0), Rational(1)));
}

TEST_CASE("adjacent equal pairs") {
  CHECK(adjacent_equal_pair(AdicInterval(2, 1, 1), AdicInterval(2, 1, 2)));
  CHECK_FALSE(adjacent_equal_pair(AdicInterval(2, 1, 1), AdicInterval(2, 2, 4)));
  CHECK_FALSE(adjacent_equal_pair(AdicInterval(2, 1, 2), AdicInterval(2, 1, 1)));
  CHECK(adjacent_equal_pair(PlainInterval(Rational(0), Rational(1, 3)), PlainInterval(Rational(1, 3), Rational(2, 3))));
}

TEST_CASE("interval properties on random intervals") {
  std::mt19937_64 rng(20240607);
  for (int trial = 0; trial < 500; ++trial) {
    const long base = 2 + static_cast<long>(rng() % 9);
    const long level = static_cast<long>(rng() % 13) - 3;
    const long index = static_cast<long>(rng() % 2001) - 1000;
    const AdicInterval I(base, level, index);
    const Rational y = y_point(I), z = z_point(I);
    CHECK(I.left() < y);
    CHECK(y <= z);
    CHECK(z < I.right());
    CHECK(y - I.left() == I.length() / Rational(base));
    CHECK(I.right() - z == I.length() / Rational(base));
    const auto kids = I.children();
    Rational cursor = I.left();
    for (long i = 0; i < base; ++i) {
      CHECK(kids[i].left() == cursor);
      CHECK(kids[i].parent() == I);
      CHECK(kids[i].child_position() == i + 1);
      cursor = kids[i].right();
    }
    CHECK(cursor == I.right());
    if (I.left().sign() >= 0 || I.right().sign() <= 0) CHECK(smallest_containing(base, I.plain()) == I);
    CHECK(interval_at(base, level, y) == I);
  }
}

TEST_CASE("coprime grid points are separated") {
  // |k/p^n - j/q^m| >= 1/(p^n q^m) for p^n, q^m <= 10^4 and reduced fractions.
  const std::vector<std::pair<long, long>> bases{{2, 3}, {3, 5}, {2, 5}};
  for (const auto& [p, q] : bases) {
    for (long P = p; P <= 10000; P *= p) {
      for (long Qd = q; Qd <= 10000; Qd *= q) {
        // The minimum over numerators is |kQ - jP| >= 1; check the extremes
        // by locating the closest j for every k.
        for (long k = 1; k < P; k += p) {
          const Rational a(k, P);
          const BigInt jb = (a * Rational(Qd)).floor();
          for (long d = 0; d <= 1; ++d) {
            const Rational b(BigInt(jb + d), BigInt(Qd));
            CHECK(abs(a - b) >= Rational(BigInt(1), BigInt(P) * Qd));
          }
        }
      }
    }
  }
}

TEST_CASE("enclosures contain the true values") {
  const Enclosure l2 = log_enclosure(Rational(2));
  CHECK(l2.lo < l2.hi);
  CHECK(l2.width() < Rational(1, 1000000));
  CHECK(l2.lo < Rational(6931471806, 10000000000));
  CHECK(Rational(6931471805, 10000000000) < l2.hi);
  const Enclosure s = root_enclosure(Enclosure(Rational(5, 4)), 2);
  CHECK(s.lo * s.lo <= Rational(5, 4));
  CHECK(s.hi * s.hi >= Rational(5, 4));
  const Enclosure p = pow_enclosure(Rational(9), Rational(1, 2));
  CHECK(p.contains(Rational(3)));
  CHECK(log_enclosure(Rational(1)).contains(Rational(0)));
  CHECK(Enclosure(Rational(-1), Rational(1)).certain_sign() == kUncertain);
  CHECK(Enclosure(Rational(1), Rational(2)).certain_sign() == 1);
}
