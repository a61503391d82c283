#include "adic/interval.hpp"

#include <cmath>

#include "adic/error.hpp"

namespace adic {

namespace {

// log2 of a positive integer, good to double precision.
double log2_of(const BigInt& value) {
  long exponent = 0;
  double mantissa = mpz_get_d_2exp(&exponent, value.get_mpz_t());
  return std::log2(mantissa) + static_cast<double>(exponent);
}

}  // namespace

PlainInterval::PlainInterval(Rational l, Rational r) : left(std::move(l)), right(std::move(r)) {
  require(left < right, "interval needs left < right, got [" + left.str() + ", " + right.str() + ")");
}

std::string PlainInterval::str() const { return "[" + left.str() + ", " + right.str() + ")"; }

std::optional<PlainInterval> intersection(const PlainInterval& a, const PlainInterval& b) {
  Rational l = max(a.left, b.left);
  Rational r = min(a.right, b.right);
  if (!(l < r)) return std::nullopt;
  return PlainInterval(l, r);
}

Rational grid_step(long base, long level) { return power_of(base, -level); }

long floor_log(long base, const Rational& x) {
  require(x.sign() > 0, "floor_log needs a positive argument");
  double estimate = (log2_of(x.numerator()) - log2_of(x.denominator())) / std::log2(static_cast<double>(base));
  long l = static_cast<long>(std::floor(estimate));
  while (power_of(base, l) > x) --l;
  while (power_of(base, l + 1) <= x) ++l;
  return l;
}

AdicInterval::AdicInterval(long base, long level, BigInt index)
    : base_(base), level_(level), index_(std::move(index)) {
  require(base >= 2, "interval base must be at least 2");
}

Rational AdicInterval::left() const { return Rational(BigInt(index_ - 1)) * grid_step(base_, level_); }

Rational AdicInterval::right() const { return Rational(index_) * grid_step(base_, level_); }

AdicInterval AdicInterval::child(long i) const {
  require(i >= 1 && i <= base_, "child position out of range");
  return AdicInterval(base_, level_ + 1, BigInt((index_ - 1) * base_ + i));
}

std::vector<AdicInterval> AdicInterval::children() const {
  std::vector<AdicInterval> out;
  out.reserve(static_cast<std::size_t>(base_));
  for (long i = 1; i <= base_; ++i) out.push_back(child(i));
  return out;
}

AdicInterval AdicInterval::parent() const {
  BigInt q;
  mpz_fdiv_q_ui(q.get_mpz_t(), BigInt(index_ - 1).get_mpz_t(), static_cast<unsigned long>(base_));
  return AdicInterval(base_, level_ - 1, BigInt(q + 1));
}

long AdicInterval::child_position() const {
  BigInt r;
  mpz_fdiv_r_ui(r.get_mpz_t(), BigInt(index_ - 1).get_mpz_t(), static_cast<unsigned long>(base_));
  return r.get_si() + 1;
}

bool AdicInterval::contains(const Rational& x) const { return left() <= x && x < right(); }

std::string AdicInterval::str() const {
  return "{base " + std::to_string(base_) + ", level " + std::to_string(level_) + ", index " +
         to_string(index_) + "}";
}

AdicInterval interval_at(long base, long level, const Rational& x) {
  Rational scaled = x / grid_step(base, level);
  return AdicInterval(base, level, BigInt(scaled.floor() + 1));
}

Rational y_point(const AdicInterval& interval) {
  return interval.left() + grid_step(interval.base(), interval.level() + 1);
}

Rational z_point(const AdicInterval& interval) {
  return interval.left() + Rational(interval.base() - 1) * grid_step(interval.base(), interval.level() + 1);
}

AdicInterval smallest_containing(long base, const PlainInterval& j) {
  require(base >= 2, "base must be at least 2");
  if (j.left.sign() < 0 && j.right.sign() > 0) {
    fail(ErrorKind::NoContainingInterval, j.str() + " has 0 in its interior");
  }
  // No interval finer than the length of J can contain it.
  long level = floor_log(base, Rational(1) / j.length());
  for (;; --level) {
    AdicInterval candidate = interval_at(base, level, j.left);
    if (j.right <= candidate.right()) return candidate;
  }
}

AdicInterval largest_contained(long base, const PlainInterval& j) {
  require(base >= 2, "base must be at least 2");
  long level = floor_log(base, Rational(1) / j.length());
  for (;; ++level) {
    Rational step = grid_step(base, level);
    BigInt first = (j.left / step).ceil() + 1;
    BigInt last = (j.right / step).floor();
    if (first <= last) return AdicInterval(base, level, first);
  }
}

bool adjacent_equal_pair(const PlainInterval& left, const PlainInterval& right) {
  return left.right == right.left && left.length() == right.length();
}

bool adjacent_equal_pair(const AdicInterval& left, const AdicInterval& right) {
  return adjacent_equal_pair(left.plain(), right.plain());
}

bool on_grid(long base, long level, const Rational& x) { return (x / grid_step(base, level)).is_integer(); }

}  // namespace adic
