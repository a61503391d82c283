#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adic/rational.hpp"

namespace adic {

// Half-open interval [left, right) with exact endpoints.
struct PlainInterval {
  Rational left;
  Rational right;

  PlainInterval() = default;
  PlainInterval(Rational l, Rational r);

  Rational length() const { return right - left; }
  Rational midpoint() const { return (left + right) / Rational(2); }
  bool contains(const Rational& x) const { return left <= x && x < right; }
  bool contains(const PlainInterval& other) const {
    return left <= other.left && other.right <= right;
  }
  bool intersects(const PlainInterval& other) const {
    return left < other.right && other.left < right;
  }
  std::string str() const;

  friend bool operator==(const PlainInterval&, const PlainInterval&) = default;
};

std::optional<PlainInterval> intersection(const PlainInterval& a, const PlainInterval& b);

// base^(-level) as an exact rational; level may be negative.
Rational grid_step(long base, long level);

// Largest L with base^L <= x, for x > 0.
long floor_log(long base, const Rational& x);

// The base-adic interval [(index-1)/base^level, index/base^level).
class AdicInterval {
 public:
  AdicInterval() = default;
  AdicInterval(long base, long level, BigInt index);

  long base() const { return base_; }
  long level() const { return level_; }
  const BigInt& index() const { return index_; }

  Rational left() const;
  Rational right() const;
  Rational length() const { return grid_step(base_, level_); }
  PlainInterval plain() const { return {left(), right()}; }

  // Children are numbered 1..base from left to right.
  AdicInterval child(long i) const;
  std::vector<AdicInterval> children() const;
  AdicInterval parent() const;
  // Position (1..base) of this interval among its parent's children.
  long child_position() const;

  bool contains(const Rational& x) const;
  bool contains(const AdicInterval& other) const { return plain().contains(other.plain()); }
  bool intersects(const AdicInterval& other) const { return plain().intersects(other.plain()); }

  std::string str() const;

  friend bool operator==(const AdicInterval& a, const AdicInterval& b) {
    return a.base_ == b.base_ && a.level_ == b.level_ && a.index_ == b.index_;
  }
  // Orders by level, then by position; used for map keys.
  friend bool operator<(const AdicInterval& a, const AdicInterval& b) {
    if (a.base_ != b.base_) return a.base_ < b.base_;
    if (a.level_ != b.level_) return a.level_ < b.level_;
    return a.index_ < b.index_;
  }

 private:
  long base_ = 2;
  long level_ = 0;
  BigInt index_ = 1;
};

// Interval of the given level containing x.
AdicInterval interval_at(long base, long level, const Rational& x);

// Right endpoint of the first child.
Rational y_point(const AdicInterval& interval);
// Left endpoint of the last child.
Rational z_point(const AdicInterval& interval);

// Minimal base-adic interval containing J. Throws NoContainingInterval when
// J has 0 in its interior, since 0 is an endpoint at every level.
AdicInterval smallest_containing(long base, const PlainInterval& j);

// Largest base-adic interval contained in J; the leftmost one on ties.
AdicInterval largest_contained(long base, const PlainInterval& j);

bool adjacent_equal_pair(const PlainInterval& left, const PlainInterval& right);
bool adjacent_equal_pair(const AdicInterval& left, const AdicInterval& right);

// True when x is a grid point of the given level.
bool on_grid(long base, long level, const Rational& x);

}  // namespace adic
