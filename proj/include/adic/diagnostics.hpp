#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adic/enclosure.hpp"
#include "adic/measure.hpp"

namespace adic {

// sum_p c_p log p over primes p with rational coefficients. Logarithms of
// distinct primes are linearly independent over Q, so the zero test is exact.
struct LogValue {
  std::map<BigInt, Rational> coeff;

  bool is_zero() const { return coeff.empty(); }
  Enclosure enclose(long precision = kDefaultPrecision) const;
  // Sign, raising precision until the enclosure excludes zero.
  int sign() const;
  std::string str() const;

  LogValue& operator+=(const LogValue& rhs);
  LogValue& operator-=(const LogValue& rhs);
  friend LogValue operator+(LogValue a, const LogValue& b) { return a += b; }
  friend LogValue operator-(LogValue a, const LogValue& b) { return a -= b; }
  friend LogValue operator*(const Rational& c, const LogValue& v);
  friend bool operator==(const LogValue&, const LogValue&) = default;
};

// log x for a positive rational, by factoring numerator and denominator.
LogValue log_of(const Rational& x);

// Exact piecewise-constant view of the density of a tree.
class WeightView {
 public:
  explicit WeightView(const MeasureTree& tree) : tree_(&tree) {}
  const MeasureTree& tree() const { return *tree_; }
  std::vector<Piece> pieces(const PlainInterval& j) const { return tree_->pieces(j); }
  // Average of w^k over j, exact for integer k (negative allowed).
  Rational mean_power(const PlainInterval& j, long k) const;
  Enclosure mean_power(const PlainInterval& j, const Rational& r, long precision = kDefaultPrecision) const;

 private:
  const MeasureTree* tree_;
};

struct FunctionalValue {
  // The value raised to an integer power e when that is rational:
  // (RH)^r for integer r, (A_r)^s for integer s = 1/(r - 1).
  std::optional<Rational> power;
  long exponent = 1;
  Enclosure value;
};

// (avg w^r)^(1/r) / avg w.
FunctionalValue rh_functional(const WeightView& view, const PlainInterval& I, const Rational& r);
// (avg w) (avg w^(-1/(r-1)))^(r-1). Any r > 1 is accepted; the exponent
// condition r > max_n (1 - ln n / ln 2) is implied for every base n >= 2.
FunctionalValue ap_functional(const WeightView& view, const PlainInterval& I, const Rational& r);

struct Oscillation {
  LogValue mean;
  LogValue symbolic;  // avg |f - avg f| as a combination of logs
  Enclosure value;
};

// Mean oscillation of log w over I.
Oscillation log_oscillation(const WeightView& view, const PlainInterval& I);

struct FamilyDescriptor {
  enum class Kind { All, Adic };
  Kind kind = Kind::All;
  long base = 0;    // for Adic
  long margin = 4;  // levels beyond the record depths

  static FamilyDescriptor parse(const std::string& text);  // "all" or "adic:n"
  std::string str() const;
};

// All: windows centred on density breakpoints at grid scales plus the
// H^(k) u G^(k) unions. Adic: n-adic intervals with a breakpoint inside.
std::vector<PlainInterval> enumerate_family(const MeasureTree& tree, const FamilyDescriptor& family,
                                            std::optional<long> alpha = std::nullopt);

enum class FunctionalKind { RH, AP, BMO };

struct FamilyRow {
  PlainInterval interval;
  Enclosure value;
};

struct OscillationReport {
  FamilyDescriptor family;
  FunctionalKind functional = FunctionalKind::BMO;
  Rational r{2};
  long intervals_checked = 0;
  Enclosure supremum;
  std::optional<LogValue> symbolic;  // BMO only
  std::optional<PlainInterval> witness;
  std::vector<FamilyRow> rows;  // filled when requested
};

OscillationReport scan_functional(const MeasureTree& tree, FunctionalKind functional, const FamilyDescriptor& family,
                                  const Rational& r = Rational(2), std::optional<long> alpha = std::nullopt,
                                  bool keep_rows = false);

// BMO scan; the unrestricted supremum is compared against (alpha/4) log(b/a).
OscillationReport bmo_oscillation(const MeasureTree& tree, const FamilyDescriptor& family,
                                  std::optional<long> alpha = std::nullopt);

// (alpha / 4) log(b / a).
LogValue bmo_lower_bound(const WeightParams& params, long alpha);

// Mean oscillation of the indicator of [0, inf) over a window, exactly.
Rational step_oscillation(const PlainInterval& window);

struct VmoRow {
  Rational scale;
  Rational symmetric;           // window (-r, r)
  Rational asymmetric;          // window (-r, 3r)
  Rational far;                 // window (r, 2r), away from the jump
  std::map<long, Rational> adic;  // largest over the n-adic intervals of length about r next to 0
};

std::vector<VmoRow> vmo_step_diagnostic(const std::vector<Rational>& scales, const std::vector<long>& bases);

const char* to_string(FunctionalKind kind);
FunctionalKind parse_functional(const std::string& text);

}  // namespace adic
