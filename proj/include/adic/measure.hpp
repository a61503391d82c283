#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adic/interval.hpp"
#include "adic/rational.hpp"
#include "adic/torus.hpp"

namespace adic {

// a (q - 1) + b = q with 0 < a < 1 < b.
struct WeightParams {
  long q = 2;
  Rational a{1, 2};
  Rational b{3, 2};

  static WeightParams make(long q, const Rational& a, const Rational& b);
  // q = 2: (1/2, 3/2); q = 3: (1/2, 2); otherwise a = 1/2, b = (q + 1)/2.
  static WeightParams defaults(long q);
};

void validate(const WeightParams& params);

// The n-adic interval [anchor, anchor + n^-(r-1)) paired with I_2 in the
// finite-base construction.
struct Companion {
  long base = 0;
  BigInt r;
  AdicInterval J;
  Rational closeness;  // |Y(J) - Z(I)|
  Rational slack;      // (n - 2) y + 2 (y - z)
  bool contained = false;
};

struct StageTrace {
  long alpha = 0;
  AdicInterval I;
  std::vector<AdicInterval> H;  // H[k-1] = H^(k), k = 1..2 alpha
  std::vector<AdicInterval> G;
  bool compact = false;
  std::optional<XCertificate> certificate;
  std::vector<Companion> companions;
};

// Finest level reached by the H and G chains of a stage.
long deepest_level(const StageTrace& stage);
// Length of the shortest interval in the H and G chains.
Rational finest_length(const StageTrace& stage);

struct Piece {
  PlainInterval interval;
  Rational density;
};

// Sparse record of split nodes. Each split node carries q factors summing
// to q; the density at a point is the product of the factors met on the
// way down, and 1 outside every record.
class MeasureTree {
 public:
  explicit MeasureTree(WeightParams params = {}, std::optional<PlainInterval> domain = std::nullopt);

  const WeightParams& params() const { return params_; }
  long grid_base() const { return params_.q; }
  const std::optional<PlainInterval>& domain() const { return domain_; }
  const std::map<AdicInterval, std::vector<Rational>>& records() const { return records_; }
  const std::vector<StageTrace>& stages() const { return stages_; }
  std::vector<AdicInterval> roots() const;

  // Splits a node that is not yet split. A node inside an unsplit leaf is
  // reached through a chain of unit factors. OverlapError if the node is
  // already split or contains split nodes.
  void split(const AdicInterval& node, const std::vector<Rational>& factors);
  void add_stage(StageTrace stage);

  bool intersects_record(const PlainInterval& j) const;
  bool is_split(const AdicInterval& node) const { return records_.count(node) > 0; }

  Rational density_at(const Rational& x) const;
  Rational measure(const PlainInterval& j) const;
  Rational measure(const AdicInterval& j) const { return measure(j.plain()); }
  // Constant-density pieces covering j, adjacent equal densities merged.
  std::vector<Piece> pieces(const PlainInterval& j) const;
  // Points where the density changes, within the closure of the window.
  std::vector<Rational> breakpoints(const PlainInterval& window) const;
  std::vector<Rational> breakpoints() const;

  // Factor sums and child-mass sums at every record, exactly.
  bool check_conservation(std::string* reason = nullptr) const;
  // Smallest and largest density over all leaves, and 1 outside.
  std::pair<Rational, Rational> density_range() const;

 private:
  std::optional<AdicInterval> root_containing(const Rational& x) const;
  // Deepest split node containing j, if j lies inside a root.
  std::optional<AdicInterval> deepest_record(const PlainInterval& j) const;
  Rational mass_in(const AdicInterval& node, const Rational& density, const PlainInterval& j) const;
  void collect(const AdicInterval& node, const Rational& density, const PlainInterval& j,
               std::vector<Piece>& out) const;

  WeightParams params_;
  std::optional<PlainInterval> domain_;
  std::map<AdicInterval, std::vector<Rational>> records_;
  std::map<AdicInterval, Rational> densities_;  // density on each split node
  std::map<Rational, AdicInterval> roots_;
  long max_level_ = 0;  // keyed by left endpoint
  std::vector<StageTrace> stages_;
};

// Forward alpha steps then reverse alpha steps on I. OverlapError if I meets
// an existing record.
StageTrace reweight_two_sided(MeasureTree& tree, const AdicInterval& I, long alpha);

// Stages on [alpha, alpha + 1) with I = [alpha, alpha + 1), q-adic level 0.
MeasureTree build_two_sided_measure(const std::vector<long>& alphas, const WeightParams& params = {});

// epsilon_alpha = 2^-(scale alpha + offset); the construction's own choice is
// scale 100, offset 0.
struct XSchedule {
  long scale = 2;
  long offset = 1;
  Rational at(long alpha) const { return power_of(2, -(scale * alpha + offset)); }
};

std::vector<XCertificate> certify_stages(const std::vector<long>& bases, const std::vector<long>& alphas,
                                         const XSchedule& schedule, long x_max, const FindXOptions& options = {});

Companion make_companion(long base, const BigInt& r, const Rational& anchor, const AdicInterval& I);

// I_2 = [alpha, alpha + 2^-(x-1)) for each alpha, reweighted; ContainmentFailure
// when some companion fails to contain I_2 or to sit within eps |I_2|.
MeasureTree build_finite_base_measure(const std::vector<long>& bases, const std::vector<long>& alphas,
                                      const std::vector<XCertificate>& certs, const WeightParams& params = {},
                                      const XSchedule& schedule = {});

// Stages anchored at 0 in [0, 1]. With certs empty, x values are searched so
// that each exceeds the previous x plus twice the previous alpha.
MeasureTree build_compactified(const std::vector<long>& bases, const std::vector<long>& alphas,
                               const WeightParams& params = {}, const std::vector<XCertificate>& certs = {},
                               const XSchedule& schedule = {}, long x_max = 1L << 20);

// Masses of the first children of a companion J and the bounds they are
// expected to satisfy, by the side of Y(J) relative to Z(I).
struct CaseCheck {
  long base = 0;
  long alpha = 0;
  bool y_right_of_z = false;
  std::vector<Rational> masses;  // mu(J_1), mu(J_2)[, mu(J_3)]
  std::vector<std::pair<Rational, Rational>> bounds;
  bool lebesgue_tail = false;  // remaining children all have equal mass
  bool holds = false;
};

std::vector<CaseCheck> case_checks(const MeasureTree& tree);

struct PairWitness {
  PlainInterval left;
  PlainInterval right;
  Rational mu_left;
  Rational mu_right;
  Rational ratio;  // max / min
};

struct StageScan {
  long alpha = 0;
  long level_lo = 0;
  long level_hi = 0;
  long pairs_checked = 0;
  PairWitness worst;  // both intervals inside I
  std::optional<PairWitness> boundary_worst;  // pairs reaching outside I
};

struct SiblingScan {
  long base = 0;
  long alpha = 0;
  long level_lo = 0;
  long level_hi = 0;
  long parents_checked = 0;
  Rational max_ratio{1};
  std::optional<AdicInterval> witness;
  std::vector<Rational> distinct;  // sibling ratios seen, capped
};

struct LevelRow {
  long level = 0;
  Rational worst;
};

struct DoublingReport {
  long margin = 4;
  Rational worst_ratio{1};
  std::optional<PairWitness> worst;
  std::vector<StageScan> stages;
  std::vector<SiblingScan> siblings;
  std::vector<LevelRow> levels;
};

struct ScanOptions {
  long margin = 4;            // levels scanned beyond the record depths
  long distinct_cap = 64;     // sibling ratios kept per base and stage
  std::optional<long> level_lo;  // overrides for the adjacent-pair scan
  std::optional<long> level_hi;
};

DoublingReport scan_doubling(const MeasureTree& tree, const std::vector<long>& bases_to_check,
                             const ScanOptions& options = {});

}  // namespace adic
