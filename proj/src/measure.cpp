#include "adic/measure.hpp"

#include <algorithm>
#include <future>
#include <set>

#include "adic/error.hpp"

namespace adic {

WeightParams WeightParams::make(long q, const Rational& a, const Rational& b) {
  WeightParams p{q, a, b};
  validate(p);
  return p;
}

WeightParams WeightParams::defaults(long q) {
  require(q >= 2, "q must be at least 2");
  if (q == 2) return {2, Rational(1, 2), Rational(3, 2)};
  if (q == 3) return {3, Rational(1, 2), Rational(2)};
  return {q, Rational(1, 2), Rational(q + 1, 2)};
}

void validate(const WeightParams& p) {
  require(p.q >= 2, "q must be at least 2");
  require(p.a.sign() > 0 && p.a < Rational(1), "a must lie in (0, 1)");
  require(p.b > Rational(1), "b must exceed 1");
  require(p.a * Rational(p.q - 1) + p.b == Rational(p.q),
          "a (q - 1) + b must equal q, got " + (p.a * Rational(p.q - 1) + p.b).str());
}

namespace {

Rational overlap(const PlainInterval& x, const PlainInterval& y) {
  Rational lo = max(x.left, y.left), hi = min(x.right, y.right);
  return lo < hi ? hi - lo : Rational(0);
}

// Position (1..base) of the child of `outer` that contains `inner`.
long child_toward(const AdicInterval& outer, const AdicInterval& inner) {
  Rational step = outer.length() / Rational(outer.base());
  BigInt pos = ((inner.left() - outer.left()) / step).floor();
  return pos.get_si() + 1;
}

std::vector<Rational> tail_pattern(const WeightParams& p) {
  std::vector<Rational> f(p.q, p.a);
  f.back() = p.b;
  return f;
}

std::vector<Rational> lead_pattern(const WeightParams& p) {
  std::vector<Rational> f(p.q, p.a);
  f.front() = p.b;
  return f;
}

Rational ratio_of(const Rational& x, const Rational& y) { return x > y ? x / y : y / x; }

}  // namespace

MeasureTree::MeasureTree(WeightParams params, std::optional<PlainInterval> domain)
    : params_(std::move(params)), domain_(std::move(domain)) {
  validate(params_);
}

std::vector<AdicInterval> MeasureTree::roots() const {
  std::vector<AdicInterval> out;
  for (const auto& [left, root] : roots_) out.push_back(root);
  return out;
}

void MeasureTree::add_stage(StageTrace stage) { stages_.push_back(std::move(stage)); }

void MeasureTree::split(const AdicInterval& node, const std::vector<Rational>& factors) {
  const long q = params_.q;
  require(node.base() == q, "node base must equal q = " + std::to_string(q));
  require(static_cast<long>(factors.size()) == q, "need q factors");
  Rational sum(0);
  for (const auto& f : factors) {
    require(f.sign() > 0, "factors must be positive");
    sum += f;
  }
  require(sum == Rational(q), "factors must sum to q, got " + sum.str());
  if (records_.count(node)) fail(ErrorKind::OverlapError, node.str() + " is already split");
  max_level_ = records_.empty() ? node.level() : std::max(max_level_, node.level());

  std::optional<AdicInterval> host;
  auto it = roots_.upper_bound(node.left());
  if (it != roots_.begin()) --it;
  for (; it != roots_.end() && it->first < node.right(); ++it) {
    const AdicInterval& root = it->second;
    if (!root.intersects(node)) continue;
    if (root.contains(node)) {
      host = root;
    } else {
      fail(ErrorKind::OverlapError, node.str() + " contains the split node " + root.str());
    }
  }
  if (!host) {
    records_.emplace(node, factors);
    densities_.emplace(node, Rational(1));
    roots_.emplace(node.left(), node);
    return;
  }
  AdicInterval cur = *host;
  Rational d(1);
  for (;;) {
    auto rec = records_.find(cur);
    if (rec == records_.end()) break;
    const long pos = child_toward(cur, node);
    d = densities_.at(cur) * rec->second[pos - 1];
    cur = cur.child(pos);
  }
  const std::vector<Rational> unit(q, Rational(1));
  while (!(cur == node)) {
    records_.emplace(cur, unit);
    densities_.emplace(cur, d);
    cur = cur.child(child_toward(cur, node));
  }
  records_.emplace(node, factors);
  densities_.emplace(node, d);
}

std::optional<AdicInterval> MeasureTree::deepest_record(const PlainInterval& j) const {
  auto root = root_containing(j.left);
  if (!root || !root->plain().contains(j)) return std::nullopt;
  long lo = root->level();
  long hi = floor_log(params_.q, Rational(1) / j.length());
  AdicInterval best = *root;
  while (lo < hi) {
    const long mid = lo + (hi - lo + 1) / 2;
    AdicInterval x = interval_at(params_.q, mid, j.left);
    if (x.plain().contains(j) && records_.count(x)) {
      best = x;
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return best;
}

bool MeasureTree::intersects_record(const PlainInterval& j) const {
  auto it = roots_.upper_bound(j.left);
  if (it != roots_.begin()) --it;
  for (; it != roots_.end() && it->first < j.right; ++it) {
    if (it->second.plain().intersects(j)) return true;
  }
  return false;
}

std::optional<AdicInterval> MeasureTree::root_containing(const Rational& x) const {
  auto it = roots_.upper_bound(x);
  if (it == roots_.begin()) return std::nullopt;
  --it;
  if (it->second.contains(x)) return it->second;
  return std::nullopt;
}

Rational MeasureTree::density_at(const Rational& x) const {
  auto root = root_containing(x);
  if (!root) return Rational(1);
  // Narrow to a window finer than any record so the search reaches the leaf.
  auto host = deepest_record(interval_at(params_.q, max_level_ + 1, x).plain());
  const auto& f = records_.at(*host);
  const Rational step = host->length() / Rational(params_.q);
  const long pos = ((x - host->left()) / step).floor().get_si() + 1;
  return densities_.at(*host) * f[pos - 1];
}

Rational MeasureTree::mass_in(const AdicInterval& node, const Rational& density, const PlainInterval& j) const {
  const PlainInterval span = node.plain();
  if (j.contains(span)) return density * span.length();
  const auto& f = records_.at(node);
  const Rational step = span.length() / Rational(params_.q);
  Rational total(0);
  for (long i = 1; i <= params_.q; ++i) {
    PlainInterval c(span.left + step * Rational(i - 1), span.left + step * Rational(i));
    if (!c.intersects(j)) continue;
    const Rational d = density * f[i - 1];
    AdicInterval child = node.child(i);
    if (records_.count(child)) {
      total += mass_in(child, d, j);
    } else {
      total += d * overlap(c, j);
    }
  }
  return total;
}

Rational MeasureTree::measure(const PlainInterval& j) const {
  if (auto host = deepest_record(j)) return mass_in(*host, densities_.at(*host), j);
  Rational total = j.length();
  auto it = roots_.upper_bound(j.left);
  if (it != roots_.begin()) --it;
  for (; it != roots_.end() && it->first < j.right; ++it) {
    const PlainInterval span = it->second.plain();
    if (!span.intersects(j)) continue;
    total += mass_in(it->second, Rational(1), j) - overlap(span, j);
  }
  return total;
}

void MeasureTree::collect(const AdicInterval& node, const Rational& density, const PlainInterval& j,
                          std::vector<Piece>& out) const {
  const auto& f = records_.at(node);
  for (long i = 1; i <= params_.q; ++i) {
    AdicInterval child = node.child(i);
    const PlainInterval c = child.plain();
    if (!c.intersects(j)) continue;
    const Rational d = density * f[i - 1];
    if (records_.count(child)) {
      collect(child, d, j, out);
    } else {
      out.push_back({PlainInterval(max(c.left, j.left), min(c.right, j.right)), d});
    }
  }
}

std::vector<Piece> MeasureTree::pieces(const PlainInterval& j) const {
  std::vector<Piece> raw;
  Rational pos = j.left;
  auto it = roots_.upper_bound(j.left);
  if (it != roots_.begin()) --it;
  for (; it != roots_.end() && it->first < j.right; ++it) {
    const PlainInterval span = it->second.plain();
    if (!span.intersects(j)) continue;
    if (pos < span.left) raw.push_back({PlainInterval(pos, span.left), Rational(1)});
    collect(it->second, Rational(1), j, raw);
    pos = min(span.right, j.right);
  }
  if (pos < j.right) raw.push_back({PlainInterval(pos, j.right), Rational(1)});
  std::vector<Piece> merged;
  for (auto& p : raw) {
    if (!merged.empty() && merged.back().density == p.density && merged.back().interval.right == p.interval.left) {
      merged.back().interval.right = p.interval.right;
    } else {
      merged.push_back(std::move(p));
    }
  }
  return merged;
}

std::vector<Rational> MeasureTree::breakpoints(const PlainInterval& window) const {
  const Rational pad = window.length();
  auto ps = pieces(PlainInterval(window.left - pad, window.right + pad));
  std::vector<Rational> out;
  for (std::size_t i = 1; i < ps.size(); ++i) {
    const Rational& x = ps[i].interval.left;
    if (window.left <= x && x <= window.right) out.push_back(x);
  }
  return out;
}

std::vector<Rational> MeasureTree::breakpoints() const {
  if (roots_.empty()) return {};
  Rational lo = roots_.begin()->second.left();
  Rational hi = lo;
  for (const auto& [left, root] : roots_) hi = max(hi, root.right());
  return breakpoints(PlainInterval(lo, hi));
}

namespace {

// Mass of a split node summed from its leaves, checked against density |node|
// at every split node on the way.
bool leaf_mass(const std::map<AdicInterval, std::vector<Rational>>& records, long q, const AdicInterval& node,
               const Rational& density, Rational& mass, std::string* reason) {
  const auto& f = records.at(node);
  Rational sum(0);
  for (const auto& x : f) {
    if (x.sign() <= 0) {
      if (reason) *reason = "nonpositive factor at " + node.str();
      return false;
    }
    sum += x;
  }
  if (sum != Rational(q)) {
    if (reason) *reason = "factor sum " + sum.str() + " at " + node.str();
    return false;
  }
  mass = Rational(0);
  for (long i = 1; i <= q; ++i) {
    AdicInterval child = node.child(i);
    const Rational d = density * f[i - 1];
    if (records.count(child)) {
      Rational sub;
      if (!leaf_mass(records, q, child, d, sub, reason)) return false;
      mass += sub;
    } else {
      mass += d * child.length();
    }
  }
  if (mass != density * node.length()) {
    if (reason) *reason = "children do not add up at " + node.str();
    return false;
  }
  return true;
}

}  // namespace

bool MeasureTree::check_conservation(std::string* reason) const {
  for (const auto& [left, root] : roots_) {
    Rational mass;
    if (!leaf_mass(records_, params_.q, root, Rational(1), mass, reason)) return false;
  }
  return true;
}

std::pair<Rational, Rational> MeasureTree::density_range() const {
  Rational lo(1), hi(1);
  for (const auto& [left, root] : roots_) {
    for (const auto& p : pieces(root.plain())) {
      lo = min(lo, p.density);
      hi = max(hi, p.density);
    }
  }
  return {lo, hi};
}

namespace {

StageTrace apply_two_sided(MeasureTree& tree, const AdicInterval& I, long alpha) {
  const WeightParams& p = tree.params();
  require(I.base() == p.q, "I must have base q = " + std::to_string(p.q));
  require(alpha >= 1, "alpha must be positive");
  if (tree.intersects_record(I.plain())) fail(ErrorKind::OverlapError, I.str() + " meets an existing record");
  const auto tail = tail_pattern(p), lead = lead_pattern(p);
  StageTrace trace;
  trace.alpha = alpha;
  trace.I = I;
  tree.split(I, tail);
  AdicInterval h = I.child(p.q - 1), g = I.child(p.q);
  trace.H.push_back(h);
  trace.G.push_back(g);
  for (long k = 1; k <= 2 * alpha - 1; ++k) {
    const auto& pattern = k <= alpha - 1 ? lead : tail;
    tree.split(h, pattern);
    tree.split(g, pattern);
    h = h.child(p.q);
    g = g.child(1);
    trace.H.push_back(h);
    trace.G.push_back(g);
  }
  return trace;
}

void check_bases(const std::vector<long>& bases) {
  require(!bases.empty(), "at least one base required");
  for (long n : bases) {
    require(n >= 3, "bases must be at least 3");
    require(power_of_two_exponent(n) == 0, "base " + std::to_string(n) + " is a power of 2");
  }
}

const BaseWitness& witness_for(const XCertificate& cert, long base) {
  for (std::size_t i = 0; i < cert.bases.size(); ++i) {
    if (cert.bases[i] == base) return cert.witnesses[i];
  }
  fail(ErrorKind::InvalidArgument, "certificate for x = " + std::to_string(cert.x) + " lacks base " +
                                       std::to_string(base));
}

void check_certificate(const XCertificate& cert, long alpha, const XSchedule& schedule) {
  std::string why;
  if (!verify_x_certificate(cert, &why)) {
    fail(ErrorKind::VerificationFailed, "certificate for alpha = " + std::to_string(alpha) + ": " + why);
  }
  require(cert.x >= 1, "x must be positive");
  const Rational eps = schedule.at(alpha);
  if (cert.epsilon > eps) {
    fail(ErrorKind::InvalidArgument, "certificate epsilon " + cert.epsilon.str() + " exceeds the schedule value " +
                                         eps.str() + " at alpha = " + std::to_string(alpha));
  }
}

std::vector<Companion> companions_for(const std::vector<long>& bases, const XCertificate& cert, long anchor,
                                      const AdicInterval& I) {
  std::vector<Companion> out;
  for (long n : bases) {
    Companion c = make_companion(n, witness_for(cert, n).r, Rational(anchor), I);
    if (!c.contained) {
      fail(ErrorKind::ContainmentFailure, "I_2 = " + I.plain().str() + " is not inside I_" + std::to_string(n) +
                                              " = " + c.J.plain().str());
    }
    if (c.closeness > cert.epsilon * I.length()) {
      fail(ErrorKind::ContainmentFailure, "|Y(I_" + std::to_string(n) + ") - Z(I_2)| exceeds eps |I_2|");
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

StageTrace reweight_two_sided(MeasureTree& tree, const AdicInterval& I, long alpha) {
  StageTrace trace = apply_two_sided(tree, I, alpha);
  tree.add_stage(trace);
  return trace;
}

MeasureTree build_two_sided_measure(const std::vector<long>& alphas, const WeightParams& params) {
  MeasureTree tree(params);
  for (long alpha : alphas) {
    require(alpha >= 1, "alphas must be positive");
    reweight_two_sided(tree, AdicInterval(params.q, 0, BigInt(alpha + 1)), alpha);
  }
  return tree;
}

std::vector<XCertificate> certify_stages(const std::vector<long>& bases, const std::vector<long>& alphas,
                                         const XSchedule& schedule, long x_max, const FindXOptions& options) {
  std::vector<XCertificate> out;
  for (long alpha : alphas) out.push_back(find_x(bases, schedule.at(alpha), 1, x_max, options));
  return out;
}

Companion make_companion(long base, const BigInt& r, const Rational& anchor, const AdicInterval& I) {
  require(r >= 1, "r must be positive");
  require(anchor.is_integer(), "anchor must be an integer");
  const long level = r.get_si() - 1;
  Companion c;
  c.base = base;
  c.r = r;
  c.J = AdicInterval(base, level, BigInt(anchor.numerator() * pow(BigInt(base), static_cast<unsigned long>(level)) + 1));
  const Rational y = y_point(c.J) - anchor;
  const Rational z = z_point(I) - anchor;
  c.closeness = abs(y - z);
  c.slack = Rational(base - 2) * y + Rational(2) * (y - z);
  c.contained = c.J.plain().contains(I.plain());
  return c;
}

MeasureTree build_finite_base_measure(const std::vector<long>& bases, const std::vector<long>& alphas,
                                      const std::vector<XCertificate>& certs, const WeightParams& params,
                                      const XSchedule& schedule) {
  require(params.q == 2, "the finite-base construction is dyadic (q = 2)");
  check_bases(bases);
  require(certs.size() == alphas.size(), "one certificate per alpha required");
  MeasureTree tree(params);
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const long alpha = alphas[i];
    require(alpha >= 1, "alphas must be positive");
    check_certificate(certs[i], alpha, schedule);
    const long x = certs[i].x;
    AdicInterval I(2, x - 1, BigInt(alpha * pow(BigInt(2), static_cast<unsigned long>(x - 1)) + 1));
    auto companions = companions_for(bases, certs[i], alpha, I);
    StageTrace trace = apply_two_sided(tree, I, alpha);
    trace.certificate = certs[i];
    trace.companions = std::move(companions);
    tree.add_stage(std::move(trace));
  }
  return tree;
}

MeasureTree build_compactified(const std::vector<long>& bases, const std::vector<long>& alphas,
                               const WeightParams& params, const std::vector<XCertificate>& certs,
                               const XSchedule& schedule, long x_max) {
  require(params.q == 2, "the compactified construction is dyadic (q = 2)");
  check_bases(bases);
  require(!alphas.empty(), "at least one alpha required");
  require(certs.empty() || certs.size() == alphas.size(), "one certificate per alpha required");
  const Rational& a = params.a;
  const auto tail = tail_pattern(params), lead = lead_pattern(params);
  MeasureTree tree(params, PlainInterval(0, 1));
  long prev_x = 0, prev_alpha = 0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const long alpha = alphas[i];
    require(alpha >= 1, "alphas must be positive");
    if (i > 0 && alpha <= prev_alpha) fail(ErrorKind::ScheduleError, "alphas must be strictly increasing");
    const long x_floor = i == 0 ? 1 : prev_x + 2 * prev_alpha + 1;
    XCertificate cert;
    if (certs.empty()) {
      cert = find_x(bases, schedule.at(alpha), x_floor, std::max(x_max, x_floor));
    } else {
      cert = certs[i];
      check_certificate(cert, alpha, schedule);
      if (cert.x < x_floor) {
        fail(ErrorKind::ScheduleError, "x = " + std::to_string(cert.x) + " at alpha = " + std::to_string(alpha) +
                                           " must be at least " + std::to_string(x_floor));
      }
    }
    const long x = cert.x;
    AdicInterval I(2, x - 1, BigInt(1));
    StageTrace trace;
    trace.alpha = alpha;
    trace.I = I;
    trace.compact = true;
    trace.companions = companions_for(bases, cert, 0, I);
    trace.certificate = cert;

    // Weights 1, a, (3 - a)/2 on [0, 2^-(x+1)), [2^-(x+1), 2^-x), [2^-x, 2^-(x-1)).
    tree.split(I, {(Rational(1) + a) / Rational(2), (Rational(3) - a) / Rational(2)});
    const AdicInterval i1 = I.child(1);
    tree.split(i1, {Rational(2) / (Rational(1) + a), Rational(2) * a / (Rational(1) + a)});
    AdicInterval h = i1.child(2), g = I.child(2);
    trace.H = {i1, h};
    trace.G = {g};
    for (long k = 1; k <= 2 * alpha - 1; ++k) {
      const auto& pattern = k <= alpha - 1 ? lead : tail;
      tree.split(g, pattern);
      g = g.child(1);
      trace.G.push_back(g);
      if (k >= 2) {
        tree.split(h, pattern);
        h = h.child(2);
        trace.H.push_back(h);
      }
    }
    tree.add_stage(std::move(trace));
    prev_x = x;
    prev_alpha = alpha;
  }
  return tree;
}

long deepest_level(const StageTrace& s) {
  long d = s.I.level();
  if (!s.H.empty()) d = std::max(d, s.H.back().level());
  if (!s.G.empty()) d = std::max(d, s.G.back().level());
  return d;
}

Rational finest_length(const StageTrace& s) {
  Rational finest = s.I.length();
  if (!s.H.empty()) finest = min(finest, s.H.back().length());
  if (!s.G.empty()) finest = min(finest, s.G.back().length());
  return finest;
}

std::vector<CaseCheck> case_checks(const MeasureTree& tree) {
  const Rational& a = tree.params().a;
  const Rational& b = tree.params().b;
  std::vector<CaseCheck> out;
  for (const auto& stage : tree.stages()) {
    const Rational len = stage.I.length();
    const Rational z = z_point(stage.I);
    for (const auto& comp : stage.companions) {
      CaseCheck c;
      c.base = comp.base;
      c.alpha = stage.alpha;
      c.y_right_of_z = y_point(comp.J) > z;
      const auto kids = comp.J.children();
      std::vector<Rational> mu;
      for (const auto& k : kids) mu.push_back(tree.measure(k));
      if (c.y_right_of_z) {
        c.bounds = {{a * len / Rational(2), len}, {b * len / Rational(4), Rational(2) * len}};
      } else {
        c.bounds = {{a * len / Rational(4), a * len / Rational(2)},
                    {b * len / Rational(4), len},
                    {a * len / Rational(4), Rational(3) * len / Rational(2)}};
      }
      const std::size_t head = std::min(c.bounds.size(), mu.size());
      c.masses.assign(mu.begin(), mu.begin() + static_cast<long>(head));
      c.holds = true;
      for (std::size_t i = 0; i < head; ++i) {
        if (mu[i] < c.bounds[i].first || mu[i] > c.bounds[i].second) c.holds = false;
      }
      c.lebesgue_tail = true;
      for (std::size_t i = head + 1; i < mu.size(); ++i) {
        if (mu[i] != mu[head]) c.lebesgue_tail = false;
      }
      c.holds = c.holds && c.lebesgue_tail;
      out.push_back(std::move(c));
    }
  }
  return out;
}

namespace {

StageScan scan_pairs(const MeasureTree& tree, const StageTrace& stage, const ScanOptions& options,
                     std::map<long, Rational>& level_worst) {
  const long q = tree.grid_base();
  StageScan out;
  out.alpha = stage.alpha;
  out.level_lo = options.level_lo.value_or(stage.I.level() - options.margin);
  out.level_hi = options.level_hi.value_or(deepest_level(stage) + options.margin);
  const auto bps = tree.breakpoints(stage.I.plain());
  bool first = true;
  for (long L = out.level_lo; L <= out.level_hi; ++L) {
    const Rational s = grid_step(q, L);
    std::set<Rational> centers;
    for (const auto& p : bps) {
      const Rational t = p / s;
      centers.insert(Rational(t.floor()) * s);
      centers.insert(Rational(t.ceil()) * s);
    }
    for (const auto& c : centers) {
      PlainInterval left(c - s, c), right(c, c + s);
      const Rational ml = tree.measure(left), mr = tree.measure(right);
      const Rational r = ratio_of(ml, mr);
      ++out.pairs_checked;
      auto [slot, fresh] = level_worst.emplace(L, r);
      if (!fresh && r > slot->second) slot->second = r;
      if (!stage.I.plain().contains(PlainInterval(c - s, c + s))) {
        if (!out.boundary_worst || r > out.boundary_worst->ratio) out.boundary_worst = PairWitness{left, right, ml, mr, r};
      } else if (first || r > out.worst.ratio) {
        out.worst = {left, right, ml, mr, r};
        first = false;
      }
    }
  }
  return out;
}

SiblingScan scan_siblings(const MeasureTree& tree, const StageTrace& stage, long n, const ScanOptions& options) {
  SiblingScan out;
  out.base = n;
  out.alpha = stage.alpha;
  const Rational finest = finest_length(stage);
  out.level_lo = floor_log(n, Rational(1) / stage.I.length()) - options.margin;
  out.level_hi = floor_log(n, Rational(1) / finest) + 1 + options.margin;
  const auto bps = tree.breakpoints(stage.I.plain());
  std::set<Rational> distinct;
  for (long L = out.level_lo; L <= out.level_hi; ++L) {
    std::set<AdicInterval> parents;
    for (const auto& p : bps) {
      AdicInterval P = interval_at(n, L, p);
      if (P.left() == p) continue;
      parents.insert(P);
    }
    for (const auto& P : parents) {
      std::vector<Rational> mu;
      for (const auto& c : P.children()) mu.push_back(tree.measure(c));
      ++out.parents_checked;
      const Rational mx = *std::max_element(mu.begin(), mu.end());
      const Rational mn = *std::min_element(mu.begin(), mu.end());
      const Rational r = mx / mn;
      if (!out.witness || r > out.max_ratio) {
        out.max_ratio = r;
        out.witness = P;
      }
      for (std::size_t i = 0; i < mu.size(); ++i) {
        for (std::size_t j = 0; j < mu.size(); ++j) {
          if (static_cast<long>(distinct.size()) >= options.distinct_cap) break;
          if (i != j) distinct.insert(mu[i] / mu[j]);
        }
      }
    }
  }
  out.distinct.assign(distinct.begin(), distinct.end());
  return out;
}

}  // namespace

DoublingReport scan_doubling(const MeasureTree& tree, const std::vector<long>& bases_to_check,
                             const ScanOptions& options) {
  require(options.margin >= 0, "margin must be nonnegative");
  DoublingReport report;
  report.margin = options.margin;
  std::map<long, Rational> level_worst;
  // Stages and bases are scanned concurrently; the tree is only read.
  std::vector<std::future<std::pair<StageScan, std::map<long, Rational>>>> pair_jobs;
  for (const auto& stage : tree.stages()) {
    pair_jobs.push_back(std::async(std::launch::async, [&tree, &stage, &options] {
      std::map<long, Rational> worst;
      StageScan s = scan_pairs(tree, stage, options, worst);
      return std::make_pair(std::move(s), std::move(worst));
    }));
  }
  std::vector<std::future<SiblingScan>> sibling_jobs;
  for (long n : bases_to_check) {
    require(n >= 2, "bases must be at least 2");
    for (const auto& stage : tree.stages()) {
      sibling_jobs.push_back(std::async(std::launch::async, [&tree, &stage, &options, n] {
        return scan_siblings(tree, stage, n, options);
      }));
    }
  }
  for (auto& job : pair_jobs) {
    auto [s, worst] = job.get();
    for (const auto& [level, r] : worst) {
      auto [slot, fresh] = level_worst.emplace(level, r);
      if (!fresh && r > slot->second) slot->second = r;
    }
    for (const auto* w : {&s.worst, s.boundary_worst ? &*s.boundary_worst : nullptr}) {
      if (w && s.pairs_checked > 0 && (!report.worst || w->ratio > report.worst_ratio)) {
        report.worst_ratio = w->ratio;
        report.worst = *w;
      }
    }
    report.stages.push_back(std::move(s));
  }
  for (auto& job : sibling_jobs) report.siblings.push_back(job.get());
  if (tree.stages().empty()) {
    // No reweighted region: grid pairs across the domain (or [0, 1)).
    const long q = tree.grid_base();
    const PlainInterval dom = tree.domain().value_or(PlainInterval(Rational(0), Rational(1)));
    const long lo = options.level_lo.value_or(0), hi = options.level_hi.value_or(options.margin);
    for (long L = lo; L <= hi; ++L) {
      const Rational s = grid_step(q, L);
      Rational c = Rational((dom.left / s).ceil()) * s + s;
      for (long i = 0; i < 256 && c + s <= dom.right; ++i, c += s) {
        PlainInterval left(c - s, c), right(c, c + s);
        const Rational ml = tree.measure(left), mr = tree.measure(right);
        const Rational r = ratio_of(ml, mr);
        auto [slot, fresh] = level_worst.emplace(L, r);
        if (!fresh && r > slot->second) slot->second = r;
        if (!report.worst || r > report.worst_ratio) {
          report.worst_ratio = r;
          report.worst = PairWitness{left, right, ml, mr, r};
        }
      }
    }
  }
  for (const auto& [level, r] : level_worst) report.levels.push_back({level, r});
  return report;
}

}  // namespace adic
