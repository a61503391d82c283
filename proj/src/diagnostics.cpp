#include "adic/diagnostics.hpp"

#include <algorithm>
#include <future>
#include <set>
#include <thread>

#include "adic/error.hpp"
#include "adic/number_theory.hpp"

namespace adic {

namespace {

void prune(LogValue& v) {
  for (auto it = v.coeff.begin(); it != v.coeff.end();) {
    it = it->second.sign() == 0 ? v.coeff.erase(it) : std::next(it);
  }
}

}  // namespace

Enclosure LogValue::enclose(long precision) const {
  Enclosure total(Rational(0));
  for (const auto& [p, c] : coeff) total = total + c * log_enclosure(Rational(p), precision);
  return total;
}

int LogValue::sign() const {
  if (is_zero()) return 0;
  for (long prec = kDefaultPrecision; prec <= 16384; prec *= 2) {
    const int s = enclose(prec).certain_sign();
    if (s != kUncertain) return s;
  }
  fail(ErrorKind::VerificationFailed, "could not certify the sign of " + str());
}

std::string LogValue::str() const {
  if (coeff.empty()) return "0";
  std::string out;
  for (const auto& [p, c] : coeff) {
    if (!out.empty()) out += " + ";
    out += c.str() + "*log(" + to_string(p) + ")";
  }
  return out;
}

LogValue& LogValue::operator+=(const LogValue& rhs) {
  for (const auto& [p, c] : rhs.coeff) coeff[p] += c;
  prune(*this);
  return *this;
}

LogValue& LogValue::operator-=(const LogValue& rhs) {
  for (const auto& [p, c] : rhs.coeff) coeff[p] -= c;
  prune(*this);
  return *this;
}

LogValue operator*(const Rational& c, const LogValue& v) {
  LogValue out;
  if (c.sign() == 0) return out;
  for (const auto& [p, x] : v.coeff) out.coeff[p] = c * x;
  return out;
}

LogValue log_of(const Rational& x) {
  require(x.sign() > 0, "log of a nonpositive number");
  LogValue out;
  if (x.numerator() > 1) {
    for (const auto& [p, e] : factorize(x.numerator())) out.coeff[p] += Rational(static_cast<long>(e));
  }
  if (x.denominator() > 1) {
    for (const auto& [p, e] : factorize(x.denominator())) out.coeff[p] -= Rational(static_cast<long>(e));
  }
  prune(out);
  return out;
}

Rational WeightView::mean_power(const PlainInterval& j, long k) const {
  Rational total(0);
  for (const auto& piece : pieces(j)) total += piece.interval.length() * pow(piece.density, k);
  return total / j.length();
}

Enclosure WeightView::mean_power(const PlainInterval& j, const Rational& r, long precision) const {
  if (r.is_integer() && r.numerator().fits_slong_p()) return Enclosure(mean_power(j, r.numerator().get_si()));
  Enclosure total(Rational(0));
  for (const auto& piece : pieces(j)) {
    total = total + piece.interval.length() * pow_enclosure(piece.density, r, precision);
  }
  return Rational(1) / j.length() * total;
}

FunctionalValue rh_functional(const WeightView& view, const PlainInterval& I, const Rational& r) {
  require(r > Rational(1), "r must exceed 1");
  const Rational m1 = view.mean_power(I, 1);
  FunctionalValue out;
  if (r.is_integer() && r.numerator() <= 64) {
    const long k = r.numerator().get_si();
    out.power = view.mean_power(I, k) / pow(m1, k);
    out.exponent = k;
    out.value = root_enclosure(Enclosure(*out.power), static_cast<unsigned long>(k));
    return out;
  }
  const Enclosure mr = view.mean_power(I, r);
  out.value = Rational(1) / m1 * pow_enclosure(mr, Rational(1) / r);
  return out;
}

FunctionalValue ap_functional(const WeightView& view, const PlainInterval& I, const Rational& r) {
  require(r > Rational(1), "r must exceed 1");
  const Rational m1 = view.mean_power(I, 1);
  const Rational s = Rational(1) / (r - Rational(1));
  FunctionalValue out;
  if (s.is_integer() && s.numerator() <= 64) {
    const long k = s.numerator().get_si();
    out.power = pow(m1, k) * view.mean_power(I, -k);
    out.exponent = k;
    out.value = root_enclosure(Enclosure(*out.power), static_cast<unsigned long>(k));
    return out;
  }
  const Enclosure dual = view.mean_power(I, -s);
  out.value = m1 * pow_enclosure(dual, r - Rational(1));
  return out;
}

Oscillation log_oscillation(const WeightView& view, const PlainInterval& I) {
  // Weight of each distinct density value inside I.
  std::map<Rational, Rational> share;
  for (const auto& piece : view.pieces(I)) share[piece.density] += piece.interval.length() / I.length();
  std::vector<std::pair<LogValue, Rational>> parts;
  Oscillation out;
  for (const auto& [d, t] : share) {
    LogValue f = log_of(d);
    out.mean += t * f;
    parts.emplace_back(std::move(f), t);
  }
  for (const auto& [f, t] : parts) {
    LogValue diff = f - out.mean;
    const int s = diff.sign();
    if (s != 0) out.symbolic += Rational(s) * t * diff;
  }
  out.value = out.symbolic.enclose();
  return out;
}

FamilyDescriptor FamilyDescriptor::parse(const std::string& text) {
  FamilyDescriptor f;
  if (text == "all") return f;
  if (text.rfind("adic:", 0) == 0) {
    f.kind = Kind::Adic;
    try {
      std::size_t used = 0;
      f.base = std::stol(text.substr(5), &used);
      if (used != text.size() - 5) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      fail(ErrorKind::ParseError, "bad family '" + text + "'");
    }
    require(f.base >= 2, "family base must be at least 2");
    return f;
  }
  fail(ErrorKind::ParseError, "family must be 'all' or 'adic:n', got '" + text + "'");
}

std::string FamilyDescriptor::str() const { return kind == Kind::All ? "all" : "adic:" + std::to_string(base); }

std::vector<PlainInterval> enumerate_family(const MeasureTree& tree, const FamilyDescriptor& family,
                                            std::optional<long> alpha) {
  std::set<std::pair<Rational, Rational>> seen;
  std::vector<PlainInterval> out;
  auto add = [&](const PlainInterval& j) {
    if (seen.emplace(j.left, j.right).second) out.push_back(j);
  };
  const long q = tree.grid_base();
  for (const auto& stage : tree.stages()) {
    if (alpha && stage.alpha != *alpha) continue;
    const auto bps = tree.breakpoints(stage.I.plain());
    if (family.kind == FamilyDescriptor::Kind::All) {
      const long lo = stage.I.level() - family.margin, hi = deepest_level(stage) + family.margin;
      for (long L = lo; L <= hi; ++L) {
        const Rational s = grid_step(q, L);
        for (const auto& p : bps) add(PlainInterval(p - s, p + s));
      }
      for (std::size_t k = 0; k < std::min(stage.H.size(), stage.G.size()); ++k) {
        if (stage.H[k].right() == stage.G[k].left()) add(PlainInterval(stage.H[k].left(), stage.G[k].right()));
      }
    } else {
      const long n = family.base;
      const long lo = floor_log(n, Rational(1) / stage.I.length()) - family.margin;
      const long hi = floor_log(n, Rational(1) / finest_length(stage)) + 1 + family.margin;
      for (long L = lo; L <= hi; ++L) {
        for (const auto& p : bps) {
          AdicInterval P = interval_at(n, L, p);
          if (P.left() != p) add(P.plain());
        }
      }
    }
  }
  return out;
}

OscillationReport scan_functional(const MeasureTree& tree, FunctionalKind functional, const FamilyDescriptor& family,
                                  const Rational& r, std::optional<long> alpha, bool keep_rows) {
  if (functional != FunctionalKind::BMO) require(r > Rational(1), "r must exceed 1");
  const WeightView view(tree);
  OscillationReport report;
  report.family = family;
  report.functional = functional;
  report.r = r;
  // Constant densities give 1 for the testers and 0 for the oscillation.
  report.supremum = Enclosure(Rational(functional == FunctionalKind::BMO ? 0 : 1));
  const auto members = enumerate_family(tree, family, alpha);
  std::vector<Enclosure> values(members.size());
  std::vector<std::optional<LogValue>> symbols(members.size());
  auto evaluate = [&](std::size_t i) {
    switch (functional) {
      case FunctionalKind::RH:
        values[i] = rh_functional(view, members[i], r).value;
        break;
      case FunctionalKind::AP:
        values[i] = ap_functional(view, members[i], r).value;
        break;
      case FunctionalKind::BMO: {
        Oscillation o = log_oscillation(view, members[i]);
        values[i] = o.value;
        symbols[i] = std::move(o.symbolic);
        break;
      }
    }
  };
  // Members are split into contiguous blocks, one per worker.
  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
  const std::size_t block = (members.size() + workers - 1) / workers;
  std::vector<std::future<void>> jobs;
  for (std::size_t lo = 0; lo < members.size(); lo += block) {
    const std::size_t hi = std::min(members.size(), lo + block);
    jobs.push_back(std::async(std::launch::async, [&evaluate, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) evaluate(i);
    }));
  }
  for (auto& job : jobs) job.get();
  for (std::size_t i = 0; i < members.size(); ++i) {
    ++report.intervals_checked;
    if (keep_rows) report.rows.push_back({members[i], values[i]});
    if (i == 0 || values[i].mid() > report.supremum.mid()) {
      report.supremum = values[i];
      report.symbolic = symbols[i];
      report.witness = members[i];
    }
  }
  return report;
}

OscillationReport bmo_oscillation(const MeasureTree& tree, const FamilyDescriptor& family, std::optional<long> alpha) {
  return scan_functional(tree, FunctionalKind::BMO, family, Rational(2), alpha);
}

LogValue bmo_lower_bound(const WeightParams& params, long alpha) {
  return Rational(alpha, 4) * (log_of(params.b) - log_of(params.a));
}

Rational step_oscillation(const PlainInterval& w) {
  if (w.right.sign() <= 0 || w.left.sign() >= 0) return Rational(0);
  const Rational theta = w.right / w.length();  // share where the function is 1
  return Rational(2) * theta * (Rational(1) - theta);
}

std::vector<VmoRow> vmo_step_diagnostic(const std::vector<Rational>& scales, const std::vector<long>& bases) {
  std::vector<VmoRow> out;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    const Rational& r = scales[i];
    require(r.sign() > 0, "scales must be positive");
    if (i > 0) require(r < scales[i - 1], "scales must be decreasing");
    VmoRow row;
    row.scale = r;
    row.symmetric = step_oscillation(PlainInterval(-r, r));
    row.asymmetric = step_oscillation(PlainInterval(-r, Rational(3) * r));
    row.far = step_oscillation(PlainInterval(r, Rational(2) * r));
    for (long n : bases) {
      require(n >= 2, "bases must be at least 2");
      const long level = floor_log(n, Rational(1) / r);
      const AdicInterval right = interval_at(n, level, Rational(0));
      const AdicInterval left = interval_at(n, level, -right.length());
      row.adic[n] = max(step_oscillation(left.plain()), step_oscillation(right.plain()));
    }
    out.push_back(std::move(row));
  }
  return out;
}

const char* to_string(FunctionalKind kind) {
  switch (kind) {
    case FunctionalKind::RH:
      return "rh";
    case FunctionalKind::AP:
      return "ap";
    case FunctionalKind::BMO:
      return "bmo";
  }
  return "?";
}

FunctionalKind parse_functional(const std::string& text) {
  if (text == "rh") return FunctionalKind::RH;
  if (text == "ap") return FunctionalKind::AP;
  if (text == "bmo") return FunctionalKind::BMO;
  fail(ErrorKind::ParseError, "functional must be rh, ap or bmo, got '" + text + "'");
}

}  // namespace adic
