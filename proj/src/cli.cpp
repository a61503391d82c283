#include "adic/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"

#include "adic/diagnostics.hpp"
#include "adic/json_io.hpp"
#include "adic/measure.hpp"
#include "adic/number_theory.hpp"
#include "adic/selection.hpp"
#include "adic/torus.hpp"

namespace adic {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::ParseError:
    case ErrorKind::NotCoprime:
    case ErrorKind::MultiplierDegenerate:
    case ErrorKind::ScheduleError:
    case ErrorKind::NoContainingInterval:
    case ErrorKind::NotInSubgroup:
    case ErrorKind::DegenerateDenominator:
    case ErrorKind::OverlapError:
      return kExitValidation;
    case ErrorKind::SearchExhausted:
    case ErrorKind::EpsilonTooCoarse:
    case ErrorKind::NoValidK:
    case ErrorKind::DomainExhausted:
      return kExitSearch;
    case ErrorKind::VerificationFailed:
    case ErrorKind::ContainmentFailure:
      return kExitVerification;
    case ErrorKind::BoundaryStraddle:
    case ErrorKind::FactorizationLimit:
      return kExitOther;
  }
  return kExitOther;
}

namespace {

// Re-raises a parse failure with the offending flag in front.
template <typename F>
auto field(const std::string& name, F&& parse) {
  try {
    return parse();
  } catch (const Error& e) {
    const std::string what = e.what();
    const auto colon = what.find(": ");
    fail(e.kind(), "--" + name + ": " + (colon == std::string::npos ? what : what.substr(colon + 2)));
  }
}

Rational rational_field(const std::string& name, const std::string& text) {
  return field(name, [&] { return Rational::parse(text); });
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) parts.push_back(part);
  return parts;
}

PlainInterval interval_field(const std::string& name, const std::string& text) {
  const auto parts = split_commas(text);
  if (parts.size() != 2) fail(ErrorKind::ParseError, "--" + name + ": expected 'left,right'");
  const Rational l = rational_field(name, parts[0]), r = rational_field(name, parts[1]);
  return field(name, [&] { return PlainInterval(l, r); });
}

WeightParams params_field(const std::string& text) {
  const auto parts = split_commas(text);
  if (parts.size() != 3) fail(ErrorKind::ParseError, "--params: expected 'q,a,b'");
  long q = 0;
  try {
    q = std::stol(parts[0]);
  } catch (const std::exception&) {
    fail(ErrorKind::ParseError, "--params: q must be an integer");
  }
  const Rational a = rational_field("params", parts[1]), b = rational_field("params", parts[2]);
  return field("params", [&] { return WeightParams::make(q, a, b); });
}

std::pair<long, long> pair_field(const std::string& name, const std::vector<long>& xs) {
  if (xs.size() != 2) fail(ErrorKind::ParseError, "--" + name + ": expected two integers");
  return {xs[0], xs[1]};
}

std::vector<Rational> rationals_field(const std::string& name, const std::vector<std::string>& xs) {
  std::vector<Rational> out;
  for (const auto& x : xs) out.push_back(rational_field(name, x));
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string approx(const Rational& x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x.to_double());
  return buf;
}

struct Sink {
  std::string output_dir;
  std::ostream* out = nullptr;

  std::filesystem::path resolve(const std::string& path) const {
    std::filesystem::path p(path);
    if (!output_dir.empty() && p.is_relative()) p = std::filesystem::path(output_dir) / p;
    return p;
  }

  void write(const std::string& path, const std::string& text) const {
    if (path.empty() || path == "-") {
      *out << text;
      return;
    }
    const auto p = resolve(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) fail(ErrorKind::InvalidArgument, "cannot write '" + p.string() + "'");
    f << text;
  }
};

MeasureTree load_tree(const std::string& path) {
  const Json doc = parse_json(read_file(path));
  if (!doc.is_object() || doc.value("type", "") != "tree") fail(ErrorKind::ParseError, path + ": not a tree document");
  return tree_from(doc.at("body"));
}

struct NtOptions {
  long u = 0, v = 0, probe = 12, m1 = 1, count = 5, limit = 16, n = 2, max_level = 24, bound = 8;
  bool strict = false;
  std::string k = "1", window = "0,1", delta, out;
  long p1 = 0, m1b = 0, p2 = 0, m2 = 0, q = 0;
  std::string k1, k2;
  std::vector<long> bases;
};

struct SelectOptions {
  long u = 3, v = 2;
  std::vector<long> multipliers{1}, alphas, two_base, schedule{100, 0};
  std::string epsilon = "1/16", window = "0,1", out;
};

struct FindXOpts {
  std::vector<long> bases;
  std::string epsilon, out;
  long x_min = 1, x_max = 100000, workers = 1;
};

struct BuildOptions {
  std::vector<long> bases, alphas{1}, schedule{2, 1};
  std::string params = "2,1/2,3/2", out;
  bool compact = false;
  long x_max = 1L << 20, workers = 1;
};

struct ScanOpts {
  std::string tree, out, csv, params = "2,1/2,3/2";
  std::vector<long> bases;
  long margin = 4;
  std::optional<long> level_lo, level_hi;
};

struct DiagOptions {
  std::string tree, functional = "bmo", family = "all", r = "2", out, csv;
  std::optional<long> alpha;
  long margin = 4;
  std::vector<std::string> scales;
  std::vector<long> bases{2, 3, 5, 6};
};

int run_nt(CLI::App& nt, const NtOptions& o, const Sink& sink) {
  Json doc;
  if (nt.got_subcommand("order")) {
    doc = document("order", to_json(o.strict ? order_profile(o.u, o.v, o.probe) : scan_order_profile(o.u, o.v, o.probe)));
  } else if (nt.got_subcommand("pairs")) {
    const OrderProfile prof = scan_order_profile(o.u, o.v, 0);
    const BigInt k = field("k", [&] { return parse_bigint(o.k); });
    doc = pairs_document(prof, o.m1, k, solve_pairs(prof, o.m1, k, o.count));
  } else if (nt.got_subcommand("members")) {
    const OrderProfile prof = scan_order_profile(o.u, o.v, 0);
    Json ks = Json::array();
    for (const auto& k : subgroup_members_in(prof, o.m1, interval_field("window", o.window), o.limit)) {
      ks.push_back(to_json(k));
    }
    doc = document("members", Json{{"u", o.u}, {"v", o.v}, {"m1", o.m1}, {"window", to_json(interval_field("window", o.window))},
                                   {"modulus", to_json(pair_modulus(prof, o.m1))}, {"k", ks}});
  } else if (nt.got_subcommand("far")) {
    doc = document("far", to_json(far_number_check(rational_field("delta", o.delta), o.n, o.max_level)));
  } else if (nt.got_subcommand("three-base")) {
    const BigInt k1 = field("k1", [&] { return parse_bigint(o.k1); });
    const BigInt k2 = field("k2", [&] { return parse_bigint(o.k2); });
    const auto n = unique_three_base_solution(o.p1, o.m1b, k1, o.p2, o.m2, k2, o.q);
    doc = document("three-base", Json{{"p1", o.p1}, {"m1", o.m1b}, {"k1", to_json(k1)}, {"p2", o.p2}, {"m2", o.m2},
                                      {"k2", to_json(k2)}, {"q", o.q}, {"n", n ? Json(*n) : Json()}});
  } else {
    const auto rel = rational_dependence_scan(o.bases, o.bound);
    if (rel) {
      doc = document("relation", to_json(*rel, o.bases));
    } else {
      Json bases = Json::array();
      for (long b : o.bases) bases.push_back(b);
      doc = document("no-relation", Json{{"bases", bases}, {"bound", o.bound}});
    }
  }
  sink.write(o.out, dump(doc));
  return kExitOk;
}

int run_select(const SelectOptions& o, const Sink& sink) {
  const PlainInterval window = interval_field("window", o.window);
  Json doc;
  if (!o.alphas.empty()) {
    const auto [scale, offset] = pair_field("schedule", o.schedule);
    doc = document("family", to_json(build_family(o.u, o.v, o.multipliers, o.alphas, window, EpsilonSchedule{scale, offset})));
  } else if (!o.two_base.empty()) {
    const auto [m, n] = pair_field("two-base", o.two_base);
    doc = document("selection", to_json(select_two_base(o.u, o.v, m, n, window, rational_field("epsilon", o.epsilon))));
  } else {
    doc = document("selection", to_json(select_revolving(o.u, o.v, o.multipliers, window, rational_field("epsilon", o.epsilon))));
  }
  sink.write(o.out, dump(doc));
  return kExitOk;
}

int run_find_x(const FindXOpts& o, const Sink& sink) {
  FindXOptions fo;
  fo.workers = o.workers;
  const XCertificate c = find_x(o.bases, rational_field("epsilon", o.epsilon), o.x_min, o.x_max, fo);
  sink.write(o.out, dump(document("x", to_json(c))));
  return kExitOk;
}

int run_build(const BuildOptions& o, const Sink& sink) {
  const WeightParams params = params_field(o.params);
  const auto [scale, offset] = pair_field("schedule", o.schedule);
  const XSchedule schedule{scale, offset};
  MeasureTree tree;
  if (o.compact) {
    tree = build_compactified(o.bases, o.alphas, params, {}, schedule, o.x_max);
  } else if (o.bases.empty()) {
    tree = build_two_sided_measure(o.alphas, params);
  } else {
    FindXOptions fo;
    fo.workers = o.workers;
    const auto certs = certify_stages(o.bases, o.alphas, schedule, o.x_max, fo);
    tree = build_finite_base_measure(o.bases, o.alphas, certs, params, schedule);
  }
  sink.write(o.out, dump(document("tree", to_json(tree))));
  return kExitOk;
}

int run_scan(const ScanOpts& o, const Sink& sink) {
  const MeasureTree tree = o.tree.empty() ? MeasureTree(params_field(o.params)) : load_tree(o.tree);
  ScanOptions so;
  so.margin = o.margin;
  so.level_lo = o.level_lo;
  so.level_hi = o.level_hi;
  std::vector<long> bases = o.bases;
  if (bases.empty()) bases.push_back(tree.grid_base());
  const DoublingReport report = scan_doubling(tree, bases, so);
  sink.write(o.out, dump(document("doubling", to_json(report))));
  if (!o.csv.empty()) {
    std::string csv = "level,scale,worst_ratio,scale_approx,worst_ratio_approx\n";
    for (const auto& row : report.levels) {
      const Rational s = grid_step(tree.grid_base(), row.level);
      csv += std::to_string(row.level) + "," + s.str() + "," + row.worst.str() + "," + approx(s) + "," +
             approx(row.worst) + "\n";
    }
    sink.write(o.csv, csv);
  }
  return kExitOk;
}

int run_diag(const DiagOptions& o, const Sink& sink) {
  if (o.functional == "vmo-step") {
    std::vector<Rational> scales;
    if (o.scales.empty()) {
      for (long e = 0; e < 10; ++e) scales.push_back(Rational(1) / pow(Rational(10), e));
    } else {
      scales = rationals_field("scales", o.scales);
    }
    const auto rows = vmo_step_diagnostic(scales, o.bases);
    sink.write(o.out, dump(document("vmo-step", to_json(rows))));
    if (!o.csv.empty()) {
      std::string csv = "scale,symmetric,asymmetric,far";
      for (long n : o.bases) csv += ",adic_" + std::to_string(n);
      csv += "\n";
      for (const auto& row : rows) {
        csv += row.scale.str() + "," + row.symmetric.str() + "," + row.asymmetric.str() + "," + row.far.str();
        for (const auto& [n, v] : row.adic) csv += "," + v.str();
        csv += "\n";
      }
      sink.write(o.csv, csv);
    }
    return kExitOk;
  }
  if (o.tree.empty()) fail(ErrorKind::InvalidArgument, "--tree is required for --functional " + o.functional);
  const MeasureTree tree = load_tree(o.tree);
  const FunctionalKind kind = field("functional", [&] { return parse_functional(o.functional); });
  FamilyDescriptor family = field("family", [&] { return FamilyDescriptor::parse(o.family); });
  family.margin = o.margin;
  const Rational r = rational_field("r", o.r);
  const OscillationReport report = scan_functional(tree, kind, family, r, o.alpha, !o.csv.empty());
  Json body = to_json(report);
  if (kind == FunctionalKind::BMO && o.alpha) {
    const LogValue bound = bmo_lower_bound(tree.params(), *o.alpha);
    body["lower_bound"] = to_json(bound);
    body["lower_bound_enclosure"] = to_json(bound.enclose());
  }
  sink.write(o.out, dump(document("diagnostic", body)));
  if (!o.csv.empty()) {
    std::string csv = "left,right,value_lo,value_hi,value_approx\n";
    for (const auto& row : report.rows) {
      csv += row.interval.left.str() + "," + row.interval.right.str() + "," + row.value.lo.str() + "," +
             row.value.hi.str() + "," + approx(row.value.mid()) + "\n";
    }
    sink.write(o.csv, csv);
  }
  return kExitOk;
}

int run_verify(const std::string& path, std::ostream& out, std::ostream& err) {
  const VerifyOutcome v = verify_document(parse_json(read_file(path)));
  if (v.ok) {
    out << "ok " << v.type << "\n";
    return kExitOk;
  }
  err << "verification failed (" << v.type << "): " << v.reason << "\n";
  return kExitVerification;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact construction and certification of n-adic doubling measures", "adic"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key = value file supplying any flag");
  Sink sink;
  sink.out = &out;
  app.add_option("--output-dir", sink.output_dir, "Directory for relative --out and --csv paths");

  NtOptions nto;
  auto* nt = app.add_subcommand("nt", "Orders, congruence pairs and related number theory");
  nt->require_subcommand(1);
  auto* order = nt->add_subcommand("order", "Order profile O_m(u, v)");
  order->add_option("--u", nto.u)->required();
  order->add_option("--v", nto.v)->required();
  order->add_option("--probe-depth", nto.probe, "Levels probed; 0 picks max(12, m + 2)");
  order->add_flag("--strict", nto.strict, "Fail if the stabilized formula does not hold");
  auto* pairs = nt->add_subcommand("pairs", "Solutions k v^(m2 phi(u)) - j u^(m1 phi(v)) = 1");
  pairs->add_option("--u", nto.u)->required();
  pairs->add_option("--v", nto.v)->required();
  pairs->add_option("--m1", nto.m1)->required();
  pairs->add_option("--k", nto.k, "Decimal integer");
  pairs->add_option("--count", nto.count);
  auto* members = nt->add_subcommand("members", "Subgroup members k with k / u^(m1 phi(v)) in a window");
  members->add_option("--u", nto.u)->required();
  members->add_option("--v", nto.v)->required();
  members->add_option("--m1", nto.m1)->required();
  members->add_option("--window", nto.window, "left,right");
  members->add_option("--limit", nto.limit);
  auto* far = nt->add_subcommand("far", "Truncated far-number constant of delta");
  far->add_option("--delta", nto.delta)->required();
  far->add_option("--n", nto.n);
  far->add_option("--max-level", nto.max_level);
  auto* three = nt->add_subcommand("three-base", "The unique n for a three-base configuration");
  three->add_option("--p1", nto.p1)->required();
  three->add_option("--m1", nto.m1b)->required();
  three->add_option("--k1", nto.k1)->required();
  three->add_option("--p2", nto.p2)->required();
  three->add_option("--m2", nto.m2)->required();
  three->add_option("--k2", nto.k2)->required();
  three->add_option("--q", nto.q)->required();
  auto* dep = nt->add_subcommand("dependence", "Rational relations among log_n 2");
  dep->add_option("--bases", nto.bases)->required()->delimiter(',');
  dep->add_option("--bound", nto.bound, "Largest coefficient tried");
  for (auto* s : {order, pairs, members, far, three, dep}) s->add_option("--out", nto.out, "Output file (default stdout)");

  SelectOptions so;
  auto* select = app.add_subcommand("select", "Interval selection certificates");
  select->add_option("--u", so.u);
  select->add_option("--v", so.v);
  select->add_option("--multipliers", so.multipliers)->delimiter(',');
  select->add_option("--alpha-list", so.alphas, "Build a family, one entry per alpha")->delimiter(',');
  select->add_option("--epsilon", so.epsilon);
  select->add_option("--window", so.window, "left,right (the domain for a family)");
  select->add_option("--two-base", so.two_base, "m,n: select for p^m q^n with p = u, q = v")->delimiter(',');
  select->add_option("--schedule", so.schedule, "scale,offset of epsilon_alpha = v^-(scale alpha + offset)")
      ->delimiter(',');
  select->add_option("--out", so.out);

  FindXOpts fx;
  auto* findx = app.add_subcommand("find-x", "Simultaneous approximation 2^x ~ n^r");
  findx->add_option("--bases", fx.bases)->required()->delimiter(',');
  findx->add_option("--epsilon", fx.epsilon)->required();
  findx->add_option("--x-min", fx.x_min);
  findx->add_option("--x-max", fx.x_max);
  findx->add_option("--workers", fx.workers);
  findx->add_option("--out", fx.out);

  BuildOptions bo;
  auto* build = app.add_subcommand("build", "Build a reweighted measure tree");
  build->add_option("--bases", bo.bases, "Finite bases; empty gives the two-sided construction")->delimiter(',');
  build->add_option("--alphas", bo.alphas)->delimiter(',');
  build->add_option("--params", bo.params, "q,a,b with a (q - 1) + b = q");
  build->add_flag("--compact", bo.compact, "Anchor the stages in [0, 1]");
  build->add_option("--schedule", bo.schedule, "scale,offset of epsilon_alpha = 2^-(scale alpha + offset)")
      ->delimiter(',');
  build->add_option("--x-max", bo.x_max);
  build->add_option("--workers", bo.workers);
  build->add_option("--out", bo.out);

  ScanOpts sc;
  auto* scan = app.add_subcommand("scan", "Doubling and sibling ratio scan");
  scan->add_option("--tree", sc.tree, "Tree file; Lebesgue measure when omitted");
  scan->add_option("--params", sc.params, "q,a,b for the Lebesgue tree");
  scan->add_option("--bases-check", sc.bases, "Bases for the sibling scan (default q)")->delimiter(',');
  scan->add_option("--margin", sc.margin);
  scan->add_option("--level-lo", sc.level_lo);
  scan->add_option("--level-hi", sc.level_hi);
  scan->add_option("--out", sc.out);
  scan->add_option("--csv", sc.csv, "level,scale,worst_ratio rows");

  DiagOptions dg;
  auto* diag = app.add_subcommand("diag", "Weight-class diagnostics");
  diag->add_option("--tree", dg.tree);
  diag->add_option("--functional", dg.functional)->check(CLI::IsMember({"rh", "ap", "bmo", "vmo-step"}));
  diag->add_option("--family", dg.family, "all or adic:n");
  diag->add_option("--r", dg.r);
  diag->add_option("--alpha", dg.alpha, "Restrict to one stage");
  diag->add_option("--margin", dg.margin);
  diag->add_option("--scales", dg.scales, "Decreasing scales for vmo-step")->delimiter(',');
  diag->add_option("--bases", dg.bases, "Grid bases for vmo-step")->delimiter(',');
  diag->add_option("--out", dg.out);
  diag->add_option("--csv", dg.csv, "interval,value rows");

  std::string verify_path;
  auto* verify = app.add_subcommand("verify", "Re-check a certificate or tree file");
  verify->add_option("file", verify_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (nt->parsed()) return run_nt(*nt, nto, sink);
    if (select->parsed()) return run_select(so, sink);
    if (findx->parsed()) return run_find_x(fx, sink);
    if (build->parsed()) return run_build(bo, sink);
    if (scan->parsed()) return run_scan(sc, sink);
    if (diag->parsed()) return run_diag(dg, sink);
    if (verify->parsed()) return run_verify(verify_path, out, err);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitOther;
  }
  return kExitOther;
}

}  // namespace adic
