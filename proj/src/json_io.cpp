#include "adic/json_io.hpp"

#include "adic/error.hpp"

namespace adic {

namespace {

const Json& at(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::ParseError, std::string("missing field '") + key + "'");
  return j.at(key);
}

long long_at(const Json& j, const char* key) {
  const Json& v = at(j, key);
  if (!v.is_number_integer()) fail(ErrorKind::ParseError, std::string("field '") + key + "' must be an integer");
  return v.get<long>();
}

bool bool_at(const Json& j, const char* key) {
  const Json& v = at(j, key);
  if (!v.is_boolean()) fail(ErrorKind::ParseError, std::string("field '") + key + "' must be a boolean");
  return v.get<bool>();
}

std::string string_at(const Json& j, const char* key) {
  const Json& v = at(j, key);
  if (!v.is_string()) fail(ErrorKind::ParseError, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

const Json& array_at(const Json& j, const char* key) {
  const Json& v = at(j, key);
  if (!v.is_array()) fail(ErrorKind::ParseError, std::string("field '") + key + "' must be an array");
  return v;
}

template <typename T>
Json longs(const std::vector<T>& xs) {
  Json out = Json::array();
  for (const auto& x : xs) out.push_back(x);
  return out;
}

std::vector<long> longs_from(const Json& j) {
  if (!j.is_array()) fail(ErrorKind::ParseError, "expected an array of integers");
  std::vector<long> out;
  for (const auto& x : j) {
    if (!x.is_number_integer()) fail(ErrorKind::ParseError, "expected an integer");
    out.push_back(x.get<long>());
  }
  return out;
}

Json adics(const std::vector<AdicInterval>& xs) {
  Json out = Json::array();
  for (const auto& x : xs) out.push_back(to_json(x));
  return out;
}

std::vector<AdicInterval> adics_from(const Json& j) {
  std::vector<AdicInterval> out;
  for (const auto& x : j) out.push_back(adic_from(x));
  return out;
}

Json pair_json(const PairWitness& w) {
  return Json{{"left", to_json(w.left)},
              {"right", to_json(w.right)},
              {"mu_left", to_json(w.mu_left)},
              {"mu_right", to_json(w.mu_right)},
              {"ratio", to_json(w.ratio)}};
}

const char* kind_name(SelectionKind k) { return k == SelectionKind::Revolving ? "revolving" : "two-base"; }

}  // namespace

Json to_json(const BigInt& value) { return to_string(value); }
Json to_json(const Rational& value) { return value.str(); }
Json to_json(const PlainInterval& value) { return Json{{"left", to_json(value.left)}, {"right", to_json(value.right)}}; }
Json to_json(const AdicInterval& value) {
  return Json{{"base", value.base()}, {"level", value.level()}, {"index", to_json(value.index())}};
}
Json to_json(const Enclosure& value) { return Json{{"lo", to_json(value.lo)}, {"hi", to_json(value.hi)}}; }

Json to_json(const LogValue& value) {
  Json out = Json::object();
  for (const auto& [p, c] : value.coeff) out[to_string(p)] = to_json(c);
  return out;
}

BigInt bigint_from(const Json& j) {
  if (!j.is_string()) fail(ErrorKind::ParseError, "big integers are decimal strings");
  return parse_bigint(j.get<std::string>());
}

Rational rational_from(const Json& j) {
  if (!j.is_string()) fail(ErrorKind::ParseError, "rationals are \"num/den\" strings");
  return Rational::parse(j.get<std::string>());
}

PlainInterval plain_from(const Json& j) { return {rational_from(at(j, "left")), rational_from(at(j, "right"))}; }

AdicInterval adic_from(const Json& j) {
  return AdicInterval(long_at(j, "base"), long_at(j, "level"), bigint_from(at(j, "index")));
}

Json to_json(const OrderProfile& p) {
  Json orders = Json::array();
  for (const auto& o : p.orders) orders.push_back(to_json(o));
  return Json{{"u", p.u},
              {"v", p.v},
              {"p", p.p},
              {"k", p.k},
              {"phi_u", p.phi_u},
              {"phi_v", p.phi_v},
              {"m", p.m_uv},
              {"n0", p.n0},
              {"C", p.c_uv},
              {"probe_depth", p.probe_depth},
              {"stabilized", p.stabilized},
              {"stabilization_level", p.stabilization_level},
              {"orders", orders}};
}

Json to_json(const FarCheck& c) {
  return Json{{"adic", c.adic},
              {"value", to_json(c.value)},
              {"level", c.level},
              {"index", to_json(c.index)},
              {"max_level", c.max_level}};
}

Json to_json(const SelectionCertificate& c) {
  Json targets = Json::array();
  for (const auto& t : c.targets) {
    targets.push_back(Json{{"multiplier", t.multiplier},
                           {"base", t.base},
                           {"J", to_json(t.J)},
                           {"zeta", to_json(t.zeta)},
                           {"child", t.child},
                           {"gap", to_json(t.gap)}});
  }
  return Json{{"kind", kind_name(c.kind)},
              {"epsilon", to_json(c.epsilon)},
              {"u", c.base_u},
              {"v", c.base_v},
              {"m", c.m},
              {"n", c.n},
              {"j_tilde", to_json(c.j_tilde)},
              {"j_prime", to_json(c.j_prime)},
              {"I", to_json(c.I)},
              {"targets", targets},
              {"k", to_json(c.k)},
              {"t1", c.t1},
              {"t2", c.t2},
              {"j", to_json(c.j)}};
}

SelectionCertificate selection_from(const Json& j) {
  SelectionCertificate c;
  const std::string kind = string_at(j, "kind");
  if (kind == "revolving") {
    c.kind = SelectionKind::Revolving;
  } else if (kind == "two-base") {
    c.kind = SelectionKind::TwoBase;
  } else {
    fail(ErrorKind::ParseError, "unknown selection kind '" + kind + "'");
  }
  c.epsilon = rational_from(at(j, "epsilon"));
  c.base_u = long_at(j, "u");
  c.base_v = long_at(j, "v");
  c.m = long_at(j, "m");
  c.n = long_at(j, "n");
  c.j_tilde = plain_from(at(j, "j_tilde"));
  c.j_prime = adic_from(at(j, "j_prime"));
  c.I = adic_from(at(j, "I"));
  for (const auto& t : array_at(j, "targets")) {
    TargetRecord r;
    r.multiplier = long_at(t, "multiplier");
    r.base = long_at(t, "base");
    r.J = adic_from(at(t, "J"));
    r.zeta = rational_from(at(t, "zeta"));
    r.child = long_at(t, "child");
    r.gap = rational_from(at(t, "gap"));
    c.targets.push_back(std::move(r));
  }
  c.k = bigint_from(at(j, "k"));
  c.t1 = long_at(j, "t1");
  c.t2 = long_at(j, "t2");
  c.j = bigint_from(at(j, "j"));
  return c;
}

Json to_json(const SelectionFamily& f) {
  Json entries = Json::array();
  for (const auto& e : f.entries) {
    entries.push_back(Json{{"alpha", e.alpha},
                           {"outer", to_json(e.outer)},
                           {"nested", adics(e.nested)},
                           {"certificate", to_json(e.certificate)}});
  }
  return Json{{"u", f.u},
              {"v", f.v},
              {"multipliers", longs(f.multipliers)},
              {"domain", to_json(f.domain)},
              {"schedule", Json{{"scale", f.schedule.scale}, {"offset", f.schedule.offset}}},
              {"outer_level", f.outer_level},
              {"spacing_rule", f.spacing_rule},
              {"entries", entries}};
}

SelectionFamily family_from(const Json& j) {
  SelectionFamily f;
  f.u = long_at(j, "u");
  f.v = long_at(j, "v");
  f.multipliers = longs_from(at(j, "multipliers"));
  f.domain = plain_from(at(j, "domain"));
  f.schedule.scale = long_at(at(j, "schedule"), "scale");
  f.schedule.offset = long_at(at(j, "schedule"), "offset");
  f.outer_level = long_at(j, "outer_level");
  f.spacing_rule = string_at(j, "spacing_rule");
  for (const auto& e : array_at(j, "entries")) {
    FamilyEntry entry;
    entry.alpha = long_at(e, "alpha");
    entry.outer = adic_from(at(e, "outer"));
    entry.nested = adics_from(array_at(e, "nested"));
    entry.certificate = selection_from(at(e, "certificate"));
    f.entries.push_back(std::move(entry));
  }
  return f;
}

Json to_json(const XCertificate& c) {
  Json witnesses = Json::array();
  for (const auto& w : c.witnesses) {
    witnesses.push_back(
        Json{{"base", w.base}, {"r", to_json(w.r)}, {"sign", w.sign}, {"power_of_two", w.power_of_two}});
  }
  return Json{{"x", c.x}, {"epsilon", to_json(c.epsilon)}, {"bases", longs(c.bases)}, {"witnesses", witnesses}};
}

XCertificate x_certificate_from(const Json& j) {
  XCertificate c;
  c.x = long_at(j, "x");
  c.epsilon = rational_from(at(j, "epsilon"));
  c.bases = longs_from(at(j, "bases"));
  for (const auto& w : array_at(j, "witnesses")) {
    BaseWitness b;
    b.base = long_at(w, "base");
    b.r = bigint_from(at(w, "r"));
    b.sign = static_cast<int>(long_at(w, "sign"));
    b.power_of_two = bool_at(w, "power_of_two");
    c.witnesses.push_back(b);
  }
  return c;
}

Json to_json(const DependenceRelation& r, const std::vector<long>& bases) {
  Json coeffs = Json::array();
  for (const auto& c : r.coefficients) coeffs.push_back(to_json(c));
  return Json{{"bases", longs(bases)},
              {"coefficients", coeffs},
              {"constant", to_json(r.constant)},
              {"certificate", r.certificate}};
}

DependenceRelation relation_from(const Json& j) {
  DependenceRelation r;
  for (const auto& c : array_at(j, "coefficients")) r.coefficients.push_back(bigint_from(c));
  r.constant = bigint_from(at(j, "constant"));
  r.certificate = string_at(j, "certificate");
  return r;
}

Json to_json(const MeasureTree& tree) {
  const auto& p = tree.params();
  Json records = Json::array();
  for (const auto& [node, factors] : tree.records()) {
    Json fs = Json::array();
    for (const auto& f : factors) fs.push_back(to_json(f));
    records.push_back(Json{{"node", to_json(node)}, {"factors", fs}});
  }
  Json stages = Json::array();
  for (const auto& s : tree.stages()) {
    Json comps = Json::array();
    for (const auto& c : s.companions) {
      comps.push_back(Json{{"base", c.base},
                           {"r", to_json(c.r)},
                           {"J", to_json(c.J)},
                           {"closeness", to_json(c.closeness)},
                           {"slack", to_json(c.slack)},
                           {"contained", c.contained}});
    }
    stages.push_back(Json{{"alpha", s.alpha},
                          {"I", to_json(s.I)},
                          {"H", adics(s.H)},
                          {"G", adics(s.G)},
                          {"compact", s.compact},
                          {"certificate", s.certificate ? to_json(*s.certificate) : Json()},
                          {"companions", comps}});
  }
  return Json{{"params", Json{{"q", p.q}, {"a", to_json(p.a)}, {"b", to_json(p.b)}}},
              {"domain", tree.domain() ? to_json(*tree.domain()) : Json()},
              {"records", records},
              {"stages", stages}};
}

MeasureTree tree_from(const Json& j) {
  const Json& p = at(j, "params");
  WeightParams params = WeightParams::make(long_at(p, "q"), rational_from(at(p, "a")), rational_from(at(p, "b")));
  std::optional<PlainInterval> domain;
  if (!at(j, "domain").is_null()) domain = plain_from(at(j, "domain"));
  MeasureTree tree(params, domain);
  std::vector<std::pair<AdicInterval, std::vector<Rational>>> recs;
  for (const auto& r : array_at(j, "records")) {
    std::vector<Rational> fs;
    for (const auto& f : array_at(r, "factors")) fs.push_back(rational_from(f));
    recs.emplace_back(adic_from(at(r, "node")), std::move(fs));
  }
  // Parents before children.
  std::sort(recs.begin(), recs.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  for (const auto& [node, fs] : recs) tree.split(node, fs);
  if (tree.records().size() != recs.size()) {
    fail(ErrorKind::ParseError, "records are not closed under parents");
  }
  for (const auto& s : array_at(j, "stages")) {
    StageTrace st;
    st.alpha = long_at(s, "alpha");
    st.I = adic_from(at(s, "I"));
    st.H = adics_from(array_at(s, "H"));
    st.G = adics_from(array_at(s, "G"));
    st.compact = bool_at(s, "compact");
    if (!at(s, "certificate").is_null()) st.certificate = x_certificate_from(at(s, "certificate"));
    for (const auto& c : array_at(s, "companions")) {
      Companion comp;
      comp.base = long_at(c, "base");
      comp.r = bigint_from(at(c, "r"));
      comp.J = adic_from(at(c, "J"));
      comp.closeness = rational_from(at(c, "closeness"));
      comp.slack = rational_from(at(c, "slack"));
      comp.contained = bool_at(c, "contained");
      st.companions.push_back(std::move(comp));
    }
    tree.add_stage(std::move(st));
  }
  return tree;
}

Json to_json(const DoublingReport& r) {
  Json stages = Json::array();
  for (const auto& s : r.stages) {
    stages.push_back(Json{{"alpha", s.alpha},
                          {"level_lo", s.level_lo},
                          {"level_hi", s.level_hi},
                          {"pairs_checked", s.pairs_checked},
                          {"worst", pair_json(s.worst)},
                          {"boundary_worst", s.boundary_worst ? pair_json(*s.boundary_worst) : Json()}});
  }
  Json siblings = Json::array();
  for (const auto& s : r.siblings) {
    Json distinct = Json::array();
    for (const auto& d : s.distinct) distinct.push_back(to_json(d));
    siblings.push_back(Json{{"base", s.base},
                            {"alpha", s.alpha},
                            {"level_lo", s.level_lo},
                            {"level_hi", s.level_hi},
                            {"parents_checked", s.parents_checked},
                            {"max_ratio", to_json(s.max_ratio)},
                            {"witness", s.witness ? to_json(*s.witness) : Json()},
                            {"distinct", distinct}});
  }
  Json levels = Json::array();
  for (const auto& l : r.levels) levels.push_back(Json{{"level", l.level}, {"worst", to_json(l.worst)}});
  return Json{{"margin", r.margin},
              {"worst_ratio", to_json(r.worst_ratio)},
              {"worst", r.worst ? pair_json(*r.worst) : Json()},
              {"stages", stages},
              {"siblings", siblings},
              {"levels", levels}};
}

Json to_json(const OscillationReport& r) {
  return Json{{"functional", to_string(r.functional)},
              {"family", r.family.str()},
              {"margin", r.family.margin},
              {"r", to_json(r.r)},
              {"intervals_checked", r.intervals_checked},
              {"supremum", to_json(r.supremum)},
              {"supremum_approx", to_double(r.supremum)},
              {"symbolic", r.symbolic ? to_json(*r.symbolic) : Json()},
              {"witness", r.witness ? to_json(*r.witness) : Json()}};
}

Json to_json(const std::vector<VmoRow>& rows) {
  Json out = Json::array();
  for (const auto& row : rows) {
    Json adic = Json::object();
    for (const auto& [n, v] : row.adic) adic[std::to_string(n)] = to_json(v);
    out.push_back(Json{{"scale", to_json(row.scale)},
                       {"symmetric", to_json(row.symmetric)},
                       {"asymmetric", to_json(row.asymmetric)},
                       {"far", to_json(row.far)},
                       {"adic", adic}});
  }
  return out;
}

Json pairs_document(const OrderProfile& profile, long m1, const BigInt& k, const std::vector<CongruencePair>& pairs) {
  Json ps = Json::array();
  for (const auto& p : pairs) ps.push_back(Json{{"m2", p.m2}, {"j", to_json(p.j)}});
  return document("pairs", Json{{"u", profile.u}, {"v", profile.v}, {"m1", m1}, {"k", to_json(k)}, {"pairs", ps}});
}

Json document(const std::string& type, Json body) {
  return Json{{"type", type}, {"version", 1}, {"body", std::move(body)}};
}

namespace {

VerifyOutcome verify_tree(const MeasureTree& tree) {
  VerifyOutcome out;
  std::string why;
  if (!tree.check_conservation(&why)) {
    out.reason = why;
    return out;
  }
  const auto& p = tree.params();
  for (const auto& s : tree.stages()) {
    const std::string tag = "stage alpha = " + std::to_string(s.alpha) + ": ";
    if (s.H.size() != static_cast<std::size_t>(2 * s.alpha) || s.G.size() != s.H.size()) {
      out.reason = tag + "H and G must have 2 alpha entries";
      return out;
    }
    for (std::size_t k = 0; k < s.H.size(); ++k) {
      if (!adjacent_equal_pair(s.H[k], s.G[k])) {
        out.reason = tag + "H and G are not adjacent of equal length at step " + std::to_string(k + 1);
        return out;
      }
    }
    if (!s.compact) {
      const AdicInterval& h = s.H[s.alpha - 1];
      const AdicInterval& g = s.G[s.alpha - 1];
      const Rational scale = s.I.length() / pow(Rational(p.q), s.alpha);
      if (tree.measure(h) != pow(p.a, s.alpha) * scale || tree.measure(g) != pow(p.b, s.alpha) * scale) {
        out.reason = tag + "mu(H), mu(G) differ from a^alpha |I| / q^alpha, b^alpha |I| / q^alpha";
        return out;
      }
    }
    for (const auto& c : s.companions) {
      if (!s.certificate) {
        out.reason = tag + "companions without a certificate";
        return out;
      }
      if (!verify_x_certificate(*s.certificate, &why)) {
        out.reason = tag + why;
        return out;
      }
      const Rational anchor = s.compact ? Rational(0) : Rational(s.alpha);
      BigInt r;
      for (std::size_t i = 0; i < s.certificate->bases.size(); ++i) {
        if (s.certificate->bases[i] == c.base) r = s.certificate->witnesses[i].r;
      }
      Companion fresh = make_companion(c.base, r, anchor, s.I);
      if (!(fresh.J == c.J) || fresh.closeness != c.closeness || fresh.slack != c.slack ||
          fresh.contained != c.contained) {
        out.reason = tag + "companion for base " + std::to_string(c.base) + " does not recompute";
        return out;
      }
      if (!c.contained || c.closeness > s.certificate->epsilon * s.I.length() || c.slack.sign() <= 0) {
        out.reason = tag + "containment fails for base " + std::to_string(c.base);
        return out;
      }
    }
  }
  if (tree.domain() && tree.measure(*tree.domain()) != tree.domain()->length()) {
    out.reason = "total mass on the domain changed";
    return out;
  }
  out.ok = true;
  return out;
}

// Serializing the parsed value must give back the document byte for byte.
bool canonical(const Json& again, const Json& body, std::string& why) {
  if (again.dump() == body.dump()) return true;
  why = "document is not in canonical form";
  return false;
}

VerifyOutcome verify_pairs(const Json& body) {
  VerifyOutcome out;
  const OrderProfile prof = scan_order_profile(long_at(body, "u"), long_at(body, "v"), 0);
  const long m1 = long_at(body, "m1");
  const BigInt k = bigint_from(at(body, "k"));
  const PairProgression prog = pair_progression(prof, m1, k);
  for (const auto& p : array_at(body, "pairs")) {
    CongruencePair pair{long_at(p, "m2"), bigint_from(at(p, "j")), m1, k};
    if (!verify_pair(prof, pair)) {
      out.reason = "pair m2 = " + std::to_string(pair.m2) + " fails the identity";
      return out;
    }
    if (mod(BigInt(pair.m2 - prog.first), prog.step) != 0 || pair.m2 < prog.first) {
      out.reason = "m2 = " + std::to_string(pair.m2) + " is outside the admissible progression";
      return out;
    }
  }
  out.ok = true;
  return out;
}

}  // namespace

VerifyOutcome verify_document(const Json& doc) {
  VerifyOutcome out;
  out.type = string_at(doc, "type");
  const Json& body = at(doc, "body");
  std::string why;
  try {
    if (out.type == "selection") {
      const auto c = selection_from(body);
      out.ok = canonical(to_json(c), body, why) && verify_selection(c, &why);
    } else if (out.type == "family") {
      const auto f = family_from(body);
      out.ok = canonical(to_json(f), body, why) && verify_family(f, &why);
    } else if (out.type == "x") {
      const auto c = x_certificate_from(body);
      out.ok = canonical(to_json(c), body, why) && verify_x_certificate(c, &why);
    } else if (out.type == "relation") {
      const auto bases = longs_from(at(body, "bases"));
      const auto rel = relation_from(body);
      out.ok = canonical(to_json(rel, bases), body, why) && verify_relation(bases, rel);
      if (!out.ok && why.empty()) why = "relation does not hold";
    } else if (out.type == "pairs") {
      VerifyOutcome v = verify_pairs(body);
      out.ok = v.ok;
      why = v.reason;
    } else if (out.type == "order") {
      const OrderProfile prof = scan_order_profile(long_at(body, "u"), long_at(body, "v"), long_at(body, "probe_depth"));
      out.ok = to_json(prof) == body;
      if (!out.ok) why = "order profile does not recompute";
    } else if (out.type == "tree") {
      const MeasureTree tree = tree_from(body);
      if (canonical(to_json(tree), body, why)) {
        VerifyOutcome v = verify_tree(tree);
        out.ok = v.ok;
        why = v.reason;
      }
    } else {
      fail(ErrorKind::ParseError, "documents of type '" + out.type + "' carry no certificate");
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError) throw;
    out.ok = false;
    why = e.what();
  }
  out.reason = why;
  return out;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, std::string("invalid JSON: ") + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace adic
