#include <algorithm>
#include <cctype>
#include <sstream>

#include "amtile/io.hpp"

namespace amtile {

namespace {

Json header(const std::string& kind) { return Json{{"schema_version", kSchemaVersion}, {"kind", kind}}; }

void expect_kind(const Json& j, const std::string& kind) {
  if (!j.is_object()) throw Error(kind + ": expected a JSON object");
  if (j.contains("schema_version") && j.at("schema_version").get<int>() != kSchemaVersion) {
    throw Error(kind + ": unsupported schema_version " + j.at("schema_version").dump());
  }
  if (j.contains("kind") && j.at("kind").get<std::string>() != kind) {
    throw Error("expected a " + kind + " artifact, got " + j.at("kind").get<std::string>());
  }
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\n\r");
  const auto e = s.find_last_not_of(" \t\n\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

Json rational(const Rational& r) { return Json{{"num", r.num()}, {"den", r.den()}, {"value", r.value()}}; }

}  // namespace

Json element_to_json(const Group& g, const Element& e) { return Json(g.coords(e)); }

Element element_from_json(const Group& g, const Json& j) {
  if (j.is_string()) return g.parse_element(j.get<std::string>());
  return g.from_coords(j.get<std::vector<std::int64_t>>());
}

Json subset_to_json(const FiniteSubset& s) {
  const Group& g = s.group();
  if (!s.empty() && s.contains(g.identity())) {
    int n = 1;
    while (folner_size(g, n) < s.size()) ++n;
    if (folner_size(g, n) == s.size() && s == folner_set(g, n)) return Json{{"folner", n}};
  }
  Json a = Json::array();
  for (const auto& e : s) a.push_back(element_to_json(g, e));
  return a;
}

FiniteSubset parse_subset_spec(const Group& g, const std::string& text) {
  const std::string t = trim(text);
  std::istringstream in(t);
  std::string word;
  in >> word;
  if (word == "identity") return FiniteSubset::identity(g);
  if (word == "ball" || word == "folner") {
    int n = -1;
    if (!(in >> n) || n < 0) throw Error("subset spec '" + t + "': expected a non-negative radius");
    std::string rest;
    if (in >> rest) throw Error("subset spec '" + t + "': trailing text");
    if (word == "ball") return ball(g, n);
    if (n < 1) throw Error("subset spec '" + t + "': Følner index must be >= 1");
    return folner_set(g, n);
  }
  std::vector<Element> els;
  std::size_t start = 0;
  while (start <= t.size()) {
    const auto end = t.find(';', start);
    const auto piece = trim(t.substr(start, end == std::string::npos ? std::string::npos : end - start));
    if (!piece.empty()) els.push_back(g.parse_element(piece));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  if (els.empty()) throw Error("subset spec '" + t + "': empty");
  return FiniteSubset(g, std::move(els));
}

FiniteSubset subset_from_json(const Group& g, const Json& j) {
  if (j.is_string()) return parse_subset_spec(g, j.get<std::string>());
  if (j.is_object()) {
    if (j.contains("folner")) return folner_set(g, j.at("folner").get<int>());
    if (j.contains("ball")) return ball(g, j.at("ball").get<int>());
    throw Error("subset: unknown object form " + j.dump());
  }
  std::vector<Element> els;
  for (const auto& e : j) els.push_back(element_from_json(g, e));
  return FiniteSubset(g, std::move(els));
}

Json window_to_json(const Window& w) {
  Json j{{"group", w.group().name()}, {"margin", subset_to_json(w.margin())}};
  if (const auto& s = w.spec()) {
    if (s->side > 0) j["side"] = s->side;
    else j["folner_index"] = s->folner_index;
  } else {
    j["universe"] = subset_to_json(w.universe());
  }
  return j;
}

WindowPtr window_from_json(const Json& j) {
  const Group g = Group::parse(j.at("group").get<std::string>());
  auto margin = subset_from_json(g, j.at("margin"));
  if (j.contains("side")) return std::make_shared<const Window>(box_spec(g, j.at("side").get<int>(), margin));
  if (j.contains("folner_index")) {
    return std::make_shared<const Window>(folner_spec(g, j.at("folner_index").get<int>(), margin));
  }
  return std::make_shared<const Window>(subset_from_json(g, j.at("universe")), margin);
}

Json tiling_body(const Quasitiling& qt) {
  const Group& g = qt.window().group();
  Json shapes = Json::array();
  for (std::size_t i = 0; i < qt.shapes().size(); ++i) {
    Json centers = Json::array();
    for (const auto& c : qt.centers()[i]) centers.push_back(element_to_json(g, c));
    shapes.push_back(Json{{"id", qt.shapes()[i].id},
                          {"elements", subset_to_json(qt.shapes()[i].elements)},
                          {"centers", std::move(centers)}});
  }
  return Json{{"shapes", std::move(shapes)}};
}

Quasitiling tiling_from_body(WindowPtr w, const Json& j) {
  const Group& g = w->group();
  std::vector<Shape> shapes;
  std::vector<FiniteSubset> centers;
  for (const auto& s : j.at("shapes")) {
    shapes.push_back(Shape{s.at("id").get<int>(), subset_from_json(g, s.at("elements"))});
    std::vector<Element> cs;
    for (const auto& c : s.at("centers")) cs.push_back(element_from_json(g, c));
    centers.emplace_back(g, std::move(cs));
  }
  return Quasitiling(std::move(w), std::move(shapes), std::move(centers));
}

Json quasitiling_to_json(const Quasitiling& qt) {
  Json j = header("quasitiling");
  j["window"] = window_to_json(qt.window());
  j["tiling"] = tiling_body(qt);
  return j;
}

Quasitiling quasitiling_from_json(const Json& j) {
  expect_kind(j, "quasitiling");
  return tiling_from_body(window_from_json(j.at("window")), j.at("tiling"));
}

Json witness_to_json(const DisjointWitness& w) { return Json(w.parts); }

DisjointWitness witness_from_json(const Json& j) {
  return DisjointWitness{j.get<std::vector<std::vector<std::uint32_t>>>()};
}

Json field_to_json(const PatternField& x) {
  Json j = header("pattern_field");
  j["window"] = window_to_json(*x.window);
  j["alphabet"] = x.alphabet;
  j["values"] = x.values;
  return j;
}

PatternField field_from_json(const Json& j) {
  expect_kind(j, "pattern_field");
  PatternField x{window_from_json(j.at("window")), j.at("alphabet").get<std::vector<std::string>>(),
                 j.at("values").get<std::vector<std::uint32_t>>()};
  x.validate();
  return x;
}

Json table_to_json(const MasterPartitionTable& t, const Group& g) {
  Json levels = Json::array();
  for (std::size_t i = 0; i < t.masters.size(); ++i) {
    Json shapes = Json::array();
    for (const auto& s : t.shapes[i]) shapes.push_back(Json{{"id", s.id}, {"elements", subset_to_json(s.elements)}});
    Json masters = Json::object();
    for (const auto& m : t.masters[i]) {
      Json parts = Json::array();
      for (const auto& p : m.parts) parts.push_back(Json::array({p.shape, element_to_json(g, p.offset)}));
      masters[std::to_string(m.shape)] = std::move(parts);
    }
    levels.push_back(Json{{"fine_level", i + 1}, {"fine_shapes", std::move(shapes)}, {"masters", std::move(masters)}});
  }
  return levels;
}

MasterPartitionTable table_from_json(const Group& g, const Json& j) {
  MasterPartitionTable t;
  for (const auto& lv : j) {
    std::vector<Shape> shapes;
    for (const auto& s : lv.at("fine_shapes")) {
      shapes.push_back(Shape{s.at("id").get<int>(), subset_from_json(g, s.at("elements"))});
    }
    std::vector<MasterEntry> masters;
    for (const auto& [key, parts] : lv.at("masters").items()) {
      MasterEntry e{std::stoi(key), {}};
      for (const auto& p : parts) e.parts.push_back(MasterPart{p.at(0).get<int>(), element_from_json(g, p.at(1))});
      masters.push_back(std::move(e));
    }
    std::sort(masters.begin(), masters.end(), [](const auto& a, const auto& b) { return a.shape < b.shape; });
    t.shapes.push_back(std::move(shapes));
    t.masters.push_back(std::move(masters));
  }
  return t;
}

Json levels_to_json(const std::vector<TilingLevel>& levels, const MasterPartitionTable& table) {
  if (levels.empty()) throw Error("hierarchy artifact: no levels");
  Json j = header("hierarchy");
  const Window& W = levels.front().tiling.window();
  j["window"] = window_to_json(W);
  Json ls = Json::array();
  for (const auto& l : levels) {
    ls.push_back(Json{{"k", l.k}, {"K", subset_to_json(l.K)}, {"eps", l.eps}, {"tiling", tiling_body(l.tiling)}});
  }
  j["levels"] = std::move(ls);
  j["master_partitions"] = table_to_json(table, W.group());
  return j;
}

HierarchyArtifact levels_from_json(const Json& j) {
  expect_kind(j, "hierarchy");
  const auto w = window_from_json(j.at("window"));
  HierarchyArtifact out;
  for (const auto& l : j.at("levels")) {
    out.levels.push_back(make_level(l.at("k").get<int>(), tiling_from_body(w, l.at("tiling")),
                                    subset_from_json(w->group(), l.at("K")), l.at("eps").get<double>()));
  }
  out.table = table_from_json(w->group(), j.at("master_partitions"));
  return out;
}

Json to_json(const WitnessAudit& a) {
  return Json{{"ok", a.ok},
              {"not_subset", a.not_subset},
              {"too_small", a.too_small},
              {"shared_points", a.shared_points},
              {"worst_fraction", a.worst_fraction}};
}

Json to_json(const GreedyReport& r) {
  Json shapes = Json::array();
  for (const auto& s : r.shapes) {
    shapes.push_back(Json{{"folner_index", s.index},
                          {"size", s.size},
                          {"delta", s.delta},
                          {"worst_ratio", s.worst_ratio},
                          {"tiles", s.tiles}});
  }
  return Json{{"eps", r.eps},
              {"required_shapes", r.required_shapes},
              {"shapes", std::move(shapes)},
              {"pairwise_invariance_met", r.pairwise_invariance_met},
              {"tiles", r.tiles},
              {"covered_core", rational(r.covered_core)}};
}

Json to_json(const ExactifyReport& r) {
  return Json{{"gamma", r.gamma},
              {"eps", r.eps},
              {"xi", r.xi},
              {"xi_prime", r.xi_prime},
              {"ben_threshold", r.ben_threshold},
              {"ben_threshold_met", r.ben_threshold_met},
              {"input_coverage", rational(r.input_coverage)},
              {"coverage_precondition_met", r.coverage_precondition_met},
              {"unmarked_shapes", r.unmarked_shapes},
              {"displacement", Json{{"folner_index", r.f_index},
                                    {"size", r.f_size},
                                    {"min_A", rational(r.f_min_A)},
                                    {"min_A_prime", rational(r.f_min_A_prime)},
                                    {"max_B", rational(r.f_max_B)}}},
              {"uncovered", r.uncovered},
              {"aux_tiles", r.aux_tiles},
              {"aux_worst_ratio", r.aux_worst_ratio},
              {"matched_local", r.matched_local},
              {"residual", r.residual},
              {"matched_residual", r.matched_residual},
              {"fallback_points", r.fallback_points},
              {"fallback_tiles", r.fallback_tiles},
              {"matching_complete", r.matching_complete},
              {"conformant", r.conformant()},
              {"growth_bound_met", r.growth_bound_met},
              {"worst_growth", r.worst_growth},
              {"invariance_met", r.invariance_met},
              {"worst_invariance", rational(r.worst_invariance)},
              {"non_invariant_shapes", r.non_invariant_shapes},
              {"violations", r.violations}};
}

Json to_json(const ExactAudit& a) {
  return Json{{"uncovered", a.uncovered}, {"multiply_covered", a.multiply_covered}, {"ok", a.total() == 0}};
}

Json to_json(const LevelReport& r) {
  return Json{{"k", r.k},
              {"delta", r.delta},
              {"K_prime_size", r.K_prime_size},
              {"exactify", to_json(r.exactify)},
              {"tiles", r.tiles},
              {"reassigned", r.reassigned},
              {"dropped", r.dropped},
              {"sandwich_violations", r.sandwich_violations},
              {"exact_violations", r.exact_violations},
              {"congruent", r.congruent},
              {"worst_invariance", rational(r.worst_invariance)},
              {"non_invariant_shapes", r.non_invariant_shapes},
              {"invariance_met", r.invariance_met}};
}

Json to_json(const std::vector<ProbeRow>& rows) {
  Json a = Json::array();
  for (const auto& r : rows) {
    a.push_back(Json{{"size", r.size}, {"count", r.count}, {"translates", r.translates}, {"rate", r.rate}});
  }
  return a;
}

Json to_json(const DensityRange& d) {
  return Json{{"lower", rational(d.lower)}, {"upper", rational(d.upper)}, {"translates", d.translates}};
}

Json to_json(const FiniteOrderAudit& a) {
  return Json{{"cosets", a.cosets},
              {"one_center", a.one_center},
              {"fixed_cosets", a.fixed_cosets},
              {"shifted_zero_fails", a.shifted_zero_fails},
              {"pass", a.pass()}};
}

Json to_json(const ProductAudit& a, const Group& g) {
  Json cs = Json::array();
  for (const auto& c : a.components) {
    cs.push_back(Json{{"g", element_to_json(g, c.g)},
                      {"fragments", c.fragments},
                      {"fixed", c.fixed},
                      {"differing", c.differing},
                      {"estimate", c.estimate},
                      {"pass", c.pass}});
  }
  return Json{{"components", std::move(cs)},
              {"sum_estimates", a.sum_estimates},
              {"product_estimate", a.product_estimate},
              {"subadditive", a.subadditive},
              {"pass", a.pass}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string artifact_kind(const Json& j) {
  if (j.is_object() && j.contains("kind") && j.at("kind").is_string()) return j.at("kind").get<std::string>();
  return {};
}

Json verify_artifact(const Json& a) {
  const auto kind = artifact_kind(a);
  Json r{{"kind", kind}};
  if (kind == "quasitiling") {
    const auto qt = quasitiling_from_json(a);
    const auto exact = audit_exact(qt, qt.window().core_positions());
    r["tiles"] = qt.tile_count();
    r["disjoint"] = qt.is_disjoint();
    r["covered_core"] = rational(covered_core(qt));
    r["exact"] = to_json(exact);
    if (a.contains("witness")) {
      const double eps = a.at("eps").get<double>();
      const auto audit = verify_witness(qt, witness_from_json(a.at("witness")), eps);
      r["witness"] = to_json(audit);
      r["ok"] = audit.ok;
    } else if (a.value("exact", false)) {
      r["ok"] = exact.total() == 0;
    } else {
      r["ok"] = true;
    }
  } else if (kind == "pattern_field") {
    const auto x = field_from_json(a);
    r["size"] = x.size();
    r["alphabet"] = x.alphabet.size();
    r["ok"] = true;
  } else if (kind == "hierarchy") {
    const auto h = levels_from_json(a);
    Json pairs = Json::array();
    bool ok = true;
    for (std::size_t i = 0; i + 1 < h.levels.size(); ++i) {
      const bool c = check_congruent(h.levels[i], h.levels[i + 1]);
      pairs.push_back(c);
      ok = ok && c;
    }
    for (const auto& l : h.levels) {
      ok = ok && audit_exact(l.tiling, l.tiling.window().core_positions()).total() == 0;
    }
    const auto re = rederive(h.levels.back().tiling, h.table);
    bool same = re.size() == h.levels.size();
    for (std::size_t i = 0; same && i < re.size(); ++i) same = re[i] == h.levels[i].tiling;
    r["congruent"] = std::move(pairs);
    r["rederived_matches"] = same;
    r["ok"] = ok && same;
  } else {
    throw Error("verify: unknown artifact kind '" + kind + "'");
  }
  return r;
}

}  // namespace amtile
