#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "amtile/io.hpp"
#include "amtile/parallel.hpp"

namespace amtile {

namespace {

const std::vector<std::string> kStageOrder{"quasitile", "disjointify", "exactify", "hierarchy",
                                           "complexity", "freeaction", "render"};

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw Error("config: " + field + ": " + why);
}

void check_keys(const YAML::Node& n, const std::string& where, const std::set<std::string>& allowed) {
  if (!n.IsMap()) bad(where.empty() ? "<root>" : where, "expected a mapping");
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) bad(where.empty() ? key : where + "." + key, "unknown key");
  }
}

template <class T>
void read(const YAML::Node& n, const std::string& key, const std::string& where, T& out) {
  if (!n[key]) return;
  try {
    out = n[key].as<T>();
  } catch (const YAML::Exception&) {
    bad(where.empty() ? key : where + "." + key, "wrong type");
  }
}

void open_unit(double v, const std::string& field) {
  if (!(v > 0 && v < 1)) {
    std::ostringstream o;
    o << "must be in (0,1), got " << v;
    bad(field, o.str());
  }
}

Json config_json(const RunConfig& c) {
  Json levels = Json::array();
  for (const auto& l : c.levels) {
    levels.push_back(Json{{"K", l.K},
                          {"eps", l.eps},
                          {"greedy_eps", l.greedy_eps},
                          {"n0", l.n0},
                          {"stride", l.stride},
                          {"shape_count", l.shape_count},
                          {"gamma", l.gamma},
                          {"max_f_index", l.max_f_index}});
  }
  return Json{{"group", c.group},
              {"window", Json{{"side", c.side}, {"folner_index", c.folner_index}, {"margin", c.margin}}},
              {"stages", c.stages},
              {"seed", c.seed},
              {"quasitile", Json{{"eps", c.eps},
                                 {"n0", c.n0},
                                 {"stride", c.stride},
                                 {"shape_count", c.shape_count},
                                 {"strict", c.strict},
                                 {"max_index", c.max_index}}},
              {"exactify", Json{{"gamma", c.gamma}, {"K", c.K}, {"eps", c.exact_eps}, {"max_f_index", c.max_f_index}}},
              {"hierarchy", Json{{"levels", levels}}},
              {"complexity", Json{{"probes", c.probes}}},
              {"freeaction", Json{{"elements", c.free_elements}, {"finite", c.finite_element}}},
              {"render", Json{{"formats", c.render_formats}}}};
}

bool has(const RunConfig& c, const std::string& stage) {
  return std::find(c.stages.begin(), c.stages.end(), stage) != c.stages.end();
}

GreedyParams greedy_params(const RunConfig& c) {
  GreedyParams p;
  p.eps = c.eps;
  p.n0 = c.n0;
  p.stride = c.stride;
  p.shape_count = c.shape_count;
  p.strict = c.strict;
  p.max_index = c.max_index;
  return p;
}

std::vector<LevelParams> level_params(const Group& g, const std::vector<LevelConfig>& ls) {
  std::vector<LevelParams> out;
  for (const auto& l : ls) {
    LevelParams p;
    p.K = parse_subset_spec(g, l.K);
    p.eps = l.eps;
    p.greedy.eps = l.greedy_eps;
    p.greedy.n0 = l.n0;
    p.greedy.stride = l.stride;
    p.greedy.shape_count = l.shape_count;
    p.gamma = l.gamma;
    p.max_f_index = l.max_f_index;
    out.push_back(p);
  }
  return out;
}

FiniteSubset run_margin(const RunConfig& c, const Group& g) {
  if (c.margin != "default") return parse_subset_spec(g, c.margin);
  int top = 1;
  if (has(c, "quasitile")) top = std::max(top, choose_shape_indices(g, greedy_params(c)).back());
  for (const auto& l : c.levels) top = std::max(top, l.n0 + l.shape_count * l.stride);
  return default_margin(folner_set(g, top));
}

}  // namespace

void validate(const RunConfig& c) {
  Group g = Group::zd(1);
  try {
    g = Group::parse(c.group);
  } catch (const Error& e) {
    bad("group", e.what());
  }
  if ((c.side > 0) == (c.folner_index > 0)) bad("window", "set exactly one of side and folner_index");
  if (c.side < 0 || c.folner_index < 0) bad("window", "sizes must be positive");
  if (c.side > 0 && g.kind() == GroupKind::Heis3) bad("window.side", "box windows are not available for Heis3");
  if (c.threads < 1) bad("threads", "must be at least 1");
  if (c.stages.empty()) bad("stages", "no stages requested");
  std::size_t last = 0;
  for (const auto& s : c.stages) {
    const auto it = std::find(kStageOrder.begin(), kStageOrder.end(), s);
    if (it == kStageOrder.end()) bad("stages", "unknown stage '" + s + "'");
    const auto i = static_cast<std::size_t>(it - kStageOrder.begin());
    if (i < last) bad("stages", "stages must follow pipeline order");
    last = i;
  }
  if (has(c, "disjointify") && !has(c, "quasitile")) bad("stages", "disjointify needs quasitile");
  if (has(c, "exactify") && !has(c, "disjointify")) bad("stages", "exactify needs disjointify");
  if (has(c, "render") && g != Group::zd(2)) bad("stages", "render needs group Z2");
  open_unit(c.eps, "quasitile.eps");
  if (c.n0 < 0) bad("quasitile.n0", "must be non-negative");
  if (c.stride < 1) bad("quasitile.stride", "must be positive");
  if (c.shape_count < 0) bad("quasitile.shape_count", "must be non-negative");
  open_unit(c.gamma, "exactify.gamma");
  open_unit(c.exact_eps, "exactify.eps");
  if (c.max_f_index < 1) bad("exactify.max_f_index", "must be positive");
  try {
    parse_subset_spec(g, c.K);
  } catch (const Error& e) {
    bad("exactify.K", e.what());
  }
  if (c.margin != "default") {
    try {
      parse_subset_spec(g, c.margin);
    } catch (const Error& e) {
      bad("window.margin", e.what());
    }
  }
  if (has(c, "hierarchy") && c.levels.empty()) bad("hierarchy.levels", "at least one level is required");
  for (std::size_t i = 0; i < c.levels.size(); ++i) {
    const auto& l = c.levels[i];
    const std::string f = "hierarchy.levels[" + std::to_string(i) + "]";
    open_unit(l.eps, f + ".eps");
    open_unit(l.greedy_eps, f + ".greedy_eps");
    open_unit(l.gamma, f + ".gamma");
    if (i > 0 && !(l.eps < c.levels[i - 1].eps)) bad(f + ".eps", "the eps schedule must decrease");
    if (l.n0 < 0 || l.stride < 1 || l.shape_count < 1) bad(f, "n0 >= 0, stride >= 1 and shape_count >= 1 required");
    if (i > 0 && l.n0 <= c.levels[i - 1].n0) bad(f + ".n0", "shape indices must grow across levels");
    try {
      parse_subset_spec(g, l.K);
    } catch (const Error& e) {
      bad(f + ".K", e.what());
    }
  }
  for (auto p : c.probes) {
    if (p < 1) bad("complexity.probes", "Følner indices must be positive");
  }
  for (const auto& e : c.free_elements) {
    try {
      if (g.order(g.parse_element(e))) bad("freeaction.elements", "'" + e + "' has finite order");
    } catch (const Error& err) {
      if (std::string(err.what()).rfind("config:", 0) == 0) throw;
      bad("freeaction.elements", err.what());
    }
  }
  if (!c.finite_element.empty()) {
    if (g.kind() != GroupKind::ZdxZq) bad("freeaction.finite", "needs a Zd x Zq group");
    if (c.levels.empty()) bad("freeaction.finite", "needs hierarchy.levels for the upper levels");
    try {
      if (!g.order(g.parse_element(c.finite_element))) bad("freeaction.finite", "element has infinite order");
    } catch (const Error& err) {
      if (std::string(err.what()).rfind("config:", 0) == 0) throw;
      bad("freeaction.finite", err.what());
    }
  }
  for (const auto& f : c.render_formats) {
    if (f != "svg" && f != "ascii") bad("render.formats", "unknown format '" + f + "'");
  }
}

RunConfig parse_run_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(std::string("config: not valid YAML: ") + e.what());
  }
  RunConfig c;
  check_keys(root, "", {"group", "window", "stages", "seed", "threads", "output", "quasitile", "exactify", "hierarchy",
                        "complexity", "freeaction", "render"});
  read(root, "group", "", c.group);
  read(root, "seed", "", c.seed);
  read(root, "threads", "", c.threads);
  read(root, "output", "", c.output);
  read(root, "stages", "", c.stages);
  if (const auto w = root["window"]) {
    check_keys(w, "window", {"side", "folner_index", "margin"});
    read(w, "side", "window", c.side);
    read(w, "folner_index", "window", c.folner_index);
    read(w, "margin", "window", c.margin);
  }
  if (const auto q = root["quasitile"]) {
    check_keys(q, "quasitile", {"eps", "n0", "stride", "shape_count", "strict", "max_index"});
    read(q, "eps", "quasitile", c.eps);
    read(q, "n0", "quasitile", c.n0);
    read(q, "stride", "quasitile", c.stride);
    read(q, "shape_count", "quasitile", c.shape_count);
    read(q, "strict", "quasitile", c.strict);
    read(q, "max_index", "quasitile", c.max_index);
  }
  if (const auto e = root["exactify"]) {
    check_keys(e, "exactify", {"gamma", "K", "eps", "max_f_index"});
    read(e, "gamma", "exactify", c.gamma);
    read(e, "K", "exactify", c.K);
    read(e, "eps", "exactify", c.exact_eps);
    read(e, "max_f_index", "exactify", c.max_f_index);
  }
  if (const auto h = root["hierarchy"]) {
    check_keys(h, "hierarchy", {"levels"});
    if (const auto ls = h["levels"]) {
      if (!ls.IsSequence()) bad("hierarchy.levels", "expected a list");
      for (std::size_t i = 0; i < ls.size(); ++i) {
        const std::string where = "hierarchy.levels[" + std::to_string(i) + "]";
        check_keys(ls[i], where, {"K", "eps", "greedy_eps", "n0", "stride", "shape_count", "gamma", "max_f_index"});
        LevelConfig l;
        read(ls[i], "K", where, l.K);
        read(ls[i], "eps", where, l.eps);
        read(ls[i], "greedy_eps", where, l.greedy_eps);
        read(ls[i], "n0", where, l.n0);
        read(ls[i], "stride", where, l.stride);
        read(ls[i], "shape_count", where, l.shape_count);
        read(ls[i], "gamma", where, l.gamma);
        read(ls[i], "max_f_index", where, l.max_f_index);
        c.levels.push_back(l);
      }
    }
  }
  if (const auto x = root["complexity"]) {
    check_keys(x, "complexity", {"probes"});
    read(x, "probes", "complexity", c.probes);
  }
  if (const auto f = root["freeaction"]) {
    check_keys(f, "freeaction", {"elements", "finite"});
    read(f, "elements", "freeaction", c.free_elements);
    read(f, "finite", "freeaction", c.finite_element);
  }
  if (const auto r = root["render"]) {
    check_keys(r, "render", {"formats"});
    read(r, "formats", "render", c.render_formats);
  }
  validate(c);
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

RunOutcome run(const RunConfig& c) {
  validate(c);
  set_thread_count(c.threads);
  const Group g = Group::parse(c.group);
  const auto margin = run_margin(c, g);
  const auto W = std::make_shared<const Window>(c.side > 0 ? box_spec(g, c.side, margin)
                                                           : folner_spec(g, c.folner_index, margin));
  RunOutcome out;
  Json& rep = out.report;
  rep = Json{{"schema_version", kSchemaVersion}, {"kind", "report"}, {"config", config_json(c)}};
  rep["window"] = Json{{"size", W->size()}, {"core", W->core().size()}, {"margin", margin.size()}};
  Json stages = Json::object();

  std::optional<GreedyResult> greedy;
  std::optional<Quasitiling> disjoint, exact;
  std::optional<Quasitiling> bottom;  // level 1 of the normalized hierarchy
  std::vector<std::pair<std::string, const Quasitiling*>> drawable;

  if (has(c, "quasitile")) {
    greedy = greedy_quasitile(W, greedy_params(c));
    const auto audit = verify_witness(greedy->qt, greedy->witness, c.eps);
    Json s = to_json(greedy->report);
    s["witness_audit"] = to_json(audit);
    stages["quasitile"] = s;
    out.ok = out.ok && audit.ok;
    Json a = quasitiling_to_json(greedy->qt);
    a["eps"] = c.eps;
    a["witness"] = witness_to_json(greedy->witness);
    out.artifacts["quasitiling.json"] = dump(a);
    drawable.emplace_back("quasitiling", &greedy->qt);
  }
  if (has(c, "disjointify")) {
    disjoint = disjointify(greedy->qt, greedy->witness);
    const auto cov = covered_core(*disjoint);
    stages["disjointify"] = Json{{"tiles", disjoint->tile_count()},
                                 {"shapes", disjoint->shapes().size()},
                                 {"disjoint", disjoint->is_disjoint()},
                                 {"covered_core", Json{{"num", cov.num()}, {"den", cov.den()}, {"value", cov.value()}}}};
    out.ok = out.ok && disjoint->is_disjoint();
    out.artifacts["disjoint.json"] = dump(quasitiling_to_json(*disjoint));
    drawable.emplace_back("disjoint", &*disjoint);
  }
  if (has(c, "exactify")) {
    ExactifyParams p;
    p.gamma = c.gamma;
    p.K = parse_subset_spec(g, c.K);
    p.eps = c.exact_eps;
    p.max_f_index = c.max_f_index;
    auto r = exactify(*disjoint, p);
    const auto audit = audit_exact(r.tiling, W->core_positions());
    Json s = to_json(r.report);
    s["audit"] = to_json(audit);
    stages["exactify"] = s;
    out.ok = out.ok && audit.total() == 0;
    Json a = quasitiling_to_json(r.tiling);
    a["exact"] = true;
    out.artifacts["exact.json"] = dump(a);
    out.artifacts["exact_displacements.json"] = dump(field_to_json(r.y));
    exact = std::move(r.tiling);
    drawable.emplace_back("exact", &*exact);
  }
  if (has(c, "hierarchy")) {
    const auto h = build_hierarchy(W, level_params(g, c.levels));
    Json s{{"levels", Json::array()}};
    for (const auto& r : h.reports) s["levels"].push_back(to_json(r));
    bool congruent = true;
    for (std::size_t i = 0; i + 1 < h.levels.size(); ++i) congruent = congruent && check_congruent(h.levels[i], h.levels[i + 1]);
    const auto n = normalize_masters(h.levels);
    const auto re = rederive(n.levels.back().tiling, n.table);
    const bool same = dump(tiling_body(re.front())) == dump(tiling_body(n.levels.front().tiling));
    s["congruent"] = congruent;
    s["rederived_bottom_matches"] = same;
    // Probe E_1 designated on the level-1 field before normalization.
    const auto before = to_pattern_field(h.levels.front().tiling);
    const auto after = to_pattern_field(n.levels.front().tiling);
    if (const auto e = find_probe_index(before, c.levels.front().eps, 64)) {
      const auto E = folner_set(g, *e);
      const double eb = entropy_estimate(before, {E});
      const double ea = entropy_estimate(after, {E});
      s["probe"] = Json{{"folner_index", *e}, {"size", E.size()}, {"before", eb}, {"after", ea},
                        {"budget", c.levels.front().eps}, {"monotone", ea <= eb}, {"within_budget", ea <= c.levels.front().eps}};
    } else {
      s["probe"] = nullptr;
    }
    stages["hierarchy"] = s;
    out.ok = out.ok && congruent && same;
    out.artifacts["hierarchy.json"] = dump(levels_to_json(n.levels, n.table));
    bottom = n.levels.front().tiling;
    drawable.emplace_back("hierarchy_level1", &*bottom);
  }
  if (has(c, "complexity")) {
    const Quasitiling* t = exact ? &*exact : disjoint ? &*disjoint : greedy ? &greedy->qt : bottom ? &*bottom : nullptr;
    Json s;
    if (!t) {
      s["skipped"] = "no tiling produced by earlier stages";
    } else {
      const auto x = to_pattern_field(*t);
      std::vector<FiniteSubset> probes;
      for (auto p : c.probes) probes.push_back(folner_set(g, p));
      const auto rows = complexity_table(x, probes);
      s["table"] = to_json(rows);
      double est = rows.front().rate;
      for (const auto& r : rows) est = std::min(est, r.rate);
      s["estimate"] = est;
      s["estimate_direction"] = "upper bound via infimum over probes";
      s["count_direction"] = "windowed counts are lower bounds";
      if (greedy && disjoint) {
        std::vector<std::pair<int, std::size_t>> cls;
        const auto classes = disjoint_shape_classes(*greedy, *disjoint);
        for (std::size_t i = 0; i < classes.size(); ++i) cls.emplace_back(classes[i], disjoint->shapes()[i].elements.size());
        const auto fit = entest_fit(cls);
        const auto xd = to_pattern_field(*disjoint);
        double ed = complexity_table(xd, probes).front().rate;
        for (const auto& r : complexity_table(xd, probes)) ed = std::min(ed, r.rate);
        s["entest"] = Json{{"r", fit.r},         {"delta", fit.delta},       {"eps", fit.eps},
                           {"budget", fit.budget}, {"bound_eps", fit.bound_eps}, {"disjoint_estimate", ed},
                           {"within_budget", ed <= fit.budget}, {"below_3eps", ed < 3 * fit.bound_eps}};
      }
      out.artifacts["field.json"] = dump(field_to_json(x));
    }
    stages["complexity"] = s;
  }
  if (has(c, "freeaction")) {
    Json s;
    if (!c.free_elements.empty()) {
      std::vector<FreeComponent> comps;
      for (std::size_t i = 0; i < c.free_elements.size(); ++i) {
        const auto e = g.parse_element(c.free_elements[i]);
        comps.push_back(FreeComponent{e, coset_parity_field(W, e)});
        out.artifacts["parity_" + std::to_string(i) + ".json"] = dump(field_to_json(comps.back().field));
      }
      std::vector<FiniteSubset> probes;
      for (auto p : c.probes) probes.push_back(folner_set(g, p));
      const auto a = product_free_audit(comps, probes);
      s["product"] = to_json(a, g);
      Json alt = Json::array();
      for (const auto& comp : comps) alt.push_back(alternation_violations(comp.field, comp.g));
      s["alternation_violations"] = alt;
      out.ok = out.ok && a.pass;
    }
    if (!c.finite_element.empty()) {
      const auto r = finite_order_free_field(W, g.parse_element(c.finite_element), level_params(g, c.levels));
      s["finite_order"] = to_json(r.audit);
      out.ok = out.ok && r.audit.pass();
      out.artifacts["finite_order_field.json"] = dump(field_to_json(r.field));
    }
    stages["freeaction"] = s;
  }
  if (has(c, "render")) {
    Json s = Json::array();
    for (const auto& [name, t] : drawable) {
      for (const auto& f : c.render_formats) {
        const auto file = name + (f == "svg" ? ".svg" : ".txt");
        out.artifacts[file] = render_z2(*t, f);
        s.push_back(file);
      }
    }
    stages["render"] = s;
  }
  rep["stages"] = stages;
  rep["ok"] = out.ok;
  return out;
}

RunOutcome run_and_write(const RunConfig& c) {
  auto out = run(c);
  namespace fs = std::filesystem;
  fs::create_directories(c.output);
  for (const auto& [name, content] : out.artifacts) {
    std::ofstream(fs::path(c.output) / name, std::ios::binary) << content;
  }
  std::ofstream(fs::path(c.output) / "report.json", std::ios::binary) << dump(out.report);
  return out;
}

}  // namespace amtile
