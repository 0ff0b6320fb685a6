#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "amtile/io.hpp"
#include "amtile/parallel.hpp"

using namespace amtile;

namespace {

struct WindowOpts {
  std::string group = "Z2";
  int side = 0;
  int folner_index = 0;
  std::string margin = "default";

  void add(CLI::App* app) {
    app->add_option("--group", group, "Z1..Z4, Heis3 or ZdxZq such as Z1xZ2")->capture_default_str();
    app->add_option("--side", side, "box window side length");
    app->add_option("--folner-index", folner_index, "window F_n");
    app->add_option("--margin", margin, "core margin: default, 'ball r', 'folner n' or '(x,y);...'")
        ->capture_default_str();
  }

  WindowPtr make(const std::function<FiniteSubset()>& fallback_margin) const {
    const Group g = Group::parse(group);
    if ((side > 0) == (folner_index > 0)) throw Error("window: set exactly one of --side and --folner-index");
    if (side > 0 && g.kind() == GroupKind::Heis3) throw Error("window: Heis3 windows are Følner sets; use --folner-index");
    const auto m = margin == "default" ? fallback_margin() : parse_subset_spec(g, margin);
    return std::make_shared<const Window>(side > 0 ? box_spec(g, side, m) : folner_spec(g, folner_index, m));
  }
};

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  return Json::parse(in);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

template <class T>
std::vector<T> split_list(const std::string& s, char sep) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream is(item);
    T v;
    if constexpr (std::is_same_v<T, std::string>) {
      v = item;
    } else if (!(is >> v)) {
      throw Error("cannot parse list item '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

Quasitiling tiling_of(const Json& j, int level) {
  const auto kind = artifact_kind(j);
  if (kind == "quasitiling") return quasitiling_from_json(j);
  if (kind == "hierarchy") {
    auto h = levels_from_json(j);
    if (level < 1 || level > static_cast<int>(h.levels.size())) throw Error("--level out of range");
    return h.levels[static_cast<std::size_t>(level - 1)].tiling;
  }
  throw Error("expected a quasitiling or hierarchy artifact, got '" + kind + "'");
}

struct Schedule {
  int levels = 0;
  std::string eps = "0.5,0.4,0.3";
  std::string K = "ball 1|ball 1|ball 1";
  std::string n0 = "5,11,20";
  int shape_count = 3;
  double gamma = 0.05;
  double greedy_eps = 0.25;
  int max_f_index = 120;

  void add(CLI::App* app, int default_levels) {
    levels = default_levels;
    app->add_option("--levels", levels, "number of levels above the base")->capture_default_str();
    app->add_option("--eps-schedule", eps, "comma-separated eps_k")->capture_default_str();
    app->add_option("--K-schedule", K, "'|'-separated K_k specs")->capture_default_str();
    app->add_option("--n0-schedule", n0, "comma-separated smallest Følner index per level")->capture_default_str();
    app->add_option("--shape-count", shape_count, "greedy shapes per level")->capture_default_str();
    app->add_option("--gamma", gamma, "exactification gamma")->capture_default_str();
    app->add_option("--greedy-eps", greedy_eps, "greedy quasitiling eps")->capture_default_str();
    app->add_option("--max-f-index", max_f_index, "largest displacement set index")->capture_default_str();
  }

  std::vector<LevelConfig> configs() const {
    const auto e = split_list<double>(eps, ',');
    const auto k = split_list<std::string>(K, '|');
    const auto n = split_list<int>(n0, ',');
    const auto m = static_cast<std::size_t>(levels);
    if (e.size() < m || k.size() < m || n.size() < m) throw Error("schedules are shorter than --levels");
    std::vector<LevelConfig> out;
    for (std::size_t i = 0; i < m; ++i) {
      LevelConfig l;
      l.K = k[i];
      l.eps = e[i];
      l.n0 = n[i];
      l.shape_count = shape_count;
      l.gamma = gamma;
      l.greedy_eps = greedy_eps;
      l.max_f_index = max_f_index;
      out.push_back(l);
    }
    return out;
  }
};

RunConfig base_config(const WindowOpts& w) {
  RunConfig c;
  c.group = w.group;
  c.side = w.side;
  c.folner_index = w.folner_index;
  c.margin = w.margin;
  c.threads = thread_count();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact tilings of amenable groups on finite windows"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "worker threads; results do not depend on it")->capture_default_str();
  int status = 0;

  // density
  auto* den = app.add_subcommand("density", "Banach density range of a tiling's union or a field's non-zero set");
  std::string den_in;
  int den_probe = 1;
  den->add_option("input", den_in, "quasitiling or pattern field JSON")->required();
  den->add_option("--probe", den_probe, "Følner index of F")->capture_default_str();
  den->callback([&] {
    const auto j = read_json(den_in);
    Json out;
    if (artifact_kind(j) == "pattern_field") {
      const auto x = field_from_json(j);
      CellBits bits(x.window->size());
      for (std::uint32_t p = 0; p < x.size(); ++p) {
        if (x.values[p] != 0) bits.set(x.window->cell_of(p));
      }
      out = to_json(density_range(bits, folner_set(x.window->group(), den_probe), *x.window));
    } else {
      const auto qt = tiling_of(j, 1);
      std::vector<std::uint32_t> pts;
      for (std::size_t i = 0; i < qt.tile_count(); ++i) pts.insert(pts.end(), qt.tile_points(i).begin(), qt.tile_points(i).end());
      out = to_json(density_range(cell_bits(qt.window(), pts), folner_set(qt.window().group(), den_probe), qt.window()));
    }
    std::cout << dump(out);
  });

  // quasitile
  auto* qt = app.add_subcommand("quasitile", "Greedy eps-disjoint quasitiling with Følner shapes");
  WindowOpts qt_w;
  qt_w.add(qt);
  GreedyParams qp;
  bool qt_disjoint = false;
  std::string qt_out;
  qt->add_option("--eps", qp.eps)->capture_default_str();
  qt->add_option("--n0", qp.n0, "shapes start above F_n0")->capture_default_str();
  qt->add_option("--stride", qp.stride)->capture_default_str();
  qt->add_option("--shape-count", qp.shape_count, "0 means the required count for eps")->capture_default_str();
  qt->add_flag("--strict", qp.strict, "search indices meeting the pairwise invariance condition");
  qt->add_option("--max-index", qp.max_index)->capture_default_str();
  qt->add_flag("--disjoint", qt_disjoint, "write the disjointified quasitiling instead");
  qt->add_option("-o,--output", qt_out, "artifact path")->required();
  qt->callback([&] {
    const Group g = Group::parse(qt_w.group);
    const auto W = qt_w.make([&] { return default_margin(folner_set(g, choose_shape_indices(g, qp).back())); });
    const auto r = greedy_quasitile(W, qp);
    const auto audit = verify_witness(r.qt, r.witness, qp.eps);
    Json report = to_json(r.report);
    report["witness_audit"] = to_json(audit);
    if (qt_disjoint) {
      const auto d = disjointify(r.qt, r.witness);
      report["disjoint_covered_core"] = covered_core(d).value();
      write_text(qt_out, dump(quasitiling_to_json(d)));
    } else {
      Json a = quasitiling_to_json(r.qt);
      a["eps"] = qp.eps;
      a["witness"] = witness_to_json(r.witness);
      write_text(qt_out, dump(a));
    }
    std::cout << dump(report);
    if (!audit.ok) status = 1;
  });

  // exactify
  auto* ex = app.add_subcommand("exactify", "Turn a disjoint quasitiling into an exact tiling of the core");
  std::string ex_in, ex_out, ex_K = "ball 2", ex_y;
  ExactifyParams ep;
  ex->add_option("input", ex_in, "quasitiling JSON (disjointified first if it carries a witness)")->required();
  ex->add_option("--gamma", ep.gamma)->capture_default_str();
  ex->add_option("--K", ex_K)->capture_default_str();
  ex->add_option("--eps", ep.eps)->capture_default_str();
  ex->add_option("--max-f-index", ep.max_f_index)->capture_default_str();
  ex->add_option("-o,--output", ex_out, "exact tiling path")->required();
  ex->add_option("--displacements", ex_y, "also write the displacement field");
  ex->callback([&] {
    const auto j = read_json(ex_in);
    auto q = quasitiling_from_json(j);
    if (j.contains("witness")) q = disjointify(q, witness_from_json(j.at("witness")));
    ep.K = parse_subset_spec(q.window().group(), ex_K);
    const auto r = exactify(q, ep);
    Json a = quasitiling_to_json(r.tiling);
    a["exact"] = true;
    write_text(ex_out, dump(a));
    if (!ex_y.empty()) write_text(ex_y, dump(field_to_json(r.y)));
    Json report = to_json(r.report);
    std::cout << dump(report);
    if (r.report.violations != 0) status = 1;
  });

  // hierarchy
  auto* hi = app.add_subcommand("hierarchy", "Congruent exact tilings with normalized master partitions");
  WindowOpts hi_w;
  hi_w.add(hi);
  Schedule hs;
  hs.add(hi, 3);
  std::string hi_out;
  hi->add_option("-o,--output", hi_out, "hierarchy artifact path")->required();
  hi->callback([&] {
    auto c = base_config(hi_w);
    c.stages = {"hierarchy"};
    c.levels = hs.configs();
    auto r = run(c);
    write_text(hi_out, r.artifacts.at("hierarchy.json"));
    std::cout << dump(r.report.at("stages").at("hierarchy"));
    if (!r.ok) status = 1;
  });

  // complexity
  auto* cx = app.add_subcommand("complexity", "Block complexity table of a pattern field");
  std::string cx_in, cx_probes = "1,2,3";
  std::vector<std::string> cx_sets;
  int cx_level = 1;
  cx->add_option("input", cx_in, "pattern field, quasitiling or hierarchy JSON")->required();
  cx->add_option("--probes", cx_probes, "comma-separated Følner indices")->capture_default_str();
  cx->add_option("--probe-set", cx_sets, "explicit probe, e.g. '(0,0);(1,0)'");
  cx->add_option("--level", cx_level, "hierarchy level to read")->capture_default_str();
  cx->callback([&] {
    const auto j = read_json(cx_in);
    const auto x = artifact_kind(j) == "pattern_field" ? field_from_json(j) : to_pattern_field(tiling_of(j, cx_level));
    const Group& g = x.window->group();
    std::vector<FiniteSubset> probes;
    Json names = Json::array();
    if (cx_sets.empty()) {
      for (int n : split_list<int>(cx_probes, ',')) {
        probes.push_back(folner_set(g, n));
        names.push_back("F_" + std::to_string(n));
      }
    }
    for (const auto& s : cx_sets) {
      probes.push_back(parse_subset_spec(g, s));
      names.push_back(s);
    }
    const auto rows = complexity_table(x, probes);
    Json table = to_json(rows);
    for (std::size_t i = 0; i < rows.size(); ++i) table[i]["probe"] = names[i];
    double est = rows.front().rate;
    for (const auto& r : rows) est = std::min(est, r.rate);
    std::cout << dump(Json{{"table", table},
                           {"estimate", est},
                           {"count_direction", "windowed counts are lower bounds"},
                           {"estimate_direction", "upper bound via infimum over probes"}});
  });

  // freeaction
  auto* fa = app.add_subcommand("freeaction", "Symbolic free-action fields and their audits");
  WindowOpts fa_w;
  fa_w.add(fa);
  std::string fa_g, fa_out;
  bool fa_order = false;
  Schedule fs;
  fs.add(fa, 1);
  fs.n0 = "5";
  fs.eps = "0.5";
  fs.K = "ball 1";
  fa->add_option("--g", fa_g, "group element, e.g. '(1,0)'")->required();
  fa->add_flag("--order-check", fa_order, "report the order of g and exit");
  fa->add_option("-o,--output", fa_out, "field path");
  fa->callback([&] {
    const Group g = Group::parse(fa_w.group);
    const auto e = g.parse_element(fa_g);
    const auto order = g.order(e);
    if (fa_order) {
      std::cout << dump(Json{{"g", element_to_json(g, e)}, {"order", order ? Json(*order) : Json("infinite")}});
      return;
    }
    auto c = base_config(fa_w);
    c.stages = {"freeaction"};
    if (order) {
      c.finite_element = fa_g;
      c.levels = fs.configs();
    } else {
      c.free_elements = {fa_g};
    }
    auto r = run(c);
    if (!fa_out.empty()) write_text(fa_out, r.artifacts.at(order ? "finite_order_field.json" : "parity_0.json"));
    std::cout << dump(r.report.at("stages").at("freeaction"));
    if (!r.ok) status = 1;
  });

  // render
  auto* rd = app.add_subcommand("render", "Draw a Z2 tiling");
  std::string rd_in, rd_out, rd_format = "svg";
  int rd_level = 1;
  rd->add_option("input", rd_in, "quasitiling or hierarchy JSON")->required();
  rd->add_option("--format", rd_format, "svg or ascii")->capture_default_str();
  rd->add_option("--level", rd_level, "hierarchy level")->capture_default_str();
  rd->add_option("-o,--output", rd_out, "output path (stdout when omitted)");
  rd->callback([&] { write_text(rd_out, render_z2(tiling_of(read_json(rd_in), rd_level), rd_format)); });

  // verify
  auto* vf = app.add_subcommand("verify", "Re-audit an artifact file");
  std::string vf_in;
  vf->add_option("input", vf_in, "artifact JSON")->required();
  vf->callback([&] {
    const auto r = verify_artifact(read_json(vf_in));
    std::cout << dump(r);
    if (!r.at("ok").get<bool>()) status = 1;
  });

  // run
  auto* rn = app.add_subcommand("run", "Run a pipeline from a YAML config");
  std::string rn_cfg, rn_out;
  rn->add_option("config", rn_cfg, "YAML config")->required();
  rn->add_option("--output", rn_out, "override the output directory");
  rn->callback([&] {
    auto c = load_run_config(rn_cfg);
    if (!rn_out.empty()) c.output = rn_out;
    if (app.get_option("--threads")->count() > 0) c.threads = threads;
    const auto r = run_and_write(c);
    std::cout << "report: " << c.output << "/report.json\n" << (r.ok ? "ok" : "FAILED: an audit did not pass") << "\n";
    if (!r.ok) status = 1;
  });

  app.parse_complete_callback([&] { set_thread_count(threads); });
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return 2;
  }
  return status;
}
