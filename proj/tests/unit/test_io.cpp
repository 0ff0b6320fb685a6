#include "doctest.h"
#include "support.hpp"

#include <algorithm>

#include "amtile/io.hpp"
#include "amtile/parallel.hpp"

using namespace amtile;
using testsupport::el;

namespace {

const Group kZ2 = Group::zd(2);

WindowPtr box(const Group& g, int side, int margin_ball = 1) {
  return std::make_shared<const Window>(box_spec(g, side, ball(g, margin_ball)));
}

GreedyResult small_greedy(WindowPtr w, double eps = 0.3) {
  GreedyParams p;
  p.eps = eps;
  p.n0 = 2;
  p.shape_count = 3;
  return greedy_quasitile(w, p);
}

std::string expect_config_error(const std::string& yaml) {
  try {
    parse_run_config(yaml);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("elements and subsets round trip for every group kind") {
  std::mt19937_64 rng(7);
  for (const auto& g : {Group::zd(1), Group::zd(3), Group::heis3(), Group::zd_x_zq(2, 5)}) {
    for (int i = 0; i < 20; ++i) {
      const auto e = testsupport::random_element(rng, g, 9);
      CHECK(element_from_json(g, element_to_json(g, e)) == e);
    }
    const auto s = testsupport::random_subset(rng, g, 30, 4);
    CHECK(subset_from_json(g, subset_to_json(s)) == s);
    const auto f = folner_set(g, 2);
    const auto j = subset_to_json(f);
    CHECK(j == Json{{"folner", 2}});
    CHECK(subset_from_json(g, j) == f);
  }
}

TEST_CASE("subset specs") {
  CHECK(parse_subset_spec(kZ2, "identity") == FiniteSubset::identity(kZ2));
  CHECK(parse_subset_spec(kZ2, "ball 2") == ball(kZ2, 2));
  CHECK(parse_subset_spec(kZ2, "folner 3") == folner_set(kZ2, 3));
  CHECK(parse_subset_spec(kZ2, "(1,0);(0,1)") == FiniteSubset(kZ2, {el({1, 0}), el({0, 1})}));
  CHECK_THROWS_AS(parse_subset_spec(kZ2, "ball"), Error);
  CHECK_THROWS_AS(parse_subset_spec(kZ2, "(1,2,3)"), Error);
}

TEST_CASE("quasitiling and witness survive a JSON round trip byte for byte") {
  const auto r = small_greedy(box(kZ2, 40));
  Json a = quasitiling_to_json(r.qt);
  a["witness"] = witness_to_json(r.witness);
  const auto text = dump(a);
  const auto back = Json::parse(text);
  const auto qt = quasitiling_from_json(back);
  const auto wit = witness_from_json(back.at("witness"));
  Json again = quasitiling_to_json(qt);
  again["witness"] = witness_to_json(wit);
  CHECK(dump(again) == text);
  CHECK(qt.tile_count() == r.qt.tile_count());
  CHECK(verify_witness(qt, wit, 0.3).ok);
  CHECK(artifact_kind(back) == "quasitiling");
  CHECK(back.at("schema_version") == kSchemaVersion);
}

TEST_CASE("pattern fields round trip and reject out-of-range symbols") {
  const auto r = small_greedy(box(kZ2, 30));
  const auto x = to_pattern_field(disjointify(r.qt, r.witness));
  const auto j = field_to_json(x);
  CHECK(field_from_json(j) == x);
  auto broken = j;
  broken["values"][0] = static_cast<int>(x.alphabet.size()) + 3;
  CHECK_THROWS(field_from_json(broken));
}

TEST_CASE("hierarchy artifact round trips and re-verifies") {
  const auto w = std::make_shared<const Window>(box_spec(Group::zd(1), 400, ball(Group::zd(1), 30)));
  LevelParams p;
  p.K = ball(Group::zd(1), 1);
  p.eps = 0.5;
  p.greedy.eps = 0.25;
  p.greedy.n0 = 3;
  p.greedy.shape_count = 3;
  p.gamma = 0.05;
  p.max_f_index = 60;
  auto q = p;
  q.eps = 0.4;
  q.greedy.n0 = 9;
  const auto h = build_hierarchy(w, {p, q});
  const auto n = normalize_masters(h.levels);
  const auto j = levels_to_json(n.levels, n.table);
  const auto back = levels_from_json(Json::parse(dump(j)));
  CHECK(back.table == n.table);
  CHECK(dump(levels_to_json(back.levels, back.table)) == dump(j));
  const auto v = verify_artifact(j);
  CHECK(v.at("ok").get<bool>());

  // Moving one fine tile's centre breaks rederivation.
  auto tampered = j;
  auto& lvl = tampered.at("levels").at(1);
  auto& first = lvl.at("tiling").at("shapes").at(0).at("centers").at(0);
  first[0] = first[0].get<std::int64_t>() + 1;
  bool rejected = false;
  try {
    rejected = !verify_artifact(tampered).at("ok").get<bool>();
  } catch (const Error&) {
    rejected = true;
  }
  CHECK(rejected);
}

TEST_CASE("config validation names the offending field") {
  CHECK(expect_config_error("quasitile: {eps: 1.5}\nwindow: {side: 20}").find("quasitile.eps") != std::string::npos);
  CHECK(expect_config_error("window: {side: 20, folner_index: 3}").find("window") != std::string::npos);
  CHECK(expect_config_error("window: {side: 20}\nbogus: 1").find("bogus") != std::string::npos);
  CHECK(expect_config_error("window: {side: 20}\nquasitile: {n0: x}").find("quasitile.n0") != std::string::npos);
  CHECK(expect_config_error("window: {side: 20}\nstages: [exactify]").find("stages") != std::string::npos);
  CHECK(expect_config_error("group: Heis3\nwindow: {side: 20}").find("window.side") != std::string::npos);
  CHECK(expect_config_error("group: Z1\nwindow: {side: 20}\nstages: [quasitile, render]").find("render") !=
        std::string::npos);
  CHECK(expect_config_error("window: {side: 40}\nstages: [hierarchy]\nhierarchy:\n  levels:\n"
                            "    - {eps: 0.3, n0: 3}\n    - {eps: 0.4, n0: 8}")
            .find("hierarchy.levels") != std::string::npos);
  CHECK(expect_config_error("window: {side: 20}\nstages: [freeaction]\nfreeaction: {elements: ['(0,0)']}")
            .find("freeaction.elements") != std::string::npos);
  CHECK(expect_config_error("window: {side: 20}\ngroup: [") != "");
  const auto ok = parse_run_config("group: Z1\nwindow: {side: 50}\nquasitile: {eps: 0.4, n0: 2}\n");
  CHECK(ok.group == "Z1");
  CHECK(ok.eps == doctest::Approx(0.4));
}

TEST_CASE("minimal run yields a verified quasitiling artifact") {
  const auto c = parse_run_config("group: Z1\nwindow: {side: 200}\nquasitile: {eps: 0.5, n0: 2, shape_count: 2}\n");
  const auto r = run(c);
  CHECK(r.ok);
  REQUIRE(r.artifacts.count("quasitiling.json") == 1);
  const auto a = Json::parse(r.artifacts.at("quasitiling.json"));
  CHECK(verify_artifact(a).at("ok").get<bool>());
  CHECK(r.report.at("stages").at("quasitile").at("witness_audit").at("ok").get<bool>());
}

TEST_CASE("artifacts do not depend on the thread count") {
  auto c = parse_run_config(
      "group: Z2\nwindow: {side: 60}\nstages: [quasitile, disjointify, exactify, complexity, render]\n"
      "quasitile: {eps: 0.3, n0: 3, shape_count: 3}\nexactify: {gamma: 0.05, K: ball 1, eps: 0.3}\n"
      "render: {formats: [svg, ascii]}\n");
  c.threads = 1;
  const auto one = run(c);
  c.threads = 4;
  const auto four = run(c);
  set_thread_count(1);
  CHECK(one.artifacts == four.artifacts);
  CHECK(one.ok == four.ok);
  CHECK(one.artifacts.count("exact.json") == 1);
  CHECK(one.artifacts.count("exact.txt") == 1);
}

TEST_CASE("ascii rendering") {
  SUBCASE("one tile filling the box") {
    const auto w = box(kZ2, 3, 0);
    TilePart t;
    for (std::uint32_t p = 0; p < w->size(); ++p) t.points.push_back(p);
    t.center = el({0, 0});
    const auto qt = tiling_from_parts(w, std::vector<TilePart>{t});
    CHECK(render_z2(qt, "ascii") == "AAA\nAAA\nAAA\n");
  }
  SUBCASE("empty tiling is blank") {
    const auto w = box(kZ2, 2, 0);
    const auto qt = tiling_from_parts(w, std::vector<TilePart>{});
    CHECK(render_z2(qt, "ascii") == "..\n..\n");
  }
  SUBCASE("overlaps are marked") {
    const auto r = small_greedy(box(kZ2, 40));
    const auto text = render_z2(r.qt, "ascii");
    CHECK(std::count(text.begin(), text.end(), '\n') == 40);
    CHECK(r.qt.is_disjoint() == (text.find('#') == std::string::npos));
  }
  SUBCASE("svg is well formed and non-Z2 groups are refused") {
    const auto r = small_greedy(box(kZ2, 20));
    const auto svg = render_z2(r.qt, "svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK_THROWS_AS(render_z2(r.qt, "png"), Error);
    const auto z = small_greedy(box(Group::zd(1), 50));
    CHECK_THROWS_AS(render_z2(z.qt, "ascii"), Error);
  }
}
