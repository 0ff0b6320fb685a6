#include "doctest.h"
#include "support.hpp"

#include <random>

#include "amtile/complexity.hpp"
#include "amtile/hierarchy.hpp"

using namespace amtile;
using testsupport::el;
using testsupport::interval;

namespace {

const Group kZ = Group::zd(1);

// Universe [-200, 199], core = universe.
WindowPtr zwin() { return std::make_shared<const Window>(box_spec(kZ, 400, FiniteSubset::identity(kZ))); }

// Intervals [cuts[i], cuts[i+1]) centred at their left end.
Quasitiling intervals(WindowPtr w, const std::vector<std::int64_t>& cuts) {
  std::vector<TilePart> parts;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    TilePart t;
    for (auto x = cuts[i]; x < cuts[i + 1]; ++x) t.points.push_back(*w->locate(el({x})));
    std::sort(t.points.begin(), t.points.end());
    t.center = el({cuts[i]});
    parts.push_back(std::move(t));
  }
  return tiling_from_parts(w, parts);
}

std::vector<std::int64_t> even_cuts(std::int64_t lo, std::int64_t hi, std::int64_t step) {
  std::vector<std::int64_t> c;
  for (auto x = lo; x <= hi; x += step) c.push_back(x);
  return c;
}

std::vector<std::pair<std::int64_t, std::int64_t>> spans_of(const Quasitiling& t) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (std::size_t i = 0; i < t.tile_count(); ++i) {
    std::int64_t lo = INT64_MAX, hi = INT64_MIN;
    for (auto p : t.tile_points(i)) {
      lo = std::min(lo, t.window().at(p)[0]);
      hi = std::max(hi, t.window().at(p)[0]);
    }
    CHECK(hi - lo + 1 == static_cast<std::int64_t>(t.tile_points(i).size()));
    out.emplace_back(lo, hi);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("singleton base lifts any exact tiling to itself") {
  const auto w = zwin();
  const auto base = singleton_level(w);
  CHECK(base.tiling.tile_count() == 400);
  const auto star = intervals(w, {-200, -150, -77, 0, 13, 120, 200});
  const auto r = merge_level(base, star, interval(kZ, -1, 1), 0.5);
  CHECK(spans_of(r.level.tiling) == spans_of(star));
  CHECK(r.report.congruent);
  CHECK(r.report.sandwich_violations == 0);
  CHECK(r.report.exact_violations == 0);
  CHECK(r.report.reassigned == 0);
  std::vector<Element> a, b;
  for (const auto& t : r.level.tiling.tiles()) a.push_back(t.center);
  for (const auto& t : star.tiles()) b.push_back(t.center);
  CHECK(FiniteSubset(kZ, a) == FiniteSubset(kZ, b));
}

TEST_CASE("merging intervals of length ten") {
  const auto w = zwin();
  const auto fine = make_level(1, intervals(w, even_cuts(-200, 200, 10)), interval(kZ, -1, 1), 0.5);
  CHECK(fine.D == interval(kZ, 0, 9));
  const std::vector<std::int64_t> cuts{-200, -113, -7, 95, 200};
  const auto r = merge_level(fine, intervals(w, cuts), interval(kZ, -1, 1), 0.1);

  // Oracle: a length-10 interval joins the T* tile holding its left end.
  std::vector<std::pair<std::int64_t, std::int64_t>> expect;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    std::int64_t lo = INT64_MAX, hi = INT64_MIN;
    for (std::int64_t c = -200; c < 200; c += 10) {
      if (c >= cuts[i] && c < cuts[i + 1]) {
        lo = std::min(lo, c);
        hi = std::max(hi, c + 9);
      }
    }
    expect.emplace_back(lo, hi);
  }
  CHECK(spans_of(r.level.tiling) == expect);
  CHECK(r.report.congruent);
  CHECK(r.report.sandwich_violations == 0);
  CHECK(r.report.exact_violations == 0);
  CHECK(check_congruent(fine, r.level));
  // A tile centre stays the T* centre when it survives the merge.
  CHECK(r.level.tiling.tile_count() == 4);
  CHECK(r.level.tiling.window().core().size() == 400);
}

TEST_CASE("congruence check") {
  const auto w = zwin();
  const auto fine = intervals(w, even_cuts(-200, 200, 10));
  CHECK(check_congruent(fine, fine));
  CHECK(check_congruent(fine, intervals(w, {-200, 200})));
  CHECK(check_congruent(fine, intervals(w, {-200, -100, 50, 200})));
  auto shifted = even_cuts(-199, 191, 10);
  shifted.insert(shifted.begin(), -200);
  shifted.push_back(200);
  CHECK_FALSE(check_congruent(intervals(w, shifted), intervals(w, {-200, -100, 50, 200})));
  CHECK_FALSE(check_congruent(fine, intervals(w, {-200, -105, 200})));
}

TEST_CASE("lift delta") {
  const double d = lift_delta(0.3, 9, 25);
  CHECK(d < 0.15);
  CHECK(d < ben_delta(0.3, 9) / 26);
  CHECK(d > 0.999 * ben_delta(0.3, 9) / 26);
  CHECK(lift_delta(0.01, 1, 0) < 0.005);
}

TEST_CASE("normalization keeps unique partitions") {
  const auto w = zwin();
  const auto K = interval(kZ, -1, 1);
  const auto l1 = make_level(1, intervals(w, even_cuts(-200, 200, 10)), K, 0.5);
  const auto l2 = make_level(2, intervals(w, {-200, -120, -30, 100, 200}), K, 0.3);
  const auto n = normalize_masters({l1, l2});
  REQUIRE(n.levels.size() == 2);
  CHECK(n.levels[0].tiling == l1.tiling);
  CHECK(n.levels[1].tiling == l2.tiling);
  REQUIRE(n.table.masters.size() == 1);
  CHECK(n.table.masters[0].size() == l2.tiling.shapes().size());
  for (const auto& m : n.table.masters[0]) {
    const auto& S = l2.tiling.shapes()[*l2.tiling.shape_index(m.shape)].elements;
    CHECK(m.parts.size() * 10 == S.size());
  }
  CHECK(rederive(l2.tiling, n.table)[0] == l1.tiling);
}

TEST_CASE("normalization copies the first-seen partition") {
  const auto w = zwin();
  const auto K = interval(kZ, -1, 1);
  // Coarse: [0,20) and [40,60) share a shape; fine splits them 10+10 and 5+15.
  auto cuts_fine = even_cuts(-200, 0, 10);
  for (std::int64_t x : {10, 20, 30, 40, 45, 60}) cuts_fine.push_back(x);
  for (auto x = 70; x <= 200; x += 10) cuts_fine.push_back(x);
  std::vector<std::int64_t> cuts_coarse{-200, 0, 20, 40, 60, 200};
  const auto l1 = make_level(1, intervals(w, cuts_fine), K, 0.5);
  const auto l2 = make_level(2, intervals(w, cuts_coarse), K, 0.3);
  REQUIRE(check_congruent(l1, l2));
  const auto n = normalize_masters({l1, l2});
  auto expect_cuts = even_cuts(-200, 200, 10);
  CHECK(spans_of(n.levels[0].tiling) == spans_of(intervals(w, expect_cuts)));
  CHECK(n.levels[1].tiling == l2.tiling);
  CHECK(check_congruent(n.levels[0], n.levels[1]));
  // Shape preservation.
  for (const auto& s : n.levels[0].tiling.shapes()) {
    const auto i = l1.tiling.shape_index(s.id);
    REQUIRE(i.has_value());
    CHECK(l1.tiling.shapes()[*i].elements == s.elements);
  }
  CHECK_THROWS_AS(normalize_masters({l2, l1}), Error);
}

TEST_CASE("normalization collapses complexity inside coarse tiles") {
  const auto w = zwin();
  const auto K = interval(kZ, -1, 1);
  std::mt19937_64 rng(8);
  // Coarse tiles of length 20; each split at a random point.
  std::vector<std::int64_t> fine_cuts, coarse_cuts;
  for (std::int64_t x = -200; x < 200; x += 20) {
    coarse_cuts.push_back(x);
    fine_cuts.push_back(x);
    fine_cuts.push_back(x + 3 + static_cast<std::int64_t>(rng() % 14));
  }
  coarse_cuts.push_back(200);
  fine_cuts.push_back(200);
  const auto l1 = make_level(1, intervals(w, fine_cuts), K, 0.5);
  const auto l2 = make_level(2, intervals(w, coarse_cuts), K, 0.3);
  const auto n = normalize_masters({l1, l2});

  const auto E = interval(kZ, 0, 4);
  // Translates g with E g inside a single coarse tile: offsets 0..15 of each.
  std::vector<std::uint32_t> inside;
  for (std::int64_t x = -200; x < 200; ++x) {
    if (((x % 20) + 20) % 20 <= 15) inside.push_back(*w->locate(el({x})));
  }
  const auto before = block_count(to_pattern_field(l1.tiling), E, inside);
  const auto after = block_count(to_pattern_field(n.levels[0].tiling), E, inside);
  const std::size_t bound = l2.tiling.shapes().size() * 16;
  CHECK(after.distinct <= bound);
  CHECK(after.distinct <= before.distinct);
  CHECK(after.distinct <= 16);
  CHECK(before.distinct > 16);
}

TEST_CASE("small Z hierarchy end to end") {
  const auto g = kZ;
  std::vector<LevelParams> ps;
  for (auto [n0, eps] : {std::pair{9, 0.5}, std::pair{40, 0.3}}) {
    LevelParams p;
    p.K = interval(g, -1, 1);
    p.eps = eps;
    p.greedy.eps = 0.25;
    p.greedy.n0 = n0;
    p.greedy.shape_count = 3;
    p.gamma = 0.05;
    p.max_f_index = 400;
    ps.push_back(p);
  }
  const auto w = std::make_shared<const Window>(box_spec(g, 4000, default_margin(folner_set(g, 43))));
  const auto h = build_hierarchy(w, ps);
  REQUIRE(h.levels.size() == 2);
  for (const auto& r : h.reports) {
    CHECK(r.congruent);
    CHECK(r.exact_violations == 0);
    CHECK(r.sandwich_violations == 0);
    CHECK(r.exactify.matching_complete);
  }
  CHECK(check_congruent(h.levels[0], h.levels[1]));
  const auto n = normalize_masters(h.levels);
  CHECK(rederive(n.levels[1].tiling, n.table)[0] == n.levels[0].tiling);
  CHECK(audit_exact(n.levels[0].tiling, w->core_positions()).total() == 0);
}
