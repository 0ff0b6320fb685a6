#include "doctest.h"
#include "support.hpp"

#include <random>

#include "amtile/exactify.hpp"

using namespace amtile;
using testsupport::el;
using testsupport::interval;

namespace {

std::vector<std::uint32_t> positions(const Window& w, const FiniteSubset& s) {
  std::vector<std::uint32_t> out;
  for (const auto& e : s) out.push_back(*w.locate(e));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("marked subsets") {
  const auto z = Group::zd(1);
  const auto m = choose_marked_subsets(Shape{0, interval(z, -50, 49)}, 0.02);
  CHECK(m.A == FiniteSubset(z, {el({0}), el({-1}), el({1}), el({-2})}));
  CHECK(m.A_prime == FiniteSubset(z, {el({2}), el({-3}), el({3}), el({-4})}));
  CHECK(choose_marked_subsets(Shape{0, interval(z, 0, 9)}, 0.05).A.size() == 1);
  CHECK_THROWS_AS(choose_marked_subsets(Shape{0, interval(z, 0, 9)}, 0.4), Error);
}

TEST_CASE("hall_match examples") {
  const auto z = Group::zd(1);
  const auto F = interval(z, -1, 1);
  const auto empty = hall_match(FiniteSubset(z), FiniteSubset(z, {el({1})}), F);
  CHECK(empty.complete);
  CHECK(empty.pairs.empty());
  const FiniteSubset B(z, {el({0}), el({10}), el({20})});
  const FiniteSubset A(z, {el({1}), el({11}), el({21})});
  const auto m = hall_match(B, A, F);
  CHECK(m.complete);
  CHECK(m.degree_condition);
  REQUIRE(m.pairs.size() == 3);
  for (const auto& [b, a] : m.pairs) CHECK(a[0] == b[0] + 1);
}

TEST_CASE("hall_match reports a Hall violator") {
  const auto z = Group::zd(1);
  const FiniteSubset B(z, {el({0}), el({1}), el({2})});
  const FiniteSubset A(z, {el({1}), el({2})});
  const auto m = hall_match(B, A, interval(z, -1, 1));
  CHECK_FALSE(m.complete);
  CHECK(m.pairs.size() == 2);
  CHECK(m.deficient.size() == m.deficient_neighbors.size() + 1);
}

TEST_CASE("hopcroft_karp matches the exhaustive maximum") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t nb = rng() % 13;
    const std::size_t na = rng() % 13;
    std::vector<std::vector<int>> adj(nb);
    const double density = 0.05 + 0.5 * static_cast<double>(rng() % 100) / 100.0;
    for (auto& nbrs : adj)
      for (std::size_t v = 0; v < na; ++v)
        if (static_cast<double>(rng() % 1000) / 1000.0 < density) nbrs.push_back(static_cast<int>(v));
    const auto m = hopcroft_karp(na, adj);
    CHECK(m.size == testsupport::brute_max_matching(adj, na));
    for (std::size_t u = 0; u < nb; ++u) {
      if (m.mate_left[u] < 0) continue;
      CHECK(m.mate_right[static_cast<std::size_t>(m.mate_left[u])] == static_cast<int>(u));
      CHECK(std::find(adj[u].begin(), adj[u].end(), m.mate_left[u]) != adj[u].end());
    }
    if (m.size < nb) {
      int first = 0;
      while (m.mate_left[first] >= 0) ++first;
      const auto [left, right] = hall_violator(m, adj, first);
      std::vector<int> nbr;
      for (int u : left) nbr.insert(nbr.end(), adj[u].begin(), adj[u].end());
      std::sort(nbr.begin(), nbr.end());
      nbr.erase(std::unique(nbr.begin(), nbr.end()), nbr.end());
      CHECK(nbr == right);
      CHECK(right.size() < left.size());
    }
  }
}

TEST_CASE("regular instances are matched completely") {
  std::mt19937_64 rng(43);
  const auto z2 = Group::zd(2);
  const auto F = ball(z2, 1);
  for (int trial = 0; trial < 40; ++trial) {
    // B and A = B shifted by a fixed step: every b has the same neighbour pattern.
    const auto B = testsupport::random_subset(rng, z2, 1 + rng() % 10, 6);
    const auto A = B.right_translate(el({1, 0}));
    const auto m = hall_match(B, A, F);
    if (m.degree_condition) CHECK(m.complete);
  }
}

TEST_CASE("tile matchings are translation equivariant") {
  std::mt19937_64 rng(47);
  for (const auto& g : {Group::zd(2), Group::heis3()}) {
    const auto F = folner_set(g, 1);
    for (int trial = 0; trial < 20; ++trial) {
      const auto B = testsupport::random_subset(rng, g, 1 + rng() % 8, 2);
      const auto A = testsupport::random_subset(rng, g, 1 + rng() % 10, 2);
      const auto c1 = testsupport::random_element(rng, g, 30);
      const auto c2 = testsupport::random_element(rng, g, 30);
      const auto p1 = match_in_tile(g, c1, B.right_translate(c1), A.right_translate(c1), F);
      const auto p2 = match_in_tile(g, c2, B.right_translate(c2), A.right_translate(c2), F);
      REQUIRE(p1.size() == p2.size());
      const Element shift = g.mul(g.inv(c1), c2);
      for (std::size_t i = 0; i < p1.size(); ++i) {
        CHECK(g.mul(p1[i].first, shift) == p2[i].first);
        CHECK(g.mul(p1[i].second, shift) == p2[i].second);
      }
    }
  }
}

TEST_CASE("audit_exact") {
  const auto z = Group::zd(1);
  auto W = std::make_shared<Window>(folner_spec(z, 20, FiniteSubset::identity(z)));
  const auto region = positions(*W, interval(z, 0, 19));
  const Quasitiling exact(W, {Shape{0, interval(z, 0, 4)}}, {FiniteSubset(z, {el({0}), el({5}), el({10}), el({15})})});
  CHECK(audit_exact(exact, region).total() == 0);
  const Quasitiling missing(W, {Shape{0, interval(z, 0, 4)}}, {FiniteSubset(z, {el({0}), el({5}), el({15})})});
  CHECK(audit_exact(missing, region).uncovered == 5);
  const Quasitiling overlap(W, {Shape{0, interval(z, 0, 4)}, Shape{1, interval(z, 0, 5)}},
                            {FiniteSubset(z, {el({0}), el({10}), el({15})}), FiniteSubset(z, {el({4})})});
  const auto a = audit_exact(overlap, region);
  CHECK(a.multiply_covered == 1);
  CHECK(a.uncovered == 0);
}

TEST_CASE("exactify of an exact input is the identity") {
  const auto z = Group::zd(1);
  auto W = std::make_shared<Window>(folner_spec(z, 20, FiniteSubset::identity(z)));
  const Quasitiling full(W, {Shape{0, FiniteSubset::identity(z)}}, {W->universe()});
  ExactifyParams p;
  p.gamma = 0.05;
  p.K = interval(z, -1, 1);
  p.eps = 0.9;
  const auto r = exactify(full, p);
  CHECK(r.tiling == full);
  CHECK(r.report.violations == 0);
  CHECK(r.report.uncovered == 0);
}

TEST_CASE("gap points are absorbed by nearby tiles") {
  const auto z = Group::zd(1);
  const auto U = interval(z, 0, 32);
  auto win = std::make_shared<Window>(U, FiniteSubset::identity(z));
  const Quasitiling qt(win, {Shape{0, interval(z, 0, 9)}}, {FiniteSubset(z, {el({0}), el({10}), el({23})})});
  ExactifyParams p;
  p.gamma = 0.1;
  p.K = interval(z, -1, 1);
  p.eps = 0.5;
  p.displacement = interval(z, -5, 5);
  const auto r = exactify(qt, p);
  CHECK(r.report.uncovered == 3);
  CHECK(r.report.violations == 0);
  CHECK(r.report.matching_complete);
  CHECK(r.report.growth_bound_met);
  std::size_t absorbed = 0;
  for (const auto& pv : r.provenance) {
    for (auto pos : pv.absorbed) {
      CHECK(std::abs(win->at(pos)[0] - pv.source_center[0]) <= 9 + 5);
      ++absorbed;
    }
  }
  CHECK(absorbed == 3);
  CHECK(audit_exact(r.tiling, positions(*win, U)).total() == 0);
}

TEST_CASE("growth and shape budget on greedy pipelines") {
  struct Case {
    Group g;
    int side, n0, count;
    double gamma;
  };
  for (const auto& c : {Case{Group::zd(2), 200, 10, 3, 0.02}, Case{Group::zd(2), 120, 7, 3, 0.05}}) {
    GreedyParams gp;
    gp.eps = 0.25;
    gp.n0 = c.n0;
    gp.shape_count = c.count;
    const auto W = std::make_shared<const Window>(
        box_spec(c.g, c.side, default_margin(folner_set(c.g, c.n0 + c.count))));
    const auto gr = greedy_quasitile(W, gp);
    const auto dq = disjointify(gr.qt, gr.witness);
    ExactifyParams p;
    p.gamma = c.gamma;
    p.K = ball(c.g, 1);
    p.eps = 0.5;
    p.max_f_index = 200;
    const auto r = exactify(dq, p);
    CHECK(r.report.violations == 0);
    REQUIRE(r.report.conformant());
    REQUIRE(r.report.uncovered > 0);
    const auto F = folner_set(c.g, r.report.f_index);
    for (std::size_t i = 0; i < r.tiling.tile_count(); ++i) {
      const auto& pv = r.provenance[i];
      // Source tile T° in the disjointified input.
      std::optional<std::size_t> src;
      for (std::size_t j = 0; j < dq.tile_count() && !src; ++j) {
        if (dq.tiles()[j].center == pv.source_center) src = j;
      }
      REQUIRE(src.has_value());
      const auto& before = dq.tile_points(*src);
      const auto after = r.tiling.tile_points(i).size();
      CHECK(after == before.size() + pv.absorbed.size());
      CHECK(static_cast<double>(after) <= (1 + 6 * c.gamma) * static_cast<double>(before.size()));
      std::vector<Element> els;
      for (auto q : before) els.push_back(W->at(q));
      const IntervalIndex budget(set_product(F, FiniteSubset(c.g, els)));
      for (auto q : pv.absorbed) CHECK(budget.contains(W->at(q)));
    }
  }
}
