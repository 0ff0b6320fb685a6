#include "doctest.h"
#include "support.hpp"

#include <random>

#include "amtile/freeaction.hpp"

using namespace amtile;
using testsupport::el;

namespace {

WindowPtr win(const WindowSpec& s) { return std::make_shared<const Window>(s); }

std::vector<FiniteSubset> power_probes(const Group& G, const Element& g, int n_max) {
  std::vector<FiniteSubset> out;
  std::vector<Element> xs;
  Element x = g;
  for (int n = 1; n <= n_max; ++n, x = G.mul(g, x)) {
    xs.push_back(x);
    out.emplace_back(G, xs);
  }
  return out;
}

std::vector<LevelParams> upper_levels(const Group& G, int n0) {
  LevelParams p;
  p.K = ball(G, 1);
  p.eps = 0.5;
  p.greedy.eps = 0.25;
  p.greedy.n0 = n0;
  p.greedy.shape_count = 3;
  p.gamma = 0.05;
  p.max_f_index = 300;
  return {p};
}

}  // namespace

TEST_CASE("parity field on Z alternates strictly") {
  const Group z = Group::zd(1);
  const auto w = win(folner_spec(z, 100, FiniteSubset::identity(z)));
  const auto x = coset_parity_field(w, el({1}));
  for (std::uint32_t p = 0; p < w->size(); ++p) {
    const auto h = w->at(p)[0];
    CHECK(x.values[p] == static_cast<std::uint32_t>(((h % 2) + 2) % 2));
  }
  CHECK(alternation_violations(x, el({1})) == 0);
  for (const auto& F : power_probes(z, el({1}), 20)) CHECK(block_count(x, F).distinct == 2);
  CHECK_THROWS_AS(coset_parity_field(w, el({0})), Error);
}

TEST_CASE("parity field on Z2 along rows") {
  const Group z2 = Group::zd(2);
  const auto w = win(folner_spec(z2, 20, FiniteSubset::identity(z2)));
  const auto s = coset_section(*w, el({1, 0}));
  CHECK(s.cosets == 41);
  const auto x = coset_parity_field(w, el({1, 0}));
  for (std::uint32_t p = 0; p < w->size(); ++p) {
    const auto h = w->at(p);
    // Section point of row y is (-|y|, y), the first of its shell.
    CHECK(w->at(s.rep[p]) == el({-std::abs(h[1]), h[1]}));
    CHECK(s.power[p] == h[0] + std::abs(h[1]));
    CHECK(x.values[p] == static_cast<std::uint32_t>((h[0] + std::abs(h[1])) % 2 == 0 ? 0 : 1));
  }
  CHECK(alternation_violations(x, el({1, 0})) == 0);
  for (const auto& F : power_probes(z2, el({1, 0}), 20)) CHECK(block_count(x, F).distinct == 2);
}

TEST_CASE("coset sections are exact") {
  std::mt19937_64 rng(4);
  const Group h3 = Group::heis3();
  const auto w = win(folner_spec(h3, 3, FiniteSubset::identity(h3)));
  for (const auto& g : {el({1, 0, 0}), el({1, 1, 0}), el({0, 0, 1}), el({0, -2, 3})}) {
    const auto s = coset_section(*w, g);
    for (std::uint32_t p = 0; p < w->size(); ++p) {
      CHECK(h3.mul(h3.pow(g, s.power[p]), w->at(s.rep[p])) == w->at(p));
      const auto q = w->locate(h3.mul(g, w->at(p)));
      if (q) {
        CHECK(s.rep[*q] == s.rep[p]);
        CHECK(s.power[*q] == s.power[p] + 1);
      }
    }
    CHECK(alternation_violations(coset_parity_field(w, g), g) == 0);
  }
  const Group zq = Group::zd_x_zq(1, 3);
  const auto wq = win(folner_spec(zq, 5, FiniteSubset::identity(zq)));
  const auto s = coset_section(*wq, el({0, 1}));
  CHECK(s.order == 3u);
  CHECK(s.cosets == 11);
  CHECK_THROWS_AS(coset_parity_field(wq, el({0, 1})), Error);
}

TEST_CASE("finite-order fields on Z x Z/q") {
  for (std::int64_t q : {2, 3}) {
    const Group G = Group::zd_x_zq(1, q);
    const auto w = win(box_spec(G, 3000, default_margin(folner_set(G, 43))));
    const auto r = finite_order_free_field(w, el({0, 1}), upper_levels(G, 40));
    CHECK(r.audit.cosets > 2000);
    CHECK(r.audit.pass());
    CHECK(r.audit.one_center == r.audit.cosets);
    CHECK(r.audit.fixed_cosets == 0);
    REQUIRE(r.levels.size() == 2);
    CHECK(r.levels[0].tiling.shapes().size() == 1);
    CHECK(r.levels[0].tiling.shapes()[0].elements.size() == static_cast<std::size_t>(q));
    CHECK(check_congruent(r.levels[0], r.levels[1]));
    for (const auto& rep : r.reports) CHECK(rep.exactify.matching_complete);
  }
  const Group G = Group::zd_x_zq(1, 2);
  const auto w = win(box_spec(G, 200, FiniteSubset::identity(G)));
  CHECK_THROWS_AS(finite_order_free_field(w, el({1, 0}), upper_levels(G, 5)), Error);
  CHECK_THROWS_AS(finite_order_free_field(w, el({0, 1}), {}), Error);
  CHECK_THROWS_AS(finite_order_free_field(win(box_spec(Group::zd(1), 50, FiniteSubset::identity(Group::zd(1)))),
                                          el({1}), upper_levels(Group::zd(1), 5)),
                  Error);
}

TEST_CASE("finite-order audit catches a fixed field") {
  const Group G = Group::zd_x_zq(1, 2);
  const auto w = win(box_spec(G, 100, FiniteSubset::identity(G)));
  auto x = constant_field(w);
  x.alphabet.push_back("S0");
  auto a = audit_finite_order(x, el({0, 1}));
  CHECK(a.cosets == 100);
  CHECK(a.fixed_cosets == 100);
  CHECK(a.one_center == 0);
  for (std::uint32_t p = 0; p < w->size(); ++p) x.values[p] = w->at(p)[1] == 0 ? 1 : 0;
  a = audit_finite_order(x, el({0, 1}));
  CHECK(a.pass());
}

TEST_CASE("product audit") {
  const Group z2 = Group::zd(2);
  const auto w = win(folner_spec(z2, 25, FiniteSubset::identity(z2)));
  const std::vector<FiniteSubset> probes{folner_set(z2, 1), folner_set(z2, 2)};
  std::vector<FreeComponent> cs{{el({1, 0}), coset_parity_field(w, el({1, 0}))},
                                {el({0, 1}), coset_parity_field(w, el({0, 1}))},
                                {el({1, 1}), coset_parity_field(w, el({1, 1}))}};
  auto a = product_free_audit(cs, probes);
  CHECK(a.pass);
  CHECK(a.subadditive);
  for (const auto& c : a.components) {
    CHECK(c.fixed == 0);
    CHECK(c.fragments > 0);
  }
  CHECK(a.product_estimate <= a.sum_estimates + 1e-12);

  cs[1].field = constant_field(w);
  a = product_free_audit(cs, probes);
  CHECK_FALSE(a.pass);
  CHECK(a.components[0].pass);
  CHECK_FALSE(a.components[1].pass);
  CHECK(a.components[1].fixed == a.components[1].fragments);
  CHECK(a.components[2].pass);
}
