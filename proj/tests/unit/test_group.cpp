#include "doctest.h"
#include "support.hpp"

#include <random>
#include <set>

using namespace amtile;
using testsupport::el;

TEST_CASE("Z2 and Heisenberg products") {
  const auto z2 = Group::zd(2);
  CHECK(z2.mul(el({1, 2}), el({3, 4})) == el({4, 6}));
  const auto h = Group::heis3();
  CHECK(h.mul(el({1, 0, 0}), el({0, 1, 0})) == el({1, 1, 1}));
  CHECK(h.mul(el({0, 1, 0}), el({1, 0, 0})) == el({1, 1, 0}));
  CHECK(h.mul(h.identity(), el({3, -2, 7})) == el({3, -2, 7}));
}

TEST_CASE("cyclic factor wraps") {
  const auto g = Group::zd_x_zq(1, 3);
  CHECK(g.mul(el({1, 2}), el({0, 2})) == el({1, 1}));
  CHECK(g.inv(el({4, 1})) == el({-4, 2}));
  CHECK(g.order(el({0, 1})) == 3u);
  CHECK_FALSE(g.order(el({1, 0})).has_value());
  CHECK_THROWS_AS(g.check(el({0, 3})), Error);
}

TEST_CASE("group axioms on random triples") {
  std::mt19937_64 rng(7);
  for (const auto& g : {Group::zd(1), Group::zd(3), Group::heis3(), Group::zd_x_zq(2, 5)}) {
    for (int i = 0; i < 300; ++i) {
      const auto a = testsupport::random_element(rng, g, 20);
      const auto b = testsupport::random_element(rng, g, 20);
      const auto c = testsupport::random_element(rng, g, 20);
      CHECK(g.mul(g.mul(a, b), c) == g.mul(a, g.mul(b, c)));
      CHECK(g.mul(a, g.inv(a)) == g.identity());
      CHECK(g.mul(g.inv(a), a) == g.identity());
      CHECK(g.mul(a, g.identity()) == a);
    }
  }
}

TEST_CASE("pow matches repeated multiplication") {
  const auto h = Group::heis3();
  const auto g = el({2, -1, 3});
  Element acc = h.identity();
  for (int k = 0; k <= 6; ++k) {
    CHECK(h.pow(g, k) == acc);
    CHECK(h.pow(g, -k) == h.inv(acc));
    acc = h.mul(acc, g);
  }
}

TEST_CASE("canonical enumeration is a bijection onto an initial segment") {
  for (const auto& g : {Group::zd(1), Group::zd(2), Group::zd(3), Group::heis3(), Group::zd_x_zq(1, 3),
                        Group::zd_x_zq(2, 2)}) {
    std::set<std::vector<std::int64_t>> seen;
    Element prev;
    for (std::uint64_t i = 0; i < 3000; ++i) {
      const auto e = g.element_at(i);
      CHECK(g.valid(e));
      CHECK(g.index_of(e) == i);
      CHECK(seen.insert(g.coords(e)).second);
      if (i > 0) CHECK(g.less(prev, e));
      prev = e;
    }
  }
}

TEST_CASE("index order agrees with less on random pairs") {
  std::mt19937_64 rng(11);
  for (const auto& g : {Group::zd(2), Group::heis3(), Group::zd_x_zq(1, 4)}) {
    for (int i = 0; i < 500; ++i) {
      const auto a = testsupport::random_element(rng, g, 30);
      const auto b = testsupport::random_element(rng, g, 30);
      CHECK(g.less(a, b) == (g.index_of(a) < g.index_of(b)));
      CHECK(g.element_at(g.index_of(a)) == a);
    }
  }
}

TEST_CASE("Z enumeration spirals outward") {
  const auto z = Group::zd(1);
  CHECK(z.element_at(0) == el({0}));
  CHECK(z.element_at(1) == el({-1}));
  CHECK(z.element_at(2) == el({1}));
  CHECK(z.element_at(3) == el({-2}));
}

TEST_CASE("Heisenberg shell uses the square root of the centre") {
  const auto h = Group::heis3();
  CHECK(h.shell(el({0, 0, 4})) == 2);
  CHECK(h.shell(el({0, 0, 5})) == 3);
  CHECK(h.shell(el({1, -1, 1})) == 1);
}

TEST_CASE("parsing") {
  CHECK(Group::parse("Z2") == Group::zd(2));
  CHECK(Group::parse("Heis3") == Group::heis3());
  CHECK(Group::parse("Z1xZ3") == Group::zd_x_zq(1, 3));
  CHECK_THROWS_AS(Group::parse("Q7"), Error);
  const auto g = Group::zd(2);
  CHECK(g.parse_element("(1,-2)") == el({1, -2}));
  CHECK(g.parse_element("[3, 4]") == el({3, 4}));
  CHECK(g.format(el({3, -4})) == "(3,-4)");
  CHECK_THROWS_AS(g.parse_element("(1,2,3)"), Error);
}
