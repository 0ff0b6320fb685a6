#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "amtile/group.hpp"
#include "amtile/subset.hpp"

namespace testsupport {

inline amtile::Element el(std::initializer_list<std::int64_t> xs) {
  amtile::Element e;
  std::size_t i = 0;
  for (auto x : xs) e.v[i++] = x;
  return e;
}

inline amtile::Element random_element(std::mt19937_64& rng, const amtile::Group& g, std::int64_t span) {
  std::uniform_int_distribution<std::int64_t> d(-span, span);
  amtile::Element e;
  for (std::size_t i = 0; i < g.arity(); ++i) e.v[i] = d(rng);
  if (g.last_axis_cyclic()) {
    auto& r = e.v[g.arity() - 1];
    r = ((r % g.modulus()) + g.modulus()) % g.modulus();
  }
  return e;
}

inline amtile::FiniteSubset random_subset(std::mt19937_64& rng, const amtile::Group& g, std::size_t n,
                                          std::int64_t span) {
  std::vector<amtile::Element> xs;
  for (std::size_t i = 0; i < n; ++i) xs.push_back(random_element(rng, g, span));
  return amtile::FiniteSubset(g, xs);
}

inline amtile::FiniteSubset interval(const amtile::Group& g, std::int64_t lo, std::int64_t hi) {
  std::vector<amtile::Element> xs;
  for (auto x = lo; x <= hi; ++x) xs.push_back(el({x}));
  return amtile::FiniteSubset(g, xs);
}

inline amtile::FiniteSubset box2(const amtile::Group& g, std::int64_t x0, std::int64_t y0, std::int64_t w,
                                 std::int64_t h) {
  std::vector<amtile::Element> xs;
  for (auto x = x0; x < x0 + w; ++x)
    for (auto y = y0; y < y0 + h; ++y) xs.push_back(el({x, y}));
  return amtile::FiniteSubset(g, xs);
}

// Brute-force oracles: plain loops over elements, no runs or interval indexes.
inline std::vector<amtile::Element> naive_product(const amtile::FiniteSubset& K, const amtile::FiniteSubset& T) {
  std::vector<amtile::Element> out;
  for (const auto& k : K)
    for (const auto& t : T) out.push_back(K.group().mul(k, t));
  const amtile::FiniteSubset s(K.group(), out);
  return {s.begin(), s.end()};
}

// Least r with (1 - eps/2)^r < eps by direct powering.
inline int powering_oracle(double eps) {
  for (int r = 1;; ++r) {
    if (std::pow(1.0 - eps / 2.0, r) < eps) return r;
  }
}

// Exhaustive maximum matching over subsets of the right side (bitmask DP in
// left order). Right side at most ~16 vertices.
inline std::size_t brute_max_matching(const std::vector<std::vector<int>>& adj, std::size_t n_right) {
  std::vector<int> best(std::size_t{1} << n_right, -1);
  best[0] = 0;
  for (const auto& nbrs : adj) {
    auto next = best;
    for (std::size_t mask = 0; mask < best.size(); ++mask) {
      if (best[mask] < 0) continue;
      for (int v : nbrs) {
        if (mask & (std::size_t{1} << v)) continue;
        const auto m2 = mask | (std::size_t{1} << v);
        next[m2] = std::max(next[m2], best[mask] + 1);
      }
    }
    best = std::move(next);
  }
  return static_cast<std::size_t>(*std::max_element(best.begin(), best.end()));
}

// |K| distinct elements drawn from the radius-2 ball.
inline amtile::FiniteSubset random_K(std::mt19937_64& rng, const amtile::Group& g, std::size_t k) {
  const auto b = amtile::ball(g, 2);
  std::vector<amtile::Element> pool(b.begin(), b.end());
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(std::min(k, pool.size()));
  return amtile::FiniteSubset(g, pool);
}

// Random (K, delta)-invariant set: a box on the non-cyclic axes (full cyclic
// factor) with a few points removed and a few stray points added nearby.
// The box grows until the invariance condition holds exactly.
inline amtile::FiniteSubset random_invariant_set(std::mt19937_64& rng, const amtile::Group& g,
                                                 const amtile::FiniteSubset& K, double delta) {
  const std::size_t free_axes = g.last_axis_cyclic() ? g.arity() - 1 : g.arity();
  const std::int64_t q = g.last_axis_cyclic() ? g.modulus() : 1;
  std::uniform_real_distribution<double> aspect(0.6, 1.4);
  std::vector<double> stretch(free_axes);
  for (auto& a : stretch) a = aspect(rng);
  for (auto L = std::max<std::int64_t>(4, static_cast<std::int64_t>(0.5 / delta));; L = L * 3 / 2 + 1) {
    std::vector<std::int64_t> side(free_axes);
    std::size_t n = static_cast<std::size_t>(q);
    for (std::size_t i = 0; i < free_axes; ++i) {
      side[i] = std::max<std::int64_t>(2, static_cast<std::int64_t>(static_cast<double>(L) * stretch[i]));
      n *= static_cast<std::size_t>(side[i]);
    }
    std::vector<amtile::Element> xs;
    xs.reserve(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
      amtile::Element e;
      std::size_t r = idx;
      for (std::size_t i = 0; i < free_axes; ++i) {
        e.v[i] = static_cast<std::int64_t>(r % static_cast<std::size_t>(side[i]));
        r /= static_cast<std::size_t>(side[i]);
      }
      if (q > 1) e.v[free_axes] = static_cast<std::int64_t>(r);
      xs.push_back(e);
    }
    const auto budget = static_cast<std::size_t>(delta * static_cast<double>(n) / (4.0 * static_cast<double>(K.size() + 1)));
    const std::size_t holes = budget ? rng() % (budget + 1) : 0;
    for (std::size_t i = 0; i < holes && !xs.empty(); ++i) {
      const auto j = rng() % xs.size();
      xs[j] = xs.back();
      xs.pop_back();
    }
    for (std::size_t i = 0; i < holes; ++i) {
      amtile::Element e;
      for (std::size_t a = 0; a < free_axes; ++a) e.v[a] = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(side[a] + 6)) - 3;
      if (q > 1) e.v[free_axes] = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(q));
      xs.push_back(e);
    }
    amtile::FiniteSubset T(g, std::move(xs));
    if (amtile::is_invariant(T, K, delta)) return T;
  }
}

// T' with |T' △ T| = m: m1 points of T removed, m - m1 fresh points added
// within distance 3 of T's bounding box.
inline amtile::FiniteSubset perturb(std::mt19937_64& rng, const amtile::FiniteSubset& T, std::size_t m) {
  const auto& g = T.group();
  const std::size_t free_axes = g.last_axis_cyclic() ? g.arity() - 1 : g.arity();
  amtile::Element lo, hi;
  for (std::size_t a = 0; a < free_axes; ++a) {
    lo.v[a] = INT64_MAX;
    hi.v[a] = INT64_MIN;
  }
  for (const auto& e : T) {
    for (std::size_t a = 0; a < free_axes; ++a) {
      lo.v[a] = std::min(lo.v[a], e.v[a]);
      hi.v[a] = std::max(hi.v[a], e.v[a]);
    }
  }
  const std::size_t removed = m ? rng() % (m + 1) : 0;
  std::vector<amtile::Element> xs(T.begin(), T.end());
  std::shuffle(xs.begin(), xs.end(), rng);
  xs.resize(xs.size() - std::min(removed, xs.size()));
  std::size_t added = 0;
  while (added < m - removed) {
    amtile::Element e;
    for (std::size_t a = 0; a < free_axes; ++a)
      e.v[a] = lo.v[a] - 3 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi.v[a] - lo.v[a] + 7));
    if (g.last_axis_cyclic()) e.v[free_axes] = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(g.modulus()));
    if (T.contains(e) || std::find(xs.end() - static_cast<std::ptrdiff_t>(added), xs.end(), e) != xs.end()) continue;
    xs.push_back(e);
    ++added;
  }
  return amtile::FiniteSubset(g, std::move(xs));
}

}  // namespace testsupport
