#include "amtile/freeaction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace amtile {

namespace {

constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

// A coordinate of g^k h that moves linearly in k, with its slope.
std::pair<std::size_t, std::int64_t> linear_axis(const Group& G, const Element& g) {
  const std::size_t n = G.kind() == GroupKind::Heis3 ? 3 : static_cast<std::size_t>(G.dim());
  for (std::size_t i = 0; i < n; ++i) {
    if (g[i] != 0) return {i, g[i]};
  }
  throw Error("coset section: element has finite order");
}

}  // namespace

CosetSection coset_section(const Window& W, const Element& g) {
  const Group& G = W.group();
  G.check(g);
  CosetSection s;
  s.g = g;
  s.order = G.order(g);
  s.power.assign(W.size(), 0);
  s.rep.assign(W.size(), kUnset);

  std::int64_t lo = 0, hi = 0;
  std::size_t axis = 0;
  std::int64_t slope = 0;
  if (!s.order) {
    std::tie(axis, slope) = linear_axis(G, g);
    lo = std::numeric_limits<std::int64_t>::max();
    hi = std::numeric_limits<std::int64_t>::min();
    for (const auto& e : W.universe()) {
      lo = std::min(lo, e[axis]);
      hi = std::max(hi, e[axis]);
    }
  }

  std::vector<std::pair<std::int64_t, std::uint32_t>> members;
  for (std::uint32_t pos = 0; pos < W.size(); ++pos) {
    if (s.rep[pos] != kUnset) continue;
    const Element h = W.at(pos);
    std::int64_t k0 = 0, k1 = 0;
    if (s.order) {
      k1 = static_cast<std::int64_t>(*s.order) - 1;
    } else {
      const std::int64_t a = slope > 0 ? ceil_div(lo - h[axis], slope) : ceil_div(hi - h[axis], slope);
      const std::int64_t b = slope > 0 ? floor_div(hi - h[axis], slope) : floor_div(lo - h[axis], slope);
      k0 = a;
      k1 = b;
    }
    members.clear();
    Element x = G.mul(G.pow(g, k0), h);
    for (std::int64_t k = k0; k <= k1; ++k, x = G.mul(g, x)) {
      if (const auto p = W.locate(x)) members.emplace_back(k, *p);
    }
    // Positions are canonical ranks, so the smallest is the section point.
    const auto best = *std::min_element(members.begin(), members.end(),
                                        [](const auto& a, const auto& b) { return a.second < b.second; });
    for (const auto& [k, p] : members) {
      std::int64_t pw = k - best.first;
      if (s.order) {
        const auto q = static_cast<std::int64_t>(*s.order);
        pw = ((pw % q) + q) % q;
      }
      s.power[p] = pw;
      s.rep[p] = best.second;
    }
    ++s.cosets;
  }
  return s;
}

PatternField coset_parity_field(WindowPtr window, const Element& g) {
  if (window->group().order(g)) throw Error("parity field: g must have infinite order");
  const auto s = coset_section(*window, g);
  PatternField x{window, {"+1", "-1"}, std::vector<std::uint32_t>(window->size())};
  for (std::size_t p = 0; p < x.size(); ++p) x.values[p] = (s.power[p] % 2 == 0) ? 0 : 1;
  return x;
}

std::size_t alternation_violations(const PatternField& x, const Element& g) {
  x.validate();
  const Window& W = *x.window;
  std::size_t bad = 0;
  for (std::uint32_t p = 0; p < W.size(); ++p) {
    const auto q = W.locate(W.group().mul(g, W.at(p)));
    if (q && x.values[*q] == x.values[p]) ++bad;
  }
  return bad;
}

FiniteOrderAudit audit_finite_order(const PatternField& x, const Element& g) {
  x.validate();
  const Window& W = *x.window;
  const Group& G = W.group();
  if (!G.order(g)) throw Error("finite-order audit: g has infinite order");
  const auto s = coset_section(W, g);
  const auto q = *s.order;
  std::vector<std::uint8_t> in_core(W.size(), 0);
  for (auto p : W.core_positions()) in_core[p] = 1;

  std::vector<std::vector<std::uint32_t>> by_rep(W.size());
  for (std::uint32_t p = 0; p < W.size(); ++p) by_rep[s.rep[p]].push_back(p);
  FiniteOrderAudit a;
  for (const auto& coset : by_rep) {
    if (coset.size() != q) continue;
    if (!std::all_of(coset.begin(), coset.end(), [&](auto p) { return in_core[p] != 0; })) continue;
    ++a.cosets;
    std::size_t nonzero = 0;
    bool fixed = true;
    for (auto p : coset) {
      const auto gp = *W.locate(G.mul(g, W.at(p)));
      if (x.values[p] != 0) {
        ++nonzero;
        if (x.values[gp] != 0) ++a.shifted_zero_fails;
      }
      if (x.values[gp] != x.values[p]) fixed = false;
    }
    if (nonzero == 1) ++a.one_center;
    if (fixed) ++a.fixed_cosets;
  }
  return a;
}

FiniteOrderResult finite_order_free_field(WindowPtr window, const Element& g, const std::vector<LevelParams>& upper) {
  const Group& G = window->group();
  if (G.kind() != GroupKind::ZdxZq) throw Error("finite-order field: needs a Zd x Zq group");
  const auto order = G.order(g);
  if (!order) throw Error("finite-order field: g has infinite order");
  if (*order < 2) throw Error("finite-order field: g is the identity");
  if (upper.empty()) throw Error("finite-order field: hierarchy depth must be at least 2");

  std::vector<Element> S;
  Element x = G.identity();
  for (std::uint64_t i = 0; i < *order; ++i, x = G.mul(x, g)) S.push_back(x);
  const FiniteSubset shape(G, S);

  const auto sec = coset_section(*window, g);
  std::vector<std::size_t> size(window->size(), 0);
  for (std::uint32_t p = 0; p < window->size(); ++p) ++size[sec.rep[p]];
  std::vector<Element> centers;
  for (std::uint32_t p = 0; p < window->size(); ++p) {
    if (sec.rep[p] == p && size[p] == *order) centers.push_back(window->at(p));
  }
  Quasitiling cosets(window, {Shape{0, shape}}, {FiniteSubset(G, centers)});
  if (audit_exact(cosets, window->core_positions()).total() != 0) {
    throw Error("finite-order field: cosets do not tile the core");
  }

  std::vector<TilingLevel> levels{make_level(1, std::move(cosets), FiniteSubset::identity(G), 1.0)};
  std::vector<LevelReport> reports;
  for (const auto& p : upper) {
    auto r = lift_level(levels.back(), p);
    levels.push_back(std::move(r.level));
    reports.push_back(r.report);
  }
  auto norm = normalize_masters(levels);
  auto field = to_pattern_field(norm.levels.front().tiling);
  auto audit = audit_finite_order(field, g);
  return FiniteOrderResult{std::move(field), std::move(norm.levels), std::move(norm.table), std::move(reports), audit};
}

ProductAudit product_free_audit(const std::vector<FreeComponent>& components, const std::vector<FiniteSubset>& probes) {
  if (components.empty()) throw Error("product audit: no components");
  if (probes.empty()) throw Error("product audit: no probes");
  ProductAudit out;
  out.pass = true;
  std::vector<double> rate_sum(probes.size(), 0.0);
  for (const auto& c : components) {
    const auto& x = c.field;
    x.validate();
    const Window& W = *x.window;
    const Group& G = W.group();
    const auto s = coset_section(W, c.g);
    ComponentAudit a;
    a.g = c.g;
    std::vector<std::int8_t> state(W.size(), -1);  // per fragment: -1 unseen, 1 fixed so far, 0 broken
    for (std::uint32_t p = 0; p < W.size(); ++p) {
      const auto q = W.locate(G.mul(c.g, W.at(p)));
      if (!q) continue;
      auto& st = state[s.rep[p]];
      const bool same = x.values[*q] == x.values[p];
      if (!same) ++a.differing;
      st = (st == -1) ? (same ? 1 : 0) : (st == 1 && same ? 1 : 0);
    }
    for (auto st : state) {
      if (st == -1) continue;
      ++a.fragments;
      if (st == 1) ++a.fixed;
    }
    const auto rows = complexity_table(x, probes);
    a.estimate = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rate_sum[i] += rows[i].rate;
      a.estimate = std::min(a.estimate, rows[i].rate);
    }
    a.pass = a.fixed == 0 && a.fragments > 0;
    out.pass = out.pass && a.pass;
    out.sum_estimates += a.estimate;
    out.components.push_back(a);
  }
  PatternField joined = components.front().field;
  for (std::size_t i = 1; i < components.size(); ++i) joined = join_fields(joined, components[i].field);
  const auto rows = complexity_table(joined, probes);
  out.product_estimate = std::numeric_limits<double>::infinity();
  out.subadditive = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.product_estimate = std::min(out.product_estimate, rows[i].rate);
    if (rows[i].rate > rate_sum[i] + 1e-12) out.subadditive = false;
  }
  return out;
}

}  // namespace amtile
