#include "amtile/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace amtile {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

// Owning tile per position; returns false on overlap.
bool owners(const Quasitiling& t, std::vector<std::uint32_t>& out) {
  out.assign(t.window().size(), kNone);
  for (std::size_t i = 0; i < t.tile_count(); ++i) {
    for (auto p : t.tile_points(i)) {
      if (out[p] != kNone) return false;
      out[p] = static_cast<std::uint32_t>(i);
    }
  }
  return true;
}

FiniteSubset union_of_shapes(const Quasitiling& t) {
  std::vector<Element> els;
  for (const auto& s : t.shapes()) els.insert(els.end(), s.elements.begin(), s.elements.end());
  if (els.empty()) return FiniteSubset::identity(t.window().group());
  return FiniteSubset(t.window().group(), std::move(els));
}

FiniteSubset points_as_set(const Window& W, std::span<const std::uint32_t> pts) {
  std::vector<Element> els;
  els.reserve(pts.size());
  for (auto p : pts) els.push_back(W.at(p));
  return adopt_sorted(W.group(), std::move(els));
}

}  // namespace

TilingLevel make_level(int k, Quasitiling tiling, FiniteSubset K, double eps) {
  auto D = union_of_shapes(tiling);
  return TilingLevel{k, std::move(tiling), std::move(K), eps, std::move(D)};
}

TilingLevel singleton_level(WindowPtr window) {
  const Group g = window->group();
  auto all = window->universe();
  std::vector<Shape> shapes{Shape{0, FiniteSubset::identity(g)}};
  std::vector<FiniteSubset> centers{std::move(all)};
  return make_level(0, Quasitiling(std::move(window), std::move(shapes), std::move(centers)),
                    FiniteSubset::identity(g), 1.0);
}

double lift_delta(double eps_next, std::size_t k_next_size, std::size_t d_size) {
  const double delta = ben_delta(eps_next, k_next_size);
  const double bound = std::min(eps_next / 2, delta / static_cast<double>(d_size + 1));
  return std::nextafter(bound, 0.0);
}

bool check_congruent(const Quasitiling& fine, const Quasitiling& coarse) {
  if (!(fine.window().universe() == coarse.window().universe())) return false;
  std::vector<std::uint32_t> f, c;
  if (!owners(fine, f) || !owners(coarse, c)) return false;
  std::vector<std::uint32_t> image(fine.tile_count(), kNone);
  for (auto p : fine.window().core_positions()) {
    if ((f[p] == kNone) != (c[p] == kNone)) return false;
    if (f[p] == kNone) continue;
    auto& im = image[f[p]];
    if (im == kNone) im = c[p];
    else if (im != c[p]) return false;
  }
  return true;
}

bool check_congruent(const TilingLevel& fine, const TilingLevel& coarse) {
  return check_congruent(fine.tiling, coarse.tiling);
}

LiftResult merge_level(const TilingLevel& fine, const Quasitiling& t_star, FiniteSubset K, double eps) {
  const Window& W = fine.tiling.window();
  if (!(t_star.window().universe() == W.universe())) throw Error("merge_level: T* lives on another window");
  LevelReport rep;
  rep.k = fine.k + 1;

  std::vector<std::uint32_t> star;
  if (!owners(t_star, star)) throw Error("merge_level: T* tiles overlap");
  std::vector<std::uint8_t> in_core(W.size(), 0);
  for (auto p : W.core_positions()) in_core[p] = 1;

  std::vector<std::vector<std::size_t>> groups(t_star.tile_count());
  for (std::size_t i = 0; i < fine.tiling.tile_count(); ++i) {
    std::uint32_t j = star[*W.locate(fine.tiling.tiles()[i].center)];
    if (j == kNone) {
      const auto& pts = fine.tiling.tile_points(i);
      const auto it = std::find_if(pts.begin(), pts.end(), [&](auto p) { return in_core[p] != 0; });
      if (it == pts.end() || star[*it] == kNone) {
        ++rep.dropped;
        continue;
      }
      j = star[*it];
      ++rep.reassigned;
    }
    groups[j].push_back(i);
  }

  std::vector<TilePart> parts;
  std::vector<std::size_t> source;
  for (std::size_t j = 0; j < groups.size(); ++j) {
    if (groups[j].empty()) continue;
    std::vector<std::uint32_t> pts;
    for (auto i : groups[j]) {
      const auto& tp = fine.tiling.tile_points(i);
      pts.insert(pts.end(), tp.begin(), tp.end());
    }
    std::sort(pts.begin(), pts.end());
    const Element& c = t_star.tiles()[j].center;
    const bool keeps = std::binary_search(pts.begin(), pts.end(), *W.locate(c));
    parts.push_back(TilePart{pts, keeps ? c : pick_center(W, pts, c)});
    source.push_back(j);
  }

  // Sandwich: core points of k_core(T*, D^-1) ⊆ T~ ⊆ D T*.
  const auto Dinv = fine.D.inverse();
  for (std::size_t n = 0; n < parts.size(); ++n) {
    const auto ts = points_as_set(W, t_star.tile_points(source[n]));
    const auto tt = points_as_set(W, parts[n].points);
    for (const auto& e : k_core(ts, Dinv)) {
      const auto p = W.locate(e);
      if (p && in_core[*p] && !tt.contains(e)) ++rep.sandwich_violations;
    }
    const IntervalIndex upper(set_product(fine.D, ts));
    for (const auto& e : tt) {
      if (!upper.contains(e)) ++rep.sandwich_violations;
    }
  }

  auto coarse = tiling_from_parts(fine.tiling.window_ptr(), parts);
  rep.tiles = coarse.tile_count();
  rep.congruent = check_congruent(fine.tiling, coarse);
  if (!rep.congruent) throw Error("merge_level: merged level is not congruent with its predecessor");
  rep.exact_violations = audit_exact(coarse, W.core_positions()).total();
  rep.invariance_met = true;
  for (const auto& s : coarse.shapes()) {
    const auto r = invariance_ratio(s.elements, K);
    rep.worst_invariance = std::max(rep.worst_invariance, r);
    if (!r.below(eps)) {
      ++rep.non_invariant_shapes;
      rep.invariance_met = false;
    }
  }
  return LiftResult{make_level(fine.k + 1, std::move(coarse), std::move(K), eps), rep};
}

LiftResult lift_level(const TilingLevel& fine, const LevelParams& next) {
  const auto& W = fine.tiling.window_ptr();
  const auto K_prime = set_union(set_union(next.K, fine.D), fine.D.inverse());
  const double delta = lift_delta(next.eps, next.K.size(), fine.D.size());

  auto greedy = greedy_quasitile(W, next.greedy);
  const auto disjoint = disjointify(greedy.qt, greedy.witness);
  ExactifyParams ep;
  ep.gamma = next.gamma;
  ep.K = K_prime;
  ep.eps = delta;
  ep.max_f_index = next.max_f_index;
  ep.aux_multipliers = next.aux_multipliers;
  auto exact = exactify(disjoint, ep);

  auto out = merge_level(fine, exact.tiling, next.K, next.eps);
  out.report.delta = delta;
  out.report.K_prime_size = K_prime.size();
  out.report.exactify = exact.report;
  return out;
}

Hierarchy build_hierarchy(WindowPtr window, const std::vector<LevelParams>& params) {
  if (params.empty()) throw Error("build_hierarchy: no levels requested");
  Hierarchy h;
  TilingLevel current = singleton_level(std::move(window));
  for (const auto& p : params) {
    auto r = lift_level(current, p);
    h.levels.push_back(r.level);
    h.reports.push_back(r.report);
    current = std::move(r.level);
  }
  return h;
}

bool operator==(const MasterPartitionTable& a, const MasterPartitionTable& b) {
  if (a.shapes != b.shapes || a.masters.size() != b.masters.size()) return false;
  for (std::size_t i = 0; i < a.masters.size(); ++i) {
    const auto& x = a.masters[i];
    const auto& y = b.masters[i];
    if (x.size() != y.size()) return false;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j].shape != y[j].shape || x[j].parts.size() != y[j].parts.size()) return false;
      for (std::size_t n = 0; n < x[j].parts.size(); ++n) {
        if (x[j].parts[n].shape != y[j].parts[n].shape || !(x[j].parts[n].offset == y[j].parts[n].offset)) return false;
      }
    }
  }
  return true;
}

Normalized normalize_masters(const std::vector<TilingLevel>& levels) {
  if (levels.empty()) throw Error("normalize_masters: no levels");
  Normalized out;
  auto& table = out.table;
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    const auto& fine = levels[i].tiling;
    const auto& coarse = levels[i + 1].tiling;
    if (!check_congruent(fine, coarse)) throw Error("normalize_masters: input levels are not congruent");
    const Window& W = fine.window();
    const Group& g = W.group();
    std::vector<std::uint32_t> f;
    owners(fine, f);

    std::vector<MasterEntry> masters;
    std::vector<bool> seen(coarse.shapes().size(), false);
    for (std::size_t t = 0; t < coarse.tile_count(); ++t) {
      const auto& ref = coarse.tiles()[t];
      if (seen[ref.shape]) continue;
      seen[ref.shape] = true;
      const auto& pts = coarse.tile_points(t);
      std::vector<std::uint32_t> children;
      for (auto p : pts) {
        if (f[p] == kNone) throw Error("normalize_masters: coarse tile not covered by fine tiles");
        children.push_back(f[p]);
      }
      std::sort(children.begin(), children.end());
      children.erase(std::unique(children.begin(), children.end()), children.end());
      std::size_t covered = 0;
      for (auto ch : children) {
        const auto& cp = fine.tile_points(ch);
        if (!std::includes(pts.begin(), pts.end(), cp.begin(), cp.end())) {
          throw Error("normalize_masters: fine tile sticks out of its coarse tile");
        }
        covered += cp.size();
      }
      if (covered != pts.size()) throw Error("normalize_masters: coarse tile is not a union of fine tiles");
      MasterEntry e{coarse.shapes()[ref.shape].id, {}};
      const Element cinv = g.inv(ref.center);
      for (auto ch : children) {
        const auto& cr = fine.tiles()[ch];
        e.parts.push_back(MasterPart{fine.shapes()[cr.shape].id, g.mul(cr.center, cinv)});
      }
      std::sort(e.parts.begin(), e.parts.end(),
                [&](const MasterPart& a, const MasterPart& b) { return g.less(a.offset, b.offset); });
      masters.push_back(std::move(e));
    }
    std::sort(masters.begin(), masters.end(), [](const auto& a, const auto& b) { return a.shape < b.shape; });
    table.shapes.push_back(fine.shapes());
    table.masters.push_back(std::move(masters));
  }

  const auto derived = rederive(levels.back().tiling, table);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    out.levels.push_back(make_level(levels[i].k, derived[i], levels[i].K, levels[i].eps));
  }
  for (std::size_t i = 0; i + 1 < out.levels.size(); ++i) {
    if (!check_congruent(out.levels[i], out.levels[i + 1])) {
      throw Error("normalize_masters: normalized levels lost congruence");
    }
  }
  return out;
}

std::vector<Quasitiling> rederive(const Quasitiling& top, const MasterPartitionTable& table) {
  if (table.shapes.size() != table.masters.size()) throw Error("rederive: malformed master table");
  const auto& window = top.window_ptr();
  const Group& g = top.window().group();
  std::vector<Quasitiling> out{top};
  for (std::size_t i = table.masters.size(); i-- > 0;) {
    const auto& above = out.back();
    const auto& shapes = table.shapes[i];
    std::vector<std::vector<Element>> centers(shapes.size());
    for (const auto& ref : above.tiles()) {
      const int sid = above.shapes()[ref.shape].id;
      const auto m = std::find_if(table.masters[i].begin(), table.masters[i].end(),
                                  [&](const MasterEntry& e) { return e.shape == sid; });
      if (m == table.masters[i].end()) throw Error("rederive: no master partition for shape " + std::to_string(sid));
      for (const auto& part : m->parts) {
        const auto s = std::find_if(shapes.begin(), shapes.end(), [&](const Shape& x) { return x.id == part.shape; });
        if (s == shapes.end()) throw Error("rederive: unknown child shape " + std::to_string(part.shape));
        centers[static_cast<std::size_t>(s - shapes.begin())].push_back(g.mul(part.offset, ref.center));
      }
    }
    std::vector<FiniteSubset> csets;
    for (auto& c : centers) csets.emplace_back(g, std::move(c));
    out.push_back(Quasitiling(window, shapes, std::move(csets)));
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace amtile
