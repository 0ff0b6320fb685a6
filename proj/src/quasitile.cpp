#include "amtile/quasitile.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

namespace amtile {

namespace {

std::uint64_t hash_points(const std::vector<std::uint32_t>& pts) {
  std::uint64_t h = 1469598103934665603ULL;
  for (auto p : pts) {
    h ^= p;
    h *= 1099511628211ULL;
  }
  return h ^ pts.size();
}

std::vector<std::uint32_t> points_of(const Window& w, const FiniteSubset& shape, const Element& c) {
  std::vector<std::uint32_t> out;
  out.reserve(shape.size());
  const Group& g = w.group();
  for (const auto& s : shape) {
    const auto p = w.locate(g.mul(s, c));
    if (!p) throw Error("tile " + g.format(c) + " leaves the window");
    out.push_back(*p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::string shape_symbol(int id) { return "S" + std::to_string(id); }

Quasitiling::Quasitiling(WindowPtr window, std::vector<Shape> shapes, std::vector<FiniteSubset> centers)
    : window_(std::move(window)), shapes_(std::move(shapes)), centers_(std::move(centers)) {
  if (!window_) throw Error("quasitiling: no window");
  if (shapes_.size() != centers_.size()) throw Error("quasitiling: shape and center lists differ in length");
  const Group& g = window_->group();
  std::unordered_set<int> ids;
  for (std::size_t i = 0; i < shapes_.size(); ++i) {
    if (!(shapes_[i].elements.group() == g) || !(centers_[i].group() == g)) {
      throw Error("quasitiling: mismatched group contexts");
    }
    if (!shapes_[i].elements.contains(g.identity())) {
      throw Error("quasitiling: shape " + std::to_string(shapes_[i].id) + " does not contain the identity");
    }
    if (!ids.insert(shapes_[i].id).second) throw Error("quasitiling: duplicate shape id");
  }
  std::unordered_set<Element, ElementHash> all_centers;
  for (const auto& cs : centers_) {
    for (const auto& c : cs) {
      if (!all_centers.insert(c).second) throw Error("quasitiling: center sets overlap");
    }
  }

  std::vector<std::size_t> order(shapes_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (shapes_[a].elements.size() != shapes_[b].elements.size()) {
      return shapes_[a].elements.size() > shapes_[b].elements.size();
    }
    return shapes_[a].id < shapes_[b].id;
  });
  for (auto s : order) {
    for (const auto& c : centers_[s]) {
      tiles_.push_back(TileRef{s, c});
      points_.push_back(points_of(*window_, shapes_[s].elements, c));
    }
  }

  std::unordered_multimap<std::uint64_t, std::size_t> seen;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto h = hash_points(points_[i]);
    auto [b, e] = seen.equal_range(h);
    for (auto it = b; it != e; ++it) {
      if (points_[it->second] == points_[i]) throw Error("quasitiling: two tiles coincide");
    }
    seen.emplace(h, i);
  }
}

Quasitiling Quasitiling::empty(WindowPtr window) { return Quasitiling(std::move(window), {}, {}); }

std::optional<std::size_t> Quasitiling::shape_index(int id) const {
  for (std::size_t i = 0; i < shapes_.size(); ++i) {
    if (shapes_[i].id == id) return i;
  }
  return std::nullopt;
}

std::size_t Quasitiling::total_tile_size() const {
  std::size_t n = 0;
  for (const auto& p : points_) n += p.size();
  return n;
}

bool Quasitiling::is_disjoint() const {
  std::vector<std::uint8_t> hit(window_->size(), 0);
  for (const auto& pts : points_) {
    for (auto p : pts) {
      if (hit[p]) return false;
      hit[p] = 1;
    }
  }
  return true;
}

bool operator==(const Quasitiling& a, const Quasitiling& b) {
  if (a.shapes_.size() != b.shapes_.size()) return false;
  for (std::size_t i = 0; i < a.shapes_.size(); ++i) {
    if (a.shapes_[i].id != b.shapes_[i].id || !(a.shapes_[i].elements == b.shapes_[i].elements)) return false;
    if (!(a.centers_[i] == b.centers_[i])) return false;
  }
  return a.window_->universe() == b.window_->universe() && a.window_->margin() == b.window_->margin();
}

WitnessAudit verify_witness(const Quasitiling& qt, const DisjointWitness& w, double eps) {
  WitnessAudit out;
  if (w.parts.size() != qt.tile_count()) throw Error("witness: part count differs from tile count");
  std::vector<std::uint8_t> hit(qt.window().size(), 0);
  for (std::size_t i = 0; i < w.parts.size(); ++i) {
    const auto& part = w.parts[i];
    const auto& tile = qt.tile_points(i);
    if (!std::includes(tile.begin(), tile.end(), part.begin(), part.end()) ||
        !std::is_sorted(part.begin(), part.end())) {
      ++out.not_subset;
    }
    const double frac = tile.empty() ? 1.0 : static_cast<double>(part.size()) / static_cast<double>(tile.size());
    out.worst_fraction = std::min(out.worst_fraction, frac);
    if (static_cast<double>(part.size()) < (1.0 - eps) * static_cast<double>(tile.size())) ++out.too_small;
    for (auto p : part) {
      if (p >= hit.size()) {
        ++out.not_subset;
        continue;
      }
      if (hit[p]) ++out.shared_points;
      hit[p] = 1;
    }
  }
  out.ok = out.not_subset == 0 && out.too_small == 0 && out.shared_points == 0;
  return out;
}

DisjointWitness sequential_witness(const Quasitiling& qt) {
  DisjointWitness w;
  std::vector<std::uint8_t> hit(qt.window().size(), 0);
  for (std::size_t i = 0; i < qt.tile_count(); ++i) {
    std::vector<std::uint32_t> part;
    for (auto p : qt.tile_points(i)) {
      if (!hit[p]) part.push_back(p);
    }
    for (auto p : qt.tile_points(i)) hit[p] = 1;
    w.parts.push_back(std::move(part));
  }
  return w;
}

int required_shape_count(double eps) {
  if (!(eps > 0 && eps < 1)) throw Error("required_shape_count: eps must be in (0,1)");
  const double base = 1.0 - eps / 2.0;
  double v = 1.0;
  for (int r = 1; r < 100000; ++r) {
    v *= base;
    if (v < eps) return r;
  }
  throw Error("required_shape_count: no r found");
}

std::vector<int> choose_shape_indices(const Group& g, const GreedyParams& p) {
  if (!(p.eps > 0 && p.eps < 1)) throw Error("greedy: eps must be in (0,1)");
  if (p.n0 < 0 || p.stride < 1) throw Error("greedy: n0 must be >= 0 and stride >= 1");
  const int r = p.shape_count > 0 ? p.shape_count : required_shape_count(p.eps);
  std::vector<int> idx;
  if (!p.strict) {
    for (int i = 0; i < r; ++i) idx.push_back(p.n0 + 1 + i * p.stride);
    return idx;
  }
  std::vector<FiniteSubset> sets;
  std::vector<double> deltas;
  for (int n = p.n0 + 1; static_cast<int>(idx.size()) < r; n += 1) {
    if (n > p.max_index) throw Error("greedy: no Følner index up to max_index meets the pairwise invariance bound");
    auto F = folner_set(g, n);
    bool ok = true;
    for (std::size_t j = 0; j < sets.size() && ok; ++j) ok = invariance_ratio(F, sets[j]).below(deltas[j]);
    if (!ok) continue;
    idx.push_back(n);
    deltas.push_back(p.delta_scale * p.eps / (static_cast<double>(F.size()) * r));
    sets.push_back(std::move(F));
  }
  return idx;
}

namespace {

GreedyResult run_greedy(WindowPtr window, std::vector<Shape> shapes, double eps) {
  const Window& W = *window;
  std::vector<std::size_t> order(shapes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (shapes[a].elements.size() != shapes[b].elements.size()) {
      return shapes[a].elements.size() > shapes[b].elements.size();
    }
    return shapes[a].id < shapes[b].id;
  });
  if (!shapes.empty()) {
    const auto& big = shapes[order.front()].elements;
    const auto runs = runs_of(W.group(), big.elements());
    std::vector<CellSpan> spans;
    bool fits = false;
    for (std::uint32_t pos = 0; pos < W.size() && !fits; ++pos) fits = W.place(runs, W.at(pos), spans);
    if (!fits) throw Error("greedy: window too small for the largest shape");
  }

  CellBits H(W.size());
  std::vector<std::vector<Element>> centers(shapes.size());
  std::vector<std::vector<std::uint32_t>> parts;
  std::vector<CellSpan> spans;
  for (auto s : order) {
    const auto& S = shapes[s].elements;
    const auto runs = runs_of(W.group(), S.elements());
    const double limit = eps * static_cast<double>(S.size());
    for (std::uint32_t pos = 0; pos < W.size(); ++pos) {
      const Element& c = W.at(pos);
      if (!W.place(runs, c, spans)) continue;
      if (!(static_cast<double>(H.count(spans)) < limit)) continue;
      std::vector<std::uint32_t> part;
      for (const auto& sp : spans) {
        for (std::uint32_t cell = sp.cell; cell < sp.cell + sp.len; ++cell) {
          if (!H.test(cell)) {
            part.push_back(W.pos_of(cell));
            H.set(cell);
          }
        }
      }
      std::sort(part.begin(), part.end());
      parts.push_back(std::move(part));
      centers[s].push_back(c);
    }
  }

  std::vector<FiniteSubset> csets;
  for (auto& c : centers) csets.push_back(adopt_sorted(W.group(), std::move(c)));
  Quasitiling qt(window, std::move(shapes), std::move(csets));
  GreedyReport rep;
  rep.eps = eps;
  rep.tiles = qt.tile_count();
  rep.covered_core = covered_core(qt);
  return GreedyResult{std::move(qt), DisjointWitness{std::move(parts)}, std::move(rep)};
}

}  // namespace

GreedyResult greedy_quasitile(WindowPtr window, std::vector<Shape> shapes, double eps) {
  if (!(eps > 0 && eps < 1)) throw Error("greedy: eps must be in (0,1)");
  return run_greedy(std::move(window), std::move(shapes), eps);
}

GreedyResult greedy_quasitile(WindowPtr window, const GreedyParams& p) {
  const Group& g = window->group();
  const auto idx = choose_shape_indices(g, p);
  const int r = static_cast<int>(idx.size());
  std::vector<Shape> shapes;
  for (std::size_t i = 0; i < idx.size(); ++i) shapes.push_back(Shape{static_cast<int>(i), folner_set(g, idx[i])});

  std::vector<ShapeReport> reps;
  bool met = true;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    ShapeReport sr;
    sr.index = idx[i];
    sr.size = shapes[i].elements.size();
    sr.delta = p.delta_scale * p.eps / (static_cast<double>(sr.size) * r);
    for (std::size_t j = 0; j < i; ++j) {
      const auto ratio = invariance_ratio(shapes[i].elements, shapes[j].elements);
      sr.worst_ratio = std::max(sr.worst_ratio, ratio.value());
      if (!ratio.below(reps[j].delta)) met = false;
    }
    reps.push_back(sr);
  }

  auto res = run_greedy(std::move(window), std::move(shapes), p.eps);
  for (std::size_t i = 0; i < reps.size(); ++i) reps[i].tiles = res.qt.centers()[i].size();
  res.report.required_shapes = required_shape_count(p.eps);
  res.report.shapes = std::move(reps);
  res.report.pairwise_invariance_met = met;
  return res;
}

std::size_t maximality_violations(const Quasitiling& qt, const FiniteSubset& shape, double eps) {
  const Window& W = qt.window();
  CellBits H(W.size());
  for (std::size_t i = 0; i < qt.tile_count(); ++i) {
    for (auto p : qt.tile_points(i)) H.set(W.cell_of(p));
  }
  const auto runs = runs_of(W.group(), shape.elements());
  std::vector<CellSpan> spans;
  std::size_t bad = 0;
  for (auto pos : W.core_positions()) {
    if (!W.place(runs, W.at(pos), spans)) continue;
    if (static_cast<double>(H.count(spans)) < eps * static_cast<double>(shape.size())) ++bad;
  }
  return bad;
}

Rational covered_fraction(const Quasitiling& qt, std::span<const std::uint32_t> region) {
  if (region.empty()) return Rational(0, 1);
  std::vector<std::uint8_t> hit(qt.window().size(), 0);
  for (std::size_t i = 0; i < qt.tile_count(); ++i) {
    for (auto p : qt.tile_points(i)) hit[p] = 1;
  }
  std::int64_t n = 0;
  for (auto p : region) n += hit[p];
  return Rational(n, static_cast<std::int64_t>(region.size()));
}

Quasitiling tiling_from_parts(WindowPtr window, std::span<const TilePart> parts) {
  const Window& W = *window;
  const Group& g = W.group();
  std::map<std::vector<std::array<std::int64_t, kMaxCoords>>, std::size_t> index;
  std::vector<Shape> shapes;
  std::vector<std::vector<Element>> centers;
  for (const auto& part : parts) {
    if (part.points.empty()) continue;
    const Element cinv = g.inv(part.center);
    std::vector<Element> els;
    els.reserve(part.points.size());
    for (auto p : part.points) els.push_back(g.mul(W.at(p), cinv));
    FiniteSubset shape(g, std::move(els));
    if (!shape.contains(g.identity())) throw Error("tiling_from_parts: center outside its tile");
    std::vector<std::array<std::int64_t, kMaxCoords>> key;
    key.reserve(shape.size());
    for (const auto& e : shape) key.push_back(e.v);
    auto [it, fresh] = index.emplace(std::move(key), shapes.size());
    if (fresh) {
      shapes.push_back(Shape{static_cast<int>(shapes.size()), std::move(shape)});
      centers.emplace_back();
    }
    centers[it->second].push_back(part.center);
  }
  std::vector<FiniteSubset> csets;
  for (auto& c : centers) csets.emplace_back(g, std::move(c));
  return Quasitiling(std::move(window), std::move(shapes), std::move(csets));
}

Element pick_center(const Window& W, std::span<const std::uint32_t> points, const Element& anchor) {
  if (points.empty()) throw Error("pick_center: empty tile");
  const Group& g = W.group();
  const Element ainv = g.inv(anchor);
  Element best = W.at(points.front());
  Element best_off = g.mul(best, ainv);
  for (auto p : points) {
    const Element off = g.mul(W.at(p), ainv);
    if (g.less(off, best_off)) {
      best_off = off;
      best = W.at(p);
    }
  }
  return best;
}

Quasitiling disjointify(const Quasitiling& qt, const DisjointWitness& w) {
  const Window& W = qt.window();
  if (w.parts.size() != qt.tile_count()) throw Error("disjointify: witness inconsistent with quasitiling");
  std::vector<std::uint8_t> hit(W.size(), 0);
  std::vector<TilePart> parts;
  for (std::size_t i = 0; i < qt.tile_count(); ++i) {
    const auto& part = w.parts[i];
    const auto& tile = qt.tile_points(i);
    if (!std::includes(tile.begin(), tile.end(), part.begin(), part.end())) {
      throw Error("disjointify: witness part is not inside its tile");
    }
    for (auto p : part) {
      if (hit[p]) throw Error("disjointify: witness parts overlap");
      hit[p] = 1;
    }
    if (part.empty()) continue;
    parts.push_back(TilePart{part, pick_center(W, part, qt.tiles()[i].center)});
  }
  return tiling_from_parts(qt.window_ptr(), parts);
}

std::vector<int> disjoint_shape_classes(const GreedyResult& g, const Quasitiling& disjoint) {
  const Window& W = disjoint.window();
  std::vector<std::uint32_t> from(W.size(), UINT32_MAX);
  for (std::size_t i = 0; i < g.witness.parts.size(); ++i) {
    for (auto p : g.witness.parts[i]) from[p] = static_cast<std::uint32_t>(i);
  }
  std::vector<int> cls(disjoint.shapes().size(), -1);
  for (const auto& t : disjoint.tiles()) {
    if (cls[t.shape] != -1) continue;
    const auto src = from[*W.locate(t.center)];
    if (src == UINT32_MAX) throw Error("disjoint_shape_classes: tile not cut from the greedy quasitiling");
    cls[t.shape] = static_cast<int>(g.qt.tiles()[src].shape);
  }
  return cls;
}

PatternField to_pattern_field(const Quasitiling& qt) {
  PatternField x = constant_field(qt.window_ptr());
  std::vector<std::size_t> by_id(qt.shapes().size());
  for (std::size_t i = 0; i < by_id.size(); ++i) by_id[i] = i;
  std::sort(by_id.begin(), by_id.end(),
            [&](std::size_t a, std::size_t b) { return qt.shapes()[a].id < qt.shapes()[b].id; });
  for (std::size_t k = 0; k < by_id.size(); ++k) {
    const auto s = by_id[k];
    x.alphabet.push_back(shape_symbol(qt.shapes()[s].id));
    for (const auto& c : qt.centers()[s]) x.values[*qt.window().locate(c)] = static_cast<std::uint32_t>(k + 1);
  }
  return x;
}

Quasitiling parse_pattern_field(const PatternField& x, const std::vector<Shape>& shapes) {
  x.validate();
  const Window& W = *x.window;
  std::vector<std::optional<std::size_t>> sym(x.alphabet.size());
  for (std::size_t k = 1; k < x.alphabet.size(); ++k) {
    for (std::size_t s = 0; s < shapes.size(); ++s) {
      if (shape_symbol(shapes[s].id) == x.alphabet[k]) sym[k] = s;
    }
    if (!sym[k]) throw Error("pattern field: symbol " + x.alphabet[k] + " has no shape");
  }
  std::vector<std::vector<Element>> centers(shapes.size());
  for (std::uint32_t pos = 0; pos < x.values.size(); ++pos) {
    const auto v = x.values[pos];
    if (v != 0) centers[*sym[v]].push_back(W.at(pos));
  }
  std::vector<FiniteSubset> csets;
  for (auto& c : centers) csets.push_back(adopt_sorted(W.group(), std::move(c)));
  return Quasitiling(x.window, shapes, std::move(csets));
}

FiniteSubset default_margin(const FiniteSubset& largest_shape) {
  return set_product(largest_shape, largest_shape.inverse());
}

}  // namespace amtile
