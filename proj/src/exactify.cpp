#include "amtile/exactify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>

#include "amtile/density.hpp"
#include "amtile/parallel.hpp"

namespace amtile {

bool markable(std::size_t shape_size, double gamma) {
  const auto s = static_cast<double>(shape_size);
  const auto m = static_cast<std::size_t>(std::ceil(2.0 * gamma * s));
  return 2 * m <= shape_size && static_cast<double>(m) < 3.0 * gamma * s;
}

MarkedShape choose_marked_subsets(const Shape& S, double gamma) {
  if (!(gamma > 0 && gamma < 1)) throw Error("marked subsets: gamma must be in (0,1)");
  const std::size_t n = S.elements.size();
  if (!markable(n, gamma)) throw Error("marked subsets: shape " + std::to_string(S.id) + " too small for gamma");
  const auto m = static_cast<std::size_t>(std::ceil(2.0 * gamma * static_cast<double>(n)));
  const auto els = S.elements.elements();
  const Group& g = S.elements.group();
  return MarkedShape{S, adopt_sorted(g, {els.begin(), els.begin() + static_cast<std::ptrdiff_t>(m)}),
                     adopt_sorted(g, {els.begin() + static_cast<std::ptrdiff_t>(m),
                                      els.begin() + static_cast<std::ptrdiff_t>(2 * m)})};
}

namespace {

enum class Scan { Pass, Fail, NoFit };

// Fast rejection: stops at the first admissible translate breaking a threshold.
Scan scan_thresholds(const Window& W, const CellBits& A, const CellBits& A_prime, const CellBits& B,
                   const FiniteSubset& F, double gamma) {
  const auto runs = runs_of(F.group(), F.elements());
  const auto core = W.core_positions();
  const double need = gamma * static_cast<double>(F.size());
  std::atomic<bool> bad{false};
  std::atomic<bool> fit{false};
  parallel_chunks(core.size(), [&](std::size_t, std::size_t b, std::size_t e) {
    std::vector<CellSpan> spans;
    for (std::size_t i = b; i < e && !bad.load(std::memory_order_relaxed); ++i) {
      if (!W.place(runs, W.at(core[i]), spans)) continue;
      fit.store(true, std::memory_order_relaxed);
      if (static_cast<double>(A.count(spans)) < need || static_cast<double>(A_prime.count(spans)) < need ||
          !(static_cast<double>(B.count(spans)) < need)) {
        bad.store(true, std::memory_order_relaxed);
      }
    }
  });
  if (bad.load()) return Scan::Fail;
  return fit.load() ? Scan::Pass : Scan::NoFit;
}

}  // namespace

FSearch search_displacement_set(const Window& W, const CellBits& A, const CellBits& A_prime, const CellBits& B,
                                double gamma, int max_index) {
  FSearch out;
  std::optional<int> last;
  for (int n = 1; n <= max_index; ++n) {
    const auto F = folner_set(W.group(), n);
    const auto r = scan_thresholds(W, A, A_prime, B, F, gamma);
    if (r == Scan::NoFit) break;
    last = n;
    if (r == Scan::Fail) continue;
    out.index = n;
    break;
  }
  if (last) {
    // Full statistics for the accepted set, or for the largest one tried.
    const auto F = folner_set(W.group(), out.index.value_or(*last));
    out.min_A = density_range(A, F, W).lower;
    out.min_A_prime = density_range(A_prime, F, W).lower;
    out.max_B = density_range(B, F, W).upper;
  }
  return out;
}

std::vector<std::pair<Element, Element>> match_in_tile(const Group& g, const Element& center,
                                                       const FiniteSubset& B, const FiniteSubset& A,
                                                       const FiniteSubset& F) {
  const Element cinv = g.inv(center);
  const auto m = hall_match(B.right_translate(cinv), A.right_translate(cinv), F);
  std::vector<std::pair<Element, Element>> out;
  out.reserve(m.pairs.size());
  for (const auto& [b, a] : m.pairs) out.emplace_back(g.mul(b, center), g.mul(a, center));
  return out;
}

ExactAudit audit_exact(const Quasitiling& t, std::span<const std::uint32_t> region) {
  std::vector<std::uint32_t> hits(t.window().size(), 0);
  for (std::size_t i = 0; i < t.tile_count(); ++i) {
    for (auto p : t.tile_points(i)) ++hits[p];
  }
  ExactAudit a;
  for (auto p : region) {
    if (hits[p] == 0) {
      ++a.uncovered;
      a.uncovered_points.push_back(p);
    } else if (hits[p] > 1) {
      ++a.multiply_covered;
      a.multiple_points.push_back(p);
    }
  }
  return a;
}

namespace {

std::int64_t shell_radius(const FiniteSubset& F) {
  std::int64_t r = 1;
  for (const auto& e : F) r = std::max(r, F.group().shell(e));
  return r;
}

using ShapeKey = std::vector<std::array<std::int64_t, kMaxCoords>>;

ShapeKey key_of(const FiniteSubset& s) {
  ShapeKey k;
  k.reserve(s.size());
  for (const auto& e : s) k.push_back(e.v);
  return k;
}

}  // namespace

ExactResult exactify(const Quasitiling& qt, const ExactifyParams& p) {
  if (!(p.gamma > 0 && p.gamma < 1)) throw Error("exactify: gamma must be in (0,1)");
  if (!(p.eps > 0 && p.eps < 1)) throw Error("exactify: eps must be in (0,1)");
  if (p.K.empty()) throw Error("exactify: empty K");
  const Window& W = qt.window();
  const Group& g = W.group();
  if (!(p.K.group() == g)) throw Error("exactify: mismatched group contexts");
  if (!qt.is_disjoint()) throw Error("exactify: input quasitiling is not disjoint");

  ExactifyReport rep;
  rep.gamma = p.gamma;
  rep.eps = p.eps;
  rep.ben_threshold = ben_delta(p.eps, p.K.size());
  rep.ben_threshold_met = p.gamma < rep.ben_threshold;
  rep.input_coverage = covered_core(qt);
  rep.coverage_precondition_met = !rep.input_coverage.below(1.0 - p.gamma);

  const std::size_t N = W.size();
  std::vector<int> owner(N, -1);
  for (std::size_t i = 0; i < qt.tile_count(); ++i) {
    for (auto pos : qt.tile_points(i)) owner[pos] = static_cast<int>(i);
  }

  CellBits Abits(N), Apbits(N), Bbits(N);
  std::vector<std::uint32_t> Apos, Appos, Bpos;
  {
    std::vector<std::optional<MarkedShape>> marks(qt.shapes().size());
    for (std::size_t s = 0; s < qt.shapes().size(); ++s) {
      if (markable(qt.shapes()[s].elements.size(), p.gamma)) {
        marks[s] = choose_marked_subsets(qt.shapes()[s], p.gamma);
      } else {
        ++rep.unmarked_shapes;
      }
    }
    for (const auto& t : qt.tiles()) {
      if (!marks[t.shape]) continue;
      for (const auto& a : marks[t.shape]->A) {
        const auto pos = *W.locate(g.mul(a, t.center));
        Abits.set(W.cell_of(pos));
        Apos.push_back(pos);
      }
      for (const auto& a : marks[t.shape]->A_prime) {
        const auto pos = *W.locate(g.mul(a, t.center));
        Apbits.set(W.cell_of(pos));
        Appos.push_back(pos);
      }
    }
    std::sort(Apos.begin(), Apos.end());
    std::sort(Appos.begin(), Appos.end());
    for (auto pos : W.core_positions()) {
      if (owner[pos] < 0) {
        Bbits.set(W.cell_of(pos));
        Bpos.push_back(pos);
      }
    }
  }
  rep.uncovered = Bpos.size();

  std::vector<std::vector<std::uint32_t>> absorbed(qt.tile_count());
  std::vector<char> used_fallback(qt.tile_count(), 0);
  std::vector<std::pair<std::uint32_t, Element>> y_entries;

  if (!Bpos.empty()) {
    FiniteSubset F(g);
    if (p.displacement) {
      F = *p.displacement;
      if (!(F.group() == g) || !F.contains(g.identity()) || !(F.inverse() == F)) {
        throw Error("exactify: displacement set must be symmetric and contain the identity");
      }
    } else {
      const auto fs = search_displacement_set(W, Abits, Apbits, Bbits, p.gamma, p.max_f_index);
      rep.f_min_A = fs.min_A;
      rep.f_min_A_prime = fs.min_A_prime;
      rep.f_max_B = fs.max_B;
      if (!fs.index) {
        throw Error("exactify: no Følner set up to index " + std::to_string(p.max_f_index) +
                    " meets the marked-density conditions on this window (min A " + fs.min_A.str() + ", min A' " +
                    fs.min_A_prime.str() + ", max B " + fs.max_B.str() + ")");
      }
      rep.f_index = *fs.index;
      F = folner_set(g, rep.f_index);
    }
    const int aux_base = rep.f_index > 0 ? rep.f_index : static_cast<int>(shell_radius(F));
    rep.f_size = F.size();
    rep.xi = p.xi > 0 ? p.xi : p.gamma / 4.0;
    rep.xi_prime = p.xi_prime > 0 ? p.xi_prime : rep.xi / (2.0 * static_cast<double>(F.size()));

    std::vector<char> is_b(N, 0), is_a(N, 0), is_ap(N, 0), matched(N, 0);
    for (auto pos : Bpos) is_b[pos] = 1;
    for (auto pos : Apos) is_a[pos] = 1;
    for (auto pos : Appos) is_ap[pos] = 1;
    std::vector<int> phi(N, -1);

    // Auxiliary quasitiling with separated F-cores.
    std::vector<Shape> aux_shapes;
    {
      std::vector<CellSpan> spans;
      for (int m : p.aux_multipliers) {
        auto S = folner_set(g, m * aux_base);
        const auto runs = runs_of(g, S.elements());
        bool fits = false;
        for (std::uint32_t pos = 0; pos < N && !fits; ++pos) fits = W.place(runs, W.at(pos), spans);
        if (!fits) continue;
        rep.aux_worst_ratio = std::max(rep.aux_worst_ratio, invariance_ratio(S, F).value());
        aux_shapes.push_back(Shape{static_cast<int>(aux_shapes.size()), std::move(S)});
      }
    }
    if (!aux_shapes.empty()) {
      auto aux = greedy_quasitile(qt.window_ptr(), aux_shapes, rep.xi);
      const auto dis = disjointify(aux.qt, aux.witness);
      const auto fruns = runs_of(g, F.elements());
      std::vector<CellSpan> spans;
      CellBits inside(N);
      for (std::size_t t = 0; t < dis.tile_count(); ++t) {
        const auto& pts = dis.tile_points(t);
        for (auto pos : pts) inside.set(W.cell_of(pos));
        std::vector<Element> bs, as;
        for (auto pos : pts) {
          if (is_a[pos]) as.push_back(W.at(pos));
          if (!is_b[pos]) continue;
          if (!W.place(fruns, W.at(pos), spans)) continue;
          std::uint32_t n = 0;
          for (const auto& sp : spans) n += inside.count(sp);
          if (n == F.size()) bs.push_back(W.at(pos));
        }
        for (auto pos : pts) inside.reset(W.cell_of(pos));
        if (bs.empty()) continue;
        ++rep.aux_tiles;
        const auto pairs = match_in_tile(g, dis.tiles()[t].center, FiniteSubset(g, bs), FiniteSubset(g, as), F);
        for (const auto& [b, a] : pairs) {
          const auto bp = *W.locate(b);
          const auto ap = *W.locate(a);
          phi[bp] = static_cast<int>(ap);
          matched[bp] = 1;
          ++rep.matched_local;
        }
      }
    }

    std::vector<Element> residual;
    for (auto pos : Bpos) {
      if (!matched[pos]) residual.push_back(W.at(pos));
    }
    rep.residual = residual.size();
    if (!residual.empty()) {
      std::vector<Element> ap;
      for (auto pos : Appos) ap.push_back(W.at(pos));
      const auto m = hall_match(adopt_sorted(g, residual), adopt_sorted(g, std::move(ap)), F);
      for (const auto& [b, a] : m.pairs) {
        const auto bp = *W.locate(b);
        phi[bp] = static_cast<int>(*W.locate(a));
        matched[bp] = 1;
        ++rep.matched_residual;
        y_entries.emplace_back(bp, g.mul(a, g.inv(b)));
      }
    }

    for (auto bp : Bpos) {
      if (phi[bp] >= 0) {
        absorbed[static_cast<std::size_t>(owner[static_cast<std::size_t>(phi[bp])])].push_back(bp);
        continue;
      }
      // Nearest covered point in canonical displacement order.
      const Element b = W.at(bp);
      for (std::uint64_t i = 1;; ++i) {
        const Element d = g.element_at(i);
        const auto q = W.locate(g.mul(d, b));
        if (q && owner[*q] >= 0) {
          const auto t = static_cast<std::size_t>(owner[*q]);
          absorbed[t].push_back(bp);
          used_fallback[t] = 1;
          y_entries.emplace_back(bp, d);
          break;
        }
        if (i > 64 * N) throw Error("exactify: no covered point reachable for fallback");
      }
      ++rep.fallback_points;
    }
  }
  rep.matching_complete = rep.fallback_points == 0;

  if (Bpos.empty()) {
    rep.growth_bound_met = true;
    rep.worst_growth = qt.tile_count() ? 1.0 : 0.0;
    rep.invariance_met = true;
    rep.worst_invariance = Rational(0, 1);
    for (const auto& s : qt.shapes()) {
      const auto r = invariance_ratio(s.elements, p.K);
      rep.worst_invariance = std::max(rep.worst_invariance, r);
      if (!r.below(p.eps)) {
        rep.invariance_met = false;
        ++rep.non_invariant_shapes;
      }
    }
    rep.violations = audit_exact(qt, W.core_positions()).total();
    std::vector<TileProvenance> prov;
    for (const auto& t : qt.tiles()) prov.push_back(TileProvenance{t.center, {}, false});
    return ExactResult{qt, std::move(prov), constant_field(qt.window_ptr()), std::move(rep)};
  }

  // Assemble T* = T° ∪ absorbed points, centers inherited.
  std::map<ShapeKey, std::size_t> index;
  std::vector<Shape> shapes;
  std::vector<std::vector<Element>> centers;
  std::map<std::vector<std::int64_t>, TileProvenance> prov_by_center;
  rep.growth_bound_met = true;
  for (std::size_t i = 0; i < qt.tile_count(); ++i) {
    const Element& c = qt.tiles()[i].center;
    auto& extra = absorbed[i];
    std::sort(extra.begin(), extra.end());
    const auto& base = qt.tile_points(i);
    const double growth = static_cast<double>(base.size() + extra.size()) / static_cast<double>(base.size());
    rep.worst_growth = std::max(rep.worst_growth, growth);
    if (static_cast<long double>(extra.size()) > 6.0L * p.gamma * static_cast<long double>(base.size())) {
      rep.growth_bound_met = false;
    }
    if (used_fallback[i]) ++rep.fallback_tiles;
    const Element cinv = g.inv(c);
    std::vector<Element> els;
    els.reserve(base.size() + extra.size());
    for (auto pos : base) els.push_back(g.mul(W.at(pos), cinv));
    for (auto pos : extra) els.push_back(g.mul(W.at(pos), cinv));
    FiniteSubset S(g, std::move(els));
    auto [it, fresh] = index.emplace(key_of(S), shapes.size());
    if (fresh) {
      shapes.push_back(Shape{static_cast<int>(shapes.size()), std::move(S)});
      centers.emplace_back();
    }
    centers[it->second].push_back(c);
    prov_by_center[g.coords(c)] = TileProvenance{c, extra, used_fallback[i] != 0};
  }

  rep.invariance_met = true;
  rep.worst_invariance = Rational(0, 1);
  for (const auto& s : shapes) {
    const auto r = invariance_ratio(s.elements, p.K);
    rep.worst_invariance = std::max(rep.worst_invariance, r);
    if (!r.below(p.eps)) {
      rep.invariance_met = false;
      ++rep.non_invariant_shapes;
    }
  }

  std::vector<FiniteSubset> csets;
  for (auto& c : centers) csets.emplace_back(g, std::move(c));
  Quasitiling out(qt.window_ptr(), std::move(shapes), std::move(csets));
  std::vector<TileProvenance> prov;
  prov.reserve(out.tile_count());
  for (const auto& t : out.tiles()) prov.push_back(prov_by_center.at(g.coords(t.center)));

  rep.violations = audit_exact(out, W.core_positions()).total();

  PatternField y = constant_field(qt.window_ptr());
  {
    std::vector<Element> labels;
    for (const auto& [pos, d] : y_entries) labels.push_back(d);
    const FiniteSubset L(g, labels);
    for (const auto& d : L) y.alphabet.push_back(g.format(d));
    for (const auto& [pos, d] : y_entries) {
      const auto k = std::lower_bound(L.begin(), L.end(), d, [&](const Element& a, const Element& b) {
                       return g.less(a, b);
                     }) - L.begin();
      y.values[pos] = static_cast<std::uint32_t>(k + 1);
    }
  }

  return ExactResult{std::move(out), std::move(prov), std::move(y), std::move(rep)};
}

}  // namespace amtile
