#include "amtile/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>

#include "amtile/parallel.hpp"

namespace amtile {

namespace {

std::vector<std::uint32_t> cell_values(const PatternField& x) {
  const Window& W = *x.window;
  std::vector<std::uint32_t> out(W.size());
  for (std::uint32_t c = 0; c < W.size(); ++c) out[c] = x.values[W.pos_of(c)];
  return out;
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h * 0xff51afd7ed558ccdULL;
}

bool same_block(const std::vector<std::uint32_t>& xc, std::span<const CellSpan> a, std::span<const CellSpan> b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::equal(xc.begin() + a[i].cell, xc.begin() + a[i].cell + a[i].len, xc.begin() + b[i].cell)) return false;
  }
  return true;
}

}  // namespace

std::optional<Block> extract_block(const PatternField& x, const FiniteSubset& F, const Element& g) {
  const Window& W = *x.window;
  Block b{F, {}};
  b.values.reserve(F.size());
  for (const auto& f : F) {
    const auto p = W.locate(W.group().mul(f, g));
    if (!p) return std::nullopt;
    b.values.push_back(x.values[*p]);
  }
  return b;
}

BlockCount block_count(const PatternField& x, const FiniteSubset& F, std::span<const std::uint32_t> translates) {
  x.validate();
  if (F.empty()) throw Error("block_count: empty F");
  const Window& W = *x.window;
  const auto runs = runs_of(W.group(), F.elements());
  const auto xc = cell_values(x);

  // Pass 1 (parallel): hash every admissible translate.
  std::vector<std::uint64_t> hashes(translates.size(), 0);
  std::vector<std::uint8_t> fits(translates.size(), 0);
  parallel_chunks(translates.size(), [&](std::size_t, std::size_t b, std::size_t e) {
    std::vector<CellSpan> spans;
    for (std::size_t i = b; i < e; ++i) {
      if (!W.place(runs, W.at(translates[i]), spans)) continue;
      fits[i] = 1;
      std::uint64_t h = 0x243f6a8885a308d3ULL;
      for (const auto& s : spans) {
        for (std::uint32_t c = s.cell; c < s.cell + s.len; ++c) h = mix(h, xc[c]);
      }
      hashes[i] = h;
    }
  });

  // Pass 2 (sequential, in translate order): confirm by full comparison.
  BlockCount out;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> reps;
  std::vector<CellSpan> a, b;
  for (std::size_t i = 0; i < translates.size(); ++i) {
    if (!fits[i]) continue;
    ++out.translates;
    auto& bucket = reps[hashes[i]];
    bool dup = false;
    if (!bucket.empty()) {
      W.place(runs, W.at(translates[i]), a);
      for (auto r : bucket) {
        W.place(runs, W.at(translates[r]), b);
        if (same_block(xc, a, b)) {
          dup = true;
          break;
        }
      }
    }
    if (!dup) {
      bucket.push_back(i);
      ++out.distinct;
    }
  }
  if (out.translates == 0) throw Error("block_count: no translate of F fits in the window");
  return out;
}

BlockCount block_count(const PatternField& x, const FiniteSubset& F) {
  std::vector<std::uint32_t> all(x.window->size());
  for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
  return block_count(x, F, all);
}

std::vector<ProbeRow> complexity_table(const PatternField& x, const std::vector<FiniteSubset>& probes) {
  std::vector<ProbeRow> rows;
  for (const auto& F : probes) {
    const auto n = block_count(x, F);
    rows.push_back(ProbeRow{F.size(), n.distinct, n.translates,
                            std::log2(static_cast<double>(n.distinct)) / static_cast<double>(F.size())});
  }
  return rows;
}

double entropy_estimate(const PatternField& x, const std::vector<FiniteSubset>& probes) {
  if (probes.empty()) throw Error("entropy_estimate: no probes");
  double best = INFINITY;
  for (const auto& r : complexity_table(x, probes)) best = std::min(best, r.rate);
  return best;
}

double theta(double eps) {
  if (!(eps >= 0 && eps <= 0.5)) throw Error("theta: eps must be in [0, 1/2]");
  if (eps == 0) return 0;
  return -eps * std::log2(eps) - (1 - eps) * std::log2(1 - eps);
}

double entest_budget(int r, double delta, double eps) {
  if (r < 1) throw Error("entest_budget: r must be positive");
  if (!(delta >= 0 && 2 * delta <= 0.5)) throw Error("entest_budget: need 0 <= 2 delta <= 1/2");
  return theta(2 * delta) + 2 * delta * std::log2(static_cast<double>(r) + 1) + 2 * eps;
}

EntestFit entest_fit(const std::vector<std::pair<int, std::size_t>>& shapes) {
  if (shapes.empty()) throw Error("entest_fit: no shapes");
  std::map<int, std::pair<std::size_t, std::size_t>> classes;  // class -> (count, min size)
  for (const auto& [c, size] : shapes) {
    auto [it, fresh] = classes.emplace(c, std::pair<std::size_t, std::size_t>{0, size});
    ++it->second.first;
    it->second.second = std::min(it->second.second, size);
  }
  EntestFit f;
  f.r = static_cast<int>(classes.size());
  std::size_t smallest = SIZE_MAX;
  for (const auto& [c, v] : classes) {
    f.class_counts.push_back(v.first);
    f.class_min_size.push_back(v.second);
    smallest = std::min(smallest, v.second);
    f.eps = std::max(f.eps, std::log2(static_cast<double>(v.first)) / static_cast<double>(v.second));
  }
  f.delta = 1.0 / static_cast<double>(smallest);
  f.budget = entest_budget(f.r, f.delta, f.eps);
  f.bound_eps = std::max(f.eps, f.budget - 2 * f.eps);
  return f;
}

SparseCheck sparse_entropy_bound(const PatternField& x, const FiniteSubset& F_probe) {
  x.validate();
  const Window& W = *x.window;
  CellBits nz(W.size());
  for (std::uint32_t p = 0; p < x.values.size(); ++p) {
    if (x.values[p] != 0) nz.set(W.cell_of(p));
  }
  SparseCheck out;
  out.nonzero_upper_density = density_range(nz, F_probe, W).upper;
  out.estimate = entropy_estimate(x, {F_probe});
  return out;
}

PatternField join_fields(const PatternField& x, const PatternField& y) {
  x.validate();
  y.validate();
  if (x.window.get() != y.window.get() && !(x.window->universe() == y.window->universe())) {
    throw Error("join_fields: fields live on different windows");
  }
  std::unordered_map<std::uint64_t, std::uint32_t> code;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  PatternField out{x.window, {}, std::vector<std::uint32_t>(x.size())};
  // Zero of the product is the pair of zeros.
  code[0] = 0;
  pairs.emplace_back(0, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::uint64_t k = (static_cast<std::uint64_t>(x.values[i]) << 32) | y.values[i];
    auto [it, fresh] = code.emplace(k, static_cast<std::uint32_t>(pairs.size()));
    if (fresh) pairs.emplace_back(x.values[i], y.values[i]);
    out.values[i] = it->second;
  }
  for (const auto& [a, b] : pairs) out.alphabet.push_back(x.alphabet[a] + "|" + y.alphabet[b]);
  return out;
}

PatternField apply_block_code(const PatternField& x, const FiniteSubset& F0,
                              const std::function<std::uint32_t(const std::vector<std::uint32_t>&)>& code,
                              std::vector<std::string> alphabet) {
  x.validate();
  if (alphabet.empty()) throw Error("block code: empty alphabet");
  const Window& W = *x.window;
  PatternField y{x.window, std::move(alphabet), std::vector<std::uint32_t>(x.size(), 0)};
  for (std::uint32_t p = 0; p < x.size(); ++p) {
    const auto b = extract_block(x, F0, W.at(p));
    if (!b) continue;
    const auto v = code(b->values);
    if (v >= y.alphabet.size()) throw Error("block code: symbol out of range");
    y.values[p] = v;
  }
  return y;
}

std::optional<int> find_probe_index(const PatternField& x, double eps, int max_index) {
  if (!(eps > 0)) throw Error("find_probe_index: eps must be positive");
  const Group& g = x.window->group();
  for (int n = 1; n <= max_index; ++n) {
    const auto F = folner_set(g, n);
    if (!(static_cast<double>(F.size()) > 1.0 / eps)) continue;
    BlockCount c;
    try {
      c = block_count(x, F);
    } catch (const Error&) {
      return std::nullopt;
    }
    if (std::log2(static_cast<double>(c.distinct)) / static_cast<double>(F.size()) <= eps) return n;
  }
  return std::nullopt;
}

}  // namespace amtile
