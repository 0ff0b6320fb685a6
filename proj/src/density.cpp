#include "amtile/density.hpp"

#include <algorithm>
#include <limits>

#include "amtile/parallel.hpp"

namespace amtile {

DensityRange density_range(const CellBits& S, const FiniteSubset& F, const Window& W) {
  if (F.empty()) throw Error("density: empty F");
  const auto runs = runs_of(F.group(), F.elements());
  const auto core = W.core_positions();
  struct Part {
    std::uint32_t lo = std::numeric_limits<std::uint32_t>::max();
    std::uint32_t hi = 0;
    std::size_t n = 0;
  };
  std::vector<Part> parts(chunk_count(core.size()));
  parallel_chunks(core.size(), [&](std::size_t k, std::size_t b, std::size_t e) {
    std::vector<CellSpan> spans;
    Part p;
    for (std::size_t i = b; i < e; ++i) {
      if (!W.place(runs, W.at(core[i]), spans)) continue;
      const std::uint32_t c = S.count(spans);
      p.lo = std::min(p.lo, c);
      p.hi = std::max(p.hi, c);
      ++p.n;
    }
    parts[k] = p;
  });
  Part all;
  for (const auto& p : parts) {
    all.lo = std::min(all.lo, p.lo);
    all.hi = std::max(all.hi, p.hi);
    all.n += p.n;
  }
  if (all.n == 0) throw Error("density: no translate of F fits in the window");
  const auto f = static_cast<std::int64_t>(F.size());
  return DensityRange{Rational(all.lo, f), Rational(all.hi, f), all.n};
}

DensityRange density_range(const FiniteSubset& S, const FiniteSubset& F, const Window& W) {
  return density_range(cell_bits(W, S), F, W);
}

Rational lower_density(const FiniteSubset& S, const FiniteSubset& F, const Window& W) {
  return density_range(S, F, W).lower;
}

Rational upper_density(const FiniteSubset& S, const FiniteSubset& F, const Window& W) {
  return density_range(S, F, W).upper;
}

std::vector<std::uint32_t> admissible_translates(const FiniteSubset& F, const Window& W) {
  const auto runs = runs_of(F.group(), F.elements());
  std::vector<std::uint32_t> out;
  std::vector<CellSpan> spans;
  for (auto pos : W.core_positions()) {
    if (W.place(runs, W.at(pos), spans)) out.push_back(pos);
  }
  return out;
}

}  // namespace amtile
