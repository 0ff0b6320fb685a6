#pragma once

#include <cstddef>

#include "amtile/window.hpp"

namespace amtile {

/// Windowed Banach density estimates: extremes of |S ∩ Fg| / |F| over the
/// translates g in the window core with Fg inside the universe.
struct DensityRange {
  Rational lower;
  Rational upper;
  std::size_t translates = 0;
};

DensityRange density_range(const CellBits& S, const FiniteSubset& F, const Window& W);
DensityRange density_range(const FiniteSubset& S, const FiniteSubset& F, const Window& W);
Rational lower_density(const FiniteSubset& S, const FiniteSubset& F, const Window& W);
Rational upper_density(const FiniteSubset& S, const FiniteSubset& F, const Window& W);

/// Positions g of the core whose translate Fg fits in the universe, in
/// canonical order.
std::vector<std::uint32_t> admissible_translates(const FiniteSubset& F, const Window& W);

}  // namespace amtile
