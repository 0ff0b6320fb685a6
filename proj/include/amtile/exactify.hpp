#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "amtile/matching.hpp"
#include "amtile/quasitile.hpp"

namespace amtile {

struct MarkedShape {
  Shape shape;
  FiniteSubset A;
  FiniteSubset A_prime;
};

/// A = the first ceil(2 gamma |S|) elements of S in canonical order, A' the
/// next as many. Throws when 2|A| > |S| or |A| >= 3 gamma |S|.
MarkedShape choose_marked_subsets(const Shape& S, double gamma);
bool markable(std::size_t shape_size, double gamma);

struct ExactifyParams {
  double gamma = 0.05;
  FiniteSubset K = FiniteSubset(Group::zd(1));
  double eps = 0.3;
  /// 0 means gamma / 4.
  double xi = 0;
  /// 0 means xi / (2 |F|).
  double xi_prime = 0;
  int max_f_index = 64;
  /// Fixed displacement set for hand-built instances; normally searched.
  std::optional<FiniteSubset> displacement;
  /// Auxiliary shapes are F_{m n_F} for the listed multipliers m.
  std::vector<int> aux_multipliers{2, 3};
};

struct TileProvenance {
  Element source_center;
  std::vector<std::uint32_t> absorbed;  // positions, ascending
  bool fallback = false;                // absorbed a point by the nearest-point rule
};

struct ExactifyReport {
  double gamma = 0;
  double eps = 0;
  double xi = 0;
  double xi_prime = 0;
  double ben_threshold = 0;
  bool ben_threshold_met = false;
  Rational input_coverage;
  bool coverage_precondition_met = false;
  std::size_t unmarked_shapes = 0;

  int f_index = 0;
  std::size_t f_size = 0;
  Rational f_min_A;
  Rational f_min_A_prime;
  Rational f_max_B;

  std::size_t uncovered = 0;  // |B|
  std::size_t aux_tiles = 0;
  double aux_worst_ratio = 0;  // max |F S △ S| / |S| over auxiliary shapes
  std::size_t matched_local = 0;
  std::size_t residual = 0;  // |B'|
  std::size_t matched_residual = 0;
  std::size_t fallback_points = 0;
  std::size_t fallback_tiles = 0;

  bool matching_complete = false;
  bool growth_bound_met = false;
  bool invariance_met = false;
  double worst_growth = 0;  // max |T*| / |T°|
  Rational worst_invariance;
  std::size_t non_invariant_shapes = 0;
  std::size_t violations = 0;  // exactness audit on the core
  bool conformant() const { return matching_complete; }
};

struct ExactResult {
  Quasitiling tiling;
  std::vector<TileProvenance> provenance;  // aligned with tiling.tiles()
  /// Displacement Φ(b) b^-1 at each residual point b, zero elsewhere.
  PatternField y;
  ExactifyReport report;
};

/// Smallest Følner index n such that every admissible translate F_n g
/// (g in the core, F_n g in the universe) holds at least gamma|F| points of
/// A and of A' and fewer than gamma|F| of B.
struct FSearch {
  std::optional<int> index;
  Rational min_A, min_A_prime, max_B;
};
FSearch search_displacement_set(const Window& W, const CellBits& A, const CellBits& A_prime, const CellBits& B,
                                double gamma, int max_index);

/// Matches b ∈ B into A within one auxiliary tile, in coordinates relative to
/// the tile center so that translated configurations give translated pairs.
std::vector<std::pair<Element, Element>> match_in_tile(const Group& g, const Element& center,
                                                       const FiniteSubset& B, const FiniteSubset& A,
                                                       const FiniteSubset& F);

ExactResult exactify(const Quasitiling& qt, const ExactifyParams& p);

struct ExactAudit {
  std::size_t uncovered = 0;
  std::size_t multiply_covered = 0;
  std::vector<std::uint32_t> uncovered_points;
  std::vector<std::uint32_t> multiple_points;
  std::size_t total() const { return uncovered + multiply_covered; }
};

ExactAudit audit_exact(const Quasitiling& t, std::span<const std::uint32_t> region);

}  // namespace amtile
