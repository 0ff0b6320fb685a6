#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amtile/pattern.hpp"
#include "amtile/window.hpp"

namespace amtile {

struct Shape {
  int id = 0;
  FiniteSubset elements;
  friend bool operator==(const Shape&, const Shape&) = default;
};

struct TileRef {
  std::size_t shape = 0;  // index into Quasitiling::shapes()
  Element center;
};

/// Shapes plus per-shape center sets on a window. Construction validates
/// that shapes contain the identity, center sets are disjoint, every tile lies
/// in the universe and no two tiles coincide.
///
/// Tiles are kept in canonical order: shapes by decreasing size (then id),
/// centers in canonical order within a shape.
class Quasitiling {
 public:
  Quasitiling(WindowPtr window, std::vector<Shape> shapes, std::vector<FiniteSubset> centers);
  static Quasitiling empty(WindowPtr window);

  const Window& window() const { return *window_; }
  const WindowPtr& window_ptr() const { return window_; }
  const std::vector<Shape>& shapes() const { return shapes_; }
  const std::vector<FiniteSubset>& centers() const { return centers_; }
  const std::vector<TileRef>& tiles() const { return tiles_; }
  std::size_t tile_count() const { return tiles_.size(); }
  /// Canonical positions of tile i, ascending.
  const std::vector<std::uint32_t>& tile_points(std::size_t i) const { return points_[i]; }
  std::optional<std::size_t> shape_index(int id) const;
  std::size_t total_tile_size() const;
  bool is_disjoint() const;

  friend bool operator==(const Quasitiling& a, const Quasitiling& b);

 private:
  WindowPtr window_;
  std::vector<Shape> shapes_;
  std::vector<FiniteSubset> centers_;
  std::vector<TileRef> tiles_;
  std::vector<std::vector<std::uint32_t>> points_;
};

/// Per-tile subsets T° ⊆ T, aligned with Quasitiling::tiles().
struct DisjointWitness {
  std::vector<std::vector<std::uint32_t>> parts;
};

struct WitnessAudit {
  bool ok = false;
  std::size_t not_subset = 0;    // parts with a point outside their tile
  std::size_t too_small = 0;     // parts below (1-eps)|T|
  std::size_t shared_points = 0; // points claimed by more than one part
  double worst_fraction = 1.0;   // min |T°|/|T|
};

WitnessAudit verify_witness(const Quasitiling& qt, const DisjointWitness& w, double eps);
/// T°_i = T_i minus the earlier tiles, in canonical tile order.
DisjointWitness sequential_witness(const Quasitiling& qt);

/// Least r with (1 - eps/2)^r < eps.
int required_shape_count(double eps);

struct GreedyParams {
  double eps = 0.25;
  int n0 = 1;
  int stride = 1;
  /// 0 means required_shape_count(eps).
  int shape_count = 0;
  /// Search shape indices until each F_{n_i} is (F_{n_j}, delta_j)-invariant
  /// for j < i, with delta_j = delta_scale * eps / (|F_{n_j}| r). Fails when
  /// no index up to max_index qualifies.
  bool strict = false;
  double delta_scale = 0.25;
  int max_index = 64;
};

struct ShapeReport {
  int index = 0;
  std::size_t size = 0;
  double delta = 0;
  /// max over smaller shapes j of |F_{n_j} S △ S| / |S|
  double worst_ratio = 0;
  std::size_t tiles = 0;
};

struct GreedyReport {
  double eps = 0;
  int required_shapes = 0;
  std::vector<ShapeReport> shapes;  // ascending index
  bool pairwise_invariance_met = false;
  std::size_t tiles = 0;
  Rational covered_core;
};

struct GreedyResult {
  Quasitiling qt;
  DisjointWitness witness;
  GreedyReport report;
};

/// Shape indices the greedy construction would use.
std::vector<int> choose_shape_indices(const Group& g, const GreedyParams& p);

/// Greedy eps-disjoint quasitiling by Følner shapes. Shapes are scanned from
/// largest to smallest and candidate centers in canonical order; c is admitted
/// iff |Sc ∩ H| < eps|S| where H is the union of admitted tiles, and T° = Sc \ H.
GreedyResult greedy_quasitile(WindowPtr window, const GreedyParams& p);
/// Same construction for explicit shapes (each containing the identity).
GreedyResult greedy_quasitile(WindowPtr window, std::vector<Shape> shapes, double eps);

/// Core positions g with Sg in the universe and |H ∩ Sg| < eps|S|.
std::size_t maximality_violations(const Quasitiling& qt, const FiniteSubset& shape, double eps);

Rational covered_fraction(const Quasitiling& qt, std::span<const std::uint32_t> region);
inline Rational covered_core(const Quasitiling& qt) { return covered_fraction(qt, qt.window().core_positions()); }

/// Tile given by its canonical positions and a center inside it.
struct TilePart {
  std::vector<std::uint32_t> points;
  Element center;
};

/// Builds a quasitiling from explicit tiles. Shapes are deduplicated and
/// numbered in order of first appearance.
Quasitiling tiling_from_parts(WindowPtr window, std::span<const TilePart> parts);

/// The point g of the tile minimising g anchor^-1 in canonical order.
Element pick_center(const Window& W, std::span<const std::uint32_t> points, const Element& anchor);

/// Replaces each tile by its witness part. The new center is the point g of
/// T° minimising g c^-1 in canonical order; the new shape is T° g^-1. Shapes
/// are shared between equal sets and numbered in tile order.
Quasitiling disjointify(const Quasitiling& qt, const DisjointWitness& w);

/// For each shape of disjointify(g.qt, g.witness), the index of the greedy
/// shape its tiles were cut from (first tile wins).
std::vector<int> disjoint_shape_classes(const GreedyResult& g, const Quasitiling& disjoint);

/// Shape symbol at each center, zero elsewhere. Symbol k >= 1 is shapes()[k-1].
PatternField to_pattern_field(const Quasitiling& qt);
/// Inverse of to_pattern_field given the shape table.
Quasitiling parse_pattern_field(const PatternField& x, const std::vector<Shape>& shapes);

/// Default margin for a window that hosts shapes up to E: E E^-1.
FiniteSubset default_margin(const FiniteSubset& largest_shape);

std::string shape_symbol(int id);

}  // namespace amtile
