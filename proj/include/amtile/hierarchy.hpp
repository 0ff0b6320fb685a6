#pragma once

#include <cstdint>
#include <vector>

#include "amtile/exactify.hpp"

namespace amtile {

/// One level of a congruent sequence: an exact tiling of the window core
/// with its invariance target (K, eps) and D = union of its shapes.
struct TilingLevel {
  int k = 1;
  Quasitiling tiling;
  FiniteSubset K;
  double eps = 1;
  FiniteSubset D;
};

TilingLevel make_level(int k, Quasitiling tiling, FiniteSubset K, double eps);
/// Singletons {e}g over the whole universe: the trivial level 0.
TilingLevel singleton_level(WindowPtr window);

/// Construction parameters of the next level.
struct LevelParams {
  FiniteSubset K = FiniteSubset(Group::zd(1));
  double eps = 0.5;
  GreedyParams greedy;
  double gamma = 0.05;
  int max_f_index = 64;
  std::vector<int> aux_multipliers{2, 3};
};

struct LevelReport {
  int k = 0;
  double delta = 0;  // invariance demanded of T* against K'
  std::size_t K_prime_size = 0;
  ExactifyReport exactify;
  std::size_t tiles = 0;
  std::size_t reassigned = 0;  // fine tiles whose center lies outside T*, placed by their first core point
  std::size_t dropped = 0;     // fine tiles with no core point
  std::size_t sandwich_violations = 0;
  std::size_t exact_violations = 0;
  bool congruent = false;
  Rational worst_invariance;
  std::size_t non_invariant_shapes = 0;
  bool invariance_met = false;
};

struct LiftResult {
  TilingLevel level;
  LevelReport report;
};

/// delta_k just below min(eps_next / 2, delta_ben / (|D_k| + 1)).
double lift_delta(double eps_next, std::size_t k_next_size, std::size_t d_size);

/// Merges fine tiles into the tiles of a given exact T*: a coarse tile is the
/// union of the fine tiles whose centers lie in one T* tile. Throws if the
/// result is not congruent with the fine level.
LiftResult merge_level(const TilingLevel& fine, const Quasitiling& t_star, FiniteSubset K, double eps);

/// Builds T* by greedy quasitiling, disjointification and exactification
/// against K' = K ∪ D ∪ D^-1, then merges.
LiftResult lift_level(const TilingLevel& fine, const LevelParams& next);

struct Hierarchy {
  std::vector<TilingLevel> levels;  // level 1 first
  std::vector<LevelReport> reports;
};

/// Levels 1..m from the singleton level, one LevelParams per level.
Hierarchy build_hierarchy(WindowPtr window, const std::vector<LevelParams>& params);

/// True iff on the core every coarse tile is exactly a disjoint union of fine tiles.
bool check_congruent(const TilingLevel& fine, const TilingLevel& coarse);
bool check_congruent(const Quasitiling& fine, const Quasitiling& coarse);

struct MasterPart {
  int shape = 0;   // level-k shape id
  Element offset;  // the part is shape · offset · c inside the tile S c
};

struct MasterEntry {
  int shape = 0;  // level-(k+1) shape id
  std::vector<MasterPart> parts;
};

/// masters[i] gives, for each shape of level i + 2, its partition into level
/// i + 1 shapes; shapes[i] lists the level i + 1 shapes.
struct MasterPartitionTable {
  std::vector<std::vector<Shape>> shapes;
  std::vector<std::vector<MasterEntry>> masters;
  friend bool operator==(const MasterPartitionTable&, const MasterPartitionTable&);
};

struct Normalized {
  std::vector<TilingLevel> levels;
  MasterPartitionTable table;
};

/// Top-down: the first tile of every coarse shape fixes its master partition,
/// and every level is re-derived from the top level and the table.
Normalized normalize_masters(const std::vector<TilingLevel>& levels);

/// Levels 1..m from the top tiling and the table, bottom first.
std::vector<Quasitiling> rederive(const Quasitiling& top, const MasterPartitionTable& table);

}  // namespace amtile
