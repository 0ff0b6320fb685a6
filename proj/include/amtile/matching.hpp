#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "amtile/subset.hpp"

namespace amtile {

/// Maximum bipartite matching by Hopcroft-Karp. Left vertex u scans adj[u] in
/// the given order, so equal inputs always give equal matchings.
struct BipartiteMatching {
  std::vector<int> mate_left;   // -1 when unmatched
  std::vector<int> mate_right;  // -1 when unmatched
  std::size_t size = 0;
};

BipartiteMatching hopcroft_karp(std::size_t n_right, const std::vector<std::vector<int>>& adj);

/// Left vertices reachable by alternating paths from unmatched left vertex
/// `from`, and their neighbours. The first set is a Hall violator: it is one
/// larger than the second.
std::pair<std::vector<int>, std::vector<int>> hall_violator(const BipartiteMatching& m,
                                                            const std::vector<std::vector<int>>& adj, int from);

struct HallMatch {
  /// (b, a) with a in F b, ordered as B.
  std::vector<std::pair<Element, Element>> pairs;
  bool complete = false;
  /// Some N >= 1 has deg(b) >= N for every b and deg(a) <= N for every a.
  bool degree_condition = false;
  std::size_t min_left_degree = 0;
  std::size_t max_right_degree = 0;
  /// Populated when incomplete.
  std::vector<Element> deficient;
  std::vector<Element> deficient_neighbors;
};

/// Matches B into A under b R a iff a ∈ F b. Adjacency is ordered by the
/// canonical order of the displacement a b^-1.
HallMatch hall_match(const FiniteSubset& B, const FiniteSubset& A, const FiniteSubset& F);

}  // namespace amtile
