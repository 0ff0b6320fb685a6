#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "amtile/density.hpp"
#include "amtile/pattern.hpp"

namespace amtile {

/// Restriction of a field to a translate Fg, listed in the canonical order of F.
struct Block {
  FiniteSubset domain;
  std::vector<std::uint32_t> values;
  friend bool operator==(const Block& a, const Block& b) { return a.domain == b.domain && a.values == b.values; }
};

std::optional<Block> extract_block(const PatternField& x, const FiniteSubset& F, const Element& g);

/// Distinct blocks x|Fg over the translates g with Fg inside the universe.
/// The count is a lower bound for the complexity of the infinite system.
struct BlockCount {
  std::size_t distinct = 0;
  std::size_t translates = 0;
};

BlockCount block_count(const PatternField& x, const FiniteSubset& F);
/// Same, restricted to the listed translate positions (those that fit).
BlockCount block_count(const PatternField& x, const FiniteSubset& F, std::span<const std::uint32_t> translates);

struct ProbeRow {
  std::size_t size = 0;
  std::size_t count = 0;
  std::size_t translates = 0;
  double rate = 0;  // log2(count) / size
};

std::vector<ProbeRow> complexity_table(const PatternField& x, const std::vector<FiniteSubset>& probes);
/// min over probes of log2 N(F) / |F|: an upper-bound style estimate.
double entropy_estimate(const PatternField& x, const std::vector<FiniteSubset>& probes);

/// Binary entropy, eps in [0, 1/2].
double theta(double eps);
/// Theta(2 delta) + 2 delta log2(r + 1) + 2 eps.
double entest_budget(int r, double delta, double eps);

/// Parameters of the class-counting entropy bound read off a tiling: shapes
/// split into r classes, delta = 1 / min class size, eps = max over classes
/// of log2(class count) / min size in the class.
struct EntestFit {
  int r = 0;
  double delta = 0;
  double eps = 0;
  double budget = 0;  // entest_budget(r, delta, eps)
  /// Least eps' >= eps with Theta(2 delta) + 2 delta log2(r + 1) <= eps', so
  /// that the class bound gives h < 3 eps'.
  double bound_eps = 0;
  std::vector<std::size_t> class_counts;
  std::vector<std::size_t> class_min_size;
};
/// One entry per shape: (class, size).
EntestFit entest_fit(const std::vector<std::pair<int, std::size_t>>& shapes);

struct SparseCheck {
  Rational nonzero_upper_density;
  double estimate = 0;
};
/// Upper density of non-zero symbols measured with F_probe, and the entropy
/// estimate on the same probe.
SparseCheck sparse_entropy_bound(const PatternField& x, const FiniteSubset& F_probe);

/// Field over the product alphabet, symbol labels "a|b".
PatternField join_fields(const PatternField& x, const PatternField& y);

/// Sliding block code y(g) = code(x|F0g). Points with F0g outside the
/// universe get symbol 0.
PatternField apply_block_code(const PatternField& x, const FiniteSubset& F0,
                              const std::function<std::uint32_t(const std::vector<std::uint32_t>&)>& code,
                              std::vector<std::string> alphabet);

/// Smallest Følner index n with |F_n| > 1/eps and log2 N(F_n)/|F_n| <= eps.
std::optional<int> find_probe_index(const PatternField& x, double eps, int max_index);

}  // namespace amtile
