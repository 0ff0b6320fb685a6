#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "amtile/group.hpp"
#include "amtile/rational.hpp"

namespace amtile {

/// Finite set of group elements, kept deduplicated and sorted in canonical
/// enumeration order.
class FiniteSubset {
 public:
  explicit FiniteSubset(Group g) : group_(g) {}
  FiniteSubset(Group g, std::vector<Element> elements);
  static FiniteSubset identity(Group g) { return FiniteSubset(g, {g.identity()}); }

  const Group& group() const { return group_; }
  std::span<const Element> elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  auto begin() const { return elements_.begin(); }
  auto end() const { return elements_.end(); }
  const Element& operator[](std::size_t i) const { return elements_[i]; }

  bool contains(const Element& e) const;
  bool is_subset_of(const FiniteSubset& other) const;
  FiniteSubset inverse() const;
  /// { t c : t in this }
  FiniteSubset right_translate(const Element& c) const;
  /// { c t : t in this }
  FiniteSubset left_translate(const Element& c) const;

  friend bool operator==(const FiniteSubset& a, const FiniteSubset& b) {
    return a.group_ == b.group_ && a.elements_ == b.elements_;
  }

 private:
  struct Sorted {};
  FiniteSubset(Group g, std::vector<Element> elements, Sorted) : group_(g), elements_(std::move(elements)) {}
  friend FiniteSubset adopt_sorted(Group g, std::vector<Element> elements);

  Group group_;
  std::vector<Element> elements_;
};

/// Wraps an already canonical-sorted, duplicate-free vector without re-sorting.
FiniteSubset adopt_sorted(Group g, std::vector<Element> elements);

/// Maximal stretch of consecutive values of the last coordinate sharing the
/// remaining coordinates. Translating a run (on either side) yields a run,
/// or two when the last axis is cyclic and wraps.
struct Run {
  Element start;
  std::int64_t length = 0;
};

std::vector<Run> runs_of(const Group& g, std::span<const Element> elements);
/// Right translates of a run by c, appended to out.
void right_translate_run(const Group& g, const Run& run, const Element& c, std::vector<Run>& out);
void left_translate_run(const Group& g, const Element& c, const Run& run, std::vector<Run>& out);

/// Row-keyed interval index over a finite set. Rows are the coordinates other
/// than the last; each row holds merged closed intervals of the last one.
class IntervalIndex {
 public:
  IntervalIndex() = default;
  explicit IntervalIndex(const FiniteSubset& s);
  IntervalIndex(const Group& g, std::span<const Run> runs);

  bool contains(const Element& e) const;
  bool contains_run(const Run& r) const;
  std::int64_t count_run(const Run& r) const;
  std::size_t size() const { return size_; }
  std::vector<Element> elements() const;

 private:
  struct Row {
    std::vector<std::pair<std::int64_t, std::int64_t>> spans;
    std::vector<std::int64_t> before;  // total length of spans preceding i
  };
  void add(const Run& r);
  void finish();
  const Row* row_of(const Element& e) const;

  std::size_t last_ = 0;
  std::unordered_map<Element, Row, ElementHash> rows_;
  std::size_t size_ = 0;
};

FiniteSubset set_union(const FiniteSubset& a, const FiniteSubset& b);
FiniteSubset set_intersection(const FiniteSubset& a, const FiniteSubset& b);
FiniteSubset set_difference(const FiniteSubset& a, const FiniteSubset& b);
FiniteSubset set_symmetric_difference(const FiniteSubset& a, const FiniteSubset& b);

/// KT = { kt : k in K, t in T }.
FiniteSubset set_product(const FiniteSubset& K, const FiniteSubset& T);
/// |KT| without materialising the product.
std::size_t product_size(const FiniteSubset& K, const FiniteSubset& T);

/// |KT △ T| / |T|. Throws on empty T.
Rational invariance_ratio(const FiniteSubset& T, const FiniteSubset& K);
inline bool is_invariant(const FiniteSubset& T, const FiniteSubset& K, double eps) {
  return invariance_ratio(T, K).below(eps);
}

/// { g in T : Kg ⊆ T }.
FiniteSubset k_core(const FiniteSubset& T, const FiniteSubset& K);

struct FolnerSpec {
  Group group;
  int index = 1;
};

/// Zd: the box [-n,n]^d. ZdxZq: that box times the whole cyclic factor.
/// Heis3: |a|,|b| <= n and c within n^2+n of a centre line ab/2, where odd ab
/// rounds down on the lexicographically positive half of the (a,b) plane and
/// up on the other. This keeps (2n+1)^2 (2n^2+2n+1) points and makes the set
/// closed under inversion, (a,b,c)^-1 = (-a,-b,ab-c).
FiniteSubset folner_set(const FolnerSpec& spec);
inline FiniteSubset folner_set(const Group& g, int n) { return folner_set(FolnerSpec{g, n}); }
std::size_t folner_size(const Group& g, int n);

/// Word-metric ball of radius r over Group::generators().
FiniteSubset ball(const Group& g, int r);

/// delta = eps/|K|: a (K,delta)-invariant T has a (1-eps)-large K-core.
double estim_delta(double eps, const FiniteSubset& K);
/// Largest admissible delta under (|K|delta + 2delta)/(1-delta) < eps, nudged
/// strictly inside the bound.
double ben_delta(double eps, std::size_t k_size);

}  // namespace amtile
