#include "amtile/subset.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

namespace amtile {

namespace {

void require_same(const Group& a, const Group& b) {
  if (!(a == b)) throw Error("mismatched group contexts: " + a.name() + " vs " + b.name());
}

struct CanonicalLess {
  const Group* g;
  bool operator()(const Element& a, const Element& b) const { return g->less(a, b); }
};

Element row_key(const Element& e, std::size_t last) {
  Element k = e;
  k.v[last] = 0;
  return k;
}

void split_cyclic(const Group& g, Element start, std::int64_t length, std::vector<Run>& out) {
  if (!g.last_axis_cyclic()) {
    out.push_back(Run{start, length});
    return;
  }
  const std::size_t last = g.arity() - 1;
  const std::int64_t q = g.modulus();
  const std::int64_t r0 = start.v[last];
  if (r0 + length <= q) {
    out.push_back(Run{start, length});
    return;
  }
  out.push_back(Run{start, q - r0});
  start.v[last] = 0;
  out.push_back(Run{start, length - (q - r0)});
}

}  // namespace

FiniteSubset::FiniteSubset(Group g, std::vector<Element> elements) : group_(g) {
  std::vector<std::pair<std::int64_t, Element>> keyed;
  keyed.reserve(elements.size());
  for (const auto& e : elements) {
    group_.check(e);
    keyed.emplace_back(group_.shell(e), e);
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second.v < b.second.v;
  });
  elements_.reserve(keyed.size());
  for (const auto& [shell, e] : keyed) {
    if (elements_.empty() || !(elements_.back() == e)) elements_.push_back(e);
  }
}

FiniteSubset adopt_sorted(Group g, std::vector<Element> elements) {
  return FiniteSubset(g, std::move(elements), FiniteSubset::Sorted{});
}

bool FiniteSubset::contains(const Element& e) const {
  return std::binary_search(elements_.begin(), elements_.end(), e, CanonicalLess{&group_});
}

bool FiniteSubset::is_subset_of(const FiniteSubset& other) const {
  require_same(group_, other.group_);
  return std::includes(other.elements_.begin(), other.elements_.end(), elements_.begin(), elements_.end(),
                       CanonicalLess{&group_});
}

FiniteSubset FiniteSubset::inverse() const {
  std::vector<Element> out;
  out.reserve(elements_.size());
  for (const auto& e : elements_) out.push_back(group_.inv(e));
  return FiniteSubset(group_, std::move(out));
}

FiniteSubset FiniteSubset::right_translate(const Element& c) const {
  group_.check(c);
  std::vector<Element> out;
  out.reserve(elements_.size());
  for (const auto& e : elements_) out.push_back(group_.mul(e, c));
  return FiniteSubset(group_, std::move(out));
}

FiniteSubset FiniteSubset::left_translate(const Element& c) const {
  group_.check(c);
  std::vector<Element> out;
  out.reserve(elements_.size());
  for (const auto& e : elements_) out.push_back(group_.mul(c, e));
  return FiniteSubset(group_, std::move(out));
}

std::vector<Run> runs_of(const Group& g, std::span<const Element> elements) {
  const std::size_t last = g.arity() - 1;
  std::vector<Element> sorted(elements.begin(), elements.end());
  std::sort(sorted.begin(), sorted.end(), [](const Element& a, const Element& b) { return a.v < b.v; });
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  // Lexicographic order on v puts the last meaningful coordinate innermost
  // because unused coordinates are all zero.
  std::vector<Run> runs;
  for (const auto& e : sorted) {
    if (!runs.empty()) {
      Run& r = runs.back();
      Element expect = r.start;
      expect.v[last] += r.length;
      if (expect == e) {
        ++r.length;
        continue;
      }
    }
    runs.push_back(Run{e, 1});
  }
  return runs;
}

void right_translate_run(const Group& g, const Run& run, const Element& c, std::vector<Run>& out) {
  split_cyclic(g, g.mul(run.start, c), run.length, out);
}

void left_translate_run(const Group& g, const Element& c, const Run& run, std::vector<Run>& out) {
  split_cyclic(g, g.mul(c, run.start), run.length, out);
}

IntervalIndex::IntervalIndex(const FiniteSubset& s) : last_(s.group().arity() - 1) {
  for (const auto& r : runs_of(s.group(), s.elements())) add(r);
  finish();
}

IntervalIndex::IntervalIndex(const Group& g, std::span<const Run> runs) : last_(g.arity() - 1) {
  for (const auto& r : runs) add(r);
  finish();
}

void IntervalIndex::add(const Run& r) {
  const std::int64_t lo = r.start.v[last_];
  rows_[row_key(r.start, last_)].spans.emplace_back(lo, lo + r.length - 1);
}

void IntervalIndex::finish() {
  size_ = 0;
  for (auto& [key, row] : rows_) {
    auto& s = row.spans;
    std::sort(s.begin(), s.end());
    std::vector<std::pair<std::int64_t, std::int64_t>> merged;
    for (const auto& iv : s) {
      if (!merged.empty() && iv.first <= merged.back().second + 1) {
        merged.back().second = std::max(merged.back().second, iv.second);
      } else {
        merged.push_back(iv);
      }
    }
    s = std::move(merged);
    row.before.assign(s.size(), 0);
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      row.before[i] = acc;
      acc += s[i].second - s[i].first + 1;
    }
    size_ += static_cast<std::size_t>(acc);
  }
}

const IntervalIndex::Row* IntervalIndex::row_of(const Element& e) const {
  auto it = rows_.find(row_key(e, last_));
  return it == rows_.end() ? nullptr : &it->second;
}

bool IntervalIndex::contains(const Element& e) const { return contains_run(Run{e, 1}); }

bool IntervalIndex::contains_run(const Run& r) const {
  const Row* row = row_of(r.start);
  if (!row) return false;
  const std::int64_t lo = r.start.v[last_];
  const std::int64_t hi = lo + r.length - 1;
  auto it = std::upper_bound(row->spans.begin(), row->spans.end(), std::make_pair(lo, INT64_MAX));
  if (it == row->spans.begin()) return false;
  --it;
  return it->first <= lo && it->second >= hi;
}

std::int64_t IntervalIndex::count_run(const Run& r) const {
  const Row* row = row_of(r.start);
  if (!row) return 0;
  const std::int64_t lo = r.start.v[last_];
  const std::int64_t hi = lo + r.length - 1;
  auto it = std::upper_bound(row->spans.begin(), row->spans.end(), std::make_pair(lo, INT64_MAX));
  if (it != row->spans.begin()) --it;
  std::int64_t n = 0;
  for (; it != row->spans.end() && it->first <= hi; ++it) {
    const std::int64_t a = std::max(lo, it->first);
    const std::int64_t b = std::min(hi, it->second);
    if (b >= a) n += b - a + 1;
  }
  return n;
}

std::vector<Element> IntervalIndex::elements() const {
  std::vector<Element> out;
  out.reserve(size_);
  for (const auto& [key, row] : rows_) {
    for (const auto& [lo, hi] : row.spans) {
      Element e = key;
      for (std::int64_t x = lo; x <= hi; ++x) {
        e.v[last_] = x;
        out.push_back(e);
      }
    }
  }
  return out;
}

FiniteSubset set_union(const FiniteSubset& a, const FiniteSubset& b) {
  require_same(a.group(), b.group());
  std::vector<Element> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out), CanonicalLess{&a.group()});
  return adopt_sorted(a.group(), std::move(out));
}

FiniteSubset set_intersection(const FiniteSubset& a, const FiniteSubset& b) {
  require_same(a.group(), b.group());
  std::vector<Element> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out),
                        CanonicalLess{&a.group()});
  return adopt_sorted(a.group(), std::move(out));
}

FiniteSubset set_difference(const FiniteSubset& a, const FiniteSubset& b) {
  require_same(a.group(), b.group());
  std::vector<Element> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out), CanonicalLess{&a.group()});
  return adopt_sorted(a.group(), std::move(out));
}

FiniteSubset set_symmetric_difference(const FiniteSubset& a, const FiniteSubset& b) {
  require_same(a.group(), b.group());
  std::vector<Element> out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out),
                                CanonicalLess{&a.group()});
  return adopt_sorted(a.group(), std::move(out));
}

namespace {

IntervalIndex product_index(const FiniteSubset& K, const FiniteSubset& T) {
  require_same(K.group(), T.group());
  const Group& g = K.group();
  const auto truns = runs_of(g, T.elements());
  std::vector<Run> out;
  out.reserve(K.size() * truns.size());
  for (const auto& k : K) {
    for (const auto& r : truns) left_translate_run(g, k, r, out);
  }
  return IntervalIndex(g, out);
}

}  // namespace

FiniteSubset set_product(const FiniteSubset& K, const FiniteSubset& T) {
  return FiniteSubset(K.group(), product_index(K, T).elements());
}

std::size_t product_size(const FiniteSubset& K, const FiniteSubset& T) { return product_index(K, T).size(); }

Rational invariance_ratio(const FiniteSubset& T, const FiniteSubset& K) {
  if (T.empty()) throw Error("invariance_ratio: empty set");
  const IntervalIndex kt = product_index(K, T);
  std::int64_t common = 0;
  for (const auto& r : runs_of(T.group(), T.elements())) common += kt.count_run(r);
  const auto sym = static_cast<std::int64_t>(kt.size()) + static_cast<std::int64_t>(T.size()) - 2 * common;
  return Rational(sym, static_cast<std::int64_t>(T.size()));
}

FiniteSubset k_core(const FiniteSubset& T, const FiniteSubset& K) {
  require_same(T.group(), K.group());
  const Group& g = T.group();
  const IntervalIndex tidx(T);
  const auto kruns = runs_of(g, K.elements());
  std::vector<Element> out;
  std::vector<Run> moved;
  for (const auto& x : T) {
    bool inside = true;
    for (const auto& r : kruns) {
      moved.clear();
      right_translate_run(g, r, x, moved);
      for (const auto& m : moved) {
        if (!tidx.contains_run(m)) {
          inside = false;
          break;
        }
      }
      if (!inside) break;
    }
    if (inside) out.push_back(x);
  }
  return adopt_sorted(g, std::move(out));
}

namespace {

std::int64_t heis_centre(std::int64_t a, std::int64_t b) {
  const std::int64_t ab = a * b;
  if (ab % 2 == 0) return ab / 2;
  const bool positive_half = a > 0 || (a == 0 && b > 0);
  const std::int64_t fl = (ab - 1) / 2;  // floor for odd ab (ab-1 is even)
  return positive_half ? fl : fl + 1;
}

void box(std::size_t dim, std::int64_t n, std::size_t i, Element& cur, std::vector<Element>& out) {
  if (i == dim) {
    out.push_back(cur);
    return;
  }
  for (std::int64_t x = -n; x <= n; ++x) {
    cur.v[i] = x;
    box(dim, n, i + 1, cur, out);
  }
  cur.v[i] = 0;
}

}  // namespace

FiniteSubset folner_set(const FolnerSpec& spec) {
  const Group& g = spec.group;
  const std::int64_t n = spec.index;
  if (n < 1) throw Error("folner_set: index must be >= 1");
  std::vector<Element> out;
  out.reserve(folner_size(g, spec.index));
  switch (g.kind()) {
    case GroupKind::Zd: {
      Element cur;
      box(static_cast<std::size_t>(g.dim()), n, 0, cur, out);
      break;
    }
    case GroupKind::Heis3: {
      const std::int64_t R = n * n + n;
      for (std::int64_t a = -n; a <= n; ++a) {
        for (std::int64_t b = -n; b <= n; ++b) {
          const std::int64_t c0 = heis_centre(a, b);
          for (std::int64_t c = c0 - R; c <= c0 + R; ++c) {
            Element e;
            e.v = {a, b, c, 0};
            out.push_back(e);
          }
        }
      }
      break;
    }
    case GroupKind::ZdxZq: {
      std::vector<Element> base;
      Element cur;
      box(static_cast<std::size_t>(g.dim()), n, 0, cur, base);
      for (auto e : base) {
        for (std::int64_t r = 0; r < g.modulus(); ++r) {
          e.v[static_cast<std::size_t>(g.dim())] = r;
          out.push_back(e);
        }
      }
      break;
    }
  }
  return FiniteSubset(g, std::move(out));
}

std::size_t folner_size(const Group& g, int n) {
  const auto side = static_cast<std::size_t>(2 * n + 1);
  std::size_t s = 1;
  switch (g.kind()) {
    case GroupKind::Zd:
      for (int i = 0; i < g.dim(); ++i) s *= side;
      return s;
    case GroupKind::Heis3:
      return side * side * static_cast<std::size_t>(2 * (n * n + n) + 1);
    case GroupKind::ZdxZq:
      for (int i = 0; i < g.dim(); ++i) s *= side;
      return s * static_cast<std::size_t>(g.modulus());
  }
  return 0;
}

FiniteSubset ball(const Group& g, int r) {
  if (r < 0) throw Error("ball: negative radius");
  std::vector<Element> frontier{g.identity()};
  std::vector<Element> all{g.identity()};
  std::unordered_map<Element, int, ElementHash> seen{{g.identity(), 0}};
  const auto gens = g.generators();
  for (int step = 0; step < r; ++step) {
    std::vector<Element> next;
    for (const auto& e : frontier) {
      for (const auto& s : gens) {
        const Element x = g.mul(e, s);
        if (seen.emplace(x, step + 1).second) {
          next.push_back(x);
          all.push_back(x);
        }
      }
    }
    frontier = std::move(next);
  }
  return FiniteSubset(g, std::move(all));
}

double estim_delta(double eps, const FiniteSubset& K) {
  if (!(eps > 0 && eps < 1)) throw Error("estim_delta: eps must be in (0,1)");
  if (K.empty()) throw Error("estim_delta: empty K");
  return eps / static_cast<double>(K.size());
}

double ben_delta(double eps, std::size_t k_size) {
  if (!(eps > 0)) throw Error("ben_delta: eps must be positive");
  const double sup = eps / (static_cast<double>(k_size) + 2.0 + eps);
  return std::nextafter(sup, 0.0);
}

}  // namespace amtile
