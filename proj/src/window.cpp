#include "amtile/window.hpp"

#include <algorithm>
#include <bit>

namespace amtile {

Window::Window(FiniteSubset universe, FiniteSubset margin)
    : universe_(std::move(universe)), margin_(std::move(margin)), core_(universe_.group()) {
  if (!(universe_.group() == margin_.group())) throw Error("window: margin is in a different group");
  if (universe_.empty()) throw Error("window: empty universe");
  if (universe_.size() > UINT32_MAX / 2) throw Error("window: universe too large");
  build();
}

Window::Window(const WindowSpec& spec) : Window(window_universe(spec), spec.margin) { spec_ = spec; }

FiniteSubset window_universe(const WindowSpec& spec) {
  if (spec.side <= 0) return folner_set(spec.group, spec.folner_index);
  const Group& g = spec.group;
  if (g.kind() == GroupKind::Heis3) throw Error("window: box sides are only defined for lattice groups");
  const std::int64_t lo = -(spec.side / 2);
  const std::int64_t hi = lo + spec.side - 1;
  const auto d = static_cast<std::size_t>(g.dim());
  std::vector<Element> out;
  Element cur;
  for (std::size_t i = 0; i < d; ++i) cur.v[i] = lo;
  while (true) {
    if (g.last_axis_cyclic()) {
      for (std::int64_t r = 0; r < g.modulus(); ++r) {
        cur.v[d] = r;
        out.push_back(cur);
      }
      cur.v[d] = 0;
    } else {
      out.push_back(cur);
    }
    std::size_t i = 0;
    while (i < d && cur.v[i] == hi) cur.v[i++] = lo;
    if (i == d) break;
    ++cur.v[i];
  }
  return FiniteSubset(g, std::move(out));
}

void Window::build() {
  const Group& g = group();
  last_ = g.arity() - 1;
  core_ = k_core(universe_, margin_);

  const auto runs = runs_of(g, universe_.elements());
  std::uint32_t cell = 0;
  for (const auto& r : runs) {
    Element key = r.start;
    const std::int64_t lo = key.v[last_];
    key.v[last_] = 0;
    rows_[key].push_back(Span{lo, lo + r.length - 1, cell});
    cell += static_cast<std::uint32_t>(r.length);
  }
  for (auto& [key, spans] : rows_) {
    std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) { return a.lo < b.lo; });
  }

  const std::size_t n = universe_.size();
  pos_to_cell_.resize(n);
  cell_to_pos_.resize(n);
  for (std::uint32_t pos = 0; pos < n; ++pos) {
    const auto c = resolve(Run{universe_[pos], 1});
    pos_to_cell_[pos] = c->cell;
    cell_to_pos_[c->cell] = pos;
  }

  in_core_.assign(n, 0);
  std::uint32_t pos = 0;
  for (const auto& e : core_) {
    while (!(universe_[pos] == e)) ++pos;
    in_core_[pos] = 1;
    core_positions_.push_back(pos);
  }
}

std::optional<std::uint32_t> Window::locate(const Element& e) const {
  if (!group().valid(e)) return std::nullopt;
  const auto c = resolve(Run{e, 1});
  if (!c) return std::nullopt;
  return cell_to_pos_[c->cell];
}

std::optional<CellSpan> Window::resolve(const Run& r) const {
  Element key = r.start;
  const std::int64_t lo = key.v[last_];
  key.v[last_] = 0;
  const auto it = rows_.find(key);
  if (it == rows_.end()) return std::nullopt;
  const auto& spans = it->second;
  const std::int64_t hi = lo + r.length - 1;
  for (const auto& s : spans) {
    if (s.lo <= lo && hi <= s.hi) {
      return CellSpan{s.cell + static_cast<std::uint32_t>(lo - s.lo), static_cast<std::uint32_t>(r.length)};
    }
    if (s.lo > lo) break;
  }
  return std::nullopt;
}

bool Window::place(std::span<const Run> runs, const Element& c, std::vector<CellSpan>& out) const {
  out.clear();
  thread_local std::vector<Run> moved;
  const Group& g = group();
  for (const auto& r : runs) {
    moved.clear();
    right_translate_run(g, r, c, moved);
    for (const auto& m : moved) {
      const auto s = resolve(m);
      if (!s) return false;
      out.push_back(*s);
    }
  }
  return true;
}

std::uint32_t CellBits::count(CellSpan s) const {
  if (s.len == 0) return 0;
  const std::uint32_t a = s.cell;
  const std::uint32_t b = s.cell + s.len;  // exclusive
  std::uint32_t wa = a >> 6;
  const std::uint32_t wb = (b - 1) >> 6;
  const std::uint64_t head = ~std::uint64_t{0} << (a & 63);
  const std::uint64_t tail = ~std::uint64_t{0} >> (63 - ((b - 1) & 63));
  if (wa == wb) return static_cast<std::uint32_t>(std::popcount(words_[wa] & head & tail));
  std::uint32_t n = static_cast<std::uint32_t>(std::popcount(words_[wa] & head));
  for (++wa; wa < wb; ++wa) n += static_cast<std::uint32_t>(std::popcount(words_[wa]));
  return n + static_cast<std::uint32_t>(std::popcount(words_[wb] & tail));
}

void CellBits::set(CellSpan s) {
  for (std::uint32_t i = s.cell; i < s.cell + s.len; ++i) set(i);
}

std::size_t CellBits::count_all() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

CellBits cell_bits(const Window& w, const FiniteSubset& s) {
  CellBits bits(w.size());
  for (const auto& e : s) {
    if (const auto p = w.locate(e)) bits.set(w.cell_of(*p));
  }
  return bits;
}

CellBits cell_bits(const Window& w, std::span<const std::uint32_t> positions) {
  CellBits bits(w.size());
  for (auto p : positions) bits.set(w.cell_of(p));
  return bits;
}

}  // namespace amtile
