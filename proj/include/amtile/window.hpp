#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "amtile/subset.hpp"

namespace amtile {

/// A translate of a run resolved to window storage: `len` consecutive cells.
struct CellSpan {
  std::uint32_t cell = 0;
  std::uint32_t len = 0;
};

/// How a window was specified, kept for serialization. A positive side
/// selects the box [-side/2, side - side/2 - 1] per lattice axis (times the
/// cyclic factor) instead of the Følner set F_{folner_index}.
struct WindowSpec {
  Group group = Group::zd(1);
  int folner_index = 1;
  int side = 0;
  FiniteSubset margin = FiniteSubset(Group::zd(1));
};

inline WindowSpec folner_spec(Group g, int index, FiniteSubset margin) {
  return WindowSpec{g, index, 0, std::move(margin)};
}
inline WindowSpec box_spec(Group g, int side, FiniteSubset margin) {
  return WindowSpec{g, 0, side, std::move(margin)};
}

/// The universe a spec describes.
FiniteSubset window_universe(const WindowSpec& spec);

/// Finite stand-in for the group: a universe plus its margin-core.
///
/// Points are addressed two ways. A position is the rank in canonical order,
/// so sorted position lists are canonically sorted. A cell is the rank in
/// row-major order with the last coordinate innermost, so translated runs map
/// to consecutive cells.
class Window {
 public:
  Window(FiniteSubset universe, FiniteSubset margin);
  explicit Window(const WindowSpec& spec);

  const Group& group() const { return universe_.group(); }
  const FiniteSubset& universe() const { return universe_; }
  const FiniteSubset& margin() const { return margin_; }
  const FiniteSubset& core() const { return core_; }
  /// Set when the window was built from a spec.
  const std::optional<WindowSpec>& spec() const { return spec_; }

  std::size_t size() const { return universe_.size(); }
  const Element& at(std::uint32_t pos) const { return universe_[pos]; }
  std::optional<std::uint32_t> locate(const Element& e) const;
  bool in_core(std::uint32_t pos) const { return in_core_[pos] != 0; }
  std::span<const std::uint32_t> core_positions() const { return core_positions_; }

  std::uint32_t cell_of(std::uint32_t pos) const { return pos_to_cell_[pos]; }
  std::uint32_t pos_of(std::uint32_t cell) const { return cell_to_pos_[cell]; }

  /// Resolves a run to cells. Empty when any point of the run is outside.
  std::optional<CellSpan> resolve(const Run& r) const;
  /// Right translates every run by c and resolves them into out (cleared
  /// first). Returns false if the translate leaves the universe.
  bool place(std::span<const Run> runs, const Element& c, std::vector<CellSpan>& out) const;

 private:
  struct Span {
    std::int64_t lo;
    std::int64_t hi;
    std::uint32_t cell;
  };
  void build();

  FiniteSubset universe_;
  FiniteSubset margin_;
  FiniteSubset core_;
  std::optional<WindowSpec> spec_;
  std::size_t last_ = 0;
  std::unordered_map<Element, std::vector<Span>, ElementHash> rows_;
  std::vector<std::uint32_t> pos_to_cell_;
  std::vector<std::uint32_t> cell_to_pos_;
  std::vector<std::uint8_t> in_core_;
  std::vector<std::uint32_t> core_positions_;
};

using WindowPtr = std::shared_ptr<const Window>;

/// Dense bit set over the cells of a window.
class CellBits {
 public:
  CellBits() = default;
  explicit CellBits(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  std::size_t size() const { return n_; }
  bool test(std::uint32_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::uint32_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::uint32_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  std::uint32_t count(CellSpan s) const;
  std::uint32_t count(std::span<const CellSpan> spans) const {
    std::uint32_t n = 0;
    for (const auto& s : spans) n += count(s);
    return n;
  }
  void set(CellSpan s);
  std::size_t count_all() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Bits for the points of s that lie in the window.
CellBits cell_bits(const Window& w, const FiniteSubset& s);
CellBits cell_bits(const Window& w, std::span<const std::uint32_t> positions);

}  // namespace amtile
