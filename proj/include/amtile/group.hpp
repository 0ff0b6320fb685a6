#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace amtile {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMaxCoords = 4;

/// Group element as a coordinate tuple. Unused trailing coordinates are zero,
/// so plain equality is meaningful across all supported groups.
struct Element {
  std::array<std::int64_t, kMaxCoords> v{};

  std::int64_t operator[](std::size_t i) const { return v[i]; }
  std::int64_t& operator[](std::size_t i) { return v[i]; }
  friend bool operator==(const Element&, const Element&) = default;
};

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (std::int64_t x : e.v) {
      h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

enum class GroupKind { Zd, Heis3, ZdxZq };

/// A concrete finitely generated amenable group.
///
///   Zd     integer lattice Z^d, d in [1, 4]
///   Heis3  discrete Heisenberg group, (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')
///   ZdxZq  Z^d x Z/q, d in [1, 3], q >= 2; the residue is the last coordinate
///
/// Every group here shares one structural property the window code relies on:
/// multiplying (on either side) shifts the last coordinate by an amount that
/// does not depend on the last coordinate itself (modulo q for ZdxZq).
class Group {
 public:
  static Group zd(int d);
  static Group heis3();
  static Group zd_x_zq(int d, std::int64_t q);
  /// Parses "Z2", "Heis3", "Z1xZ3".
  static Group parse(std::string_view text);

  GroupKind kind() const { return kind_; }
  int dim() const { return dim_; }
  std::int64_t modulus() const { return q_; }
  /// Number of meaningful coordinates.
  std::size_t arity() const;
  bool last_axis_cyclic() const { return kind_ == GroupKind::ZdxZq; }
  std::string name() const;

  Element identity() const { return Element{}; }
  bool valid(const Element& e) const;
  /// Throws Error if e is not an element of this group.
  void check(const Element& e) const;

  Element mul(const Element& a, const Element& b) const;
  Element inv(const Element& a) const;
  Element pow(const Element& a, std::int64_t k) const;
  /// Order of g; nullopt means infinite. Exact for every supported group.
  std::optional<std::uint64_t> order(const Element& g) const;

  /// Canonical enumeration: shell (max-norm style radius) first, then
  /// lexicographic coordinates. index_of/element_at are mutually inverse.
  bool less(const Element& a, const Element& b) const;
  std::int64_t shell(const Element& e) const;
  std::uint64_t index_of(const Element& e) const;
  Element element_at(std::uint64_t index) const;

  /// Symmetric generating set used for word-metric balls.
  std::vector<Element> generators() const;

  std::string format(const Element& e) const;
  /// Accepts "(1,2)", "1,2" or "[1,2]".
  Element parse_element(std::string_view text) const;
  Element from_coords(const std::vector<std::int64_t>& coords) const;
  std::vector<std::int64_t> coords(const Element& e) const;

  friend bool operator==(const Group&, const Group&) = default;

 private:
  Group(GroupKind k, int d, std::int64_t q) : kind_(k), dim_(d), q_(q) {}

  // Radius of coordinate i at shell m: |x_i| <= radius(i, m) iff the
  // coordinate's own level is <= m.
  std::int64_t radius(std::size_t i, std::int64_t m) const;
  std::int64_t level(std::size_t i, std::int64_t x) const;
  std::size_t norm_arity() const;
  std::uint64_t ball_count(std::size_t from, std::int64_t m) const;
  std::uint64_t lattice_index(const Element& e) const;
  Element lattice_at(std::uint64_t index) const;

  GroupKind kind_ = GroupKind::Zd;
  int dim_ = 1;
  std::int64_t q_ = 0;
};

}  // namespace amtile
