#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "amtile/complexity.hpp"
#include "amtile/hierarchy.hpp"

namespace amtile {

/// Every window point h written as h = g^p b with b the canonically smallest
/// window point of its coset <g>h.
struct CosetSection {
  Element g;
  std::optional<std::uint64_t> order;  // nullopt: infinite
  std::vector<std::int64_t> power;     // p(h) by position
  std::vector<std::uint32_t> rep;      // position of b by position
  std::size_t cosets = 0;
};

CosetSection coset_section(const Window& W, const Element& g);

/// x(h) = (-1)^p(h); symbol 0 is "+1". Throws for g of finite order.
PatternField coset_parity_field(WindowPtr window, const Element& g);

/// Points h with h and g h in the universe and x(g h) == x(h).
std::size_t alternation_violations(const PatternField& x, const Element& g);

struct FiniteOrderAudit {
  std::size_t cosets = 0;             // full cosets inside the core
  std::size_t one_center = 0;         // of those, carrying exactly one non-zero symbol
  std::size_t fixed_cosets = 0;       // of those, unchanged by the shift h -> g h
  std::size_t shifted_zero_fails = 0; // centers c whose g c carries a non-zero symbol
  bool pass() const { return one_center == cosets && fixed_cosets == 0 && shifted_zero_fails == 0; }
};

struct FiniteOrderResult {
  PatternField field;
  std::vector<TilingLevel> levels;  // normalized, level 1 is the coset tiling
  MasterPartitionTable table;
  std::vector<LevelReport> reports;
  FiniteOrderAudit audit;
};

/// Coset tiling by S = {e, g, ..., g^(q-1)} lifted through the hierarchy
/// (one LevelParams per level above the first) and normalized; the field
/// marks level-1 centers with the shape symbol.
FiniteOrderResult finite_order_free_field(WindowPtr window, const Element& g, const std::vector<LevelParams>& upper);

FiniteOrderAudit audit_finite_order(const PatternField& x, const Element& g);

struct FreeComponent {
  Element g;
  PatternField field;
};

struct ComponentAudit {
  Element g;
  std::size_t fragments = 0;  // coset fragments with at least one pair h, g h in the window
  std::size_t fixed = 0;      // fragments on which the shift agrees with the field
  std::size_t differing = 0;  // points h with x(g h) != x(h)
  double estimate = 0;
  bool pass = false;
};

struct ProductAudit {
  std::vector<ComponentAudit> components;
  double sum_estimates = 0;
  double product_estimate = 0;
  bool subadditive = false;  // per probe, rate of the join <= sum of component rates
  bool pass = false;
};

ProductAudit product_free_audit(const std::vector<FreeComponent>& components, const std::vector<FiniteSubset>& probes);

}  // namespace amtile
