#include "amtile/pattern.hpp"

namespace amtile {

void PatternField::validate() const {
  if (!window) throw Error("pattern field: no window");
  if (alphabet.empty()) throw Error("pattern field: empty alphabet");
  if (values.size() != window->size()) throw Error("pattern field: value count differs from window size");
  for (auto v : values) {
    if (v >= alphabet.size()) throw Error("pattern field: symbol out of range");
  }
}

PatternField constant_field(WindowPtr w, std::string symbol) {
  const std::size_t n = w->size();
  return PatternField{std::move(w), {std::move(symbol)}, std::vector<std::uint32_t>(n, 0)};
}

}  // namespace amtile
