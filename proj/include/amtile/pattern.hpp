#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amtile/window.hpp"

namespace amtile {

/// Total assignment of alphabet symbols to window positions. Symbol 0 is the
/// designated zero.
struct PatternField {
  WindowPtr window;
  std::vector<std::string> alphabet;
  std::vector<std::uint32_t> values;  // indexed by canonical position

  std::size_t size() const { return values.size(); }
  /// Throws unless every position carries a valid symbol.
  void validate() const;
  friend bool operator==(const PatternField& a, const PatternField& b) {
    return a.alphabet == b.alphabet && a.values == b.values;
  }
};

PatternField constant_field(WindowPtr w, std::string symbol = "0");

}  // namespace amtile
