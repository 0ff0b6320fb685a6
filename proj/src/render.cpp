#include <limits>
#include <sstream>

#include "amtile/io.hpp"

namespace amtile {

namespace {

constexpr std::uint32_t kFree = std::numeric_limits<std::uint32_t>::max();
constexpr std::uint32_t kMany = kFree - 1;

struct Grid {
  std::int64_t x0 = 0, y0 = 0, w = 0, h = 0;
  std::vector<std::uint32_t> owner;  // tile index, kFree or kMany; row 0 is the top
  std::vector<std::uint8_t> inside;

  std::size_t at(std::int64_t x, std::int64_t y) const {
    return static_cast<std::size_t>((y0 + h - 1 - y) * w + (x - x0));
  }
};

Grid grid_of(const Quasitiling& qt) {
  const Window& W = qt.window();
  if (W.group() != Group::zd(2)) throw Error("render: only Z2 tilings can be rendered");
  Grid g;
  std::int64_t x1 = std::numeric_limits<std::int64_t>::min(), y1 = x1;
  g.x0 = g.y0 = std::numeric_limits<std::int64_t>::max();
  for (const auto& e : W.universe()) {
    g.x0 = std::min(g.x0, e[0]);
    g.y0 = std::min(g.y0, e[1]);
    x1 = std::max(x1, e[0]);
    y1 = std::max(y1, e[1]);
  }
  g.w = x1 - g.x0 + 1;
  g.h = y1 - g.y0 + 1;
  g.owner.assign(static_cast<std::size_t>(g.w * g.h), kFree);
  g.inside.assign(g.owner.size(), 0);
  for (const auto& e : W.universe()) g.inside[g.at(e[0], e[1])] = 1;
  for (std::size_t i = 0; i < qt.tile_count(); ++i) {
    for (auto p : qt.tile_points(i)) {
      const auto& e = W.at(p);
      auto& o = g.owner[g.at(e[0], e[1])];
      o = (o == kFree) ? static_cast<std::uint32_t>(i) : kMany;
    }
  }
  return g;
}

std::string color(int id) {
  const int hue = static_cast<int>((static_cast<long long>(id) * 137) % 360);
  return "hsl(" + std::to_string(hue) + ",55%,68%)";
}

char glyph(int id) {
  static const std::string glyphs = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
  return glyphs[static_cast<std::size_t>(id) % glyphs.size()];
}

}  // namespace

std::string render_z2(const Quasitiling& qt, const std::string& format) {
  const Grid g = grid_of(qt);
  auto shape_id = [&](std::uint32_t tile) { return qt.shapes()[qt.tiles()[tile].shape].id; };

  if (format == "ascii") {
    std::string out;
    for (std::int64_t r = 0; r < g.h; ++r) {
      for (std::int64_t c = 0; c < g.w; ++c) {
        const auto i = static_cast<std::size_t>(r * g.w + c);
        const auto o = g.owner[i];
        out += !g.inside[i] ? ' ' : o == kFree ? '.' : o == kMany ? '#' : glyph(shape_id(o));
      }
      out += '\n';
    }
    return out;
  }
  if (format != "svg") throw Error("render: unknown format '" + format + "' (svg or ascii)");

  constexpr int s = 4;
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << g.w * s << "\" height=\"" << g.h * s
    << "\" viewBox=\"0 0 " << g.w * s << ' ' << g.h * s << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::int64_t r = 0; r < g.h; ++r) {
    std::int64_t c = 0;
    while (c < g.w) {
      const auto i = static_cast<std::size_t>(r * g.w + c);
      const auto own = g.owner[i];
      std::int64_t e = c + 1;
      while (e < g.w && g.owner[static_cast<std::size_t>(r * g.w + e)] == own) ++e;
      if (own != kFree) {
        const std::string fill = own == kMany ? "black" : color(shape_id(own));
        o << "<rect x=\"" << c * s << "\" y=\"" << r * s << "\" width=\"" << (e - c) * s << "\" height=\"" << s
          << "\" fill=\"" << fill << "\"/>\n";
      }
      c = e;
    }
  }
  // Tile boundaries between cells with different owners.
  o << "<path stroke=\"#333\" stroke-width=\"0.6\" fill=\"none\" d=\"";
  for (std::int64_t r = 0; r < g.h; ++r) {
    for (std::int64_t c = 0; c < g.w; ++c) {
      const auto own = g.owner[static_cast<std::size_t>(r * g.w + c)];
      if (c + 1 < g.w && g.owner[static_cast<std::size_t>(r * g.w + c + 1)] != own) {
        o << 'M' << (c + 1) * s << ' ' << r * s << 'v' << s;
      }
      if (r + 1 < g.h && g.owner[static_cast<std::size_t>((r + 1) * g.w + c)] != own) {
        o << 'M' << c * s << ' ' << (r + 1) * s << 'h' << s;
      }
    }
  }
  o << "\"/>\n";
  for (const auto& t : qt.tiles()) {
    const auto i = g.at(t.center[0], t.center[1]);
    const auto r = static_cast<std::int64_t>(i) / g.w;
    const auto c = static_cast<std::int64_t>(i) % g.w;
    o << "<circle cx=\"" << c * s + s / 2 << "\" cy=\"" << r * s + s / 2 << "\" r=\"1.2\" fill=\"black\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace amtile
