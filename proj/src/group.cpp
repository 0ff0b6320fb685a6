#include "amtile/group.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace amtile {

namespace {

std::int64_t isqrt_ceil(std::int64_t x) {
  if (x <= 0) return 0;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(x)));
  while (r * r > x) --r;
  while (r * r < x) ++r;
  return r;
}

std::int64_t mod(std::int64_t a, std::int64_t q) {
  std::int64_t r = a % q;
  return r < 0 ? r + q : r;
}

std::int64_t parse_int(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  std::int64_t out = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw Error("cannot parse integer '" + std::string(s) + "'");
  }
  return out;
}

}  // namespace

Group Group::zd(int d) {
  if (d < 1 || d > static_cast<int>(kMaxCoords)) throw Error("Zd: dimension must be in [1,4]");
  return Group(GroupKind::Zd, d, 0);
}

Group Group::heis3() { return Group(GroupKind::Heis3, 3, 0); }

Group Group::zd_x_zq(int d, std::int64_t q) {
  if (d < 1 || d > static_cast<int>(kMaxCoords) - 1) throw Error("ZdxZq: dimension must be in [1,3]");
  if (q < 2) throw Error("ZdxZq: cyclic order must be >= 2");
  return Group(GroupKind::ZdxZq, d, q);
}

Group Group::parse(std::string_view text) {
  std::string t(text);
  if (t == "Heis3" || t == "heis3" || t == "H3") return heis3();
  if (t.size() >= 2 && (t[0] == 'Z' || t[0] == 'z')) {
    const auto x = t.find_first_of("xX");
    if (x == std::string::npos) return zd(static_cast<int>(parse_int(std::string_view(t).substr(1))));
    const int d = static_cast<int>(parse_int(std::string_view(t).substr(1, x - 1)));
    std::string_view rest = std::string_view(t).substr(x + 1);
    if (rest.empty() || (rest[0] != 'Z' && rest[0] != 'z')) throw Error("bad group literal '" + t + "'");
    return zd_x_zq(d, parse_int(rest.substr(1)));
  }
  throw Error("unknown group '" + t + "'");
}

std::size_t Group::arity() const {
  switch (kind_) {
    case GroupKind::Zd: return static_cast<std::size_t>(dim_);
    case GroupKind::Heis3: return 3;
    case GroupKind::ZdxZq: return static_cast<std::size_t>(dim_) + 1;
  }
  return 0;
}

std::size_t Group::norm_arity() const {
  return kind_ == GroupKind::ZdxZq ? static_cast<std::size_t>(dim_) : arity();
}

std::string Group::name() const {
  switch (kind_) {
    case GroupKind::Zd: return "Z" + std::to_string(dim_);
    case GroupKind::Heis3: return "Heis3";
    case GroupKind::ZdxZq: return "Z" + std::to_string(dim_) + "xZ" + std::to_string(q_);
  }
  return "?";
}

bool Group::valid(const Element& e) const {
  for (std::size_t i = arity(); i < kMaxCoords; ++i) {
    if (e.v[i] != 0) return false;
  }
  if (kind_ == GroupKind::ZdxZq) {
    const std::int64_t r = e.v[static_cast<std::size_t>(dim_)];
    if (r < 0 || r >= q_) return false;
  }
  return true;
}

void Group::check(const Element& e) const {
  if (!valid(e)) throw Error("element " + format(e) + " is not in group " + name());
}

Element Group::mul(const Element& a, const Element& b) const {
  Element out;
  switch (kind_) {
    case GroupKind::Zd:
      for (int i = 0; i < dim_; ++i) out.v[i] = a.v[i] + b.v[i];
      break;
    case GroupKind::Heis3:
      out.v[0] = a.v[0] + b.v[0];
      out.v[1] = a.v[1] + b.v[1];
      out.v[2] = a.v[2] + b.v[2] + a.v[0] * b.v[1];
      break;
    case GroupKind::ZdxZq:
      for (int i = 0; i < dim_; ++i) out.v[i] = a.v[i] + b.v[i];
      out.v[dim_] = mod(a.v[dim_] + b.v[dim_], q_);
      break;
  }
  return out;
}

Element Group::inv(const Element& a) const {
  Element out;
  switch (kind_) {
    case GroupKind::Zd:
      for (int i = 0; i < dim_; ++i) out.v[i] = -a.v[i];
      break;
    case GroupKind::Heis3:
      out.v[0] = -a.v[0];
      out.v[1] = -a.v[1];
      out.v[2] = a.v[0] * a.v[1] - a.v[2];
      break;
    case GroupKind::ZdxZq:
      for (int i = 0; i < dim_; ++i) out.v[i] = -a.v[i];
      out.v[dim_] = mod(-a.v[dim_], q_);
      break;
  }
  return out;
}

Element Group::pow(const Element& a, std::int64_t k) const {
  Element base = k < 0 ? inv(a) : a;
  std::uint64_t n = k < 0 ? static_cast<std::uint64_t>(-(k + 1)) + 1 : static_cast<std::uint64_t>(k);
  Element acc = identity();
  while (n > 0) {
    if (n & 1U) acc = mul(acc, base);
    base = mul(base, base);
    n >>= 1U;
  }
  return acc;
}

std::optional<std::uint64_t> Group::order(const Element& g) const {
  check(g);
  if (g == identity()) return 1;
  if (kind_ != GroupKind::ZdxZq) return std::nullopt;
  for (int i = 0; i < dim_; ++i) {
    if (g.v[i] != 0) return std::nullopt;
  }
  const std::int64_t r = g.v[dim_];
  return static_cast<std::uint64_t>(q_ / std::gcd(r, q_));
}

std::int64_t Group::radius(std::size_t i, std::int64_t m) const {
  if (m < 0) return -1;
  if (kind_ == GroupKind::Heis3 && i == 2) return m * m;
  return m;
}

std::int64_t Group::level(std::size_t i, std::int64_t x) const {
  const std::int64_t ax = x < 0 ? -x : x;
  if (kind_ == GroupKind::Heis3 && i == 2) return isqrt_ceil(ax);
  return ax;
}

std::int64_t Group::shell(const Element& e) const {
  std::int64_t m = 0;
  for (std::size_t i = 0; i < norm_arity(); ++i) m = std::max(m, level(i, e.v[i]));
  return m;
}

std::uint64_t Group::ball_count(std::size_t from, std::int64_t m) const {
  if (m < 0) return 0;
  std::uint64_t n = 1;
  for (std::size_t i = from; i < norm_arity(); ++i) n *= static_cast<std::uint64_t>(2 * radius(i, m) + 1);
  return n;
}

bool Group::less(const Element& a, const Element& b) const {
  const std::int64_t sa = shell(a);
  const std::int64_t sb = shell(b);
  if (sa != sb) return sa < sb;
  for (std::size_t i = 0; i < arity(); ++i) {
    if (a.v[i] != b.v[i]) return a.v[i] < b.v[i];
  }
  return false;
}

// Rank of e among lattice points of its shell, in lexicographic order, plus
// the number of points in all smaller shells.
std::uint64_t Group::lattice_index(const Element& e) const {
  const std::int64_t m = shell(e);
  const std::size_t k = norm_arity();
  std::uint64_t rank = ball_count(0, m - 1);
  bool hit = false;
  for (std::size_t i = 0; i < k; ++i) {
    const std::int64_t lo = -radius(i, m);
    const std::int64_t inner = radius(i, m - 1);
    const std::int64_t x = e.v[i];
    const auto total = static_cast<std::uint64_t>(x - lo);
    // values in [lo, x-1] whose own level is m, i.e. |v| > inner
    std::uint64_t top = 0;
    if (inner < 0) {
      top = total;
    } else {
      const std::int64_t neg_hi = std::min(x - 1, -inner - 1);
      if (neg_hi >= lo) top += static_cast<std::uint64_t>(neg_hi - lo + 1);
      if (x - 1 >= inner + 1) top += static_cast<std::uint64_t>(x - 1 - inner);
    }
    const std::uint64_t full_rest = ball_count(i + 1, m);
    const std::uint64_t inner_rest = ball_count(i + 1, m - 1);
    if (hit) {
      rank += total * full_rest;
    } else {
      rank += top * full_rest + (total - top) * (full_rest - inner_rest);
    }
    if (level(i, x) == m) hit = true;
  }
  return rank;
}

Element Group::lattice_at(std::uint64_t index) const {
  const std::size_t k = norm_arity();
  std::int64_t m = 0;
  while (ball_count(0, m) <= index) ++m;
  std::uint64_t r = index - ball_count(0, m - 1);
  Element e;
  bool hit = false;
  for (std::size_t i = 0; i < k; ++i) {
    const std::uint64_t full_rest = ball_count(i + 1, m);
    const std::uint64_t inner_rest = ball_count(i + 1, m - 1);
    const std::int64_t R = radius(i, m);
    bool placed = false;
    for (std::int64_t v = -R; v <= R; ++v) {
      const bool top = hit || level(i, v) == m;
      const std::uint64_t c = top ? full_rest : full_rest - inner_rest;
      if (r < c) {
        e.v[i] = v;
        hit = top;
        placed = true;
        break;
      }
      r -= c;
    }
    if (!placed) throw Error("element_at: enumeration overflow");
  }
  return e;
}

std::uint64_t Group::index_of(const Element& e) const {
  check(e);
  const std::uint64_t li = lattice_index(e);
  if (kind_ == GroupKind::ZdxZq) return li * static_cast<std::uint64_t>(q_) + static_cast<std::uint64_t>(e.v[dim_]);
  return li;
}

Element Group::element_at(std::uint64_t index) const {
  if (kind_ == GroupKind::ZdxZq) {
    const auto q = static_cast<std::uint64_t>(q_);
    Element e = lattice_at(index / q);
    e.v[dim_] = static_cast<std::int64_t>(index % q);
    return e;
  }
  return lattice_at(index);
}

std::vector<Element> Group::generators() const {
  std::vector<Element> gens;
  const std::size_t lattice = kind_ == GroupKind::Heis3 ? 2 : static_cast<std::size_t>(dim_);
  for (std::size_t i = 0; i < lattice; ++i) {
    Element p, n;
    p.v[i] = 1;
    n.v[i] = -1;
    gens.push_back(p);
    gens.push_back(n);
  }
  if (kind_ == GroupKind::ZdxZq) {
    Element p, n;
    p.v[dim_] = 1;
    n.v[dim_] = q_ - 1;
    gens.push_back(p);
    if (!(n == p)) gens.push_back(n);
  }
  return gens;
}

std::string Group::format(const Element& e) const {
  std::string s = "(";
  for (std::size_t i = 0; i < arity(); ++i) {
    if (i) s += ",";
    s += std::to_string(e.v[i]);
  }
  return s + ")";
}

Element Group::parse_element(std::string_view text) const {
  std::string t(text);
  t.erase(std::remove_if(t.begin(), t.end(), [](char c) { return c == '(' || c == ')' || c == '[' || c == ']'; }),
          t.end());
  std::vector<std::int64_t> coords;
  std::size_t start = 0;
  while (start <= t.size()) {
    const auto comma = t.find(',', start);
    const auto piece = std::string_view(t).substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    coords.push_back(parse_int(piece));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return from_coords(coords);
}

Element Group::from_coords(const std::vector<std::int64_t>& coords) const {
  if (coords.size() != arity()) {
    throw Error("element needs " + std::to_string(arity()) + " coordinates for group " + name());
  }
  Element e;
  for (std::size_t i = 0; i < coords.size(); ++i) e.v[i] = coords[i];
  check(e);
  return e;
}

std::vector<std::int64_t> Group::coords(const Element& e) const {
  return {e.v.begin(), e.v.begin() + static_cast<std::ptrdiff_t>(arity())};
}

}  // namespace amtile
