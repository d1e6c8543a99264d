#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>

namespace brwre {

/// Largest lattice dimension supported. Unused trailing coordinates of a
/// Site are always zero, so sites of different dimensions never collide.
inline constexpr int kMaxDim = 4;

using Coord = std::int32_t;

/// A point of Z^d, d <= kMaxDim.
struct Site {
  std::array<Coord, kMaxDim> c{};

  constexpr Coord& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  constexpr Coord operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  friend constexpr auto operator<=>(const Site&, const Site&) = default;
  friend constexpr bool operator==(const Site&, const Site&) = default;

  static constexpr Site axis(int i, Coord v) {
    Site s;
    s[i] = v;
    return s;
  }
};

constexpr Site operator+(Site a, const Site& b) {
  for (int i = 0; i < kMaxDim; ++i) a[i] += b[i];
  return a;
}

constexpr Site operator-(Site a, const Site& b) {
  for (int i = 0; i < kMaxDim; ++i) a[i] -= b[i];
  return a;
}

constexpr std::int64_t l1_norm(const Site& x, int d) {
  std::int64_t s = 0;
  for (int i = 0; i < d; ++i) s += x[i] < 0 ? -std::int64_t{x[i]} : x[i];
  return s;
}

constexpr std::int64_t linf_norm(const Site& x, int d) {
  std::int64_t s = 0;
  for (int i = 0; i < d; ++i) {
    const std::int64_t a = x[i] < 0 ? -std::int64_t{x[i]} : x[i];
    if (a > s) s = a;
  }
  return s;
}

constexpr std::int64_t coordinate_sum(const Site& x, int d) {
  std::int64_t s = 0;
  for (int i = 0; i < d; ++i) s += x[i];
  return s;
}

/// Nearest-neighbour step number j in [0, 2d): +e_{j/2} for even j, -e_{j/2} for odd j.
constexpr Site unit_step(int j) { return Site::axis(j / 2, (j % 2 == 0) ? 1 : -1); }

/// Checks 1 <= d <= kMaxDim; throws std::invalid_argument otherwise.
void check_dimension(int d);

/// "x1,x2,...,xd"
std::string to_string(const Site& x, int d);

/// Parses "x1,...,xd". Throws std::invalid_argument on malformed input or a
/// coordinate count different from d.
Site parse_site(std::string_view text, int d);

}  // namespace brwre
