#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "kinld/extended_value.hpp"

namespace kinld {

/// Uniform 1-D grid of n >= 2 strictly increasing nodes.
class UniformGrid {
 public:
  UniformGrid() = default;
  UniformGrid(double lo, double hi, int n) : lo_(lo), hi_(hi), n_(n) {
    if (n < 2) throw std::invalid_argument("grid needs at least 2 nodes");
    if (!(hi > lo)) throw std::invalid_argument("grid bounds must be increasing");
    dx_ = (hi - lo) / (n - 1);
  }

  [[nodiscard]] double lo() const noexcept { return lo_; }
  [[nodiscard]] double hi() const noexcept { return hi_; }
  [[nodiscard]] int size() const noexcept { return n_; }
  [[nodiscard]] double spacing() const noexcept { return dx_; }
  [[nodiscard]] double node(int i) const noexcept { return lo_ + dx_ * i; }

  /// Fractional position of x in node units; negative or > n-1 when outside.
  [[nodiscard]] double position(double x) const noexcept { return (x - lo_) / dx_; }

  [[nodiscard]] bool contains(double x) const noexcept { return x >= lo_ && x <= hi_; }

  /// Index of the node closest to x (clamped).
  [[nodiscard]] int nearest(double x) const noexcept {
    int i = static_cast<int>(std::lround(position(x)));
    if (i < 0) i = 0;
    if (i > n_ - 1) i = n_ - 1;
    return i;
  }

 private:
  double lo_ = 0.0, hi_ = 1.0, dx_ = 1.0;
  int n_ = 2;
};

using SpatialGrid = UniformGrid;

/// Uniform velocity grid; must carry v = 0 as a node so the global minimum
/// of u in velocity is representable.
class VelocityGrid : public UniformGrid {
 public:
  VelocityGrid() = default;
  VelocityGrid(double lo, double hi, int n) : UniformGrid(lo, hi, n) {
    const double pos = position(0.0);
    const double frac = std::abs(pos - std::round(pos));
    if (pos < -1e-9 || pos > n - 1 + 1e-9 || frac > 1e-9)
      throw std::invalid_argument("velocity grid must contain v = 0 as a node");
    zero_index_ = nearest(0.0);
  }

  /// Symmetric grid on [-half_width, half_width] with an odd node count.
  [[nodiscard]] static VelocityGrid centered(double half_width, int n) {
    if (n % 2 == 0) n += 1;
    return VelocityGrid(-half_width, half_width, n);
  }

  [[nodiscard]] int zero_index() const noexcept { return zero_index_; }

 private:
  int zero_index_ = 0;
};

/// Cost values on a spatial grid (min-plus semantics, +inf allowed).
struct MinPlusField1 {
  SpatialGrid grid;
  std::vector<ExtendedValue> values;

  MinPlusField1() = default;
  explicit MinPlusField1(SpatialGrid g)
      : grid(g), values(static_cast<std::size_t>(g.size()), ExtendedValue::infinity()) {}

  [[nodiscard]] ExtendedValue operator()(int i) const { return values[static_cast<std::size_t>(i)]; }
  ExtendedValue& at(int i) { return values[static_cast<std::size_t>(i)]; }
};

/// Cost values on a (x, v) grid, x-major contiguous per velocity row.
struct MinPlusField2 {
  SpatialGrid xgrid;
  VelocityGrid vgrid;
  std::vector<ExtendedValue> values;  // index j * nx + i

  MinPlusField2() = default;
  MinPlusField2(SpatialGrid xg, VelocityGrid vg)
      : xgrid(xg),
        vgrid(vg),
        values(static_cast<std::size_t>(xg.size()) * static_cast<std::size_t>(vg.size()),
               ExtendedValue::infinity()) {}

  [[nodiscard]] std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(xgrid.size()) +
           static_cast<std::size_t>(i);
  }
  [[nodiscard]] ExtendedValue operator()(int i, int j) const { return values[index(i, j)]; }
  ExtendedValue& at(int i, int j) { return values[index(i, j)]; }
};

namespace detail {
// Snap tolerance for characteristic feet that land on nodes up to rounding.
inline constexpr double kNodeSnapTol = 1e-9;
}  // namespace detail

/**
 * Piecewise-linear evaluation with min-plus-safe conventions:
 *  - outside the grid the field is +inf,
 *  - a foot within kNodeSnapTol of a node takes the node value exactly,
 *  - an interval with an infinite endpoint interpolates to +inf (conservative).
 */
[[nodiscard]] inline ExtendedValue interp(const MinPlusField1& f, double x) {
  const double pos = f.grid.position(x);
  if (pos < -detail::kNodeSnapTol || pos > f.grid.size() - 1 + detail::kNodeSnapTol)
    return ExtendedValue::infinity();
  int i = static_cast<int>(std::floor(pos));
  if (i < 0) i = 0;
  if (i > f.grid.size() - 2) i = f.grid.size() - 2;
  const double theta = pos - i;
  if (theta <= detail::kNodeSnapTol) return f(i);
  if (theta >= 1.0 - detail::kNodeSnapTol) return f(i + 1);
  const ExtendedValue a = f(i), b = f(i + 1);
  if (!a.is_finite() || !b.is_finite()) return ExtendedValue::infinity();
  return ExtendedValue::finite((1.0 - theta) * a.value() + theta * b.value());
}

/// Same convention, along x at a fixed velocity row.
[[nodiscard]] inline ExtendedValue interp_x(const MinPlusField2& f, double x, int j) {
  const double pos = f.xgrid.position(x);
  if (pos < -detail::kNodeSnapTol || pos > f.xgrid.size() - 1 + detail::kNodeSnapTol)
    return ExtendedValue::infinity();
  int i = static_cast<int>(std::floor(pos));
  if (i < 0) i = 0;
  if (i > f.xgrid.size() - 2) i = f.xgrid.size() - 2;
  const double theta = pos - i;
  if (theta <= detail::kNodeSnapTol) return f(i, j);
  if (theta >= 1.0 - detail::kNodeSnapTol) return f(i + 1, j);
  const ExtendedValue a = f(i, j), b = f(i + 1, j);
  if (!a.is_finite() || !b.is_finite()) return ExtendedValue::infinity();
  return ExtendedValue::finite((1.0 - theta) * a.value() + theta * b.value());
}

/// Bilinear evaluation with the same conservative conventions.
[[nodiscard]] inline ExtendedValue interp(const MinPlusField2& f, double x, double v) {
  const double pv = f.vgrid.position(v);
  if (pv < -detail::kNodeSnapTol || pv > f.vgrid.size() - 1 + detail::kNodeSnapTol)
    return ExtendedValue::infinity();
  int j = static_cast<int>(std::floor(pv));
  if (j < 0) j = 0;
  if (j > f.vgrid.size() - 2) j = f.vgrid.size() - 2;
  const double eta = pv - j;
  if (eta <= detail::kNodeSnapTol) return interp_x(f, x, j);
  if (eta >= 1.0 - detail::kNodeSnapTol) return interp_x(f, x, j + 1);
  const ExtendedValue a = interp_x(f, x, j), b = interp_x(f, x, j + 1);
  if (!a.is_finite() || !b.is_finite()) return ExtendedValue::infinity();
  return ExtendedValue::finite((1.0 - eta) * a.value() + eta * b.value());
}

}  // namespace kinld
