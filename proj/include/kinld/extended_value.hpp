#pragma once

#include <cassert>
#include <cmath>
#include <limits>
#include <ostream>

namespace kinld {

/**
 * @brief A finite real or +infinity, with min-plus semantics.
 *
 * This is the codomain of every cost-like quantity in the library. The
 * infinite value is a dedicated tag, never a large-float sentinel, so the
 * indicator algebra (0 at a point, +inf elsewhere) is exact:
 *   - addition saturates: inf + a = inf,
 *   - inf is the identity of min.
 * NaN is rejected on construction.
 */
class ExtendedValue {
 public:
  constexpr ExtendedValue() noexcept = default;

  [[nodiscard]] static ExtendedValue finite(double v) noexcept {
    assert(std::isfinite(v));
    ExtendedValue e;
    e.value_ = v;
    e.finite_ = true;
    return e;
  }

  [[nodiscard]] static constexpr ExtendedValue infinity() noexcept {
    ExtendedValue e;
    e.finite_ = false;
    return e;
  }

  [[nodiscard]] constexpr bool is_finite() const noexcept { return finite_; }

  /// Finite value; only meaningful when is_finite().
  [[nodiscard]] constexpr double value() const noexcept {
    assert(finite_);
    return value_;
  }

  /// IEEE view for output: +inf for the infinite tag.
  [[nodiscard]] double as_double() const noexcept {
    return finite_ ? value_ : std::numeric_limits<double>::infinity();
  }

  friend ExtendedValue operator+(ExtendedValue a, ExtendedValue b) noexcept {
    if (!a.finite_ || !b.finite_) return infinity();
    return finite(a.value_ + b.value_);
  }
  ExtendedValue& operator+=(ExtendedValue o) noexcept { return *this = *this + o; }

  friend constexpr bool operator==(ExtendedValue a, ExtendedValue b) noexcept {
    if (a.finite_ != b.finite_) return false;
    return !a.finite_ || a.value_ == b.value_;
  }
  friend constexpr bool operator<(ExtendedValue a, ExtendedValue b) noexcept {
    if (!a.finite_) return false;          // inf < anything is false
    if (!b.finite_) return true;           // finite < inf
    return a.value_ < b.value_;
  }
  friend constexpr bool operator<=(ExtendedValue a, ExtendedValue b) noexcept {
    return a < b || a == b;
  }
  friend constexpr bool operator>(ExtendedValue a, ExtendedValue b) noexcept { return b < a; }
  friend constexpr bool operator>=(ExtendedValue a, ExtendedValue b) noexcept { return b <= a; }

  friend std::ostream& operator<<(std::ostream& os, ExtendedValue e) {
    if (e.finite_) return os << e.value_;
    return os << "inf";
  }

 private:
  double value_ = 0.0;
  bool finite_ = true;
};

[[nodiscard]] constexpr ExtendedValue min(ExtendedValue a, ExtendedValue b) noexcept {
  return b < a ? b : a;
}

}  // namespace kinld
