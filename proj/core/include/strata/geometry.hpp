#pragma once

#include <cmath>

namespace strata {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) noexcept {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(Vec2 o) noexcept {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) noexcept {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) noexcept { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) noexcept { return a -= b; }
  friend constexpr Vec2 operator*(Vec2 a, double s) noexcept { return a *= s; }
  friend constexpr bool operator==(Vec2, Vec2) = default;

  constexpr double norm2() const noexcept { return x * x + y * y; }
  double norm() const noexcept { return std::sqrt(norm2()); }
  bool finite() const noexcept { return std::isfinite(x) && std::isfinite(y); }
};

}  // namespace strata
