#pragma once

#include <cmath>

namespace cfsi {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }

  constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  // z-component of the 3D cross product (this × o)
  constexpr double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  constexpr double squared_norm() const { return x * x + y * y; }
  // counter-clockwise rotation by 90 degrees
  constexpr Vec2 perp() const { return {-y, x}; }
};

constexpr Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }

// 2x2 matrix, row-major: [a11 a12; a21 a22]
struct Mat2 {
  double a11 = 0.0, a12 = 0.0;
  double a21 = 0.0, a22 = 0.0;

  constexpr Mat2() = default;
  constexpr Mat2(double m11, double m12, double m21, double m22)
      : a11(m11), a12(m12), a21(m21), a22(m22) {}

  constexpr Mat2 operator+(const Mat2& o) const {
    return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
  }
  constexpr Mat2 operator-(const Mat2& o) const {
    return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
  }
  constexpr Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
  constexpr Vec2 operator*(const Vec2& v) const {
    return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
  }
  constexpr Mat2 transpose() const { return {a11, a21, a12, a22}; }
  constexpr double trace() const { return a11 + a22; }
  constexpr double det() const { return a11 * a22 - a12 * a21; }
  // Frobenius inner product A:B
  constexpr double ddot(const Mat2& o) const {
    return a11 * o.a11 + a12 * o.a12 + a21 * o.a21 + a22 * o.a22;
  }

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
};

inline Vec2 rotate(const Vec2& v, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

}  // namespace cfsi
