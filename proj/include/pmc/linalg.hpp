#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace pmc {

using Complex = std::complex<double>;

struct Vec3 {
  double x = 0, y = 0, z = 0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
  Vec3& operator+=(Vec3 v) { x += v.x; y += v.y; z += v.z; return *this; }
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }

/// 2x2 real matrix, row major.
struct Mat2 {
  std::array<double, 4> m{};  // [a00 a01; a10 a11]

  static Mat2 identity() { return {{1, 0, 0, 1}}; }
  double operator()(int i, int j) const { return m[2 * i + j]; }
  double& operator()(int i, int j) { return m[2 * i + j]; }

  friend Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 c;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        c(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
    return c;
  }
  friend Mat2 operator+(const Mat2& a, const Mat2& b) {
    Mat2 c;
    for (int k = 0; k < 4; ++k) c.m[k] = a.m[k] + b.m[k];
    return c;
  }
  friend Mat2 operator*(double s, const Mat2& a) {
    Mat2 c;
    for (int k = 0; k < 4; ++k) c.m[k] = s * a.m[k];
    return c;
  }
  std::array<double, 2> apply(double u, double v) const {
    return {m[0] * u + m[1] * v, m[2] * u + m[3] * v};
  }
  double det() const { return m[0] * m[3] - m[1] * m[2]; }
  Mat2 inverse() const {
    const double d = det();
    return {{m[3] / d, -m[1] / d, -m[2] / d, m[0] / d}};
  }
};

/// Quaternion w + x i + y j + z k; unit quaternions model the (+,+,+) groups.
struct Quat {
  double w = 1, x = 0, y = 0, z = 0;

  friend Quat operator*(const Quat& a, const Quat& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }
  friend Quat operator+(const Quat& a, const Quat& b) {
    return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend Quat operator-(const Quat& a, const Quat& b) {
    return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend Quat operator*(double s, const Quat& a) { return {s * a.w, s * a.x, s * a.y, s * a.z}; }
  Quat conj() const { return {w, -x, -y, -z}; }
  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
  Quat normalized() const {
    const double n = norm();
    return {w / n, x / n, y / n, z / n};
  }
  Vec3 imag() const { return {x, y, z}; }
};

inline double distance(const Quat& a, const Quat& b) {
  const Quat d{a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z};
  return d.norm();
}

}  // namespace pmc
