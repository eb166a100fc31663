/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace cmg {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  double& operator[](std::size_t i) { return (&x)[i]; }
  double operator[](std::size_t i) const { return (&x)[i]; }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

  bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm2(v)); }

inline Vec3 normalized(const Vec3& v) {
  double n = norm(v);
  return n > 0.0 ? v / n : Vec3{0.0, 0.0, 0.0};
}

inline Vec3 min3(const Vec3& a, const Vec3& b) {
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}

inline Vec3 max3(const Vec3& a, const Vec3& b) {
  return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

// Strict lexicographic order on (x, y, z); used as a deterministic tie breaker.
inline bool lexLess(const Vec3& a, const Vec3& b) {
  if (a.x != b.x) return a.x < b.x;
  if (a.y != b.y) return a.y < b.y;
  return a.z < b.z;
}

// Row-major 3x3 matrix.
struct Mat3 {
  double m[9] = {1, 0, 0, 0, 1, 0, 0, 0, 1};

  Mat3() = default;

  static Mat3 identity() { return Mat3(); }

  static Mat3 fromRows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
    Mat3 a;
    a.m[0] = r0.x; a.m[1] = r0.y; a.m[2] = r0.z;
    a.m[3] = r1.x; a.m[4] = r1.y; a.m[5] = r1.z;
    a.m[6] = r2.x; a.m[7] = r2.y; a.m[8] = r2.z;
    return a;
  }

  static Mat3 fromCols(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
    Mat3 a;
    a.m[0] = c0.x; a.m[1] = c1.x; a.m[2] = c2.x;
    a.m[3] = c0.y; a.m[4] = c1.y; a.m[5] = c2.y;
    a.m[6] = c0.z; a.m[7] = c1.z; a.m[8] = c2.z;
    return a;
  }

  static Mat3 rotZ(double angle) {
    double c = std::cos(angle), s = std::sin(angle);
    return fromRows({c, -s, 0}, {s, c, 0}, {0, 0, 1});
  }

  static Mat3 rotY(double angle) {
    double c = std::cos(angle), s = std::sin(angle);
    return fromRows({c, 0, s}, {0, 1, 0}, {-s, 0, c});
  }

  static Mat3 rotX(double angle) {
    double c = std::cos(angle), s = std::sin(angle);
    return fromRows({1, 0, 0}, {0, c, -s}, {0, s, c});
  }

  // Rodrigues rotation about a unit axis.
  static Mat3 axisAngle(const Vec3& axis, double angle) {
    double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
    const Vec3& u = axis;
    return fromRows({t * u.x * u.x + c, t * u.x * u.y - s * u.z, t * u.x * u.z + s * u.y},
                    {t * u.x * u.y + s * u.z, t * u.y * u.y + c, t * u.y * u.z - s * u.x},
                    {t * u.x * u.z - s * u.y, t * u.y * u.z + s * u.x, t * u.z * u.z + c});
  }

  double operator()(std::size_t r, std::size_t c) const { return m[3 * r + c]; }
  double& operator()(std::size_t r, std::size_t c) { return m[3 * r + c]; }

  Vec3 row(std::size_t r) const { return {m[3 * r], m[3 * r + 1], m[3 * r + 2]}; }
  Vec3 col(std::size_t c) const { return {m[c], m[c + 3], m[c + 6]}; }

  Vec3 operator*(const Vec3& v) const {
    return {dot(row(0), v), dot(row(1), v), dot(row(2), v)};
  }

  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        r(i, j) = (*this)(i, 0) * o(0, j) + (*this)(i, 1) * o(1, j) + (*this)(i, 2) * o(2, j);
    return r;
  }

  Mat3 transposed() const {
    Mat3 r;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
    return r;
  }

  double det() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
  }

  // Multiplies the vector by the transpose; saves an explicit transposed() in hot paths.
  Vec3 tmul(const Vec3& v) const {
    return {dot(col(0), v), dot(col(1), v), dot(col(2), v)};
  }
};

// Largest absolute entry of R^T R - I; zero for a perfect rotation.
inline double orthonormalityError(const Mat3& r) {
  Mat3 g = r.transposed() * r;
  double e = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      e = std::max(e, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
  return e;
}

// Proper rigid transform: x_world = R * x_local + t.
struct RigidTransform {
  Mat3 R;
  Vec3 t;

  RigidTransform() = default;
  RigidTransform(const Mat3& r, const Vec3& t_) : R(r), t(t_) {}

  static RigidTransform identity() { return RigidTransform(); }
  static RigidTransform translation(const Vec3& t) { return {Mat3::identity(), t}; }

  Vec3 apply(const Vec3& p) const { return R * p + t; }
  Vec3 rotate(const Vec3& v) const { return R * v; }

  RigidTransform operator*(const RigidTransform& o) const {
    return {R * o.R, R * o.t + t};
  }

  RigidTransform inverse() const {
    Mat3 rt = R.transposed();
    return {rt, -(rt * t)};
  }
};

// Largest absolute difference across rotation entries and translation components.
inline double transformError(const RigidTransform& a, const RigidTransform& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < 9; ++i) e = std::max(e, std::abs(a.R.m[i] - b.R.m[i]));
  for (std::size_t i = 0; i < 3; ++i) e = std::max(e, std::abs(a.t[i] - b.t[i]));
  return e;
}

}  // namespace cmg
