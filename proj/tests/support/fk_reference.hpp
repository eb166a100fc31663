/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#pragma once

#include <array>
#include <cmath>

#include "cmg/hand_model.hpp"
#include "cmg/vec.hpp"

// Homogeneous 4x4 forward kinematics written from scratch, so the library's
// RigidTransform composition has an outside opinion to match. Matrices are
// row major.
namespace fkref {

using M4 = std::array<double, 16>;

inline M4 identity() {
  M4 m{};
  m[0] = m[5] = m[10] = m[15] = 1.0;
  return m;
}

inline M4 mul(const M4& a, const M4& b) {
  M4 out{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += a[r * 4 + k] * b[k * 4 + c];
      out[r * 4 + c] = s;
    }
  return out;
}

inline M4 rotZ(double t) {
  M4 m = identity();
  m[0] = std::cos(t);
  m[1] = -std::sin(t);
  m[4] = std::sin(t);
  m[5] = std::cos(t);
  return m;
}

inline M4 rotX(double t) {
  M4 m = identity();
  m[5] = std::cos(t);
  m[6] = -std::sin(t);
  m[9] = std::sin(t);
  m[10] = std::cos(t);
  return m;
}

inline M4 translate(double x, double y, double z) {
  M4 m = identity();
  m[3] = x;
  m[7] = y;
  m[11] = z;
  return m;
}

inline M4 fromModel(const cmg::RigidTransform& t) {
  M4 m = identity();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m[r * 4 + c] = t.R.m[r * 3 + c];
    m[r * 4 + 3] = (r == 0 ? t.t.x : r == 1 ? t.t.y : t.t.z);
  }
  return m;
}

inline M4 outerJoint(const cmg::HandModel& hand, int finger, double spread, double inner) {
  M4 m = fromModel(hand.base[finger]);
  m = mul(m, rotZ(hand.spreadSign[finger] * spread));
  m = mul(m, fromModel(hand.mount));
  m = mul(m, rotZ(inner));
  m = mul(m, translate(hand.innerLength, 0.0, 0.0));
  m = mul(m, rotZ(hand.coupling * inner));
  m = mul(m, rotZ(M_PI));
  return m;
}

inline M4 fingertipFrame(const cmg::HandModel& hand, int finger, double spread, double inner) {
  M4 tip = mul(rotZ(-hand.roll), rotX(-M_PI / 2.0));
  tip[3] = hand.cLocal.x;
  tip[7] = hand.cLocal.y;
  tip[11] = hand.cLocal.z;
  return mul(outerJoint(hand, finger, spread, inner), tip);
}

inline cmg::Vec3 apply(const M4& m, const cmg::Vec3& p) {
  return {m[0] * p.x + m[1] * p.y + m[2] * p.z + m[3],
          m[4] * p.x + m[5] * p.y + m[6] * p.z + m[7],
          m[8] * p.x + m[9] * p.y + m[10] * p.z + m[11]};
}

// Largest absolute entry difference against a library transform.
inline double diff(const M4& m, const cmg::RigidTransform& t) {
  double worst = 0.0;
  M4 other = fromModel(t);
  for (int i = 0; i < 16; ++i) worst = std::max(worst, std::abs(m[i] - other[i]));
  return worst;
}

}  // namespace fkref
