/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#pragma once

#include <vector>

#include "cmg/hand_model.hpp"
#include "cmg/mesh.hpp"
#include "cmg/vec.hpp"

namespace cmg {

// Compact grasp parameters tied to one surface contact: the finger that
// realizes the contact, the fingertip-to-joint direction in the contact's
// canonical frame, and the four joint values. Support joints are listed by
// ascending finger id, skipping the contact finger. Fingers are 0-based here;
// file formats use 1-based ids.
struct CompactGrasp {
  int finger = 0;
  double x = 0.0, y = 0.0;
  double spread = 0.0;
  double inner = 0.0;
  double support1 = 0.0, support2 = 0.0;
};

// A wrist pose plus the full joint state.
struct FullGrasp {
  RigidTransform pose;
  double spread = 0.0;
  std::vector<double> inner;
};

// Canonical right-handed frame attached to a unit direction v: columns are
// (c1, c2, v) with c2 = normalize((0, -v_z, v_y)), c1 = c2 x v. Near v =
// (+-1, 0, 0) the construction switches to c2 = normalize((-v_y, v_x, 0)).
Mat3 chart(const Vec3& v);

// Frame of the outer joint reconstructed from the center-to-joint direction u
// and the contact normal n: columns (u, c3 x u, c3) with c3 = normalize(u x
// n). When u and n align (the direction carries no azimuth), c3 falls back to
// the chart's second column, which keeps decoding deterministic.
Mat3 contactFrame(const Vec3& u, const Vec3& n);

// Reconstructs the full grasp from a contact and compact parameters. The
// wrist pose comes out in the frame the contact is expressed in.
FullGrasp decodeGrasp(const CompactGrasp& g, const OrientedPoint& contact, const HandModel& hand);

struct EncodeResult {
  OrientedPoint contact;  // re-derived contact consistent with the kinematics
  CompactGrasp g;
};

// Projects a full grasp down to compact parameters for one finger. The
// contact supplies the surface normal; its position is re-derived from the
// fingertip sphere so decode inverts encode exactly. Throws
// ErrorCode::kUnrepresentable when the joint direction falls on the hidden
// half of the chart (z < 0).
EncodeResult encodeGrasp(const FullGrasp& full, int finger, const HandModel& hand,
                         const OrientedPoint& contact);

// Range and sanity checks; throws on violations.
void validateCompact(const CompactGrasp& g, const HandModel& hand);
void validateFull(const FullGrasp& full, const HandModel& hand);

}  // namespace cmg
