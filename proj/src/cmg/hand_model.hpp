/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cmg/bvh.hpp"
#include "cmg/mesh.hpp"
#include "cmg/vec.hpp"

namespace cmg {

// A three-finger gripper with one shared spread joint and, per finger, an
// actuated inner joint whose outer joint follows through a fixed coupling
// ratio. Each finger chain is
//
//   T_oj(f) = base_f * Rz(spreadSign_f * spread) * mount * Rz(inner)
//             * Trans(innerLength, 0, 0) * Rz(coupling * inner) * Rz(pi)
//
// which lands in the outer-joint (oj) frame: x points back along the outer
// link, z is the joint axis, and the fingertip sphere sits at cLocal. The
// palm mounting plane is z = 0 with the palm body on +z; fingers curl toward
// -z, so -z is the approach direction and +z the retreat direction.
struct HandModel {
  int fingerCount = 0;
  double innerLength = 0.0;
  double outerLength = 0.0;
  double coupling = 0.0;
  double fingertipRadius = 0.0;
  Vec3 vFinger;  // fingertip-center-to-oj vector in the canonical outer frame
  double roll = 0.0;
  double spreadMin = 0.0, spreadMax = 0.0;
  double innerMin = 0.0, innerMax = 0.0;
  std::vector<RigidTransform> base;
  std::vector<double> spreadSign;
  RigidTransform mount;

  TriangleMesh palmMesh, linkInnerMesh, linkOuterMesh;
  int fingertipSubdiv = 2;

  // Derived at load time.
  Vec3 cLocal;               // fingertip center in the oj frame
  Mat3 r0;                   // alignment rotation used by the grasp codec
  double standoff = 0.0;     // innerLength + outerLength
  TriangleMesh fingertipMesh;  // icosphere at cLocal, oj frame
  std::shared_ptr<const Bvh> palmBvh, linkInnerBvh, linkOuterBvh;
  // Surface samples of each body in its own frame, for penetration depth.
  std::vector<OrientedPoint> palmSamples, linkInnerSamples, linkOuterSamples;

  void finalize();  // fills the derived fields, throws on an invalid model
};

HandModel loadHand(const std::string& path);

// Outer-joint frame of one finger relative to the palm.
RigidTransform fkOuterJoint(const HandModel& hand, int finger, double spread, double inner);

// Fingertip sphere center relative to the palm.
Vec3 fkFingertipCenter(const HandModel& hand, int finger, double spread, double inner);

// Full fingertip frame (palm-relative): z is the central pad normal.
RigidTransform fkFingertipFrame(const HandModel& hand, int finger, double spread, double inner);

// World placement of every hand body at a posture.
struct HandPosture {
  RigidTransform palm;
  std::vector<RigidTransform> innerLink;  // inner-joint frame, box along +x
  std::vector<RigidTransform> outerLink;  // oj frame
  std::vector<Vec3> fingertipCenter;
};

HandPosture handPosture(const HandModel& hand, const RigidTransform& pose, double spread,
                        const std::vector<double>& inner);

}  // namespace cmg
