/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cmg/bvh.hpp"
#include "cmg/contact_repr.hpp"
#include "cmg/hand_model.hpp"
#include "cmg/mesh.hpp"
#include "cmg/vec.hpp"

namespace cmg {

// One stored grasp: wrist pose and joints in the object frame, the
// kinematically consistent contact of every finger with its chart
// coordinates, the anchor finger whose contact carries the compact encoding,
// and the wrench-space quality.
struct GraspRecord {
  int id = 0;
  RigidTransform pose;
  double spread = 0.0;
  std::array<double, 3> inner{};
  std::array<OrientedPoint, 3> contacts{};
  std::array<double, 3> x{}, y{};
  int anchor = 2;  // 0-based
  double epsilon = 0.0;
};

// A grasp dataset for one object, along with everything needed to reproduce
// and validate it.
struct AnnotationSet {
  std::string objectId;
  std::string meshPath;
  double scale = 1.0;
  std::string handPath;
  double tau = 0.05;
  double mu = 0.5;
  int coneEdges = 8;
  double lambda = 0.0;
  Vec3 torqueOrigin;
  std::uint64_t seed = 0;
  double sampleVoxel = 0.01;
  std::vector<double> depths, rolls, spreads;
  std::vector<GraspRecord> grasps;
};

struct SynthParams {
  double tau = 0.05;
  double mu = 0.5;
  int coneEdges = 8;
  double sampleVoxel = 0.01;
  std::vector<double> depths = {0.0, 0.04 / 3.0, 0.08 / 3.0, 0.04};
  std::vector<double> rolls;    // default: 8 evenly over [0, 2pi)
  std::vector<double> spreads;  // default: 0, pi/4, pi/2
  int targetCount = 100;
  std::uint64_t seed = 0;

  SynthParams();
};

struct SynthReport {
  long long candidates = 0;  // full grid size
  long long evaluated = 0;
  long long kept = 0;
};

// Wrist pose for one approach candidate: the palm faces the surface sample
// along -z at the given standoff depth, rolled about the approach axis.
RigidTransform candidatePose(const OrientedPoint& sample, double depth, double roll,
                             const HandModel& hand);

// Closes one finger from the open position until the fingertip sphere meets
// the object, refining the touch by bisection. Empty when the joint range is
// exhausted first.
std::optional<double> closeFinger(const Bvh& object, const HandModel& hand,
                                  const RigidTransform& pose, double spread, int finger);

// Clusters raw touch points into k representative contacts (farthest-point
// seeding from the lexicographically smallest point, then Lloyd iterations),
// projecting each cluster mean back onto the surface.
std::vector<OrientedPoint> extractContacts(const std::vector<OrientedPoint>& raws, int k,
                                           const Bvh& object);

// Full pipeline for one object: enumerate the candidate grid in a fixed
// order, close the fingers, derive contacts and quality, and keep grasps
// whose quality clears tau until targetCount are collected. Deterministic for
// fixed inputs regardless of thread count.
AnnotationSet sampleGrasps(const TriangleMesh& mesh, const HandModel& hand,
                           const SynthParams& params, SynthReport* report = nullptr);

// Applies a rigid transform to a record: pose and contacts move, chart
// coordinates are re-encoded against the rotated normals, epsilon is
// unchanged. Used to move annotations between frames.
GraspRecord transformRecord(const GraspRecord& record, const RigidTransform& t,
                            const HandModel& hand);

// Worst interpenetration of any hand body into the object across a grasp, in
// meters. Fingertips are measured exactly through the sphere center; palm and
// links through sampled surface points.
double graspPenetration(const GraspRecord& record, const Bvh& object, const HandModel& hand);

}  // namespace cmg
