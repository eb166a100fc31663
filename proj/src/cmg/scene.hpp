/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cmg/bvh.hpp"
#include "cmg/hand_model.hpp"
#include "cmg/mesh.hpp"
#include "cmg/synth.hpp"
#include "cmg/vec.hpp"

namespace cmg {

struct RegistryEntry {
  std::string id;
  std::string meshPath;
  double scale = 1.0;
};

struct SceneObject {
  std::string id;
  std::string meshPath;
  double scale = 1.0;
  RigidTransform pose;  // object frame to world
};

struct Scene {
  std::vector<SceneObject> objects;
};

struct LoadedObject {
  SceneObject object;
  std::shared_ptr<const TriangleMesh> mesh;
  std::shared_ptr<const Bvh> bvh;
};

struct LoadedScene {
  std::vector<LoadedObject> objects;
};

LoadedScene loadSceneGeometry(const Scene& scene);

// Canonical resting poses: one per convex hull face whose support polygon
// strictly contains the projected center of mass. Each pose turns the face
// down onto z = 0 and centers the mass over the origin.
std::vector<RigidTransform> stablePoses(const TriangleMesh& mesh);

struct SceneParams {
  int count = 3;
  std::uint64_t seed = 0;
  double extent = 0.3;      // placement range in x and y
  double clearance = 0.005;  // between placed objects
  int maxTries = 100;
};

// Drops objects from the registry onto the table at random stable poses,
// rejecting placements that crowd earlier objects. A slot that cannot be
// placed within maxTries is skipped.
Scene buildScene(const std::vector<RegistryEntry>& registry, const SceneParams& params);

struct CameraIntrinsics {
  int width = 640, height = 480;
  double fx = 600.0, fy = 600.0;
  double cx = 319.5, cy = 239.5;
};

struct Camera {
  CameraIntrinsics intrinsics;
  RigidTransform pose;  // camera frame (z forward, x right, y down) to world
};

// Orientation with +z from position toward target and +x horizontal.
RigidTransform lookAt(const Vec3& position, const Vec3& target);

// Viewpoint on the upper hemisphere around the scene origin.
Camera randomCamera(std::uint64_t seed, const CameraIntrinsics& intrinsics, double radius = 0.7,
                    double elevationMin = M_PI / 6.0, double elevationMax = M_PI * 5.0 / 12.0);

struct DepthImage {
  int width = 0, height = 0;
  std::vector<float> values;  // row-major, camera-z in meters, +inf for a miss

  float at(int px, int py) const { return values[static_cast<std::size_t>(py) * width + px]; }
};

DepthImage renderDepth(const LoadedScene& scene, const Camera& camera);

// Camera-frame point for a pixel and its depth.
Vec3 backProject(const CameraIntrinsics& intrinsics, int px, int py, double depth);

// Camera-frame cloud from a depth image: finite pixels, seeded subsampling to
// targetPoints, and neighborhood plane-fit normals oriented toward the
// camera.
PointCloud depthToCloud(const DepthImage& depth, const CameraIntrinsics& intrinsics,
                        int targetPoints, std::uint64_t seed, int neighbors = 30);

struct FilterCounts {
  int total = 0;
  int kept = 0;
  int removedCollision = 0;
  int removedInvalidPose = 0;
};

// Keeps world-frame grasps of one scene object that are collision-free
// against the other objects and the table along the retreat direction, and
// whose approach does not come from below the table.
std::vector<GraspRecord> filterGrasps(const LoadedScene& scene, std::size_t objectIndex,
                                      const std::vector<GraspRecord>& worldRecords,
                                      const HandModel& hand, FilterCounts* counts = nullptr);

}  // namespace cmg
