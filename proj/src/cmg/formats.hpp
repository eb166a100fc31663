/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cmg/labels.hpp"
#include "cmg/mesh.hpp"
#include "cmg/scene.hpp"
#include "cmg/synth.hpp"

namespace cmg {

// Grasp annotation files are plain text: "#" header lines carrying the
// generation parameters, then one row per grasp with 47 fields (id, 16 pose
// entries row-major homogeneous, spread, 3 inner joints, per finger contact
// position and normal, per finger chart x y, 1-based anchor finger,
// epsilon). Doubles are printed with %.17g so reloading is exact.
void saveAnnotations(const std::string& path, const AnnotationSet& set);
AnnotationSet loadAnnotations(const std::string& path);

// Object registries list "<id> <mesh_path> <scale>" per line; relative mesh
// paths are resolved against the registry file's directory.
std::vector<RegistryEntry> loadRegistry(const std::string& path);

// Scene manifests list "object <id> <mesh_path> <scale> <16 pose entries>"
// per line. Mesh paths are stored as given.
void saveScene(const std::string& path, const Scene& scene);
Scene loadScene(const std::string& path);

// Depth images: "CMGD", uint32 width and height, then row-major float32
// values, everything little-endian. Misses stay +inf.
void saveDepth(const std::string& path, const DepthImage& image);
DepthImage loadDepth(const std::string& path);

// Labeled clouds: "CMGL", uint32 count, then 58-byte records of position
// (3 float32), normal (3 float32), contact flag, 1-based finger, chart x y
// (float32), and four joint codes (uint16 bin, float32 residual), all
// little-endian.
void saveLabels(const std::string& path, const PointCloud& cloud,
                const std::vector<PointLabel>& labels);
void loadLabels(const std::string& path, PointCloud* cloud, std::vector<PointLabel>* labels);

// Camera-frame grasps for a rendered capture: annotation rows prefixed with
// the scene object id (48 tokens).
struct CaptureGraspRow {
  std::string objectId;
  GraspRecord record;
};

void saveCaptureGrasps(const std::string& path, const std::vector<CaptureGraspRow>& rows);
std::vector<CaptureGraspRow> loadCaptureGrasps(const std::string& path);

// Capture manifest tying one rendered viewpoint together. Sibling outputs
// are referenced by file name so a capture directory can be relocated.
struct CaptureManifest {
  std::string scenePath;
  std::string handPath;
  CameraIntrinsics intrinsics;
  RigidTransform cameraPose;
  std::string depthPath, graspsPath, labelsPath;
  int points = 0;
  std::uint64_t seed = 0;
  LabelParams labelParams;
  FilterCounts counts;
};

void saveCaptureManifest(const std::string& path, const CaptureManifest& manifest);
CaptureManifest loadCaptureManifest(const std::string& path);

}  // namespace cmg
