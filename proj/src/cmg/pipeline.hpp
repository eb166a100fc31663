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

#include "cmg/formats.hpp"
#include "cmg/scene.hpp"
#include "cmg/synth.hpp"

namespace cmg {

// End-to-end dataset steps shared by the command line tool and the library
// API. Each runner reads and writes the documented file formats.

struct SampleGraspsOptions {
  std::string registryPath;
  std::string handPath;
  std::string outDir;
  SynthParams params;
};

struct SampleGraspsReport {
  struct PerObject {
    std::string id;
    std::string outPath;
    long long candidates = 0;
    long long evaluated = 0;
    long long kept = 0;
    double seconds = 0.0;
  };
  std::vector<PerObject> objects;
};

// Synthesizes grasp annotations for every registry object into
// "<outDir>/<id>.grasps".
SampleGraspsReport runSampleGrasps(const SampleGraspsOptions& options);

struct BuildSceneOptions {
  std::string registryPath;
  std::string outPath;
  SceneParams params;
};

struct BuildSceneReport {
  int requested = 0;
  int placed = 0;
};

BuildSceneReport runBuildScene(const BuildSceneOptions& options);

struct RenderOptions {
  std::string scenePath;
  std::string annotationsDir;
  std::string handPath;
  std::string outDir;
  std::string prefix = "capture";
  int points = 20000;
  std::uint64_t seed = 0;
  CameraIntrinsics intrinsics;
};

struct RenderReport {
  std::string manifestPath;
  int totalPixels = 0;
  int finitePixels = 0;
  int cloudPoints = 0;
  int contactPoints = 0;
  FilterCounts counts;
};

// Renders one viewpoint of a scene and writes the depth image, the
// camera-frame grasps that survive the reachability filter, the labeled
// cloud, and a manifest tying them together.
RenderReport runRender(const RenderOptions& options);

struct ValidateOptions {
  std::string annotationsPath;  // exactly one of these two is set
  std::string capturePath;
  std::string handPath;  // optional override of the recorded hand file
  double poseTolerance = 1e-6;
  double surfaceTolerance = 1e-3;
  double penetrationMax = 1e-3;
};

struct ValidateReport {
  int grasps = 0;
  int failures = 0;
  std::vector<std::string> problems;  // capped, one line each
  double maxPoseError = 0.0;
  double maxSurfaceDistance = 0.0;
  double maxEpsilonError = 0.0;
  double maxPenetration = 0.0;

  bool passed() const { return failures == 0; }
};

// Re-derives every stored grasp from its compact encoding and checks it
// against the mesh: pose agreement, contacts on the surface, quality above
// the recorded threshold, and bounded interpenetration.
ValidateReport runValidate(const ValidateOptions& options);

struct EvalQualityOptions {
  std::string annotationsPath;
  int samples = 20;
  int oracleDirections = 4096;
  std::uint64_t seed = 1;
};

struct EvalQualityReport {
  int evaluated = 0;
  double maxStoredError = 0.0;  // stored epsilon vs recomputed exact value
  double maxOracleGap = 0.0;    // sampled upper bound minus exact value
  double meanOracleGap = 0.0;
  double maxWrenchNorm = 0.0;
};

// Compares the exact quality against the sampled upper bound on stored
// grasps.
EvalQualityReport runEvalQuality(const EvalQualityOptions& options);

}  // namespace cmg
