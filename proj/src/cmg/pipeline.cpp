/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#include "cmg/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include "cmg/contact_repr.hpp"
#include "cmg/error.hpp"
#include "cmg/labels.hpp"
#include "cmg/quality.hpp"

namespace cmg {

namespace {

namespace fs = std::filesystem;

double seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

// Path of target as stored in a manifest living in baseDir: relative when
// possible so a capture directory can be moved around.
std::string relativeTo(const std::string& target, const std::string& baseDir) {
  std::error_code ec;
  const fs::path rel = fs::proximate(target, baseDir, ec);
  if (ec || rel.empty()) return target;
  return rel.string();
}

std::string resolveFrom(const std::string& stored, const fs::path& dir) {
  const fs::path p(stored);
  if (p.is_absolute()) return stored;
  return (dir / p).string();
}

CompactGrasp compactFromRecord(const GraspRecord& rec) {
  CompactGrasp g;
  g.finger = rec.anchor;
  g.x = rec.x[rec.anchor];
  g.y = rec.y[rec.anchor];
  g.spread = rec.spread;
  g.inner = rec.inner[rec.anchor];
  int slot = 0;
  for (int f = 0; f < 3; ++f) {
    if (f == rec.anchor) continue;
    (slot++ == 0 ? g.support1 : g.support2) = rec.inner[f];
  }
  return g;
}

void addProblem(ValidateReport* report, const std::string& line) {
  ++report->failures;
  if (report->problems.size() < 20) report->problems.push_back(line);
}

}  // namespace

SampleGraspsReport runSampleGrasps(const SampleGraspsOptions& options) {
  const std::vector<RegistryEntry> registry = loadRegistry(options.registryPath);
  const HandModel hand = loadHand(options.handPath);
  fs::create_directories(options.outDir);

  SampleGraspsReport report;
  for (const RegistryEntry& entry : registry) {
    const auto start = std::chrono::steady_clock::now();
    const TriangleMesh mesh = loadMesh(entry.meshPath, entry.scale);
    SynthReport synth;
    AnnotationSet set = sampleGrasps(mesh, hand, options.params, &synth);
    set.objectId = entry.id;
    set.meshPath = entry.meshPath;
    set.scale = entry.scale;
    set.handPath = options.handPath;

    const std::string outPath = (fs::path(options.outDir) / (entry.id + ".grasps")).string();
    saveAnnotations(outPath, set);

    SampleGraspsReport::PerObject obj;
    obj.id = entry.id;
    obj.outPath = outPath;
    obj.candidates = synth.candidates;
    obj.evaluated = synth.evaluated;
    obj.kept = synth.kept;
    obj.seconds = seconds(start);
    report.objects.push_back(std::move(obj));
  }
  return report;
}

BuildSceneReport runBuildScene(const BuildSceneOptions& options) {
  const std::vector<RegistryEntry> registry = loadRegistry(options.registryPath);
  const Scene scene = buildScene(registry, options.params);
  const fs::path parent = fs::path(options.outPath).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  saveScene(options.outPath, scene);
  BuildSceneReport report;
  report.requested = options.params.count;
  report.placed = static_cast<int>(scene.objects.size());
  return report;
}

RenderReport runRender(const RenderOptions& options) {
  const Scene scene = loadScene(options.scenePath);
  if (scene.objects.empty()) throw Error(ErrorCode::kInvalidArg, "runRender: empty scene");
  const LoadedScene loaded = loadSceneGeometry(scene);
  const HandModel hand = loadHand(options.handPath);
  fs::create_directories(options.outDir);

  const Camera camera = randomCamera(options.seed, options.intrinsics);
  const DepthImage depth = renderDepth(loaded, camera);
  const PointCloud cloud =
      depthToCloud(depth, camera.intrinsics, options.points, options.seed);

  // Annotated grasps of every scene object, first into the world frame for
  // the reachability filter, then into the camera frame alongside the cloud.
  const RigidTransform toCamera = camera.pose.inverse();
  FilterCounts totals;
  std::vector<CaptureGraspRow> rows;
  std::vector<GraspRecord> cameraRecords;
  for (std::size_t i = 0; i < loaded.objects.size(); ++i) {
    const SceneObject& obj = loaded.objects[i].object;
    const std::string annPath =
        (fs::path(options.annotationsDir) / (obj.id + ".grasps")).string();
    const AnnotationSet set = loadAnnotations(annPath);

    std::vector<GraspRecord> world;
    world.reserve(set.grasps.size());
    for (const GraspRecord& rec : set.grasps) {
      world.push_back(transformRecord(rec, obj.pose, hand));
    }
    FilterCounts counts;
    const std::vector<GraspRecord> kept = filterGrasps(loaded, i, world, hand, &counts);
    totals.total += counts.total;
    totals.kept += counts.kept;
    totals.removedCollision += counts.removedCollision;
    totals.removedInvalidPose += counts.removedInvalidPose;

    for (const GraspRecord& rec : kept) {
      GraspRecord camRec = transformRecord(rec, toCamera, hand);
      rows.push_back(CaptureGraspRow{obj.id, camRec});
      cameraRecords.push_back(std::move(camRec));
    }
  }

  const LabelParams labelParams = LabelParams::forHand(hand);
  const std::vector<PointLabel> labels = labelPoints(cloud, cameraRecords, labelParams);

  const fs::path outDir(options.outDir);
  CaptureManifest manifest;
  manifest.scenePath = relativeTo(options.scenePath, options.outDir);
  manifest.handPath = relativeTo(options.handPath, options.outDir);
  manifest.intrinsics = camera.intrinsics;
  manifest.cameraPose = camera.pose;
  manifest.depthPath = options.prefix + ".depth";
  manifest.graspsPath = options.prefix + ".grasps";
  manifest.labelsPath = options.prefix + ".labels";
  manifest.points = static_cast<int>(cloud.size());
  manifest.seed = options.seed;
  manifest.labelParams = labelParams;
  manifest.counts = totals;

  saveDepth((outDir / manifest.depthPath).string(), depth);
  saveCaptureGrasps((outDir / manifest.graspsPath).string(), rows);
  saveLabels((outDir / manifest.labelsPath).string(), cloud, labels);
  const std::string manifestPath = (outDir / (options.prefix + ".manifest")).string();
  saveCaptureManifest(manifestPath, manifest);

  RenderReport report;
  report.manifestPath = manifestPath;
  report.totalPixels = depth.width * depth.height;
  report.finitePixels =
      static_cast<int>(std::count_if(depth.values.begin(), depth.values.end(),
                                     [](float v) { return std::isfinite(v); }));
  report.cloudPoints = static_cast<int>(cloud.size());
  report.contactPoints = static_cast<int>(
      std::count_if(labels.begin(), labels.end(),
                    [](const PointLabel& l) { return l.contact != 0; }));
  report.counts = totals;
  return report;
}

namespace {

void validateAnnotations(const ValidateOptions& options, ValidateReport* report) {
  const AnnotationSet set = loadAnnotations(options.annotationsPath);
  const std::string handPath = options.handPath.empty() ? set.handPath : options.handPath;
  const HandModel hand = loadHand(handPath);
  const TriangleMesh mesh = loadMesh(set.meshPath, set.scale);
  const Bvh bvh(mesh);

  const Vec3 origin = mesh.vertexCentroid();
  const double lambda = 1.0 / mesh.maxVertexDistance(origin);
  if (std::abs(lambda - set.lambda) > 1e-9 * std::max(1.0, std::abs(set.lambda)) ||
      norm(origin - set.torqueOrigin) > 1e-9) {
    addProblem(report, "recorded torque scaling disagrees with the mesh");
  }

  report->grasps = static_cast<int>(set.grasps.size());
  for (const GraspRecord& rec : set.grasps) {
    std::ostringstream why;
    bool ok = true;

    if (rec.spread < hand.spreadMin - 1e-9 || rec.spread > hand.spreadMax + 1e-9) {
      why << " spread out of range;";
      ok = false;
    }
    for (double v : rec.inner) {
      if (v < hand.innerMin - 1e-9 || v > hand.innerMax + 1e-9) {
        why << " inner joint out of range;";
        ok = false;
        break;
      }
    }
    if (orthonormalityError(rec.pose.R) > 1e-9) {
      why << " pose not orthonormal;";
      ok = false;
    }

    try {
      const CompactGrasp g = compactFromRecord(rec);
      const FullGrasp full = decodeGrasp(g, rec.contacts[rec.anchor], hand);
      const double err = transformError(full.pose, rec.pose);
      report->maxPoseError = std::max(report->maxPoseError, err);
      if (err > options.poseTolerance) {
        why << " decoded pose deviates " << err << ";";
        ok = false;
      }
    } catch (const Error& e) {
      why << " decode failed: " << e.what() << ";";
      ok = false;
    }

    for (const OrientedPoint& c : rec.contacts) {
      const double d = bvh.closestPoint(c.position).distance;
      report->maxSurfaceDistance = std::max(report->maxSurfaceDistance, d);
      if (d > options.surfaceTolerance) {
        why << " contact off the surface by " << d << ";";
        ok = false;
      }
      if (std::abs(norm(c.normal) - 1.0) > 1e-9) {
        why << " contact normal not unit;";
        ok = false;
      }
    }

    try {
      const std::vector<OrientedPoint> contacts(rec.contacts.begin(), rec.contacts.end());
      const std::vector<Wrench> wrenches =
          contactWrenches(contacts, set.mu, set.coneEdges, set.lambda, set.torqueOrigin);
      const double exact = epsilonQuality(wrenches);
      const double err = std::abs(exact - rec.epsilon);
      report->maxEpsilonError = std::max(report->maxEpsilonError, err);
      if (err > 1e-9) {
        why << " recorded quality deviates " << err << ";";
        ok = false;
      }
      if (rec.epsilon < set.tau - 1e-12) {
        why << " quality below threshold;";
        ok = false;
      }
    } catch (const Error& e) {
      why << " quality check failed: " << e.what() << ";";
      ok = false;
    }

    const double pen = graspPenetration(rec, bvh, hand);
    report->maxPenetration = std::max(report->maxPenetration, pen);
    if (pen > options.penetrationMax) {
      why << " interpenetration " << pen << ";";
      ok = false;
    }

    if (!ok) addProblem(report, "grasp " + std::to_string(rec.id) + ":" + why.str());
  }
}

void validateCapture(const ValidateOptions& options, ValidateReport* report) {
  const fs::path dir = fs::path(options.capturePath).parent_path();
  const CaptureManifest m = loadCaptureManifest(options.capturePath);

  const DepthImage depth = loadDepth(resolveFrom(m.depthPath, dir));
  if (depth.width != m.intrinsics.width || depth.height != m.intrinsics.height) {
    addProblem(report, "depth image size disagrees with the manifest");
  }

  PointCloud cloud;
  std::vector<PointLabel> labels;
  loadLabels(resolveFrom(m.labelsPath, dir), &cloud, &labels);
  if (static_cast<int>(cloud.size()) != m.points) {
    addProblem(report, "label count disagrees with the manifest");
  }

  const auto binCount = [&](int j) {
    switch (j) {
      case 0: return m.labelParams.mainBins.bins;
      case 1: return m.labelParams.spreadBins.bins;
      default: return m.labelParams.supportBins.bins;
    }
  };
  int badLabels = 0;
  for (const PointLabel& l : labels) {
    bool good = l.finger <= 3 && (l.contact == 0) == (l.finger == 0);
    if (l.contact != 0) {
      for (int j = 0; j < 4 && good; ++j) {
        good = l.bins[j] < static_cast<std::uint16_t>(binCount(j)) &&
               l.res[j] >= -0.5f - 1e-6f && l.res[j] < 0.5f + 1e-6f;
      }
    } else {
      for (int j = 0; j < 4 && good; ++j) good = l.bins[j] == 0xFFFF;
    }
    if (!good) ++badLabels;
  }
  if (badLabels > 0) {
    addProblem(report, std::to_string(badLabels) + " malformed point labels");
  }

  const Scene scene = loadScene(resolveFrom(m.scenePath, dir));
  const std::string handPath =
      options.handPath.empty() ? resolveFrom(m.handPath, dir) : options.handPath;
  const HandModel hand = loadHand(handPath);

  // Object meshes by scene id for the surface checks.
  std::map<std::string, std::vector<const SceneObject*>> instances;
  std::map<std::string, std::shared_ptr<const Bvh>> bvhs;
  const LoadedScene loaded = loadSceneGeometry(scene);
  for (const LoadedObject& obj : loaded.objects) {
    instances[obj.object.id].push_back(&obj.object);
    bvhs.emplace(obj.object.id, obj.bvh);
  }

  const std::vector<CaptureGraspRow> rows = loadCaptureGrasps(resolveFrom(m.graspsPath, dir));
  report->grasps = static_cast<int>(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const CaptureGraspRow& row = rows[i];
    std::ostringstream why;
    bool ok = true;

    if (instances.find(row.objectId) == instances.end()) {
      addProblem(report, "grasp row " + std::to_string(i) + ": unknown object " + row.objectId);
      continue;
    }

    try {
      const CompactGrasp g = compactFromRecord(row.record);
      const FullGrasp full = decodeGrasp(g, row.record.contacts[row.record.anchor], hand);
      const double err = transformError(full.pose, row.record.pose);
      report->maxPoseError = std::max(report->maxPoseError, err);
      if (err > options.poseTolerance) {
        why << " decoded pose deviates " << err << ";";
        ok = false;
      }
    } catch (const Error& e) {
      why << " decode failed: " << e.what() << ";";
      ok = false;
    }

    for (const OrientedPoint& c : row.record.contacts) {
      const Vec3 world = m.cameraPose.apply(c.position);
      double best = std::numeric_limits<double>::infinity();
      for (const SceneObject* obj : instances[row.objectId]) {
        const Vec3 local = obj->pose.inverse().apply(world);
        best = std::min(best, bvhs[row.objectId]->closestPoint(local).distance);
      }
      report->maxSurfaceDistance = std::max(report->maxSurfaceDistance, best);
      if (best > options.surfaceTolerance) {
        why << " contact off the surface by " << best << ";";
        ok = false;
      }
    }

    if (!ok) addProblem(report, "grasp row " + std::to_string(i) + ":" + why.str());
  }
}

}  // namespace

ValidateReport runValidate(const ValidateOptions& options) {
  if (options.annotationsPath.empty() == options.capturePath.empty()) {
    throw Error(ErrorCode::kInvalidArg,
                "runValidate: exactly one of annotations or capture must be given");
  }
  ValidateReport report;
  if (!options.annotationsPath.empty()) {
    validateAnnotations(options, &report);
  } else {
    validateCapture(options, &report);
  }
  return report;
}

EvalQualityReport runEvalQuality(const EvalQualityOptions& options) {
  if (options.samples < 1 || options.oracleDirections < 1) {
    throw Error(ErrorCode::kInvalidArg, "runEvalQuality: bad parameters");
  }
  const AnnotationSet set = loadAnnotations(options.annotationsPath);
  EvalQualityReport report;
  double gapSum = 0.0;
  const int n = std::min<int>(options.samples, static_cast<int>(set.grasps.size()));
  for (int i = 0; i < n; ++i) {
    const GraspRecord& rec = set.grasps[i];
    const std::vector<OrientedPoint> contacts(rec.contacts.begin(), rec.contacts.end());
    const std::vector<Wrench> wrenches =
        contactWrenches(contacts, set.mu, set.coneEdges, set.lambda, set.torqueOrigin);
    const double exact = epsilonQuality(wrenches);
    const double oracle =
        epsilonOracle(wrenches, options.oracleDirections, options.seed + i);
    report.maxStoredError = std::max(report.maxStoredError, std::abs(exact - rec.epsilon));
    const double gap = oracle - exact;
    report.maxOracleGap = std::max(report.maxOracleGap, gap);
    gapSum += gap;
    report.maxWrenchNorm = std::max(report.maxWrenchNorm, maxWrenchNorm(wrenches));
    ++report.evaluated;
  }
  if (report.evaluated > 0) report.meanOracleGap = gapSum / report.evaluated;
  return report;
}

}  // namespace cmg
