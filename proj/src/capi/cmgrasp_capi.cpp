/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#include "cmgrasp/cmgrasp.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmg/contact_repr.hpp"
#include "cmg/error.hpp"
#include "cmg/formats.hpp"
#include "cmg/hand_model.hpp"
#include "cmg/mesh.hpp"
#include "cmg/pipeline.hpp"
#include "cmg/quality.hpp"
#include "cmg/synth.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_lastError;

cmg_status toStatus(cmg::ErrorCode code) {
  switch (code) {
    case cmg::ErrorCode::kIo: return CMG_ERROR_IO;
    case cmg::ErrorCode::kParse: return CMG_ERROR_PARSE;
    case cmg::ErrorCode::kInvalidArg: return CMG_ERROR_INVALID_ARG;
    case cmg::ErrorCode::kUnrepresentable: return CMG_ERROR_UNREPRESENTABLE;
    case cmg::ErrorCode::kDegenerate: return CMG_ERROR_DEGENERATE;
    case cmg::ErrorCode::kInternal: return CMG_ERROR_INTERNAL;
  }
  return CMG_ERROR_INTERNAL;
}

// Runs the body, translating exceptions into status codes.
template <typename Fn>
cmg_status guarded(Fn&& fn) {
  try {
    fn();
    g_lastError.clear();
    return CMG_OK;
  } catch (const cmg::Error& e) {
    g_lastError = e.what();
    return toStatus(e.code());
  } catch (const std::exception& e) {
    g_lastError = e.what();
    return CMG_ERROR_INTERNAL;
  } catch (...) {
    g_lastError = "unknown error";
    return CMG_ERROR_INTERNAL;
  }
}

cmg_status requireArgs(bool ok) {
  if (!ok) {
    g_lastError = "null argument";
    return CMG_ERROR_INVALID_ARG;
  }
  return CMG_OK;
}

char* dupString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

cmg::Vec3 toVec(const double v[3]) { return cmg::Vec3{v[0], v[1], v[2]}; }

cmg::RigidTransform toTransform(const cmg_transform& t) {
  cmg::RigidTransform out;
  for (int i = 0; i < 9; ++i) out.R.m[i] = t.rotation[i];
  out.t = toVec(t.translation);
  return out;
}

cmg_transform fromTransform(const cmg::RigidTransform& t) {
  cmg_transform out;
  for (int i = 0; i < 9; ++i) out.rotation[i] = t.R.m[i];
  out.translation[0] = t.t.x;
  out.translation[1] = t.t.y;
  out.translation[2] = t.t.z;
  return out;
}

cmg::OrientedPoint toPoint(const cmg_oriented_point& p) {
  return cmg::OrientedPoint{toVec(p.position), toVec(p.normal)};
}

cmg_oriented_point fromPoint(const cmg::OrientedPoint& p) {
  cmg_oriented_point out;
  out.position[0] = p.position.x;
  out.position[1] = p.position.y;
  out.position[2] = p.position.z;
  out.normal[0] = p.normal.x;
  out.normal[1] = p.normal.y;
  out.normal[2] = p.normal.z;
  return out;
}

cmg_grasp_record fromRecord(const cmg::GraspRecord& rec) {
  cmg_grasp_record out;
  out.id = rec.id;
  out.pose = fromTransform(rec.pose);
  out.spread = rec.spread;
  for (int f = 0; f < 3; ++f) {
    out.inner[f] = rec.inner[f];
    out.contacts[f] = fromPoint(rec.contacts[f]);
    out.x[f] = rec.x[f];
    out.y[f] = rec.y[f];
  }
  out.anchor = rec.anchor;
  out.epsilon = rec.epsilon;
  return out;
}

std::vector<cmg::Wrench> toWrenches(const double* values, size_t count) {
  std::vector<cmg::Wrench> out(count);
  for (size_t i = 0; i < count; ++i) {
    for (int j = 0; j < 6; ++j) out[i][j] = values[i * 6 + j];
  }
  return out;
}

}  // namespace

struct cmg_hand {
  cmg::HandModel model;
};

struct cmg_mesh {
  cmg::TriangleMesh mesh;
};

struct cmg_grasp_list {
  cmg::AnnotationSet set;
};

extern "C" {

const char* cmg_last_error(void) { return g_lastError.c_str(); }

void cmg_free(void* ptr) { std::free(ptr); }

uint32_t cmg_abi_version(void) { return 1; }

cmg_status cmg_hand_load(const char* path, cmg_hand** out) {
  if (cmg_status s = requireArgs(path != nullptr && out != nullptr)) return s;
  return guarded([&] { *out = new cmg_hand{cmg::loadHand(path)}; });
}

void cmg_hand_destroy(cmg_hand* hand) { delete hand; }

int cmg_hand_finger_count(const cmg_hand* hand) {
  return hand != nullptr ? hand->model.fingerCount : 0;
}

cmg_status cmg_hand_joint_limits(const cmg_hand* hand, double* spread_min, double* spread_max,
                                 double* inner_min, double* inner_max) {
  if (cmg_status s = requireArgs(hand != nullptr)) return s;
  if (spread_min != nullptr) *spread_min = hand->model.spreadMin;
  if (spread_max != nullptr) *spread_max = hand->model.spreadMax;
  if (inner_min != nullptr) *inner_min = hand->model.innerMin;
  if (inner_max != nullptr) *inner_max = hand->model.innerMax;
  return CMG_OK;
}

cmg_status cmg_chart(const double direction[3], double frame[9]) {
  if (cmg_status s = requireArgs(direction != nullptr && frame != nullptr)) return s;
  return guarded([&] {
    const cmg::Mat3 m = cmg::chart(toVec(direction));
    for (int i = 0; i < 9; ++i) frame[i] = m.m[i];
  });
}

cmg_status cmg_decode_grasp(const cmg_hand* hand, const cmg_compact_grasp* grasp,
                            const cmg_oriented_point* contact, cmg_full_grasp* out) {
  if (cmg_status s = requireArgs(hand != nullptr && grasp != nullptr && contact != nullptr &&
                                 out != nullptr)) {
    return s;
  }
  return guarded([&] {
    cmg::CompactGrasp g;
    g.finger = grasp->finger;
    g.x = grasp->x;
    g.y = grasp->y;
    g.spread = grasp->spread;
    g.inner = grasp->inner;
    g.support1 = grasp->support1;
    g.support2 = grasp->support2;
    const cmg::FullGrasp full = cmg::decodeGrasp(g, toPoint(*contact), hand->model);
    out->pose = fromTransform(full.pose);
    out->spread = full.spread;
    for (int f = 0; f < 3; ++f) out->inner[f] = full.inner[f];
  });
}

cmg_status cmg_encode_grasp(const cmg_hand* hand, const cmg_full_grasp* grasp, int finger,
                            const cmg_oriented_point* contact, cmg_compact_grasp* out,
                            cmg_oriented_point* contact_out) {
  if (cmg_status s = requireArgs(hand != nullptr && grasp != nullptr && contact != nullptr &&
                                 out != nullptr)) {
    return s;
  }
  return guarded([&] {
    cmg::FullGrasp full;
    full.pose = toTransform(grasp->pose);
    full.spread = grasp->spread;
    full.inner.assign(grasp->inner, grasp->inner + 3);
    const cmg::EncodeResult res = cmg::encodeGrasp(full, finger, hand->model, toPoint(*contact));
    out->finger = res.g.finger;
    out->x = res.g.x;
    out->y = res.g.y;
    out->spread = res.g.spread;
    out->inner = res.g.inner;
    out->support1 = res.g.support1;
    out->support2 = res.g.support2;
    if (contact_out != nullptr) *contact_out = fromPoint(res.contact);
  });
}

cmg_status cmg_contact_wrenches(const cmg_oriented_point* contacts, size_t contact_count,
                                double mu, int cone_edges, double lambda,
                                const double torque_origin[3], double** wrenches_out,
                                size_t* wrench_count_out) {
  if (cmg_status s = requireArgs(contacts != nullptr && torque_origin != nullptr &&
                                 wrenches_out != nullptr && wrench_count_out != nullptr)) {
    return s;
  }
  return guarded([&] {
    std::vector<cmg::OrientedPoint> pts;
    pts.reserve(contact_count);
    for (size_t i = 0; i < contact_count; ++i) pts.push_back(toPoint(contacts[i]));
    const std::vector<cmg::Wrench> wrenches =
        cmg::contactWrenches(pts, mu, cone_edges, lambda, toVec(torque_origin));
    double* buf = static_cast<double*>(std::malloc(wrenches.size() * 6 * sizeof(double)));
    if (buf == nullptr) throw std::bad_alloc();
    for (size_t i = 0; i < wrenches.size(); ++i) {
      for (int j = 0; j < 6; ++j) buf[i * 6 + j] = wrenches[i][j];
    }
    *wrenches_out = buf;
    *wrench_count_out = wrenches.size();
  });
}

cmg_status cmg_epsilon_quality(const double* wrenches, size_t wrench_count, double* out) {
  if (cmg_status s = requireArgs(wrenches != nullptr && out != nullptr)) return s;
  return guarded([&] { *out = cmg::epsilonQuality(toWrenches(wrenches, wrench_count)); });
}

cmg_status cmg_epsilon_oracle(const double* wrenches, size_t wrench_count, int directions,
                              uint64_t seed, double* out) {
  if (cmg_status s = requireArgs(wrenches != nullptr && out != nullptr)) return s;
  return guarded([&] {
    *out = cmg::epsilonOracle(toWrenches(wrenches, wrench_count), directions, seed);
  });
}

cmg_status cmg_mesh_load(const char* path, double scale, cmg_mesh** out) {
  if (cmg_status s = requireArgs(path != nullptr && out != nullptr)) return s;
  return guarded([&] { *out = new cmg_mesh{cmg::loadMesh(path, scale)}; });
}

void cmg_mesh_destroy(cmg_mesh* mesh) { delete mesh; }

size_t cmg_mesh_vertex_count(const cmg_mesh* mesh) {
  return mesh != nullptr ? mesh->mesh.vertices.size() : 0;
}

size_t cmg_mesh_triangle_count(const cmg_mesh* mesh) {
  return mesh != nullptr ? mesh->mesh.triangles.size() : 0;
}

cmg_status cmg_grasp_list_load(const char* path, cmg_grasp_list** out) {
  if (cmg_status s = requireArgs(path != nullptr && out != nullptr)) return s;
  return guarded([&] { *out = new cmg_grasp_list{cmg::loadAnnotations(path)}; });
}

void cmg_grasp_list_destroy(cmg_grasp_list* list) { delete list; }

size_t cmg_grasp_list_count(const cmg_grasp_list* list) {
  return list != nullptr ? list->set.grasps.size() : 0;
}

cmg_status cmg_grasp_list_get(const cmg_grasp_list* list, size_t index, cmg_grasp_record* out) {
  if (cmg_status s = requireArgs(list != nullptr && out != nullptr)) return s;
  if (index >= list->set.grasps.size()) {
    g_lastError = "index out of range";
    return CMG_ERROR_INVALID_ARG;
  }
  *out = fromRecord(list->set.grasps[index]);
  return CMG_OK;
}

cmg_status cmg_run_sample_grasps(const cmg_sample_grasps_options* options, char** report_out) {
  if (cmg_status s = requireArgs(options != nullptr && options->registry_path != nullptr &&
                                 options->hand_path != nullptr && options->out_dir != nullptr)) {
    return s;
  }
  return guarded([&] {
    cmg::SampleGraspsOptions opts;
    opts.registryPath = options->registry_path;
    opts.handPath = options->hand_path;
    opts.outDir = options->out_dir;
    if (options->tau >= 0.0) opts.params.tau = options->tau;
    if (options->mu > 0.0) opts.params.mu = options->mu;
    if (options->cone_edges > 0) opts.params.coneEdges = options->cone_edges;
    if (options->sample_voxel > 0.0) opts.params.sampleVoxel = options->sample_voxel;
    if (options->target_count > 0) opts.params.targetCount = options->target_count;
    opts.params.seed = options->seed;

    const cmg::SampleGraspsReport report = cmg::runSampleGrasps(opts);
    json j;
    j["objects"] = json::array();
    for (const auto& obj : report.objects) {
      j["objects"].push_back({{"id", obj.id},
                              {"out_path", obj.outPath},
                              {"candidates", obj.candidates},
                              {"evaluated", obj.evaluated},
                              {"kept", obj.kept},
                              {"seconds", obj.seconds}});
    }
    if (report_out != nullptr) *report_out = dupString(j.dump(2));
  });
}

cmg_status cmg_run_build_scene(const cmg_build_scene_options* options, char** report_out) {
  if (cmg_status s = requireArgs(options != nullptr && options->registry_path != nullptr &&
                                 options->out_path != nullptr)) {
    return s;
  }
  return guarded([&] {
    cmg::BuildSceneOptions opts;
    opts.registryPath = options->registry_path;
    opts.outPath = options->out_path;
    if (options->count > 0) opts.params.count = options->count;
    if (options->extent >= 0.0) opts.params.extent = options->extent;
    if (options->clearance >= 0.0) opts.params.clearance = options->clearance;
    if (options->max_tries > 0) opts.params.maxTries = options->max_tries;
    opts.params.seed = options->seed;

    const cmg::BuildSceneReport report = cmg::runBuildScene(opts);
    json j{{"requested", report.requested},
           {"placed", report.placed},
           {"out_path", options->out_path}};
    if (report_out != nullptr) *report_out = dupString(j.dump(2));
  });
}

cmg_status cmg_run_render(const cmg_render_options* options, char** report_out) {
  if (cmg_status s = requireArgs(options != nullptr && options->scene_path != nullptr &&
                                 options->annotations_dir != nullptr &&
                                 options->hand_path != nullptr && options->out_dir != nullptr)) {
    return s;
  }
  return guarded([&] {
    cmg::RenderOptions opts;
    opts.scenePath = options->scene_path;
    opts.annotationsDir = options->annotations_dir;
    opts.handPath = options->hand_path;
    opts.outDir = options->out_dir;
    if (options->prefix != nullptr) opts.prefix = options->prefix;
    if (options->points > 0) opts.points = options->points;
    opts.seed = options->seed;
    if (options->width > 0) opts.intrinsics.width = options->width;
    if (options->height > 0) opts.intrinsics.height = options->height;
    if (options->fx > 0.0) opts.intrinsics.fx = options->fx;
    if (options->fy > 0.0) opts.intrinsics.fy = options->fy;
    if (options->cx >= 0.0) opts.intrinsics.cx = options->cx;
    if (options->cy >= 0.0) opts.intrinsics.cy = options->cy;

    const cmg::RenderReport report = cmg::runRender(opts);
    json j{{"manifest", report.manifestPath},
           {"total_pixels", report.totalPixels},
           {"finite_pixels", report.finitePixels},
           {"cloud_points", report.cloudPoints},
           {"contact_points", report.contactPoints},
           {"grasps_total", report.counts.total},
           {"grasps_kept", report.counts.kept},
           {"removed_collision", report.counts.removedCollision},
           {"removed_invalid_pose", report.counts.removedInvalidPose}};
    if (report_out != nullptr) *report_out = dupString(j.dump(2));
  });
}

cmg_status cmg_run_validate(const cmg_validate_options* options, int* passed_out,
                            char** report_out) {
  if (cmg_status s = requireArgs(options != nullptr)) return s;
  return guarded([&] {
    cmg::ValidateOptions opts;
    if (options->annotations_path != nullptr) opts.annotationsPath = options->annotations_path;
    if (options->capture_path != nullptr) opts.capturePath = options->capture_path;
    if (options->hand_path != nullptr) opts.handPath = options->hand_path;
    if (options->pose_tolerance > 0.0) opts.poseTolerance = options->pose_tolerance;
    if (options->surface_tolerance > 0.0) opts.surfaceTolerance = options->surface_tolerance;
    if (options->penetration_max > 0.0) opts.penetrationMax = options->penetration_max;

    const cmg::ValidateReport report = cmg::runValidate(opts);
    if (passed_out != nullptr) *passed_out = report.passed() ? 1 : 0;
    json j{{"grasps", report.grasps},
           {"failures", report.failures},
           {"passed", report.passed()},
           {"max_pose_error", report.maxPoseError},
           {"max_surface_distance", report.maxSurfaceDistance},
           {"max_epsilon_error", report.maxEpsilonError},
           {"max_penetration", report.maxPenetration},
           {"problems", report.problems}};
    if (report_out != nullptr) *report_out = dupString(j.dump(2));
  });
}

cmg_status cmg_run_eval_quality(const cmg_eval_quality_options* options, char** report_out) {
  if (cmg_status s = requireArgs(options != nullptr && options->annotations_path != nullptr)) {
    return s;
  }
  return guarded([&] {
    cmg::EvalQualityOptions opts;
    opts.annotationsPath = options->annotations_path;
    if (options->samples > 0) opts.samples = options->samples;
    if (options->oracle_directions > 0) opts.oracleDirections = options->oracle_directions;
    if (options->seed != 0) opts.seed = options->seed;

    const cmg::EvalQualityReport report = cmg::runEvalQuality(opts);
    json j{{"evaluated", report.evaluated},
           {"max_stored_error", report.maxStoredError},
           {"max_oracle_gap", report.maxOracleGap},
           {"mean_oracle_gap", report.meanOracleGap},
           {"max_wrench_norm", report.maxWrenchNorm}};
    if (report_out != nullptr) *report_out = dupString(j.dump(2));
  });
}

}  // extern "C"
