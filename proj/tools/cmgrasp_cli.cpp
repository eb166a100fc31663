/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "cmgrasp/cmgrasp.h"

namespace {

// Prints the JSON report and releases it.
int finish(cmg_status status, char* report) {
  if (report != nullptr) {
    std::printf("%s\n", report);
    cmg_free(report);
  }
  if (status != CMG_OK) {
    std::fprintf(stderr, "error: %s\n", cmg_last_error());
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contact-based grasp dataset toolkit"};
  app.require_subcommand(1);

  // sample-grasps
  auto* sample = app.add_subcommand("sample-grasps",
                                    "synthesize grasp annotations for registry objects");
  std::string sgRegistry, sgHand, sgOut;
  double sgTau = 0.05, sgMu = 0.5, sgVoxel = 0.01;
  int sgEdges = 8, sgTarget = 100;
  std::uint64_t sgSeed = 0;
  sample->add_option("--registry", sgRegistry, "object registry file")->required();
  sample->add_option("--hand", sgHand, "hand description file")->required();
  sample->add_option("--out", sgOut, "output directory for <id>.grasps files")->required();
  sample->add_option("--tau", sgTau, "quality threshold");
  sample->add_option("--mu", sgMu, "friction coefficient");
  sample->add_option("--cone-edges", sgEdges, "friction cone discretization");
  sample->add_option("--voxel", sgVoxel, "surface sampling voxel size in meters");
  sample->add_option("--target", sgTarget, "annotations to collect per object");
  sample->add_option("--seed", sgSeed, "random seed");

  // build-scene
  auto* scene = app.add_subcommand("build-scene", "drop registry objects onto a table");
  std::string bsRegistry, bsOut;
  int bsCount = 3, bsTries = 100;
  double bsExtent = 0.3, bsClearance = 0.005;
  std::uint64_t bsSeed = 0;
  scene->add_option("--registry", bsRegistry, "object registry file")->required();
  scene->add_option("--out", bsOut, "output scene manifest")->required();
  scene->add_option("--count", bsCount, "object instances to place");
  scene->add_option("--extent", bsExtent, "placement half-range in x and y");
  scene->add_option("--clearance", bsClearance, "minimum distance between objects");
  scene->add_option("--max-tries", bsTries, "placement attempts per instance");
  scene->add_option("--seed", bsSeed, "random seed");

  // render
  auto* render = app.add_subcommand("render",
                                    "render a depth capture with grasps and point labels");
  std::string rScene, rAnn, rHand, rOut, rPrefix = "capture";
  int rPoints = 20000, rWidth = 640, rHeight = 480;
  double rFx = 600.0, rFy = 600.0, rCx = 319.5, rCy = 239.5;
  std::uint64_t rSeed = 0;
  render->add_option("--scene", rScene, "scene manifest")->required();
  render->add_option("--annotations", rAnn, "directory holding <id>.grasps files")->required();
  render->add_option("--hand", rHand, "hand description file")->required();
  render->add_option("--out", rOut, "output directory")->required();
  render->add_option("--prefix", rPrefix, "output file prefix");
  render->add_option("--points", rPoints, "cloud points to keep");
  render->add_option("--seed", rSeed, "random seed");
  render->add_option("--width", rWidth, "image width");
  render->add_option("--height", rHeight, "image height");
  render->add_option("--fx", rFx, "focal length x");
  render->add_option("--fy", rFy, "focal length y");
  render->add_option("--cx", rCx, "principal point x");
  render->add_option("--cy", rCy, "principal point y");

  // validate
  auto* validate = app.add_subcommand("validate", "check annotations or a capture");
  std::string vAnn, vCapture, vHand;
  double vPoseTol = 1e-6, vSurfTol = 1e-3, vPenMax = 1e-3;
  validate->add_option("--annotations", vAnn, "annotation file to check");
  validate->add_option("--capture", vCapture, "capture manifest to check");
  validate->add_option("--hand", vHand, "override the recorded hand file");
  validate->add_option("--pose-tolerance", vPoseTol, "decoded pose tolerance");
  validate->add_option("--surface-tolerance", vSurfTol, "contact distance tolerance");
  validate->add_option("--penetration-max", vPenMax, "allowed interpenetration");

  // eval-quality
  auto* eval = app.add_subcommand("eval-quality",
                                  "compare exact quality against the sampled bound");
  std::string eAnn;
  int eSamples = 20, eDirs = 4096;
  std::uint64_t eSeed = 1;
  eval->add_option("--annotations", eAnn, "annotation file")->required();
  eval->add_option("--samples", eSamples, "grasps to evaluate");
  eval->add_option("--directions", eDirs, "oracle sampling directions");
  eval->add_option("--seed", eSeed, "oracle seed");

  CLI11_PARSE(app, argc, argv);

  char* report = nullptr;
  if (sample->parsed()) {
    cmg_sample_grasps_options opts{};
    opts.registry_path = sgRegistry.c_str();
    opts.hand_path = sgHand.c_str();
    opts.out_dir = sgOut.c_str();
    opts.tau = sgTau;
    opts.mu = sgMu;
    opts.cone_edges = sgEdges;
    opts.sample_voxel = sgVoxel;
    opts.target_count = sgTarget;
    opts.seed = sgSeed;
    const cmg_status status = cmg_run_sample_grasps(&opts, &report);
    return finish(status, report);
  }
  if (scene->parsed()) {
    cmg_build_scene_options opts{};
    opts.registry_path = bsRegistry.c_str();
    opts.out_path = bsOut.c_str();
    opts.count = bsCount;
    opts.extent = bsExtent;
    opts.clearance = bsClearance;
    opts.max_tries = bsTries;
    opts.seed = bsSeed;
    const cmg_status status = cmg_run_build_scene(&opts, &report);
    return finish(status, report);
  }
  if (render->parsed()) {
    cmg_render_options opts{};
    opts.scene_path = rScene.c_str();
    opts.annotations_dir = rAnn.c_str();
    opts.hand_path = rHand.c_str();
    opts.out_dir = rOut.c_str();
    opts.prefix = rPrefix.c_str();
    opts.points = rPoints;
    opts.seed = rSeed;
    opts.width = rWidth;
    opts.height = rHeight;
    opts.fx = rFx;
    opts.fy = rFy;
    opts.cx = rCx;
    opts.cy = rCy;
    const cmg_status status = cmg_run_render(&opts, &report);
    return finish(status, report);
  }
  if (validate->parsed()) {
    if (vAnn.empty() == vCapture.empty()) {
      std::fprintf(stderr, "error: give exactly one of --annotations or --capture\n");
      return 1;
    }
    cmg_validate_options opts{};
    opts.annotations_path = vAnn.empty() ? nullptr : vAnn.c_str();
    opts.capture_path = vCapture.empty() ? nullptr : vCapture.c_str();
    opts.hand_path = vHand.empty() ? nullptr : vHand.c_str();
    opts.pose_tolerance = vPoseTol;
    opts.surface_tolerance = vSurfTol;
    opts.penetration_max = vPenMax;
    int passed = 0;
    const cmg_status status = cmg_run_validate(&opts, &passed, &report);
    const int rc = finish(status, report);
    if (rc != 0) return rc;
    return passed != 0 ? 0 : 2;
  }
  if (eval->parsed()) {
    cmg_eval_quality_options opts{};
    opts.annotations_path = eAnn.c_str();
    opts.samples = eSamples;
    opts.oracle_directions = eDirs;
    opts.seed = eSeed;
    const cmg_status status = cmg_run_eval_quality(&opts, &report);
    return finish(status, report);
  }
  return 1;
}
