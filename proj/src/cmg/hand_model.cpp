/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#include "cmg/hand_model.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cmg/error.hpp"

namespace cmg {

namespace {

constexpr double kSampleSpacing = 0.002;  // body surface samples for depth checks

void requireRotation(const Mat3& r, const std::string& what) {
  if (orthonormalityError(r) > 1e-9 || r.det() < 0.0)
    throw Error(ErrorCode::kInvalidArg, "hand: " + what + " is not a rotation");
}

}  // namespace

void HandModel::finalize() {
  if (fingerCount < 1) throw Error(ErrorCode::kInvalidArg, "hand: finger_count must be positive");
  if (base.size() != static_cast<std::size_t>(fingerCount) ||
      spreadSign.size() != static_cast<std::size_t>(fingerCount))
    throw Error(ErrorCode::kInvalidArg, "hand: per-finger field count mismatch");
  if (innerLength <= 0.0 || outerLength <= 0.0)
    throw Error(ErrorCode::kInvalidArg, "hand: link lengths must be positive");
  if (coupling < 0.0) throw Error(ErrorCode::kInvalidArg, "hand: coupling must be non-negative");
  if (fingertipRadius <= 0.0)
    throw Error(ErrorCode::kInvalidArg, "hand: fingertip radius must be positive");
  if (std::abs(vFinger.y) > 1e-12 || std::abs(vFinger.z) > 1e-12 || vFinger.x <= 0.0)
    throw Error(ErrorCode::kInvalidArg, "hand: v_finger must point along +x");
  if (std::abs(vFinger.x - outerLength) > 1e-9)
    throw Error(ErrorCode::kInvalidArg, "hand: v_finger length must equal outer_length");
  if (!(spreadMin <= spreadMax) || !(innerMin <= innerMax))
    throw Error(ErrorCode::kInvalidArg, "hand: empty joint range");
  if (fingertipSubdiv < 0 || fingertipSubdiv > 5)
    throw Error(ErrorCode::kInvalidArg, "hand: fingertip_subdiv out of range");
  for (double s : spreadSign)
    if (s != -1.0 && s != 0.0 && s != 1.0)
      throw Error(ErrorCode::kInvalidArg, "hand: spread_sign must be -1, 0, or 1");
  for (const RigidTransform& b : base) requireRotation(b.R, "base rotation");
  requireRotation(mount.R, "mount rotation");
  for (const TriangleMesh* m : {&palmMesh, &linkInnerMesh, &linkOuterMesh}) {
    if (m->empty()) throw Error(ErrorCode::kInvalidArg, "hand: missing body mesh");
    if (!m->isWatertight()) throw Error(ErrorCode::kInvalidArg, "hand: body mesh not watertight");
  }

  cLocal = -(Mat3::rotZ(-roll) * vFinger);
  Vec3 cHat = normalized(cLocal);
  double alpha = std::atan2(cHat.y, cHat.x);
  r0 = Mat3::rotZ(M_PI - alpha);
  standoff = innerLength + outerLength;

  fingertipMesh = makeIcosphere(fingertipRadius, fingertipSubdiv);
  for (Vec3& v : fingertipMesh.vertices) v += cLocal;

  palmBvh = std::make_shared<Bvh>(palmMesh);
  linkInnerBvh = std::make_shared<Bvh>(linkInnerMesh);
  linkOuterBvh = std::make_shared<Bvh>(linkOuterMesh);
  palmSamples = voxelDownsample(palmMesh, kSampleSpacing);
  linkInnerSamples = voxelDownsample(linkInnerMesh, kSampleSpacing);
  linkOuterSamples = voxelDownsample(linkOuterMesh, kSampleSpacing);
}

HandModel loadHand(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open hand file: " + path);
  std::filesystem::path dir = std::filesystem::path(path).parent_path();

  std::map<std::string, std::vector<double>> nums;
  std::map<std::string, std::string> strs;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key) || key[0] == '#') continue;
    std::vector<double> values;
    std::string rest;
    double v;
    while (ls >> v) values.push_back(v);
    if (values.empty()) {
      std::istringstream ls2(line);
      ls2 >> key >> rest;
      if (rest.empty()) throw Error(ErrorCode::kParse, "hand: empty value for " + key);
      strs[key] = rest;
    } else {
      nums[key] = std::move(values);
    }
  }

  auto scalar = [&](const std::string& key) {
    auto it = nums.find(key);
    if (it == nums.end() || it->second.size() != 1)
      throw Error(ErrorCode::kParse, "hand: missing scalar " + key);
    return it->second[0];
  };
  auto tuple = [&](const std::string& key, std::size_t n) -> const std::vector<double>& {
    auto it = nums.find(key);
    if (it == nums.end() || it->second.size() != n)
      throw Error(ErrorCode::kParse, "hand: missing field " + key);
    return it->second;
  };
  auto transform = [&](const std::string& key) {
    const auto& v = tuple(key, 12);
    RigidTransform t;
    for (int i = 0; i < 9; ++i) t.R.m[i] = v[i];
    t.t = {v[9], v[10], v[11]};
    return t;
  };
  auto meshPath = [&](const std::string& key) {
    auto it = strs.find(key);
    if (it == strs.end()) throw Error(ErrorCode::kParse, "hand: missing mesh path " + key);
    return (dir / it->second).string();
  };

  HandModel hand;
  hand.fingerCount = static_cast<int>(scalar("finger_count"));
  hand.innerLength = scalar("inner_length");
  hand.outerLength = scalar("outer_length");
  hand.coupling = scalar("coupling");
  hand.fingertipRadius = scalar("radius");
  const auto& vf = tuple("v_finger", 3);
  hand.vFinger = {vf[0], vf[1], vf[2]};
  hand.roll = nums.count("roll") ? scalar("roll") : 0.0;
  const auto& sr = tuple("spread_range", 2);
  hand.spreadMin = sr[0];
  hand.spreadMax = sr[1];
  const auto& ir = tuple("inner_range", 2);
  hand.innerMin = ir[0];
  hand.innerMax = ir[1];
  for (int f = 1; f <= hand.fingerCount; ++f) {
    hand.base.push_back(transform("base_" + std::to_string(f)));
    hand.spreadSign.push_back(scalar("spread_sign_" + std::to_string(f)));
  }
  hand.mount = transform("mount");
  hand.palmMesh = loadMesh(meshPath("palm_mesh"));
  hand.linkInnerMesh = loadMesh(meshPath("link_inner_mesh"));
  hand.linkOuterMesh = loadMesh(meshPath("link_outer_mesh"));
  hand.fingertipSubdiv = static_cast<int>(scalar("fingertip_subdiv"));
  hand.finalize();
  return hand;
}

RigidTransform fkOuterJoint(const HandModel& hand, int finger, double spread, double inner) {
  const RigidTransform spun{Mat3::rotZ(hand.spreadSign[finger] * spread), {0, 0, 0}};
  const RigidTransform bend{Mat3::rotZ(inner), {0, 0, 0}};
  const RigidTransform reach{Mat3::identity(), {hand.innerLength, 0, 0}};
  const RigidTransform follow{Mat3::rotZ(hand.coupling * inner + M_PI), {0, 0, 0}};
  return hand.base[finger] * spun * hand.mount * bend * reach * follow;
}

Vec3 fkFingertipCenter(const HandModel& hand, int finger, double spread, double inner) {
  return fkOuterJoint(hand, finger, spread, inner).apply(hand.cLocal);
}

RigidTransform fkFingertipFrame(const HandModel& hand, int finger, double spread, double inner) {
  RigidTransform tip{Mat3::rotZ(-hand.roll) * Mat3::rotX(-M_PI / 2.0), hand.cLocal};
  return fkOuterJoint(hand, finger, spread, inner) * tip;
}

HandPosture handPosture(const HandModel& hand, const RigidTransform& pose, double spread,
                        const std::vector<double>& inner) {
  if (inner.size() != static_cast<std::size_t>(hand.fingerCount))
    throw Error(ErrorCode::kInvalidArg, "handPosture: wrong joint count");
  HandPosture p;
  p.palm = pose;
  for (int f = 0; f < hand.fingerCount; ++f) {
    const RigidTransform spun{Mat3::rotZ(hand.spreadSign[f] * spread), {0, 0, 0}};
    const RigidTransform bend{Mat3::rotZ(inner[f]), {0, 0, 0}};
    RigidTransform innerFrame = hand.base[f] * spun * hand.mount * bend;
    p.innerLink.push_back(pose * innerFrame);
    RigidTransform oj = fkOuterJoint(hand, f, spread, inner[f]);
    p.outerLink.push_back(pose * oj);
    p.fingertipCenter.push_back(pose.apply(oj.apply(hand.cLocal)));
  }
  return p;
}

}  // namespace cmg
