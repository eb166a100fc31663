/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#include "cmg/synth.hpp"

#include <algorithm>
#include <cmath>

#include "cmg/error.hpp"
#include "cmg/parallel.hpp"
#include "cmg/quality.hpp"

namespace cmg {

namespace {

constexpr double kTouchBisectTol = 1e-6;       // radians
constexpr double kBodyPenetrationMax = 5e-4;   // meters, palm and links
constexpr double kContactSurfaceMax = 1e-3;    // projected contact to surface
constexpr double kRawTouchMax = 5e-4;          // raw touch sample to surface
// Upper bound on fingertip center travel per radian of inner joint motion,
// with margin; guards the marching step against tunneling.
constexpr double kCenterSpeedBound = 0.25;

}  // namespace

SynthParams::SynthParams() {
  for (int k = 0; k < 8; ++k) rolls.push_back(2.0 * M_PI * k / 8.0);
  spreads = {0.0, M_PI / 4.0, M_PI / 2.0};
}

RigidTransform candidatePose(const OrientedPoint& sample, double depth, double roll,
                             const HandModel& hand) {
  Vec3 n = normalized(sample.normal);
  Mat3 r = Mat3::axisAngle(n, roll) * chart(n);
  return RigidTransform{r, sample.position + n * (hand.standoff - depth)};
}

std::optional<double> closeFinger(const Bvh& object, const HandModel& hand,
                                  const RigidTransform& pose, double spread, int finger) {
  auto center = [&](double theta) {
    return pose.apply(fkFingertipCenter(hand, finger, spread, theta));
  };
  auto gap = [&](double theta) {
    return object.distance(center(theta)) - hand.fingertipRadius;
  };

  double lo = hand.innerMin;
  double gapLo = gap(lo);
  // A candidate whose open finger already touches, penetrates, or starts
  // inside the object is not a usable approach.
  if (gapLo <= 0.0 || object.isInside(center(lo))) return std::nullopt;

  double hi = lo;
  double gapHi = gapLo;
  while (true) {
    if (hi >= hand.innerMax) return std::nullopt;
    double step = std::max(0.02, gapLo / kCenterSpeedBound);
    hi = std::min(hand.innerMax, lo + step);
    gapHi = gap(hi);
    if (gapHi <= 0.0) break;
    lo = hi;
    gapLo = gapHi;
  }

  while (hi - lo > kTouchBisectTol) {
    double mid = 0.5 * (lo + hi);
    if (gap(mid) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

std::vector<OrientedPoint> extractContacts(const std::vector<OrientedPoint>& raws, int k,
                                           const Bvh& object) {
  if (k < 1) throw Error(ErrorCode::kInvalidArg, "extractContacts: k must be positive");
  if (raws.empty()) return {};
  int n = static_cast<int>(raws.size());

  auto project = [&](const Vec3& p) -> OrientedPoint {
    ClosestHit hit = object.closestPoint(p);
    return {hit.point, object.mesh().faceNormal(hit.triangle)};
  };

  if (n <= k) {
    std::vector<OrientedPoint> out = raws;
    return out;
  }

  // Farthest-point seeding from the lexicographically smallest point.
  std::vector<int> seeds;
  int first = 0;
  for (int i = 1; i < n; ++i)
    if (lexLess(raws[i].position, raws[first].position)) first = i;
  seeds.push_back(first);
  std::vector<double> minDist2(n);
  for (int i = 0; i < n; ++i) minDist2[i] = norm2(raws[i].position - raws[first].position);
  while (static_cast<int>(seeds.size()) < k) {
    int best = -1;
    for (int i = 0; i < n; ++i) {
      if (best < 0 || minDist2[i] > minDist2[best] ||
          (minDist2[i] == minDist2[best] && lexLess(raws[i].position, raws[best].position)))
        best = i;
    }
    seeds.push_back(best);
    for (int i = 0; i < n; ++i)
      minDist2[i] = std::min(minDist2[i], norm2(raws[i].position - raws[best].position));
  }

  std::vector<Vec3> centroids;
  for (int s : seeds) centroids.push_back(raws[s].position);

  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < 50; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int bestC = 0;
      double bestD = norm2(raws[i].position - centroids[0]);
      for (int c = 1; c < k; ++c) {
        double d = norm2(raws[i].position - centroids[c]);
        if (d < bestD) {
          bestD = d;
          bestC = c;
        }
      }
      if (assign[i] != bestC) {
        assign[i] = bestC;
        changed = true;
      }
    }
    if (!changed) break;
    for (int c = 0; c < k; ++c) {
      Vec3 sum{0, 0, 0};
      int count = 0;
      for (int i = 0; i < n; ++i)
        if (assign[i] == c) {
          sum += raws[i].position;
          ++count;
        }
      if (count > 0) centroids[c] = sum / static_cast<double>(count);
    }
  }

  std::vector<OrientedPoint> out;
  out.reserve(k);
  for (const Vec3& c : centroids) out.push_back(project(c));
  return out;
}

namespace {

struct EvalContext {
  const Bvh* object;
  const HandModel* hand;
  const SynthParams* params;
  double lambda;
  Vec3 torqueOrigin;
  const std::vector<Vec3>* tipDirs;
};

// Distance of a hand body placed at bodyToObject from the object; when they
// touch, the deepest sampled penetration.
bool bodyClears(const EvalContext& ctx, const Bvh& bodyBvh,
                const std::vector<OrientedPoint>& samples, const RigidTransform& bodyToObject) {
  double dist = Bvh::distanceBetween(*ctx.object, bodyBvh, bodyToObject, 1e-9);
  if (dist > 1e-9) return true;
  for (const OrientedPoint& s : samples) {
    Vec3 q = bodyToObject.apply(s.position);
    if (ctx.object->isInside(q) && ctx.object->distance(q) > kBodyPenetrationMax) return false;
  }
  return true;
}

std::optional<GraspRecord> evaluateCandidate(const EvalContext& ctx, const RigidTransform& pose,
                                             double spread) {
  const HandModel& hand = *ctx.hand;
  const Bvh& object = *ctx.object;

  std::array<double, 3> inner{};
  for (int f = 0; f < 3; ++f) {
    std::optional<double> touch = closeFinger(object, hand, pose, spread, f);
    if (!touch) return std::nullopt;
    inner[f] = *touch;
  }

  HandPosture posture =
      handPosture(hand, pose, spread, {inner[0], inner[1], inner[2]});
  if (!bodyClears(ctx, *hand.palmBvh, hand.palmSamples, posture.palm)) return std::nullopt;
  for (int f = 0; f < 3; ++f) {
    if (!bodyClears(ctx, *hand.linkInnerBvh, hand.linkInnerSamples, posture.innerLink[f]))
      return std::nullopt;
    if (!bodyClears(ctx, *hand.linkOuterBvh, hand.linkOuterSamples, posture.outerLink[f]))
      return std::nullopt;
  }

  // Raw touch points over each fingertip sphere. A finger whose sampled
  // directions all miss still touches (the closing test said so), so it falls
  // back to the closest surface point to the fingertip center.
  std::vector<OrientedPoint> raws;
  for (int f = 0; f < 3; ++f) {
    std::size_t before = raws.size();
    for (const Vec3& dir : *ctx.tipDirs) {
      Vec3 p = posture.fingertipCenter[f] + dir * hand.fingertipRadius;
      ClosestHit hit = object.closestPoint(p);
      if (hit.distance <= kRawTouchMax)
        raws.push_back({hit.point, object.mesh().faceNormal(hit.triangle)});
    }
    if (raws.size() == before) {
      ClosestHit hit = object.closestPoint(posture.fingertipCenter[f]);
      if (std::abs(hit.distance - hand.fingertipRadius) > 1e-3) return std::nullopt;
      raws.push_back({hit.point, object.mesh().faceNormal(hit.triangle)});
    }
  }

  // One representative contact per finger, matched by proximity to the
  // fingertip that produced it. A candidate whose clusters do not separate
  // cleanly into one per finger is discarded.
  std::vector<OrientedPoint> reps = extractContacts(raws, 3, object);
  if (reps.size() != 3) return std::nullopt;
  std::array<int, 3> repForFinger{-1, -1, -1};
  for (int c = 0; c < 3; ++c) {
    int nearest = 0;
    double best = norm2(reps[c].position - posture.fingertipCenter[0]);
    for (int f = 1; f < 3; ++f) {
      double d = norm2(reps[c].position - posture.fingertipCenter[f]);
      if (d < best) {
        best = d;
        nearest = f;
      }
    }
    if (repForFinger[nearest] >= 0) return std::nullopt;
    repForFinger[nearest] = c;
  }

  GraspRecord record;
  record.pose = pose;
  record.spread = spread;
  record.inner = inner;
  record.anchor = 2;
  FullGrasp full{pose, spread, {inner[0], inner[1], inner[2]}};
  Vec3 cHat = normalized(hand.cLocal);
  for (int f = 0; f < 3; ++f) {
    // The stored normal is the representative normal flattened into the
    // finger's rotation plane; only such normals let decode rebuild the
    // fingertip frame, and hence the pose, exactly.
    Vec3 nLoc = posture.outerLink[f].R.tmul(reps[repForFinger[f]].normal);
    Vec3 flat{nLoc.x, nLoc.y, 0.0};
    double len = norm(flat);
    if (len < 1e-6) return std::nullopt;
    flat = flat / len;
    if ((hand.r0 * flat).y < 1e-6) return std::nullopt;
    if (dot(-cHat, flat) < 0.0) return std::nullopt;
    Vec3 nWorld = posture.outerLink[f].R * flat;

    EncodeResult enc;
    try {
      enc = encodeGrasp(full, f, hand, {reps[repForFinger[f]].position, nWorld});
    } catch (const Error&) {
      return std::nullopt;
    }
    if (object.distance(enc.contact.position) > kContactSurfaceMax) return std::nullopt;
    try {
      FullGrasp back = decodeGrasp(enc.g, enc.contact, hand);
      if (transformError(back.pose, pose) > 1e-9) return std::nullopt;
    } catch (const Error&) {
      return std::nullopt;
    }
    record.contacts[f] = enc.contact;
    record.x[f] = enc.g.x;
    record.y[f] = enc.g.y;
  }

  std::vector<OrientedPoint> stored(record.contacts.begin(), record.contacts.end());
  double eps = epsilonQuality(
      contactWrenches(stored, ctx.params->mu, ctx.params->coneEdges, ctx.lambda, ctx.torqueOrigin));
  if (eps < ctx.params->tau) return std::nullopt;
  record.epsilon = eps;
  return record;
}

}  // namespace

AnnotationSet sampleGrasps(const TriangleMesh& mesh, const HandModel& hand,
                           const SynthParams& params, SynthReport* report) {
  if (params.depths.empty() || params.rolls.empty() || params.spreads.empty())
    throw Error(ErrorCode::kInvalidArg, "sampleGrasps: empty candidate grid");
  if (params.targetCount < 1)
    throw Error(ErrorCode::kInvalidArg, "sampleGrasps: target count must be positive");
  if (params.sampleVoxel <= 0.0)
    throw Error(ErrorCode::kInvalidArg, "sampleGrasps: bad sample voxel");
  if (mesh.empty()) throw Error(ErrorCode::kInvalidArg, "sampleGrasps: empty mesh");

  Bvh object(mesh);
  std::vector<OrientedPoint> samples = voxelDownsample(mesh, params.sampleVoxel);
  if (samples.empty()) throw Error(ErrorCode::kDegenerate, "sampleGrasps: no surface samples");

  AnnotationSet set;
  set.tau = params.tau;
  set.mu = params.mu;
  set.coneEdges = params.coneEdges;
  set.torqueOrigin = mesh.vertexCentroid();
  double extent = mesh.maxVertexDistance(set.torqueOrigin);
  if (extent <= 0.0) throw Error(ErrorCode::kDegenerate, "sampleGrasps: zero-extent mesh");
  set.lambda = 1.0 / extent;
  set.seed = params.seed;
  set.sampleVoxel = params.sampleVoxel;
  set.depths = params.depths;
  set.rolls = params.rolls;
  set.spreads = params.spreads;

  std::vector<Vec3> tipDirs = makeIcosphere(1.0, 2).vertices;
  EvalContext ctx{&object, &hand, &params, set.lambda, set.torqueOrigin, &tipDirs};

  const long long nd = static_cast<long long>(params.depths.size());
  const long long nr = static_cast<long long>(params.rolls.size());
  const long long ns = static_cast<long long>(params.spreads.size());
  const long long total = static_cast<long long>(samples.size()) * nd * nr * ns;

  SynthReport local;
  local.candidates = total;

  const long long chunk = 256;
  std::vector<std::optional<GraspRecord>> slots;
  for (long long start = 0; start < total && local.kept < params.targetCount; start += chunk) {
    long long count = std::min(chunk, total - start);
    slots.assign(count, std::nullopt);
    parallelFor(static_cast<std::size_t>(count), [&](std::size_t i) {
      long long idx = start + static_cast<long long>(i);
      long long sp = idx % ns;
      idx /= ns;
      long long rl = idx % nr;
      idx /= nr;
      long long dp = idx % nd;
      long long sm = idx / nd;
      RigidTransform pose =
          candidatePose(samples[sm], params.depths[dp], params.rolls[rl], hand);
      // Exceptions must not escape the worker pool; a candidate that cannot
      // be evaluated is simply not a grasp.
      try {
        slots[i] = evaluateCandidate(ctx, pose, params.spreads[sp]);
      } catch (const Error&) {
        slots[i] = std::nullopt;
      }
    });
    local.evaluated += count;
    for (long long i = 0; i < count && local.kept < params.targetCount; ++i) {
      if (!slots[i]) continue;
      GraspRecord record = *slots[i];
      record.id = static_cast<int>(local.kept);
      set.grasps.push_back(std::move(record));
      ++local.kept;
    }
  }

  if (report != nullptr) *report = local;
  return set;
}

GraspRecord transformRecord(const GraspRecord& record, const RigidTransform& t,
                            const HandModel& hand) {
  GraspRecord out = record;
  out.pose = t * record.pose;
  FullGrasp full{out.pose, record.spread,
                 {record.inner[0], record.inner[1], record.inner[2]}};
  for (int f = 0; f < 3; ++f) {
    OrientedPoint moved{t.apply(record.contacts[f].position), t.rotate(record.contacts[f].normal)};
    EncodeResult enc = encodeGrasp(full, f, hand, moved);
    out.contacts[f] = enc.contact;
    out.x[f] = enc.g.x;
    out.y[f] = enc.g.y;
  }
  return out;
}

double graspPenetration(const GraspRecord& record, const Bvh& object, const HandModel& hand) {
  HandPosture posture = handPosture(hand, record.pose, record.spread,
                                    {record.inner[0], record.inner[1], record.inner[2]});
  double worst = 0.0;
  for (int f = 0; f < 3; ++f) {
    Vec3 c = posture.fingertipCenter[f];
    double d = object.distance(c);
    double pen = object.isInside(c) ? hand.fingertipRadius + d
                                    : std::max(0.0, hand.fingertipRadius - d);
    worst = std::max(worst, pen);
  }
  auto bodyWorst = [&](const std::vector<OrientedPoint>& samples, const RigidTransform& frame) {
    for (const OrientedPoint& s : samples) {
      Vec3 q = frame.apply(s.position);
      if (object.isInside(q)) worst = std::max(worst, object.distance(q));
    }
  };
  bodyWorst(hand.palmSamples, posture.palm);
  for (int f = 0; f < 3; ++f) {
    bodyWorst(hand.linkInnerSamples, posture.innerLink[f]);
    bodyWorst(hand.linkOuterSamples, posture.outerLink[f]);
  }
  return worst;
}

}  // namespace cmg
