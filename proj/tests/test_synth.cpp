/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "cmg/bvh.hpp"
#include "cmg/contact_repr.hpp"
#include "cmg/error.hpp"
#include "cmg/hand_model.hpp"
#include "cmg/mesh.hpp"
#include "cmg/rng.hpp"
#include "cmg/synth.hpp"

using namespace cmg;

namespace {

const HandModel& testHand() {
  static HandModel hand = loadHand(std::string(CMG_DATA_DIR) + "/hand/default_hand.txt");
  return hand;
}

CompactGrasp recordCompact(const GraspRecord& r, int finger) {
  CompactGrasp g;
  g.finger = finger;
  g.x = r.x[finger];
  g.y = r.y[finger];
  g.spread = r.spread;
  g.inner = r.inner[finger];
  double support[2];
  int k = 0;
  for (int f = 0; f < 3; ++f)
    if (f != finger) support[k++] = r.inner[f];
  g.support1 = support[0];
  g.support2 = support[1];
  return g;
}

bool sameRecord(const GraspRecord& a, const GraspRecord& b) {
  if (a.id != b.id || a.anchor != b.anchor || a.spread != b.spread || a.epsilon != b.epsilon)
    return false;
  if (transformError(a.pose, b.pose) != 0.0) return false;
  for (int f = 0; f < 3; ++f) {
    if (a.inner[f] != b.inner[f] || a.x[f] != b.x[f] || a.y[f] != b.y[f]) return false;
    if (norm(a.contacts[f].position - b.contacts[f].position) != 0.0) return false;
    if (norm(a.contacts[f].normal - b.contacts[f].normal) != 0.0) return false;
  }
  return true;
}

bool sameSet(const AnnotationSet& a, const AnnotationSet& b) {
  if (a.grasps.size() != b.grasps.size()) return false;
  for (std::size_t i = 0; i < a.grasps.size(); ++i)
    if (!sameRecord(a.grasps[i], b.grasps[i])) return false;
  return true;
}

AnnotationSet sphereRun(const TriangleMesh& mesh, int target) {
  SynthParams params;
  params.targetCount = target;
  return sampleGrasps(mesh, testHand(), params);
}

// Exhaustive k-means reference: enumerate every assignment of n points to k
// nonempty clusters and return the minimal within-cluster squared-distance
// cost. Feasible for the n <= 12 sets used here.
double bruteKMeansCost(const std::vector<Vec3>& pts, int k) {
  int n = static_cast<int>(pts.size());
  long long total = 1;
  for (int i = 0; i < n; ++i) total *= k;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> assign(n);
  for (long long code = 0; code < total; ++code) {
    long long c = code;
    for (int i = 0; i < n; ++i) {
      assign[i] = static_cast<int>(c % k);
      c /= k;
    }
    std::vector<Vec3> sum(k, Vec3{0, 0, 0});
    std::vector<int> count(k, 0);
    for (int i = 0; i < n; ++i) {
      sum[assign[i]] += pts[i];
      ++count[assign[i]];
    }
    bool full = true;
    for (int j = 0; j < k; ++j) full = full && count[j] > 0;
    if (!full) continue;
    double cost = 0.0;
    for (int i = 0; i < n; ++i) {
      Vec3 mean = sum[assign[i]] / static_cast<double>(count[assign[i]]);
      cost += norm2(pts[i] - mean);
    }
    best = std::min(best, cost);
  }
  return best;
}

// Cost of the partition a rep list induces by nearest-rep assignment, with
// centroids recomputed as the partition means.
double inducedCost(const std::vector<Vec3>& pts, const std::vector<OrientedPoint>& reps) {
  int k = static_cast<int>(reps.size());
  std::vector<Vec3> sum(k, Vec3{0, 0, 0});
  std::vector<int> count(k, 0);
  std::vector<int> assign(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    int best = 0;
    double bestD = norm2(pts[i] - reps[0].position);
    for (int c = 1; c < k; ++c) {
      double d = norm2(pts[i] - reps[c].position);
      if (d < bestD) {
        bestD = d;
        best = c;
      }
    }
    assign[i] = best;
    sum[best] += pts[i];
    ++count[best];
  }
  double cost = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Vec3 mean = sum[assign[i]] / static_cast<double>(count[assign[i]]);
    cost += norm2(pts[i] - mean);
  }
  return cost;
}

}  // namespace

TEST_CASE("candidate pose places the palm on the surface normal") {
  const HandModel& hand = testHand();
  OrientedPoint sample{{0.01, -0.02, 0.03}, {0, 0, 1}};

  RigidTransform p0 = candidatePose(sample, 0.0, 0.0, hand);
  CHECK(norm(p0.t - Vec3{0.01, -0.02, 0.03 + hand.standoff}) <= 1e-15);
  // chart((0,0,1)) columns: (-1,0,0), (0,-1,0), (0,0,1).
  CHECK(norm(p0.R.col(0) - Vec3{-1, 0, 0}) <= 1e-15);
  CHECK(norm(p0.R.col(1) - Vec3{0, -1, 0}) <= 1e-15);
  CHECK(norm(p0.R.col(2) - Vec3{0, 0, 1}) <= 1e-15);

  // Depth slides the palm along the normal, nothing else.
  RigidTransform pDeep = candidatePose(sample, 0.025, 0.0, hand);
  CHECK(norm(pDeep.t - (p0.t - Vec3{0, 0, 0.025})) <= 1e-15);
  CHECK(orthonormalityError(pDeep.R) <= 1e-12);

  // A roll of pi is exactly a half turn about the approach axis.
  RigidTransform pRoll = candidatePose(sample, 0.0, M_PI, hand);
  Mat3 expect = Mat3::axisAngle({0, 0, 1}, M_PI) * p0.R;
  CHECK(transformError({expect, p0.t}, pRoll) <= 1e-12);
}

TEST_CASE("candidate pose rotates with the sample up to the roll reference") {
  // The position and the approach axis are exactly equivariant. The in-plane
  // roll reference comes from the chart and cannot be globally equivariant,
  // so the frames agree up to a rotation about the approach axis.
  const HandModel& hand = testHand();
  Rng rng(81);
  for (int trial = 0; trial < 30; ++trial) {
    OrientedPoint sample{rng.unitVector() * rng.uniform(0.02, 0.1), rng.unitVector()};
    double depth = rng.uniform(0.0, 0.04);
    double roll = rng.uniform(0.0, 2.0 * M_PI);
    Mat3 q = Mat3::axisAngle(rng.unitVector(), rng.uniform(0.1, 3.0));

    RigidTransform base = candidatePose(sample, depth, roll, hand);
    RigidTransform turned =
        candidatePose({q * sample.position, q * sample.normal}, depth, roll, hand);

    CHECK(norm(turned.t - q * base.t) <= 1e-12);
    CHECK(norm(turned.R.col(2) - q * base.R.col(2)) <= 1e-12);
    Mat3 d = turned.R.transposed() * (q * base.R);
    CHECK(std::abs(d.m[8] - 1.0) <= 1e-9);
    CHECK(std::abs(d.m[2]) + std::abs(d.m[5]) + std::abs(d.m[6]) + std::abs(d.m[7]) <= 1e-9);
  }
}

TEST_CASE("fingers close onto a centered sphere at the touch tolerance") {
  const HandModel& hand = testHand();
  TriangleMesh sphere = makeIcosphere(0.05, 3);
  Bvh bvh(sphere);
  OrientedPoint top{{0, 0, 0.05}, {0, 0, 1}};

  SynthParams defaults;
  int closures = 0;
  for (double depth : defaults.depths)
    for (double spread : defaults.spreads) {
      RigidTransform pose = candidatePose(top, depth, 0.0, hand);
      bool all = true;
      for (int f = 0; f < 3 && all; ++f) {
        std::optional<double> theta = closeFinger(bvh, hand, pose, spread, f);
        if (!theta) {
          all = false;
          break;
        }
        CHECK(*theta >= hand.innerMin);
        CHECK(*theta <= hand.innerMax);
        // Bisection stops at 1e-4 rad, and the fingertip center moves well
        // under 0.2 m per radian, so the residual gap stays below 2e-5 m.
        Vec3 center = pose.apply(fkFingertipCenter(hand, f, spread, *theta));
        double gap = bvh.distance(center) - hand.fingertipRadius;
        CHECK(gap <= 0.0);
        CHECK(gap >= -2e-5);
      }
      if (all) ++closures;
    }
  CHECK(closures >= 1);
}

TEST_CASE("larger spheres meet the closing finger sooner") {
  const HandModel& hand = testHand();
  double prev = std::numeric_limits<double>::infinity();
  for (double radius : {0.025, 0.030, 0.035, 0.040, 0.045, 0.050, 0.055, 0.060}) {
    TriangleMesh sphere = makeIcosphere(radius, 3);
    Bvh bvh(sphere);
    RigidTransform pose =
        candidatePose({{0, 0, radius}, {0, 0, 1}}, 0.03, 0.0, testHand());
    std::optional<double> theta = closeFinger(bvh, hand, pose, 0.0, 0);
    REQUIRE(theta.has_value());
    CHECK(*theta <= prev + 2e-4);
    prev = *theta;
  }
}

TEST_CASE("finger closing rejects blocked or unreachable approaches") {
  const HandModel& hand = testHand();

  // Nothing within reach: the joint range runs out.
  TriangleMesh far = makeBox({1.0, 1.0, 1.0}, {1.1, 1.1, 1.1});
  Bvh farBvh(far);
  CHECK(!closeFinger(farBvh, hand, RigidTransform{}, 0.0, 0).has_value());

  // A sphere swallowing the open fingertip: the approach is unusable.
  Vec3 tip = fkFingertipCenter(hand, 2, 0.0, hand.innerMin);
  TriangleMesh blocked = makeIcosphere(0.05, 3);
  for (Vec3& v : blocked.vertices) v += tip;
  Bvh blockedBvh(blocked);
  CHECK(!closeFinger(blockedBvh, hand, RigidTransform{}, 0.0, 2).has_value());
}

TEST_CASE("contact extraction splits separated patches") {
  TriangleMesh sphere = makeIcosphere(0.05, 3);
  Bvh bvh(sphere);
  std::vector<Vec3> centers = {{0.05, 0, 0}, {0, 0.05, 0}, {0, 0, 0.05}};

  Rng rng(83);
  std::vector<OrientedPoint> raws;
  for (const Vec3& c : centers)
    for (int i = 0; i < 6; ++i) {
      Vec3 jitter{rng.uniform(-0.003, 0.003), rng.uniform(-0.003, 0.003),
                  rng.uniform(-0.003, 0.003)};
      raws.push_back({c + jitter, normalized(c)});
    }

  std::vector<OrientedPoint> reps = extractContacts(raws, 3, bvh);
  REQUIRE(reps.size() == 3);
  std::vector<bool> used(3, false);
  for (const OrientedPoint& rep : reps) {
    CHECK(std::abs(norm(rep.position) - 0.05) <= 3e-4);
    CHECK(norm(rep.normal) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dot(rep.normal, normalized(rep.position)) >= std::cos(0.3));
    int nearest = 0;
    for (int c = 1; c < 3; ++c)
      if (norm(rep.position - centers[c]) < norm(rep.position - centers[nearest])) nearest = c;
    CHECK(norm(rep.position - centers[nearest]) <= 0.012);
    CHECK(!used[nearest]);
    used[nearest] = true;
  }
}

TEST_CASE("contact extraction degenerate inputs") {
  TriangleMesh box = makeBox({-0.05, -0.05, -0.05}, {0.05, 0.05, 0.05});
  Bvh bvh(box);

  // All touches identical: one repeated centroid.
  std::vector<OrientedPoint> same(7, OrientedPoint{{0.02, 0.01, 0.05}, {0, 0, 1}});
  std::vector<OrientedPoint> reps = extractContacts(same, 3, bvh);
  REQUIRE(reps.size() == 3);
  for (const OrientedPoint& rep : reps) {
    CHECK(norm(rep.position - reps[0].position) == 0.0);
    CHECK(norm(rep.normal - reps[0].normal) == 0.0);
  }

  // Fewer points than clusters: every point is its own cluster, verbatim.
  std::vector<OrientedPoint> two = {{{0.01, 0, 0.05}, {0, 0, 1}},
                                    {{-0.01, 0, 0.05}, {0, 0, 1}}};
  std::vector<OrientedPoint> pass = extractContacts(two, 3, bvh);
  REQUIRE(pass.size() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(norm(pass[i].position - two[i].position) == 0.0);
    CHECK(norm(pass[i].normal - two[i].normal) == 0.0);
  }

  CHECK(extractContacts({}, 3, bvh).empty());
  CHECK_THROWS_AS(extractContacts(same, 0, bvh), Error);
}

TEST_CASE("k-means matches brute-force enumeration on small blob sets") {
  // Touch points on the flat top of a slab, so the surface projection is the
  // identity and the comparison happens purely in cluster space.
  TriangleMesh slab = makeBox({-0.5, -0.5, -0.1}, {0.5, 0.5, 0.0});
  Bvh bvh(slab);

  Rng rng(84);
  auto blob = [&](const Vec3& c, int count, std::vector<OrientedPoint>* out) {
    for (int i = 0; i < count; ++i)
      out->push_back({{c.x + 0.02 * rng.normal(), c.y + 0.02 * rng.normal(), 0.0}, {0, 0, 1}});
  };

  std::vector<OrientedPoint> pts2;
  blob({-0.2, 0.0, 0.0}, 6, &pts2);
  blob({0.2, 0.0, 0.0}, 6, &pts2);
  std::vector<Vec3> raw2;
  for (const OrientedPoint& p : pts2) raw2.push_back(p.position);
  std::vector<OrientedPoint> reps2 = extractContacts(pts2, 2, bvh);
  REQUIRE(reps2.size() == 2);
  CHECK(inducedCost(raw2, reps2) == doctest::Approx(bruteKMeansCost(raw2, 2)).epsilon(1e-9));

  std::vector<OrientedPoint> pts3;
  blob({-0.25, 0.0, 0.0}, 4, &pts3);
  blob({0.25, 0.0, 0.0}, 4, &pts3);
  blob({0.0, 0.3, 0.0}, 4, &pts3);
  std::vector<Vec3> raw3;
  for (const OrientedPoint& p : pts3) raw3.push_back(p.position);
  std::vector<OrientedPoint> reps3 = extractContacts(pts3, 3, bvh);
  REQUIRE(reps3.size() == 3);
  CHECK(inducedCost(raw3, reps3) == doctest::Approx(bruteKMeansCost(raw3, 3)).epsilon(1e-9));
}

TEST_CASE("grasp sampling is deterministic across threads and vertex order") {
  TriangleMesh sphere = makeIcosphere(0.04, 2);

  setenv("CMGRASP_THREADS", "1", 1);
  AnnotationSet serial = sphereRun(sphere, 25);
  setenv("CMGRASP_THREADS", "4", 1);
  AnnotationSet threaded = sphereRun(sphere, 25);

  // Same grid, same keeps, bit-identical records.
  REQUIRE(serial.grasps.size() == 25);
  CHECK(sameSet(serial, threaded));

  // Renumbering the vertices (same triangles in the same order) changes
  // nothing the pipeline looks at.
  int n = static_cast<int>(sphere.vertices.size());
  int shift = 17;
  TriangleMesh rolled;
  rolled.vertices.resize(sphere.vertices.size());
  for (int i = 0; i < n; ++i) rolled.vertices[(i + shift) % n] = sphere.vertices[i];
  for (const auto& t : sphere.triangles)
    rolled.triangles.push_back({(t[0] + shift) % n, (t[1] + shift) % n, (t[2] + shift) % n});
  AnnotationSet renumbered = sphereRun(rolled, 25);
  CHECK(sameSet(serial, renumbered));
  unsetenv("CMGRASP_THREADS");
}

TEST_CASE("kept records satisfy the annotation gates") {
  const HandModel& hand = testHand();
  TriangleMesh sphere = makeIcosphere(0.04, 2);
  Bvh bvh(sphere);

  SynthParams params;
  params.targetCount = 25;
  SynthReport report;
  AnnotationSet set = sampleGrasps(sphere, hand, params, &report);

  REQUIRE(set.grasps.size() == 25);
  CHECK(report.kept == 25);
  CHECK(report.evaluated <= report.candidates);
  CHECK(set.lambda == doctest::Approx(1.0 / sphere.maxVertexDistance(set.torqueOrigin)));

  for (std::size_t i = 0; i < set.grasps.size(); ++i) {
    const GraspRecord& r = set.grasps[i];
    CHECK(r.id == static_cast<int>(i));
    CHECK(r.epsilon >= set.tau);
    CHECK(r.anchor >= 0);
    CHECK(r.anchor < 3);

    HandPosture posture =
        handPosture(hand, r.pose, r.spread, {r.inner[0], r.inner[1], r.inner[2]});
    for (int f = 0; f < 3; ++f) {
      // Contacts sit on the surface; fingertip centers one radius off it.
      CHECK(bvh.distance(r.contacts[f].position) <= 1e-3);
      CHECK(std::abs(bvh.distance(posture.fingertipCenter[f]) - hand.fingertipRadius) <= 1e-3);

      // Every finger's compact coordinates decode back to the stored grasp.
      FullGrasp back = decodeGrasp(recordCompact(r, f), r.contacts[f], hand);
      CHECK(back.spread == r.spread);
      for (int j = 0; j < 3; ++j) CHECK(back.inner[j] == r.inner[j]);
      CHECK(transformError(back.pose, r.pose) <= 1e-6);
    }
    CHECK(graspPenetration(r, bvh, hand) <= 1e-3);
  }
}

TEST_CASE("ungraspable or empty meshes yield nothing") {
  const HandModel& hand = testHand();

  CHECK_THROWS_AS(sampleGrasps(TriangleMesh{}, hand, SynthParams{}), Error);

  // A box smaller than the fingertip radius: every candidate collapses to
  // coincident contacts whose wrench hull is flat, so nothing clears tau.
  TriangleMesh crumb = makeBox({-0.002, -0.002, -0.002}, {0.002, 0.002, 0.002});
  SynthParams params;
  params.targetCount = 10;
  AnnotationSet set = sampleGrasps(crumb, hand, params);
  CHECK(set.grasps.empty());
}

TEST_CASE("transforming a record moves the grasp between frames") {
  const HandModel& hand = testHand();
  TriangleMesh sphere = makeIcosphere(0.04, 2);

  SynthParams params;
  params.targetCount = 5;
  AnnotationSet set = sampleGrasps(sphere, hand, params);
  REQUIRE(!set.grasps.empty());

  Rng rng(85);
  for (const GraspRecord& r : set.grasps) {
    RigidTransform t{Mat3::axisAngle(rng.unitVector(), rng.uniform(0.1, 3.0)),
                     rng.unitVector() * rng.uniform(0.05, 0.3)};
    GraspRecord moved = transformRecord(r, t, hand);

    CHECK(transformError(moved.pose, t * r.pose) <= 1e-15);
    CHECK(moved.epsilon == r.epsilon);
    CHECK(moved.spread == r.spread);
    for (int f = 0; f < 3; ++f) {
      CHECK(moved.inner[f] == r.inner[f]);
      CHECK(norm(moved.contacts[f].position - t.apply(r.contacts[f].position)) <= 1e-15);
      CHECK(norm(moved.contacts[f].normal - t.rotate(r.contacts[f].normal)) <= 1e-15);
      // Chart radius is rotation invariant even though x, y individually move.
      double before = r.x[f] * r.x[f] + r.y[f] * r.y[f];
      double after = moved.x[f] * moved.x[f] + moved.y[f] * moved.y[f];
      CHECK(after == doctest::Approx(before).epsilon(1e-9));

      FullGrasp back = decodeGrasp(recordCompact(moved, f), moved.contacts[f], hand);
      CHECK(transformError(back.pose, moved.pose) <= 1e-9);
    }
  }
}
