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
#include <vector>

#include "cmg/error.hpp"
#include "cmg/quality.hpp"
#include "cmg/rng.hpp"
#include "cmg/vec.hpp"

using namespace cmg;

namespace {

double wrenchDist(const Wrench& a, const Wrench& b) {
  double s = 0.0;
  for (int i = 0; i < 6; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Random contact sets in a palm-sized ball with inward normals, the shape of
// input the synthesis pipeline produces.
std::vector<OrientedPoint> randomContacts(Rng& rng, int count) {
  std::vector<OrientedPoint> out;
  for (int i = 0; i < count; ++i) {
    Vec3 p = rng.unitVector() * rng.uniform(0.02, 0.08);
    out.push_back({p, normalized(-p + rng.unitVector() * 0.3)});
  }
  return out;
}

}  // namespace

TEST_CASE("four edge cone at the origin matches hand-computed forces") {
  // One contact at the torque origin, normal +z, mu = 1: the four cone edges
  // tilt 45 degrees from -z toward the covariant tangents t1 = (0, -1, 0)
  // and t2 = (1, 0, 0), and the torques vanish.
  std::vector<Wrench> w = contactWrenches({{{0, 0, 0}, {0, 0, 1}}}, 1.0, 4, 1.0, {0, 0, 0});
  REQUIRE(w.size() == 4);
  double s = 1.0 / std::sqrt(2.0);
  Wrench expected[4] = {{0, -s, -s, 0, 0, 0},
                        {s, 0, -s, 0, 0, 0},
                        {0, s, -s, 0, 0, 0},
                        {-s, 0, -s, 0, 0, 0}};
  for (int k = 0; k < 4; ++k) CHECK(wrenchDist(w[k], expected[k]) < 1e-12);
}

TEST_CASE("wrench construction scales and counts as documented") {
  Rng rng(61);
  std::vector<OrientedPoint> contacts = randomContacts(rng, 3);
  const double mu = 0.5, lambda = 7.3;
  const Vec3 origin{0.01, -0.02, 0.005};
  std::vector<Wrench> w = contactWrenches(contacts, mu, 8, lambda, origin);
  REQUIRE(w.size() == 24);
  for (int c = 0; c < 3; ++c) {
    Vec3 n = normalized(contacts[c].normal);
    Vec3 arm = contacts[c].position - origin;
    for (int k = 0; k < 8; ++k) {
      const Wrench& wr = w[c * 8 + k];
      Vec3 f{wr[0], wr[1], wr[2]};
      Vec3 tau{wr[3], wr[4], wr[5]};
      // Unit force on the friction cone boundary: angle to -n fixed by mu.
      CHECK(norm(f) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(dot(f, n * -1.0) ==
            doctest::Approx(1.0 / std::sqrt(1.0 + mu * mu)).epsilon(1e-12));
      CHECK(norm(tau - cross(arm, f) * lambda) < 1e-12);
    }
  }

  CHECK_THROWS_AS(contactWrenches({}, mu, 8, lambda, origin), Error);
  CHECK_THROWS_AS(contactWrenches(contacts, 0.0, 8, lambda, origin), Error);
  CHECK_THROWS_AS(contactWrenches(contacts, mu, 2, lambda, origin), Error);
  CHECK_THROWS_AS(contactWrenches(contacts, mu, 8, 0.0, origin), Error);
}

TEST_CASE("tangent reference is covariant with the lever arm") {
  // t1 follows n x arm, so rotating the whole contact set about the torque
  // origin rotates every wrench rigidly. Pin the fixture values too.
  std::vector<OrientedPoint> one = {{{0.05, 0, 0}, {0, 0, 1}}};
  std::vector<Wrench> w = contactWrenches(one, 1.0, 4, 1.0, {0, 0, 0});
  // n x arm = (0,0,1) x (0.05,0,0) = (0, 0.05, 0) -> t1 = (0,1,0),
  // t2 = n x t1 = (-1, 0, 0), and tau = arm x f = (0, -0.05 f_z, 0.05 f_y).
  double s = 1.0 / std::sqrt(2.0);
  double a = 0.05;
  CHECK(wrenchDist(w[0], {0, s, -s, 0, a * s, a * s}) < 1e-12);
  CHECK(wrenchDist(w[1], {-s, 0, -s, 0, a * s, 0}) < 1e-12);

  // Arm parallel to the normal falls back to the chart tangent.
  std::vector<OrientedPoint> pole = {{{0, 0, 0.05}, {0, 0, 1}}};
  std::vector<Wrench> wp = contactWrenches(pole, 1.0, 4, 1.0, {0, 0, 0});
  // chart((0,0,1)).col(1) = (0,-1,0), so the first edge tilts toward -y.
  CHECK(wp[0][1] == doctest::Approx(-s).epsilon(1e-12));
}

TEST_CASE("cross polytope wrench set hits the analytic inradius") {
  std::vector<Wrench> w;
  for (int i = 0; i < 6; ++i)
    for (double sign : {1.0, -1.0}) {
      Wrench unit{};
      unit[i] = sign;
      w.push_back(unit);
    }
  CHECK(epsilonQuality(w) == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-9));
  // The sampling oracle can only overestimate.
  double oracle = epsilonOracle(w, 20000, 9);
  CHECK(oracle >= 1.0 / std::sqrt(6.0) - 1e-12);
}

TEST_CASE("degenerate wrench sets score zero") {
  CHECK(epsilonQuality({}) == 0.0);

  // A single contact's cone cannot span six dimensions.
  std::vector<Wrench> single =
      contactWrenches({{{0.03, 0, 0}, {0, 0, 1}}}, 0.5, 8, 10.0, {0, 0, 0});
  CHECK(epsilonQuality(single) == 0.0);

  // Forces only, no torque spread: origin sits on the hull boundary.
  std::vector<Wrench> planar;
  for (int k = 0; k < 8; ++k) {
    Wrench w{};
    w[0] = std::cos(2.0 * M_PI * k / 8);
    w[1] = std::sin(2.0 * M_PI * k / 8);
    planar.push_back(w);
  }
  CHECK(epsilonQuality(planar) == 0.0);
}

TEST_CASE("oracle upper-bounds the exact value and tightens with more directions") {
  // Minimum-direction coverage in six dimensions is sparse: at 1e5
  // directions the overshoot on generic wrench sets measures 2 to 8 percent
  // of the largest wrench norm, shrinking roughly as n^(-0.28). The hard
  // guarantees are the upper-bound property and, because a longer run with
  // the same seed extends the same direction sequence, exact monotone
  // improvement in the direction count. The 10 percent envelope below
  // documents the observed scale without betting on any single seed.
  Rng rng(62);
  for (int trial = 0; trial < 12; ++trial) {
    int count = 7 + static_cast<int>(rng.uniformIndex(18));
    std::vector<Wrench> w;
    for (int i = 0; i < count; ++i) {
      Wrench wr;
      for (double& v : wr) v = rng.uniform(-1.0, 1.0);
      w.push_back(wr);
    }
    double exact = epsilonQuality(w);
    double coarse = epsilonOracle(w, 100000, 1000 + trial);
    CHECK(coarse >= exact - 1e-12);
    CHECK(coarse - exact <= 0.10 * maxWrenchNorm(w));
    double finer = epsilonOracle(w, 200000, 1000 + trial);
    CHECK(finer <= coarse);
    CHECK(finer >= exact - 1e-12);
  }
}

TEST_CASE("epsilon is invariant under rotations about the torque origin") {
  Rng rng(63);
  const Vec3 origin{0.01, 0.02, -0.01};
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<OrientedPoint> contacts = randomContacts(rng, 3);
    for (OrientedPoint& c : contacts) c.position += origin;
    double base =
        epsilonQuality(contactWrenches(contacts, 0.5, 8, 9.0, origin));

    Mat3 rot = Mat3::axisAngle(rng.unitVector(), rng.uniform(0.1, 3.0));
    std::vector<OrientedPoint> moved;
    for (const OrientedPoint& c : contacts)
      moved.push_back({rot * (c.position - origin) + origin, rot * c.normal});
    double turned =
        epsilonQuality(contactWrenches(moved, 0.5, 8, 9.0, origin));
    CHECK(std::abs(turned - base) <= 1e-9);
  }
}

TEST_CASE("antipodal sphere pinch scores positive and matches the oracle") {
  // Two opposed contacts plus a third at the equator: a textbook stable
  // pinch on a 4 cm sphere.
  std::vector<OrientedPoint> contacts = {{{0.04, 0, 0}, {-1, 0, 0}},
                                         {{-0.04, 0, 0}, {1, 0, 0}},
                                         {{0, -0.04, 0}, {0, 1, 0}}};
  std::vector<Wrench> w = contactWrenches(contacts, 0.5, 8, 25.0, {0, 0, 0});
  double exact = epsilonQuality(w);
  CHECK(exact > 0.05);
  double oracle = epsilonOracle(w, 100000, 77);
  CHECK(oracle >= exact - 1e-12);
  CHECK(oracle - exact <= 0.10 * maxWrenchNorm(w));

  // Weakening friction weakens the grasp.
  double weaker = epsilonQuality(contactWrenches(contacts, 0.25, 8, 25.0, {0, 0, 0}));
  CHECK(weaker < exact);
  CHECK(weaker > 0.0);
}

TEST_CASE("epsilon ignores wrench order and duplicates") {
  Rng rng(64);
  std::vector<OrientedPoint> contacts = randomContacts(rng, 3);
  std::vector<Wrench> w = contactWrenches(contacts, 0.5, 8, 9.0, {0, 0, 0});
  double base = epsilonQuality(w);

  std::vector<Wrench> reversed(w.rbegin(), w.rend());
  CHECK(epsilonQuality(reversed) == base);

  std::vector<Wrench> doubled = w;
  doubled.insert(doubled.end(), w.begin(), w.end());
  CHECK(epsilonQuality(doubled) == base);
}
