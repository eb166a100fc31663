/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "cmg/contact_repr.hpp"
#include "cmg/error.hpp"
#include "cmg/hand_model.hpp"
#include "cmg/rng.hpp"

using namespace cmg;

namespace {

const HandModel& defaultHand() {
  static HandModel hand = loadHand(std::string(CMG_DATA_DIR) + "/hand/default_hand.txt");
  return hand;
}

// Independent orthonormality measure: max deviation of pairwise column dots
// from the identity pattern.
double gramError(const Mat3& m) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = dot(m.col(i), m.col(j));
      worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

CompactGrasp randomCompact(Rng& rng, const HandModel& hand, double maxR2) {
  CompactGrasp g;
  g.finger = static_cast<int>(rng.uniformIndex(3));
  double r2 = rng.uniform(0.0, maxR2);
  double phi = rng.uniform(0.0, 2.0 * M_PI);
  g.x = std::sqrt(r2) * std::cos(phi);
  g.y = std::sqrt(r2) * std::sin(phi);
  g.spread = rng.uniform(hand.spreadMin, hand.spreadMax);
  g.inner = rng.uniform(hand.innerMin, hand.innerMax);
  g.support1 = rng.uniform(hand.innerMin, hand.innerMax);
  g.support2 = rng.uniform(hand.innerMin, hand.innerMax);
  return g;
}

OrientedPoint randomContact(Rng& rng) {
  return {rng.unitVector() * rng.uniform(0.0, 0.15), rng.unitVector()};
}

}  // namespace

TEST_CASE("chart fixtures") {
  Mat3 up = chart({0, 0, 1});
  CHECK(norm(up.col(0) - Vec3{-1, 0, 0}) < 1e-15);
  CHECK(norm(up.col(1) - Vec3{0, -1, 0}) < 1e-15);
  CHECK(norm(up.col(2) - Vec3{0, 0, 1}) < 1e-15);

  Mat3 side = chart({0, 1, 0});
  CHECK(norm(side.col(0) - Vec3{-1, 0, 0}) < 1e-15);
  CHECK(norm(side.col(1) - Vec3{0, 0, 1}) < 1e-15);
  CHECK(norm(side.col(2) - Vec3{0, 1, 0}) < 1e-15);

  // The pole switches to the planar fallback.
  Mat3 pole = chart({1, 0, 0});
  CHECK(norm(pole.col(0) - Vec3{0, 0, -1}) < 1e-15);
  CHECK(norm(pole.col(1) - Vec3{0, 1, 0}) < 1e-15);
  Mat3 antipole = chart({-1, 0, 0});
  CHECK(norm(antipole.col(1) - Vec3{0, -1, 0}) < 1e-15);
  CHECK(norm(antipole.col(0) - Vec3{0, 0, -1}) < 1e-15);

  // Only the direction matters.
  CHECK(transformError({chart({0, 0, 2.5}), {0, 0, 0}}, {up, {0, 0, 0}}) < 1e-15);
  CHECK_THROWS_AS(chart({0, 0, 0}), Error);
}

TEST_CASE("chart frames are orthonormal and right handed") {
  Rng rng(51);
  for (int i = 0; i < 20000; ++i) {
    Vec3 v = rng.unitVector();
    // A fifth of the trials crowd the pole region where the fallback kicks
    // in; mix both slightly-below and above the switch threshold.
    if (i % 5 == 0) {
      double mag = (i % 10 == 0) ? 1e-9 : 2e-8;
      v = normalized(Vec3{(i % 2) ? 1.0 : -1.0, rng.uniform(-mag, mag), rng.uniform(-mag, mag)});
    }
    Mat3 m = chart(v);
    CHECK(gramError(m) <= 1e-9);
    CHECK(m.det() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(norm(m.col(2) - v) < 1e-12);
  }
}

TEST_CASE("contact frame spans the joint direction and normal") {
  Rng rng(52);
  for (int i = 0; i < 5000; ++i) {
    Vec3 u = rng.unitVector();
    Vec3 n = rng.unitVector();
    if (norm(cross(u, n)) < 1e-8) continue;
    Mat3 m = contactFrame(u, n);
    CHECK(gramError(m) <= 1e-9);
    CHECK(m.det() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(norm(m.col(0) - u) < 1e-12);
    // The third column is the binormal of the (u, n) pair, so the normal
    // lies in the frame's x-y plane.
    CHECK(std::abs(dot(m.col(2), n)) < 1e-9);
  }

  // Aligned directions fall back to the chart's second column.
  Vec3 u{0, 0, 1};
  Mat3 m = contactFrame(u, u);
  CHECK(norm(m.col(2) - chart(u).col(1)) < 1e-15);
  CHECK(gramError(m) <= 1e-12);
  Mat3 anti = contactFrame(u, Vec3{0, 0, -1});
  CHECK(norm(anti.col(2) - chart(Vec3{0, 0, -1}).col(1)) < 1e-15);
}

TEST_CASE("decode then encode reproduces the compact parameters") {
  const HandModel& hand = defaultHand();
  Rng rng(53);
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    // Every tenth trial pushes (x, y) almost onto the rim where z tends to
    // zero and the sign gate is at its most delicate.
    double maxR2 = (trial % 10 == 0) ? 1.0 - 1e-8 : 0.98;
    CompactGrasp g = randomCompact(rng, hand, maxR2);
    OrientedPoint contact = randomContact(rng);

    FullGrasp full = decodeGrasp(g, contact, hand);
    EncodeResult enc = encodeGrasp(full, g.finger, hand, contact);
    CHECK(std::abs(enc.g.x - g.x) < 1e-9);
    CHECK(std::abs(enc.g.y - g.y) < 1e-9);
    CHECK(enc.g.spread == g.spread);
    CHECK(enc.g.inner == g.inner);
    CHECK(enc.g.support1 == g.support1);
    CHECK(enc.g.support2 == g.support2);
    CHECK(norm(enc.contact.position - contact.position) < 1e-9);

    FullGrasp again = decodeGrasp(enc.g, enc.contact, hand);
    CHECK(transformError(again.pose, full.pose) < 1e-9);
    for (int f = 0; f < 3; ++f) CHECK(std::abs(again.inner[f] - full.inner[f]) < 1e-12);
    CHECK(again.spread == full.spread);
    ++checked;
  }
  CHECK(checked == 2000);
}

TEST_CASE("encode then decode recovers kinematically consistent grasps") {
  // When the contact normal lies in the finger's rotation plane the codec is
  // an exact inverse of the kinematics; that is the property synthesis leans
  // on for its stored records.
  const HandModel& hand = defaultHand();
  Rng rng(54);
  int recovered = 0;
  for (int trial = 0; trial < 1500; ++trial) {
    FullGrasp full;
    full.pose = RigidTransform{Mat3::axisAngle(rng.unitVector(), rng.uniform(0, 3)),
                               {rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2),
                                rng.uniform(-0.2, 0.2)}};
    full.spread = rng.uniform(hand.spreadMin, hand.spreadMax);
    full.inner = {rng.uniform(hand.innerMin, hand.innerMax),
                  rng.uniform(hand.innerMin, hand.innerMax),
                  rng.uniform(hand.innerMin, hand.innerMax)};
    int f = static_cast<int>(rng.uniformIndex(3));

    RigidTransform oj = full.pose * fkOuterJoint(hand, f, full.spread, full.inner[f]);
    Vec3 center = oj.apply(hand.cLocal);
    // In-plane normal on the pad side of the fingertip. The center-to-joint
    // direction is +x in this frame, so normals within a quarter turn of it
    // stay on the visible chart hemisphere.
    double a = rng.uniform(0.05, M_PI / 2.0 - 0.05);
    Vec3 nWorld = oj.R * Vec3{std::cos(a), std::sin(a), 0.0};
    OrientedPoint contact{center - nWorld * hand.fingertipRadius, nWorld};

    EncodeResult enc = encodeGrasp(full, f, hand, contact);
    CHECK(norm(enc.contact.position - contact.position) < 1e-12);
    FullGrasp back = decodeGrasp(enc.g, enc.contact, hand);
    CHECK(transformError(back.pose, full.pose) < 1e-9);
    CHECK(back.spread == full.spread);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(back.inner[k] - full.inner[k]) < 1e-12);
    ++recovered;
  }
  CHECK(recovered == 1500);
}

TEST_CASE("encode rejects the hidden hemisphere") {
  const HandModel& hand = defaultHand();
  Rng rng(55);
  CompactGrasp g = randomCompact(rng, hand, 0.5);
  OrientedPoint contact = randomContact(rng);
  FullGrasp full = decodeGrasp(g, contact, hand);

  RigidTransform oj = full.pose * fkOuterJoint(hand, g.finger, full.spread, full.inner[g.finger]);
  Vec3 u = normalized(oj.t - oj.apply(hand.cLocal));
  // A contact normal opposite the joint direction puts the direction at the
  // chart's antipode, z = -1.
  CHECK_THROWS_AS(encodeGrasp(full, g.finger, hand, OrientedPoint{contact.position, -u}), Error);
  try {
    encodeGrasp(full, g.finger, hand, OrientedPoint{contact.position, -u});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnrepresentable);
  }
}

TEST_CASE("decode validates the unit disk") {
  const HandModel& hand = defaultHand();
  CompactGrasp g;
  g.finger = 0;
  g.x = 0.8;
  g.y = 0.7;
  CHECK_THROWS_AS(decodeGrasp(g, {{0, 0, 0}, {0, 0, 1}}, hand), Error);

  // Just past the rim within tolerance decodes with z clamped to zero.
  g.x = std::sqrt(1.0 + 5e-13);
  g.y = 0.0;
  FullGrasp full = decodeGrasp(g, {{0, 0, 0}, {0, 0, 1}}, hand);
  CHECK(full.inner.size() == 3);
}

TEST_CASE("codec insists on three fingers") {
  HandModel two = defaultHand();
  two.fingerCount = 2;
  two.base.resize(2);
  two.spreadSign.resize(2);
  CompactGrasp g;
  OrientedPoint c{{0, 0, 0}, {0, 0, 1}};
  CHECK_THROWS_AS(decodeGrasp(g, c, two), Error);
  FullGrasp full;
  full.inner = {0.0, 0.0};
  CHECK_THROWS_AS(encodeGrasp(full, 0, two, c), Error);

  const HandModel& hand = defaultHand();
  CompactGrasp bad;
  bad.finger = 3;
  CHECK_THROWS_AS(decodeGrasp(bad, c, hand), Error);
  bad.finger = -1;
  CHECK_THROWS_AS(decodeGrasp(bad, c, hand), Error);
}

TEST_CASE("range validation accepts and rejects") {
  const HandModel& hand = defaultHand();
  Rng rng(56);
  CompactGrasp g = randomCompact(rng, hand, 0.9);
  validateCompact(g, hand);

  CompactGrasp sp = g;
  sp.spread = hand.spreadMax + 1e-6;
  CHECK_THROWS_AS(validateCompact(sp, hand), Error);
  CompactGrasp in = g;
  in.support2 = hand.innerMin - 1e-6;
  CHECK_THROWS_AS(validateCompact(in, hand), Error);

  FullGrasp full = decodeGrasp(g, randomContact(rng), hand);
  validateFull(full, hand);
  FullGrasp crooked = full;
  crooked.pose.R.m[0] += 1e-3;
  CHECK_THROWS_AS(validateFull(crooked, hand), Error);
  FullGrasp shortJoints = full;
  shortJoints.inner.resize(2);
  CHECK_THROWS_AS(validateFull(shortJoints, hand), Error);
}
