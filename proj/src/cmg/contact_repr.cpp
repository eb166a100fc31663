/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#include "cmg/contact_repr.hpp"

#include <algorithm>
#include <cmath>

#include "cmg/error.hpp"

namespace cmg {

namespace {

constexpr double kPoleThreshold = 1.0 - 1e-8;
constexpr double kParallelThreshold = 1e-9;

void checkFinger(int finger, const HandModel& hand) {
  if (hand.fingerCount != 3)
    throw Error(ErrorCode::kInvalidArg, "grasp codec requires a three-finger hand");
  if (finger < 0 || finger >= hand.fingerCount)
    throw Error(ErrorCode::kInvalidArg, "finger id out of range");
}

// Joint vector (one entry per finger) from compact parameters.
std::vector<double> assembleInner(const CompactGrasp& g, const HandModel& hand) {
  std::vector<double> inner(hand.fingerCount, 0.0);
  inner[g.finger] = g.inner;
  double support[2] = {g.support1, g.support2};
  int k = 0;
  for (int f = 0; f < hand.fingerCount; ++f)
    if (f != g.finger) inner[f] = support[k++];
  return inner;
}

}  // namespace

Mat3 chart(const Vec3& v) {
  double len = norm(v);
  if (len < 1e-12) throw Error(ErrorCode::kDegenerate, "chart: zero direction");
  Vec3 w = v / len;
  Vec3 c2;
  if (std::abs(w.x) > kPoleThreshold)
    c2 = normalized(Vec3{-w.y, w.x, 0.0});
  else
    c2 = normalized(Vec3{0.0, -w.z, w.y});
  Vec3 c1 = cross(c2, w);
  return Mat3::fromCols(c1, c2, w);
}

Mat3 contactFrame(const Vec3& u, const Vec3& n) {
  Vec3 c3 = cross(u, n);
  double len = norm(c3);
  if (len < kParallelThreshold)
    c3 = chart(n).col(1);
  else
    c3 = c3 / len;
  return Mat3::fromCols(u, cross(c3, u), c3);
}

FullGrasp decodeGrasp(const CompactGrasp& g, const OrientedPoint& contact, const HandModel& hand) {
  checkFinger(g.finger, hand);
  double r2 = g.x * g.x + g.y * g.y;
  if (r2 > 1.0 + 1e-12)
    throw Error(ErrorCode::kInvalidArg, "decodeGrasp: direction coordinates outside unit disk");
  double z = std::sqrt(std::max(0.0, 1.0 - r2));

  Vec3 n = normalized(contact.normal);
  Vec3 center = contact.position + n * hand.fingertipRadius;
  Mat3 rft = chart(n);
  Vec3 u = rft * Vec3{g.x, g.y, z};
  Vec3 tOj = center + u * hand.outerLength;
  Mat3 rOj = contactFrame(u, n) * hand.r0;

  FullGrasp full;
  full.spread = g.spread;
  full.inner = assembleInner(g, hand);
  RigidTransform fk = fkOuterJoint(hand, g.finger, full.spread, full.inner[g.finger]);
  full.pose = RigidTransform{rOj, tOj} * fk.inverse();
  return full;
}

EncodeResult encodeGrasp(const FullGrasp& full, int finger, const HandModel& hand,
                         const OrientedPoint& contact) {
  checkFinger(finger, hand);
  if (full.inner.size() != static_cast<std::size_t>(hand.fingerCount))
    throw Error(ErrorCode::kInvalidArg, "encodeGrasp: wrong joint count");

  Vec3 n = normalized(contact.normal);
  RigidTransform tOj = full.pose * fkOuterJoint(hand, finger, full.spread, full.inner[finger]);
  Vec3 center = tOj.apply(hand.cLocal);
  Vec3 u = normalized(tOj.t - center);
  Mat3 rft = chart(n);
  double x = dot(rft.col(0), u);
  double y = dot(rft.col(1), u);
  double z = dot(rft.col(2), u);
  // A slightly negative z is numerical noise from re-encoding a grasp whose
  // joint direction lies in the chart plane; only a clear violation is an
  // error.
  if (z < -1e-12)
    throw Error(ErrorCode::kUnrepresentable,
                "encodeGrasp: joint direction on the hidden half of the chart");

  EncodeResult out;
  out.contact = {center - n * hand.fingertipRadius, n};
  out.g.finger = finger;
  out.g.x = x;
  out.g.y = y;
  out.g.spread = full.spread;
  out.g.inner = full.inner[finger];
  double support[2] = {0.0, 0.0};
  int k = 0;
  for (int f = 0; f < hand.fingerCount; ++f)
    if (f != finger) support[k++] = full.inner[f];
  out.g.support1 = support[0];
  out.g.support2 = support[1];
  return out;
}

void validateCompact(const CompactGrasp& g, const HandModel& hand) {
  checkFinger(g.finger, hand);
  if (g.x * g.x + g.y * g.y > 1.0 + 1e-9)
    throw Error(ErrorCode::kInvalidArg, "compact grasp: (x, y) outside the unit disk");
  if (g.spread < hand.spreadMin - 1e-9 || g.spread > hand.spreadMax + 1e-9)
    throw Error(ErrorCode::kInvalidArg, "compact grasp: spread out of range");
  for (double v : {g.inner, g.support1, g.support2})
    if (v < hand.innerMin - 1e-9 || v > hand.innerMax + 1e-9)
      throw Error(ErrorCode::kInvalidArg, "compact grasp: inner joint out of range");
}

void validateFull(const FullGrasp& full, const HandModel& hand) {
  if (full.inner.size() != static_cast<std::size_t>(hand.fingerCount))
    throw Error(ErrorCode::kInvalidArg, "full grasp: wrong joint count");
  if (orthonormalityError(full.pose.R) > 1e-9 || full.pose.R.det() < 0.0)
    throw Error(ErrorCode::kInvalidArg, "full grasp: pose rotation invalid");
  if (full.spread < hand.spreadMin - 1e-9 || full.spread > hand.spreadMax + 1e-9)
    throw Error(ErrorCode::kInvalidArg, "full grasp: spread out of range");
  for (double v : full.inner)
    if (v < hand.innerMin - 1e-9 || v > hand.innerMax + 1e-9)
      throw Error(ErrorCode::kInvalidArg, "full grasp: inner joint out of range");
}

}  // namespace cmg
