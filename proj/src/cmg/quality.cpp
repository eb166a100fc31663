/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#include "cmg/quality.hpp"

#include <cmath>

#include "cmg/contact_repr.hpp"
#include "cmg/error.hpp"
#include "cmg/hull.hpp"
#include "cmg/rng.hpp"

namespace cmg {

std::vector<Wrench> contactWrenches(const std::vector<OrientedPoint>& contacts, double mu,
                                    int coneEdges, double lambda, const Vec3& torqueOrigin) {
  if (contacts.empty()) throw Error(ErrorCode::kInvalidArg, "contactWrenches: no contacts");
  if (mu <= 0.0) throw Error(ErrorCode::kInvalidArg, "contactWrenches: mu must be positive");
  if (coneEdges < 3)
    throw Error(ErrorCode::kInvalidArg, "contactWrenches: need at least 3 cone edges");
  if (lambda <= 0.0) throw Error(ErrorCode::kInvalidArg, "contactWrenches: bad torque scale");

  std::vector<Wrench> out;
  out.reserve(contacts.size() * coneEdges);
  double invHyp = 1.0 / std::sqrt(1.0 + mu * mu);
  for (const OrientedPoint& contact : contacts) {
    Vec3 n = normalized(contact.normal);
    Vec3 arm = contact.position - torqueOrigin;
    Vec3 t1 = cross(n, arm);
    double len = norm(t1);
    if (len < 1e-9 * norm(arm) || norm(arm) == 0.0)
      t1 = chart(n).col(1);  // arm parallel to the normal carries no azimuth
    else
      t1 = t1 / len;
    Vec3 t2 = cross(n, t1);
    for (int k = 0; k < coneEdges; ++k) {
      double phi = 2.0 * M_PI * k / coneEdges;
      Vec3 f = (-n + (t1 * std::cos(phi) + t2 * std::sin(phi)) * mu) * invHyp;
      Vec3 tau = cross(arm, f) * lambda;
      out.push_back({f.x, f.y, f.z, tau.x, tau.y, tau.z});
    }
  }
  return out;
}

double epsilonQuality(const std::vector<Wrench>& wrenches) {
  if (wrenches.empty()) return 0.0;
  std::vector<double> coords;
  coords.reserve(wrenches.size() * 6);
  for (const Wrench& w : wrenches)
    for (double v : w) coords.push_back(v);
  ConvexHull hull = convexHull(coords, static_cast<int>(wrenches.size()), 6, true);
  return inradiusAtOrigin(hull);
}

double epsilonOracle(const std::vector<Wrench>& wrenches, int directions, std::uint64_t seed) {
  if (wrenches.empty() || directions < 1) return 0.0;
  Rng rng = Rng::stream(seed, "epsilon-oracle");
  double minSupport = std::numeric_limits<double>::infinity();
  for (int d = 0; d < directions; ++d) {
    double u[6];
    double n2 = 0.0;
    for (double& c : u) {
      c = rng.normal();
      n2 += c * c;
    }
    if (n2 < 1e-24) {
      --d;
      continue;
    }
    double inv = 1.0 / std::sqrt(n2);
    double support = -std::numeric_limits<double>::infinity();
    for (const Wrench& w : wrenches) {
      double s = 0.0;
      for (int i = 0; i < 6; ++i) s += w[i] * u[i];
      support = std::max(support, s * inv);
    }
    minSupport = std::min(minSupport, support);
  }
  return std::max(0.0, minSupport);
}

double maxWrenchNorm(const std::vector<Wrench>& wrenches) {
  double best = 0.0;
  for (const Wrench& w : wrenches) {
    double n2 = 0.0;
    for (double v : w) n2 += v * v;
    best = std::max(best, std::sqrt(n2));
  }
  return best;
}

}  // namespace cmg
