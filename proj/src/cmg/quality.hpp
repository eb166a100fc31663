/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cmg/mesh.hpp"
#include "cmg/vec.hpp"

namespace cmg {

using Wrench = std::array<double, 6>;  // force then scaled torque

// Unit-force friction cone edges and their torques for a set of contacts.
// Normals point from the object surface toward the finger, so forces spread
// around the negated normal. Torques about origin are scaled by lambda,
// typically the inverse of the object's maximum extent about that origin.
std::vector<Wrench> contactWrenches(const std::vector<OrientedPoint>& contacts, double mu,
                                    int coneEdges, double lambda, const Vec3& torqueOrigin);

// Radius of the largest origin-centered ball contained in the convex hull of
// the wrench set; zero when the origin is not strictly inside. The hull is
// computed exactly on snapped coordinates, so the result is deterministic and
// permutation invariant.
double epsilonQuality(const std::vector<Wrench>& wrenches);

// Upper-bound estimate: the minimum over sampled unit directions of the
// wrench set's support function, clamped at zero. Always at least as large
// as epsilonQuality for the same wrenches.
double epsilonOracle(const std::vector<Wrench>& wrenches, int directions, std::uint64_t seed);

// Largest wrench magnitude in the set (used to normalize gap tolerances).
double maxWrenchNorm(const std::vector<Wrench>& wrenches);

}  // namespace cmg
