/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#pragma once

#include <vector>

namespace cmg {

struct HullFacet {
  // Indices into the caller's point list; duplicates collapse to the first
  // occurrence. Sorted ascending, size d.
  std::vector<int> vertices;
  // Unit outward normal (d components) and signed plane offset in the
  // caller's units, so normal . x = offset on the plane and the hull interior
  // satisfies normal . x < offset. The offset equals the signed distance of
  // the plane from the origin.
  std::vector<double> normal;
  double offset = 0.0;
  // Facets lying on the same geometric hyperplane share a group id. Ids are
  // assigned by first appearance in the sorted facet order.
  int planeGroup = -1;
};

struct ConvexHull {
  // True when the points span fewer than d affine dimensions; facets empty.
  bool degenerate = false;
  // Simplicial facets sorted by their vertex index lists.
  std::vector<HullFacet> facets;
};

// Exact convex hull of n points in dimension d (coords is n*d values, point
// major). Coordinates are scaled and snapped to a 2^48 integer lattice, and
// everything after that is integer arithmetic, so the combinatorics are exact
// for the snapped points and stable under permutation of the input. The
// snapping perturbs each coordinate by at most 2^-49 of the largest absolute
// coordinate. With verify set, the result is checked against every input
// point (slow for large inputs).
ConvexHull convexHull(const std::vector<double>& coords, int n, int d, bool verify = false);

// Radius of the largest origin-centered ball inside the hull: the minimum
// facet offset, clamped to zero when the origin is not strictly interior, and
// zero for a degenerate hull.
double inradiusAtOrigin(const ConvexHull& hull);

}  // namespace cmg
