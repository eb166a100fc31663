/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#pragma once

#include <limits>
#include <vector>

#include "cmg/mesh.hpp"
#include "cmg/vec.hpp"

namespace cmg {

struct Aabb {
  Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  Vec3 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity()};

  void grow(const Vec3& p) {
    lo = min3(lo, p);
    hi = max3(hi, p);
  }
  void grow(const Aabb& o) {
    lo = min3(lo, o.lo);
    hi = max3(hi, o.hi);
  }
  Vec3 extent() const { return hi - lo; }
  bool valid() const { return lo.x <= hi.x; }

  // Squared distance from a point to the box (0 inside).
  double distance2(const Vec3& p) const;
  // Squared distance between two boxes (0 when overlapping).
  double distance2(const Aabb& o) const;
};

struct RayHit {
  double t = std::numeric_limits<double>::infinity();
  Vec3 position;
  Vec3 normal;  // interpolated vertex normal, flipped to face the ray origin
  int triangle = -1;
};

struct ClosestHit {
  double distance = std::numeric_limits<double>::infinity();
  Vec3 point;
  int triangle = -1;
};

// Distance between two triangles; exactly 0 when they intersect.
double triangleDistance(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0,
                        const Vec3& b1, const Vec3& b2);

// Closest point between segments p0-p1 and q0-q1.
double segmentSegmentDistance2(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1);

// Bounding volume hierarchy over a copy of the mesh. All queries are in the
// mesh's own frame; cross-mesh queries take the relative transform.
class Bvh {
 public:
  explicit Bvh(const TriangleMesh& mesh);

  const TriangleMesh& mesh() const { return mesh_; }
  const Aabb& rootBounds() const { return nodes_[0].bounds; }

  // Nearest intersection with t > tMin. Returns false when the ray misses.
  bool rayCast(const Vec3& origin, const Vec3& dir, RayHit* hit, double tMin = 1e-9) const;

  ClosestHit closestPoint(const Vec3& p) const;
  double distance(const Vec3& p) const { return closestPoint(p).distance; }

  // Even-odd containment test. Grazing hits trigger a retry along another
  // direction, so results are reliable for points away from the surface.
  bool isInside(const Vec3& p) const;

  // Minimum distance between surfaces of a and b, with b mapped into a's
  // frame by bToA. Traversal stops early once a pair closer than stopBelow
  // is found, returning that pair's distance (an upper bound on the true
  // minimum, still below the threshold).
  static double distanceBetween(const Bvh& a, const Bvh& b, const RigidTransform& bToA,
                                double stopBelow = 0.0);

 private:
  struct Node {
    Aabb bounds;
    int left = -1;   // internal node: child indices
    int right = -1;
    int begin = 0;   // leaf: range into prims_
    int end = 0;
    bool isLeaf() const { return left < 0; }
  };

  int build(std::vector<int>* prims, int begin, int end, const std::vector<Vec3>& centroids);
  void closestRecurse(int node, const Vec3& p, ClosestHit* best) const;
  static double pairRecurse(const Bvh& a, int na, const Bvh& b, int nb,
                            const RigidTransform& bToA, double best, double stopBelow);

  TriangleMesh mesh_;
  std::vector<Vec3> vertexNormals_;
  std::vector<Node> nodes_;
  std::vector<int> prims_;
};

}  // namespace cmg
