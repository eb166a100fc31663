/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#include "cmg/bvh.hpp"

#include <algorithm>
#include <cmath>

#include "cmg/error.hpp"

namespace cmg {

double Aabb::distance2(const Vec3& p) const {
  double d2 = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    double d = 0.0;
    if (p[axis] < lo[axis])
      d = lo[axis] - p[axis];
    else if (p[axis] > hi[axis])
      d = p[axis] - hi[axis];
    d2 += d * d;
  }
  return d2;
}

double Aabb::distance2(const Aabb& o) const {
  double d2 = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    double d = 0.0;
    if (o.hi[axis] < lo[axis])
      d = lo[axis] - o.hi[axis];
    else if (o.lo[axis] > hi[axis])
      d = o.lo[axis] - hi[axis];
    d2 += d * d;
  }
  return d2;
}

double segmentSegmentDistance2(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
  // Ericson, Real-Time Collision Detection, 5.1.9.
  Vec3 d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
  double a = dot(d1, d1), e = dot(d2, d2), f = dot(d2, r);
  constexpr double kEps = 1e-30;
  double s = 0.0, t = 0.0;
  if (a <= kEps && e <= kEps) return norm2(r);
  if (a <= kEps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    double c = dot(d1, r);
    if (e <= kEps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      double b = dot(d1, d2);
      double denom = a * e - b * b;
      s = denom > kEps ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  Vec3 c1 = p0 + d1 * s, c2 = q0 + d2 * t;
  return norm2(c1 - c2);
}

namespace {

// Segment-triangle piercing test; touching counts as piercing. Coplanar
// segments report no hit and are covered by the feature candidates.
bool segmentPiercesTriangle(const Vec3& s0, const Vec3& s1, const Vec3& a, const Vec3& b,
                            const Vec3& c) {
  Vec3 dir = s1 - s0;
  Vec3 e1 = b - a, e2 = c - a;
  Vec3 pvec = cross(dir, e2);
  double det = dot(e1, pvec);
  if (std::abs(det) < 1e-18) return false;
  double inv = 1.0 / det;
  Vec3 tvec = s0 - a;
  double u = dot(tvec, pvec) * inv;
  if (u < 0.0 || u > 1.0) return false;
  Vec3 qvec = cross(tvec, e1);
  double v = dot(dir, qvec) * inv;
  if (v < 0.0 || u + v > 1.0) return false;
  double t = dot(e2, qvec) * inv;
  return t >= 0.0 && t <= 1.0;
}

}  // namespace

double triangleDistance(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0,
                        const Vec3& b1, const Vec3& b2) {
  const Vec3 as[3] = {a0, a1, a2};
  const Vec3 bs[3] = {b0, b1, b2};
  double best2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    best2 = std::min(best2, norm2(closestPointOnTriangle(as[i], b0, b1, b2) - as[i]));
    best2 = std::min(best2, norm2(closestPointOnTriangle(bs[i], a0, a1, a2) - bs[i]));
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      best2 = std::min(best2, segmentSegmentDistance2(as[i], as[(i + 1) % 3], bs[j],
                                                      bs[(j + 1) % 3]));
  if (best2 > 0.0) {
    // Feature candidates miss the case of one triangle passing through the
    // other's interior; catch it with piercing tests.
    for (int i = 0; i < 3; ++i) {
      if (segmentPiercesTriangle(as[i], as[(i + 1) % 3], b0, b1, b2)) return 0.0;
      if (segmentPiercesTriangle(bs[i], bs[(i + 1) % 3], a0, a1, a2)) return 0.0;
    }
  }
  return std::sqrt(best2);
}

Bvh::Bvh(const TriangleMesh& mesh) : mesh_(mesh) {
  if (mesh_.empty()) throw Error(ErrorCode::kInvalidArg, "Bvh: empty mesh");
  vertexNormals_ = mesh_.vertexNormals();
  std::size_t n = mesh_.triangles.size();
  std::vector<Vec3> centroids(n);
  prims_.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    prims_[t] = static_cast<int>(t);
    centroids[t] =
        (mesh_.triVertex(t, 0) + mesh_.triVertex(t, 1) + mesh_.triVertex(t, 2)) / 3.0;
  }
  nodes_.reserve(2 * n);
  build(&prims_, 0, static_cast<int>(n), centroids);
}

int Bvh::build(std::vector<int>* prims, int begin, int end, const std::vector<Vec3>& centroids) {
  int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Aabb bounds;
  for (int i = begin; i < end; ++i)
    for (int k = 0; k < 3; ++k) bounds.grow(mesh_.triVertex((*prims)[i], k));

  constexpr int kLeafSize = 4;
  if (end - begin <= kLeafSize) {
    nodes_[index].bounds = bounds;
    nodes_[index].begin = begin;
    nodes_[index].end = end;
    return index;
  }

  Aabb cb;
  for (int i = begin; i < end; ++i) cb.grow(centroids[(*prims)[i]]);
  Vec3 ext = cb.extent();
  int axis = 0;
  if (ext.y > ext.x) axis = 1;
  if (ext.z > ext[axis]) axis = 2;
  int mid = (begin + end) / 2;
  std::nth_element(prims->begin() + begin, prims->begin() + mid, prims->begin() + end,
                   [&](int a, int b) {
                     if (centroids[a][axis] != centroids[b][axis])
                       return centroids[a][axis] < centroids[b][axis];
                     return a < b;
                   });
  int left = build(prims, begin, mid, centroids);
  int right = build(prims, mid, end, centroids);
  nodes_[index].bounds = bounds;
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

namespace {

bool rayIntersectsAabb(const Vec3& origin, const Vec3& invDir, const Aabb& box, double tMax) {
  double t0 = 0.0, t1 = tMax;
  for (int axis = 0; axis < 3; ++axis) {
    double near = (box.lo[axis] - origin[axis]) * invDir[axis];
    double far = (box.hi[axis] - origin[axis]) * invDir[axis];
    if (near > far) std::swap(near, far);
    t0 = std::max(t0, near);
    t1 = std::min(t1, far);
    if (t0 > t1) return false;
  }
  return true;
}

struct TriHit {
  double t;
  double u, v;
  bool grazing;  // hit near an edge or a near-parallel ray, unreliable parity
};

bool rayTriangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b, const Vec3& c,
                 TriHit* out) {
  Vec3 e1 = b - a, e2 = c - a;
  Vec3 pvec = cross(dir, e2);
  double det = dot(e1, pvec);
  double scale = norm(e1) * norm(e2);
  if (std::abs(det) < 1e-12 * scale) return false;
  double inv = 1.0 / det;
  Vec3 tvec = origin - a;
  double u = dot(tvec, pvec) * inv;
  if (u < -1e-12 || u > 1.0 + 1e-12) return false;
  Vec3 qvec = cross(tvec, e1);
  double v = dot(dir, qvec) * inv;
  if (v < -1e-12 || u + v > 1.0 + 1e-12) return false;
  out->t = dot(e2, qvec) * inv;
  out->u = u;
  out->v = v;
  constexpr double kEdgeEps = 1e-9;
  out->grazing = u < kEdgeEps || v < kEdgeEps || 1.0 - u - v < kEdgeEps ||
                 std::abs(det) < 1e-9 * scale;
  return true;
}

}  // namespace

bool Bvh::rayCast(const Vec3& origin, const Vec3& dir, RayHit* hit, double tMin) const {
  Vec3 invDir{1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z};
  RayHit best;
  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!rayIntersectsAabb(origin, invDir, node.bounds, best.t)) continue;
    if (!node.isLeaf()) {
      stack[top++] = node.left;
      stack[top++] = node.right;
      continue;
    }
    for (int i = node.begin; i < node.end; ++i) {
      int tri = prims_[i];
      TriHit th;
      if (!rayTriangle(origin, dir, mesh_.triVertex(tri, 0), mesh_.triVertex(tri, 1),
                       mesh_.triVertex(tri, 2), &th))
        continue;
      if (th.t <= tMin || th.t >= best.t) continue;
      best.t = th.t;
      best.triangle = tri;
      const auto& idx = mesh_.triangles[tri];
      Vec3 n = vertexNormals_[idx[0]] * (1.0 - th.u - th.v) + vertexNormals_[idx[1]] * th.u +
               vertexNormals_[idx[2]] * th.v;
      double len = norm(n);
      best.normal = len > 0.0 ? n / len : mesh_.faceNormal(tri);
      if (dot(best.normal, dir) > 0.0) best.normal = -best.normal;
      best.position = origin + dir * th.t;
    }
  }
  if (best.triangle < 0) return false;
  *hit = best;
  return true;
}

void Bvh::closestRecurse(int nodeIndex, const Vec3& p, ClosestHit* best) const {
  const Node& node = nodes_[nodeIndex];
  if (node.bounds.distance2(p) >= best->distance * best->distance) return;
  if (node.isLeaf()) {
    for (int i = node.begin; i < node.end; ++i) {
      int tri = prims_[i];
      Vec3 q = closestPointOnTriangle(p, mesh_.triVertex(tri, 0), mesh_.triVertex(tri, 1),
                                      mesh_.triVertex(tri, 2));
      double d = norm(q - p);
      if (d < best->distance) {
        best->distance = d;
        best->point = q;
        best->triangle = tri;
      }
    }
    return;
  }
  double dl = nodes_[node.left].bounds.distance2(p);
  double dr = nodes_[node.right].bounds.distance2(p);
  if (dl <= dr) {
    closestRecurse(node.left, p, best);
    closestRecurse(node.right, p, best);
  } else {
    closestRecurse(node.right, p, best);
    closestRecurse(node.left, p, best);
  }
}

ClosestHit Bvh::closestPoint(const Vec3& p) const {
  ClosestHit best;
  closestRecurse(0, p, &best);
  return best;
}

bool Bvh::isInside(const Vec3& p) const {
  // Fixed fallback directions; an irrational-looking mix avoids axis-aligned
  // geometry in the common case.
  static const Vec3 kDirs[] = {
      normalized(Vec3{0.287514, 0.570832, 0.769043}), normalized(Vec3{-0.654321, 0.312987, 0.688411}),
      normalized(Vec3{0.912345, -0.398765, 0.091237}), normalized(Vec3{0.104729, 0.874512, -0.473829}),
      normalized(Vec3{-0.331259, -0.729174, 0.598432}), normalized(Vec3{0.777431, 0.211119, -0.592384}),
      normalized(Vec3{-0.138752, 0.961923, 0.235551}), normalized(Vec3{0.501377, -0.623419, -0.599981}),
  };
  int lastParity = 0;
  for (const Vec3& dir : kDirs) {
    Vec3 invDir{1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z};
    int crossings = 0;
    bool ambiguous = false;
    int stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0 && !ambiguous) {
      const Node& node = nodes_[stack[--top]];
      if (!rayIntersectsAabb(p, invDir, node.bounds, std::numeric_limits<double>::infinity()))
        continue;
      if (!node.isLeaf()) {
        stack[top++] = node.left;
        stack[top++] = node.right;
        continue;
      }
      for (int i = node.begin; i < node.end; ++i) {
        int tri = prims_[i];
        TriHit th;
        if (!rayTriangle(p, dir, mesh_.triVertex(tri, 0), mesh_.triVertex(tri, 1),
                         mesh_.triVertex(tri, 2), &th))
          continue;
        if (th.t <= 0.0) continue;
        if (th.grazing) {
          ambiguous = true;
          break;
        }
        ++crossings;
      }
    }
    lastParity = crossings & 1;
    if (!ambiguous) return lastParity == 1;
  }
  return lastParity == 1;
}

double Bvh::pairRecurse(const Bvh& a, int na, const Bvh& b, int nb, const RigidTransform& bToA,
                        double best, double stopBelow) {
  if (best < stopBelow) return best;
  const Node& nodeA = a.nodes_[na];
  const Node& nodeB = b.nodes_[nb];
  // Bound B's node in A's frame by its transformed box corners.
  Aabb boxB;
  for (int corner = 0; corner < 8; ++corner) {
    Vec3 c{(corner & 1) ? nodeB.bounds.hi.x : nodeB.bounds.lo.x,
           (corner & 2) ? nodeB.bounds.hi.y : nodeB.bounds.lo.y,
           (corner & 4) ? nodeB.bounds.hi.z : nodeB.bounds.lo.z};
    boxB.grow(bToA.apply(c));
  }
  double lower2 = nodeA.bounds.distance2(boxB);
  if (lower2 >= best * best) return best;

  if (nodeA.isLeaf() && nodeB.isLeaf()) {
    for (int i = nodeA.begin; i < nodeA.end && best >= stopBelow; ++i) {
      int ta = a.prims_[i];
      Vec3 a0 = a.mesh_.triVertex(ta, 0), a1 = a.mesh_.triVertex(ta, 1),
           a2 = a.mesh_.triVertex(ta, 2);
      for (int j = nodeB.begin; j < nodeB.end; ++j) {
        int tb = b.prims_[j];
        Vec3 b0 = bToA.apply(b.mesh_.triVertex(tb, 0));
        Vec3 b1 = bToA.apply(b.mesh_.triVertex(tb, 1));
        Vec3 b2 = bToA.apply(b.mesh_.triVertex(tb, 2));
        best = std::min(best, triangleDistance(a0, a1, a2, b0, b1, b2));
        if (best < stopBelow) break;
      }
    }
    return best;
  }

  bool splitA;
  if (nodeA.isLeaf())
    splitA = false;
  else if (nodeB.isLeaf())
    splitA = true;
  else {
    Vec3 ea = nodeA.bounds.extent(), eb = nodeB.bounds.extent();
    splitA = ea.x + ea.y + ea.z >= eb.x + eb.y + eb.z;
  }
  if (splitA) {
    best = pairRecurse(a, a.nodes_[na].left, b, nb, bToA, best, stopBelow);
    best = pairRecurse(a, a.nodes_[na].right, b, nb, bToA, best, stopBelow);
  } else {
    best = pairRecurse(a, na, b, b.nodes_[nb].left, bToA, best, stopBelow);
    best = pairRecurse(a, na, b, b.nodes_[nb].right, bToA, best, stopBelow);
  }
  return best;
}

double Bvh::distanceBetween(const Bvh& a, const Bvh& b, const RigidTransform& bToA,
                            double stopBelow) {
  return pairRecurse(a, 0, b, 0, bToA, std::numeric_limits<double>::infinity(), stopBelow);
}

}  // namespace cmg
