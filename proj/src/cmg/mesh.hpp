/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "cmg/vec.hpp"

namespace cmg {

// Surface point paired with an outward unit normal.
struct OrientedPoint {
  Vec3 position;
  Vec3 normal;
};

using PointCloud = std::vector<OrientedPoint>;

// Indexed triangle mesh. Triangles are wound counter-clockwise seen from
// outside, so face normals point outward for closed meshes.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;

  bool empty() const { return triangles.empty(); }

  const Vec3& triVertex(std::size_t t, int k) const { return vertices[triangles[t][k]]; }

  // Unnormalized (b-a) x (c-a); its norm is twice the triangle area.
  Vec3 faceCross(std::size_t t) const {
    const Vec3& a = triVertex(t, 0);
    return cross(triVertex(t, 1) - a, triVertex(t, 2) - a);
  }

  Vec3 faceNormal(std::size_t t) const { return normalized(faceCross(t)); }
  double faceArea(std::size_t t) const { return 0.5 * norm(faceCross(t)); }

  double surfaceArea() const;

  // Signed volume by the divergence theorem; positive for outward windings.
  double volume() const;

  // Centroid of the enclosed solid (not the vertex average). Requires a
  // closed mesh with nonzero volume.
  Vec3 volumeCentroid() const;

  Vec3 vertexCentroid() const;
  double maxVertexDistance(const Vec3& from) const;

  void bounds(Vec3* lo, Vec3* hi) const;

  // Area-weighted average of incident face normals, unit length.
  std::vector<Vec3> vertexNormals() const;

  void applyTransform(const RigidTransform& t);
  void applyScale(double s);

  // True when every edge is shared by exactly two triangles with opposite
  // orientation.
  bool isWatertight() const;

  // Drops triangles with repeated vertex indices or exactly zero area and
  // returns how many were removed.
  std::size_t dropDegenerateTriangles();
};

// Reads OFF or OBJ (chosen by file extension), fan-triangulating polygonal
// faces and scaling all coordinates by `scale`. Throws cmg::Error on I/O or
// parse failure.
TriangleMesh loadMesh(const std::string& path, double scale = 1.0);
TriangleMesh loadOff(std::istream& in);
TriangleMesh loadObj(std::istream& in);
void saveOff(const TriangleMesh& mesh, const std::string& path);

// Axis-aligned box between two corners, 12 triangles, outward windings.
TriangleMesh makeBox(const Vec3& lo, const Vec3& hi);

// Subdivided icosahedron with all vertices at distance `radius` from the
// origin. subdivisions = 0 gives the raw icosahedron (20 faces).
TriangleMesh makeIcosphere(double radius, int subdivisions);

// Closed cylinder along z, centered at the origin, `segments`-gon cross
// section.
TriangleMesh makeCylinder(double radius, double height, int segments);

// One surface sample per voxel the surface passes through, on a grid anchored
// at the mesh bounding-box minimum with half-open voxels. The sample is the
// surface point nearest the voxel center (restricted to that voxel) and
// carries the face normal of its triangle. Output is sorted by voxel index
// and is invariant under triangle reordering.
std::vector<OrientedPoint> voxelDownsample(const TriangleMesh& mesh, double voxel);

// Independent occupancy count for voxelDownsample verification: voxels are
// found by recursive triangle subdivision instead of polygon clipping.
std::size_t voxelOccupancyBruteForce(const TriangleMesh& mesh, double voxel);

// Closest point on a single triangle (a, b, c) to p.
Vec3 closestPointOnTriangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace cmg
