/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#include "cmg/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <utility>

#include "cmg/contact_repr.hpp"
#include "cmg/error.hpp"
#include "cmg/hull.hpp"
#include "cmg/kdtree.hpp"
#include "cmg/parallel.hpp"
#include "cmg/rng.hpp"

namespace cmg {

namespace {

// 2D convex hull by monotone chain, returned counterclockwise.
std::vector<std::pair<double, double>> hull2d(std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  auto cross = [](const std::pair<double, double>& o, const std::pair<double, double>& a,
                  const std::pair<double, double>& b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
  };
  std::vector<std::pair<double, double>> out(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(out[k - 2], out[k - 1], pts[i]) <= 0.0) --k;
    out[k++] = pts[i];
  }
  for (std::size_t i = n - 1, lower = k + 1; i > 0; --i) {
    while (k >= lower && cross(out[k - 2], out[k - 1], pts[i - 1]) <= 0.0) --k;
    out[k++] = pts[i - 1];
  }
  out.resize(k - 1);
  return out;
}

// Signed distance of p from the polygon boundary, positive inside a
// counterclockwise polygon.
double insideMargin(const std::vector<std::pair<double, double>>& poly,
                    const std::pair<double, double>& p) {
  double margin = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  if (n < 3) return -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    const double ex = b.first - a.first;
    const double ey = b.second - a.second;
    const double len = std::sqrt(ex * ex + ey * ey);
    if (len < 1e-18) continue;
    const double cross = ex * (p.second - a.second) - ey * (p.first - a.first);
    margin = std::min(margin, cross / len);
  }
  return margin;
}

// Rotation taking direction a to direction b by the minimal angle.
Mat3 rotationBetween(const Vec3& a, const Vec3& b) {
  const double c = dot(a, b);
  const Vec3 axis = cross(a, b);
  const double s = norm(axis);
  if (s < 1e-12) {
    if (c > 0.0) return Mat3::identity();
    // Opposite directions: half turn about any axis orthogonal to a.
    const Vec3 ortho = chart(a).col(0);
    return Mat3::axisAngle(ortho, M_PI);
  }
  return Mat3::axisAngle(axis * (1.0 / s), std::atan2(s, c));
}

struct PreparedEntry {
  RegistryEntry entry;
  std::shared_ptr<const TriangleMesh> mesh;
  std::shared_ptr<const Bvh> bvh;
  std::vector<RigidTransform> poses;
};

}  // namespace

std::vector<RigidTransform> stablePoses(const TriangleMesh& mesh) {
  if (mesh.empty()) throw Error(ErrorCode::kInvalidArg, "stablePoses: empty mesh");
  const std::size_t n = mesh.vertices.size();
  std::vector<double> coords(n * 3);
  for (std::size_t i = 0; i < n; ++i) {
    coords[i * 3 + 0] = mesh.vertices[i].x;
    coords[i * 3 + 1] = mesh.vertices[i].y;
    coords[i * 3 + 2] = mesh.vertices[i].z;
  }
  const ConvexHull hull = convexHull(coords, n, 3, true);
  if (hull.degenerate) throw Error(ErrorCode::kDegenerate, "stablePoses: degenerate hull");
  const Vec3 centroid = mesh.volumeCentroid();

  // Gather each hull face (coplanar facet group) with its vertex set.
  std::map<int, std::vector<std::size_t>> groupFacets;
  for (std::size_t f = 0; f < hull.facets.size(); ++f) {
    groupFacets[hull.facets[f].planeGroup].push_back(f);
  }

  std::vector<RigidTransform> poses;
  for (const auto& [group, facetIds] : groupFacets) {
    const HullFacet& first = hull.facets[facetIds.front()];
    const Vec3 normal{first.normal[0], first.normal[1], first.normal[2]};
    std::vector<std::size_t> verts;
    for (std::size_t f : facetIds) {
      for (std::size_t v : hull.facets[f].vertices) verts.push_back(v);
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());

    // Support polygon in a frame spanning the face plane.
    const Mat3 frame = chart(normal);
    const Vec3 e1 = frame.col(0);
    const Vec3 e2 = frame.col(1);
    std::vector<std::pair<double, double>> pts;
    pts.reserve(verts.size());
    for (std::size_t v : verts) {
      pts.push_back({dot(mesh.vertices[v], e1), dot(mesh.vertices[v], e2)});
    }
    const auto poly = hull2d(std::move(pts));
    if (insideMargin(poly, {dot(centroid, e1), dot(centroid, e2)}) <= 1e-9) continue;

    const Mat3 rot = rotationBetween(normal, Vec3{0.0, 0.0, -1.0});
    double minZ = std::numeric_limits<double>::infinity();
    for (const Vec3& v : mesh.vertices) minZ = std::min(minZ, (rot * v).z);
    const Vec3 c = rot * centroid;
    poses.push_back(RigidTransform{rot, Vec3{-c.x, -c.y, -minZ}});
  }
  return poses;
}

LoadedScene loadSceneGeometry(const Scene& scene) {
  LoadedScene out;
  std::map<std::pair<std::string, double>, std::shared_ptr<const TriangleMesh>> meshCache;
  std::map<std::pair<std::string, double>, std::shared_ptr<const Bvh>> bvhCache;
  for (const SceneObject& obj : scene.objects) {
    const auto key = std::make_pair(obj.meshPath, obj.scale);
    auto it = meshCache.find(key);
    if (it == meshCache.end()) {
      auto mesh = std::make_shared<TriangleMesh>(loadMesh(obj.meshPath, obj.scale));
      it = meshCache.emplace(key, std::move(mesh)).first;
      bvhCache.emplace(key, std::make_shared<Bvh>(*it->second));
    }
    out.objects.push_back(LoadedObject{obj, it->second, bvhCache.at(key)});
  }
  return out;
}

Scene buildScene(const std::vector<RegistryEntry>& registry, const SceneParams& params) {
  if (registry.empty()) throw Error(ErrorCode::kInvalidArg, "buildScene: empty registry");
  if (params.count < 1) throw Error(ErrorCode::kInvalidArg, "buildScene: count must be positive");
  if (params.extent < 0.0 || params.clearance < 0.0 || params.maxTries < 1) {
    throw Error(ErrorCode::kInvalidArg, "buildScene: bad parameters");
  }

  std::vector<PreparedEntry> prepared;
  std::map<std::pair<std::string, double>, std::size_t> cache;
  prepared.reserve(registry.size());
  for (const RegistryEntry& entry : registry) {
    const auto key = std::make_pair(entry.meshPath, entry.scale);
    auto it = cache.find(key);
    if (it != cache.end()) {
      prepared.push_back(prepared[it->second]);
      prepared.back().entry = entry;
      continue;
    }
    PreparedEntry p;
    p.entry = entry;
    p.mesh = std::make_shared<TriangleMesh>(loadMesh(entry.meshPath, entry.scale));
    p.bvh = std::make_shared<Bvh>(*p.mesh);
    p.poses = stablePoses(*p.mesh);
    if (p.poses.empty()) {
      throw Error(ErrorCode::kDegenerate, "buildScene: no stable pose for " + entry.id);
    }
    cache.emplace(key, prepared.size());
    prepared.push_back(std::move(p));
  }

  Rng rng = Rng::stream(params.seed, "scene-build");
  Scene scene;
  std::vector<std::pair<std::size_t, RigidTransform>> placed;  // prepared index, pose
  for (int slot = 0; slot < params.count; ++slot) {
    for (int attempt = 0; attempt < params.maxTries; ++attempt) {
      const std::size_t pick = rng.uniformIndex(prepared.size());
      const PreparedEntry& p = prepared[pick];
      const RigidTransform& rest = p.poses[rng.uniformIndex(p.poses.size())];
      const double yaw = rng.uniform(0.0, 2.0 * M_PI);
      const double x = rng.uniform(-params.extent, params.extent);
      const double y = rng.uniform(-params.extent, params.extent);
      const RigidTransform pose =
          RigidTransform{Mat3::rotZ(yaw), Vec3{x, y, 0.0}} * rest;

      bool clear = true;
      for (const auto& [otherIdx, otherPose] : placed) {
        const RigidTransform rel = otherPose.inverse() * pose;
        const double d = Bvh::distanceBetween(*prepared[otherIdx].bvh, *p.bvh, rel,
                                              params.clearance);
        if (d < params.clearance) {
          clear = false;
          break;
        }
      }
      if (!clear) continue;

      placed.push_back({pick, pose});
      scene.objects.push_back(SceneObject{p.entry.id, p.entry.meshPath, p.entry.scale, pose});
      break;
    }
  }
  return scene;
}

RigidTransform lookAt(const Vec3& position, const Vec3& target) {
  const Vec3 forward = target - position;
  if (norm(forward) < 1e-12) throw Error(ErrorCode::kInvalidArg, "lookAt: target at position");
  const Vec3 z = normalized(forward);
  Vec3 x = cross(z, Vec3{0.0, 0.0, 1.0});
  if (norm(x) < 1e-9) x = cross(z, Vec3{0.0, 1.0, 0.0});
  x = normalized(x);
  const Vec3 y = cross(z, x);
  return RigidTransform{Mat3::fromCols(x, y, z), position};
}

Camera randomCamera(std::uint64_t seed, const CameraIntrinsics& intrinsics, double radius,
                    double elevationMin, double elevationMax) {
  Rng rng = Rng::stream(seed, "camera");
  const double azimuth = rng.uniform(0.0, 2.0 * M_PI);
  const double elevation = rng.uniform(elevationMin, elevationMax);
  const Vec3 position{radius * std::cos(elevation) * std::cos(azimuth),
                      radius * std::cos(elevation) * std::sin(azimuth),
                      radius * std::sin(elevation)};
  return Camera{intrinsics, lookAt(position, Vec3{0.0, 0.0, 0.0})};
}

DepthImage renderDepth(const LoadedScene& scene, const Camera& camera) {
  const CameraIntrinsics& intr = camera.intrinsics;
  if (intr.width < 1 || intr.height < 1 || intr.fx <= 0.0 || intr.fy <= 0.0) {
    throw Error(ErrorCode::kInvalidArg, "renderDepth: bad intrinsics");
  }
  DepthImage img;
  img.width = intr.width;
  img.height = intr.height;
  img.values.assign(static_cast<std::size_t>(intr.width) * intr.height,
                    std::numeric_limits<float>::infinity());

  struct LocalView {
    const Bvh* bvh;
    RigidTransform toLocal;
  };
  std::vector<LocalView> views;
  views.reserve(scene.objects.size());
  for (const LoadedObject& obj : scene.objects) {
    views.push_back({obj.bvh.get(), obj.object.pose.inverse()});
  }
  const Vec3 origin = camera.pose.t;

  parallelFor(static_cast<std::size_t>(intr.height), [&](std::size_t py) {
    for (int px = 0; px < intr.width; ++px) {
      Vec3 dirCam{(px - intr.cx) / intr.fx, (py - intr.cy) / intr.fy, 1.0};
      dirCam = normalized(dirCam);
      const Vec3 dir = camera.pose.rotate(dirCam);
      double best = std::numeric_limits<double>::infinity();
      for (const LocalView& view : views) {
        RayHit hit;
        if (view.bvh->rayCast(view.toLocal.apply(origin), view.toLocal.rotate(dir), &hit)) {
          best = std::min(best, hit.t);
        }
      }
      if (std::isfinite(best)) {
        img.values[py * intr.width + px] = static_cast<float>(best * dirCam.z);
      }
    }
  });
  return img;
}

Vec3 backProject(const CameraIntrinsics& intrinsics, int px, int py, double depth) {
  return Vec3{(px - intrinsics.cx) / intrinsics.fx * depth,
              (py - intrinsics.cy) / intrinsics.fy * depth, depth};
}

PointCloud depthToCloud(const DepthImage& depth, const CameraIntrinsics& intrinsics,
                        int targetPoints, std::uint64_t seed, int neighbors) {
  if (targetPoints < 1 || neighbors < 3) {
    throw Error(ErrorCode::kInvalidArg, "depthToCloud: bad parameters");
  }
  std::vector<Vec3> points;
  for (int py = 0; py < depth.height; ++py) {
    for (int px = 0; px < depth.width; ++px) {
      const float d = depth.at(px, py);
      if (std::isfinite(d)) points.push_back(backProject(intrinsics, px, py, d));
    }
  }

  if (points.size() > static_cast<std::size_t>(targetPoints)) {
    // Partial Fisher-Yates over pixel indices, then restore scan order.
    Rng rng = Rng::stream(seed, "cloud-subsample");
    std::vector<std::size_t> idx(points.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < static_cast<std::size_t>(targetPoints); ++i) {
      std::swap(idx[i], idx[i + rng.uniformIndex(idx.size() - i)]);
    }
    idx.resize(targetPoints);
    std::sort(idx.begin(), idx.end());
    std::vector<Vec3> picked;
    picked.reserve(idx.size());
    for (std::size_t i : idx) picked.push_back(points[i]);
    points = std::move(picked);
  }

  PointCloud cloud;
  cloud.resize(points.size());
  if (points.empty()) return cloud;
  const KdTree tree(points);
  const int k = std::min<int>(neighbors, static_cast<int>(points.size()));

  parallelFor(points.size(), [&](std::size_t i) {
    const auto near = tree.nearest(points[i], k);
    Vec3 mean{0.0, 0.0, 0.0};
    for (int j : near) mean = mean + points[j];
    mean = mean * (1.0 / static_cast<double>(near.size()));
    double cov[3][3] = {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    for (int j : near) {
      const Vec3 q = points[j] - mean;
      const double v[3] = {q.x, q.y, q.z};
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) cov[a][b] += v[a] * v[b];
      }
    }

    // Cyclic Jacobi eigensolver; the smallest eigenvalue's vector is the
    // surface normal.
    double vec[3][3] = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
    for (int sweep = 0; sweep < 32; ++sweep) {
      double off = std::abs(cov[0][1]) + std::abs(cov[0][2]) + std::abs(cov[1][2]);
      if (off < 1e-30) break;
      for (int p = 0; p < 2; ++p) {
        for (int q = p + 1; q < 3; ++q) {
          if (std::abs(cov[p][q]) < 1e-300) continue;
          const double theta = (cov[q][q] - cov[p][p]) / (2.0 * cov[p][q]);
          const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double s = t * c;
          for (int r = 0; r < 3; ++r) {
            const double arp = cov[r][p], arq = cov[r][q];
            cov[r][p] = c * arp - s * arq;
            cov[r][q] = s * arp + c * arq;
          }
          for (int r = 0; r < 3; ++r) {
            const double apr = cov[p][r], aqr = cov[q][r];
            cov[p][r] = c * apr - s * aqr;
            cov[q][r] = s * apr + c * aqr;
          }
          for (int r = 0; r < 3; ++r) {
            const double vrp = vec[r][p], vrq = vec[r][q];
            vec[r][p] = c * vrp - s * vrq;
            vec[r][q] = s * vrp + c * vrq;
          }
        }
      }
    }
    int minCol = 0;
    for (int c = 1; c < 3; ++c) {
      if (cov[c][c] < cov[minCol][minCol]) minCol = c;
    }
    Vec3 normal{vec[0][minCol], vec[1][minCol], vec[2][minCol]};
    const double len = norm(normal);
    normal = len > 1e-18 ? normal * (1.0 / len) : Vec3{0.0, 0.0, -1.0};
    if (dot(normal, points[i]) > 0.0) normal = normal * -1.0;
    cloud[i] = OrientedPoint{points[i], normal};
  });
  return cloud;
}

std::vector<GraspRecord> filterGrasps(const LoadedScene& scene, std::size_t objectIndex,
                                      const std::vector<GraspRecord>& worldRecords,
                                      const HandModel& hand, FilterCounts* counts) {
  if (objectIndex >= scene.objects.size()) {
    throw Error(ErrorCode::kInvalidArg, "filterGrasps: object index out of range");
  }
  FilterCounts local;
  local.total = static_cast<int>(worldRecords.size());

  static const double kRetreats[] = {0.0, 0.02, 0.04, 0.06, 0.08, 0.10};
  const double kTableClearance = 0.002;
  const double kObjectClearance = 0.002;

  std::vector<GraspRecord> kept;
  for (const GraspRecord& rec : worldRecords) {
    const Vec3 palmZ = rec.pose.rotate(Vec3{0.0, 0.0, 1.0});
    if (palmZ.z < 0.0) {
      ++local.removedInvalidPose;
      continue;
    }

    const std::vector<double> inner(rec.inner.begin(), rec.inner.end());
    bool collides = false;
    for (double s : kRetreats) {
      const RigidTransform pose{rec.pose.R, rec.pose.t + palmZ * s};
      const HandPosture posture = handPosture(hand, pose, rec.spread, inner);

      struct Body {
        const Bvh* bvh;
        const TriangleMesh* mesh;
        const RigidTransform* world;
      };
      std::vector<Body> bodies;
      bodies.push_back({hand.palmBvh.get(), &hand.palmMesh, &posture.palm});
      for (int f = 0; f < hand.fingerCount; ++f) {
        bodies.push_back({hand.linkInnerBvh.get(), &hand.linkInnerMesh, &posture.innerLink[f]});
        bodies.push_back({hand.linkOuterBvh.get(), &hand.linkOuterMesh, &posture.outerLink[f]});
      }

      for (const Body& body : bodies) {
        for (const Vec3& v : body.mesh->vertices) {
          if (body.world->apply(v).z < kTableClearance) {
            collides = true;
            break;
          }
        }
        if (collides) break;
        for (std::size_t o = 0; o < scene.objects.size(); ++o) {
          if (o == objectIndex) continue;
          const RigidTransform rel =
              scene.objects[o].object.pose.inverse() * (*body.world);
          const double d = Bvh::distanceBetween(*scene.objects[o].bvh, *body.bvh, rel,
                                                kObjectClearance);
          if (d < kObjectClearance) {
            collides = true;
            break;
          }
        }
        if (collides) break;
      }
      if (collides) break;

      // Fingertip spheres checked analytically.
      for (int f = 0; f < hand.fingerCount && !collides; ++f) {
        const Vec3 center = posture.fingertipCenter[f];
        if (center.z - hand.fingertipRadius < kTableClearance) {
          collides = true;
          break;
        }
        for (std::size_t o = 0; o < scene.objects.size(); ++o) {
          if (o == objectIndex) continue;
          const Vec3 local3 = scene.objects[o].object.pose.inverse().apply(center);
          const ClosestHit hit = scene.objects[o].bvh->closestPoint(local3);
          if (hit.distance < hand.fingertipRadius + kObjectClearance) {
            collides = true;
            break;
          }
        }
      }
      if (collides) break;
    }

    if (collides) {
      ++local.removedCollision;
      continue;
    }
    ++local.kept;
    kept.push_back(rec);
  }
  if (counts != nullptr) *counts = local;
  return kept;
}

}  // namespace cmg
