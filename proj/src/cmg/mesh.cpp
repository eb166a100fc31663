/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#include "cmg/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include "cmg/error.hpp"

namespace cmg {

double TriangleMesh::surfaceArea() const {
  double a = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) a += faceArea(t);
  return a;
}

double TriangleMesh::volume() const {
  double v = 0.0;
  for (const auto& tri : triangles) {
    const Vec3& a = vertices[tri[0]];
    const Vec3& b = vertices[tri[1]];
    const Vec3& c = vertices[tri[2]];
    v += dot(a, cross(b, c)) / 6.0;
  }
  return v;
}

Vec3 TriangleMesh::volumeCentroid() const {
  // Tetrahedra spanned by the origin and each face; the solid centroid is the
  // volume-weighted average of the tetrahedron centroids.
  double v = 0.0;
  Vec3 c{0, 0, 0};
  for (const auto& tri : triangles) {
    const Vec3& a = vertices[tri[0]];
    const Vec3& b = vertices[tri[1]];
    const Vec3& d = vertices[tri[2]];
    double vt = dot(a, cross(b, d)) / 6.0;
    v += vt;
    c += (a + b + d) * (vt / 4.0);
  }
  if (std::abs(v) < 1e-18)
    throw Error(ErrorCode::kDegenerate, "volumeCentroid: mesh encloses no volume");
  return c / v;
}

Vec3 TriangleMesh::vertexCentroid() const {
  if (vertices.empty())
    throw Error(ErrorCode::kDegenerate, "vertexCentroid: empty mesh");
  // Sum in sorted coordinate order so the result does not depend on how the
  // vertex list happens to be arranged; downstream quantities derived from
  // the centroid then survive vertex renumbering bit for bit.
  std::array<std::vector<double>, 3> coords;
  for (auto& c : coords) c.reserve(vertices.size());
  for (const Vec3& p : vertices) {
    coords[0].push_back(p.x);
    coords[1].push_back(p.y);
    coords[2].push_back(p.z);
  }
  Vec3 sum{0, 0, 0};
  for (int k = 0; k < 3; ++k) {
    std::sort(coords[k].begin(), coords[k].end());
    double s = 0.0;
    for (double v : coords[k]) s += v;
    (k == 0 ? sum.x : k == 1 ? sum.y : sum.z) = s;
  }
  return sum / static_cast<double>(vertices.size());
}

double TriangleMesh::maxVertexDistance(const Vec3& from) const {
  double best = 0.0;
  for (const Vec3& p : vertices) best = std::max(best, norm(p - from));
  return best;
}

void TriangleMesh::bounds(Vec3* lo, Vec3* hi) const {
  if (vertices.empty())
    throw Error(ErrorCode::kDegenerate, "bounds: empty mesh");
  *lo = *hi = vertices[0];
  for (const Vec3& p : vertices) {
    *lo = min3(*lo, p);
    *hi = max3(*hi, p);
  }
}

std::vector<Vec3> TriangleMesh::vertexNormals() const {
  std::vector<Vec3> acc(vertices.size(), Vec3{0, 0, 0});
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    Vec3 fc = faceCross(t);  // area-weighted by construction
    for (int k = 0; k < 3; ++k) acc[triangles[t][k]] += fc;
  }
  for (Vec3& n : acc) {
    double len = norm(n);
    n = len > 0.0 ? n / len : Vec3{0, 0, 1};
  }
  return acc;
}

void TriangleMesh::applyTransform(const RigidTransform& t) {
  for (Vec3& p : vertices) p = t.apply(p);
}

void TriangleMesh::applyScale(double s) {
  for (Vec3& p : vertices) p *= s;
}

bool TriangleMesh::isWatertight() const {
  if (triangles.empty()) return false;
  // Count directed edges; a closed orientable surface uses every undirected
  // edge exactly once in each direction.
  std::map<std::pair<int, int>, int> directed;
  for (const auto& tri : triangles) {
    for (int k = 0; k < 3; ++k) {
      int a = tri[k], b = tri[(k + 1) % 3];
      if (++directed[{a, b}] > 1) return false;
    }
  }
  for (const auto& [edge, count] : directed) {
    (void)count;
    if (directed.find({edge.second, edge.first}) == directed.end()) return false;
  }
  return true;
}

std::size_t TriangleMesh::dropDegenerateTriangles() {
  std::size_t before = triangles.size();
  std::vector<std::array<int, 3>> kept;
  kept.reserve(before);
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tri = triangles[t];
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;
    if (norm2(faceCross(t)) == 0.0) continue;
    kept.push_back(tri);
  }
  triangles = std::move(kept);
  return before - triangles.size();
}

namespace {

// Pulls the next content line, skipping blanks and '#' comments.
bool nextContentLine(std::istream& in, std::string* line) {
  while (std::getline(in, *line)) {
    std::size_t pos = line->find_first_not_of(" \t\r\n");
    if (pos == std::string::npos) continue;
    if ((*line)[pos] == '#') continue;
    return true;
  }
  return false;
}

void checkIndices(const TriangleMesh& mesh) {
  int n = static_cast<int>(mesh.vertices.size());
  for (const auto& tri : mesh.triangles)
    for (int idx : tri)
      if (idx < 0 || idx >= n)
        throw Error(ErrorCode::kParse, "mesh: triangle index out of range");
  for (const Vec3& p : mesh.vertices)
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
      throw Error(ErrorCode::kParse, "mesh: non-finite vertex coordinate");
}

}  // namespace

TriangleMesh loadOff(std::istream& in) {
  std::string line;
  if (!nextContentLine(in, &line)) throw Error(ErrorCode::kParse, "OFF: empty file");
  std::istringstream header(line);
  std::string magic;
  header >> magic;
  if (magic != "OFF") throw Error(ErrorCode::kParse, "OFF: missing OFF header");

  std::size_t nv = 0, nf = 0, ne = 0;
  // Counts may share the header line or occupy the next one.
  if (!(header >> nv >> nf >> ne)) {
    if (!nextContentLine(in, &line)) throw Error(ErrorCode::kParse, "OFF: missing counts");
    std::istringstream counts(line);
    if (!(counts >> nv >> nf >> ne)) throw Error(ErrorCode::kParse, "OFF: bad counts line");
  }

  TriangleMesh mesh;
  mesh.vertices.reserve(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    if (!nextContentLine(in, &line)) throw Error(ErrorCode::kParse, "OFF: truncated vertices");
    std::istringstream vs(line);
    Vec3 p;
    if (!(vs >> p.x >> p.y >> p.z)) throw Error(ErrorCode::kParse, "OFF: bad vertex line");
    mesh.vertices.push_back(p);
  }
  for (std::size_t i = 0; i < nf; ++i) {
    if (!nextContentLine(in, &line)) throw Error(ErrorCode::kParse, "OFF: truncated faces");
    std::istringstream fs(line);
    std::size_t count = 0;
    if (!(fs >> count) || count < 3) throw Error(ErrorCode::kParse, "OFF: bad face line");
    std::vector<int> poly(count);
    for (std::size_t k = 0; k < count; ++k)
      if (!(fs >> poly[k])) throw Error(ErrorCode::kParse, "OFF: bad face index");
    for (std::size_t k = 1; k + 1 < count; ++k)
      mesh.triangles.push_back({poly[0], poly[k], poly[k + 1]});
  }
  checkIndices(mesh);
  return mesh;
}

TriangleMesh loadObj(std::istream& in) {
  TriangleMesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x >> p.y >> p.z)) throw Error(ErrorCode::kParse, "OBJ: bad vertex line");
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string vert;
      while (ls >> vert) {
        // "i", "i/t", "i/t/n", "i//n" all start with the vertex index;
        // negative indices count from the end.
        std::size_t slash = vert.find('/');
        std::string head = slash == std::string::npos ? vert : vert.substr(0, slash);
        long idx = 0;
        try {
          idx = std::stol(head);
        } catch (const std::exception&) {
          throw Error(ErrorCode::kParse, "OBJ: bad face index '" + vert + "'");
        }
        long n = static_cast<long>(mesh.vertices.size());
        long resolved = idx > 0 ? idx - 1 : n + idx;
        if (resolved < 0 || resolved >= n)
          throw Error(ErrorCode::kParse, "OBJ: face index out of range");
        poly.push_back(static_cast<int>(resolved));
      }
      if (poly.size() < 3) throw Error(ErrorCode::kParse, "OBJ: face with fewer than 3 vertices");
      for (std::size_t k = 1; k + 1 < poly.size(); ++k)
        mesh.triangles.push_back({poly[0], poly[k], poly[k + 1]});
    }
    // Other tags (vn, vt, usemtl, ...) are ignored.
  }
  checkIndices(mesh);
  return mesh;
}

TriangleMesh loadMesh(const std::string& path, double scale) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open mesh file: " + path);
  std::size_t dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  TriangleMesh mesh;
  if (ext == "off")
    mesh = loadOff(in);
  else if (ext == "obj")
    mesh = loadObj(in);
  else
    throw Error(ErrorCode::kInvalidArg, "unsupported mesh extension: " + path);
  if (scale <= 0.0) throw Error(ErrorCode::kInvalidArg, "mesh scale must be positive");
  if (scale != 1.0) mesh.applyScale(scale);
  mesh.dropDegenerateTriangles();
  return mesh;
}

void saveOff(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write mesh file: " + path);
  out << "OFF\n" << mesh.vertices.size() << " " << mesh.triangles.size() << " 0\n";
  char buf[128];
  for (const Vec3& p : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p.x, p.y, p.z);
    out << buf;
  }
  for (const auto& tri : mesh.triangles)
    out << "3 " << tri[0] << " " << tri[1] << " " << tri[2] << "\n";
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

TriangleMesh makeBox(const Vec3& lo, const Vec3& hi) {
  TriangleMesh m;
  m.vertices = {
      {lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {lo.x, hi.y, lo.z},
      {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z},
  };
  m.triangles = {
      {0, 2, 1}, {0, 3, 2},  // bottom (z = lo.z), normal -z
      {4, 5, 6}, {4, 6, 7},  // top, normal +z
      {0, 1, 5}, {0, 5, 4},  // y = lo.y, normal -y
      {2, 3, 7}, {2, 7, 6},  // y = hi.y, normal +y
      {0, 4, 7}, {0, 7, 3},  // x = lo.x, normal -x
      {1, 2, 6}, {1, 6, 5},  // x = hi.x, normal +x
  };
  return m;
}

TriangleMesh makeIcosphere(double radius, int subdivisions) {
  if (radius <= 0.0) throw Error(ErrorCode::kInvalidArg, "icosphere radius must be positive");
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh m;
  m.vertices = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
  };
  m.triangles = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
  };
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto midOf = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      int idx = static_cast<int>(m.vertices.size());
      m.vertices.push_back((m.vertices[a] + m.vertices[b]) * 0.5);
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(m.triangles.size() * 4);
    for (const auto& tri : m.triangles) {
      int ab = midOf(tri[0], tri[1]);
      int bc = midOf(tri[1], tri[2]);
      int ca = midOf(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.triangles = std::move(next);
  }
  for (Vec3& p : m.vertices) p = normalized(p) * radius;
  return m;
}

TriangleMesh makeCylinder(double radius, double height, int segments) {
  if (radius <= 0.0 || height <= 0.0 || segments < 3)
    throw Error(ErrorCode::kInvalidArg, "bad cylinder parameters");
  TriangleMesh m;
  double hz = height / 2.0;
  for (int ring = 0; ring < 2; ++ring) {
    double z = ring == 0 ? -hz : hz;
    for (int i = 0; i < segments; ++i) {
      double a = 2.0 * M_PI * i / segments;
      m.vertices.push_back({radius * std::cos(a), radius * std::sin(a), z});
    }
  }
  int bottomCenter = static_cast<int>(m.vertices.size());
  m.vertices.push_back({0, 0, -hz});
  int topCenter = bottomCenter + 1;
  m.vertices.push_back({0, 0, hz});
  for (int i = 0; i < segments; ++i) {
    int j = (i + 1) % segments;
    int b0 = i, b1 = j, t0 = segments + i, t1 = segments + j;
    m.triangles.push_back({b0, t1, t0});  // side, outward
    m.triangles.push_back({b0, b1, t1});
    m.triangles.push_back({bottomCenter, b1, b0});  // bottom cap, normal -z
    m.triangles.push_back({topCenter, t0, t1});     // top cap, normal +z
  }
  return m;
}

Vec3 closestPointOnTriangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Ericson, Real-Time Collision Detection, 5.1.5.
  Vec3 ab = b - a, ac = c - a, ap = p - a;
  double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  Vec3 bp = p - b;
  double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    double denom = d1 - d3;
    double v = denom > 0.0 ? d1 / denom : 0.0;
    return a + ab * v;
  }

  Vec3 cp = p - c;
  double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    double denom = d2 - d6;
    double w = denom > 0.0 ? d2 / denom : 0.0;
    return a + ac * w;
  }

  double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    double denom = (d4 - d3) + (d5 - d6);
    double w = denom > 0.0 ? (d4 - d3) / denom : 0.0;
    return b + (c - b) * w;
  }

  double denom = va + vb + vc;
  if (denom <= 0.0) {
    // Degenerate triangle; fall back to the nearest vertex.
    double da = norm2(p - a), db = norm2(p - b), dc = norm2(p - c);
    if (da <= db && da <= dc) return a;
    return db <= dc ? b : c;
  }
  double v = vb / denom, w = vc / denom;
  return a + ab * v + ac * w;
}

namespace {

struct VoxelKey {
  std::int64_t x, y, z;
  bool operator<(const VoxelKey& o) const {
    if (x != o.x) return x < o.x;
    if (y != o.y) return y < o.y;
    return z < o.z;
  }
  bool operator==(const VoxelKey& o) const { return x == o.x && y == o.y && z == o.z; }
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t v : {k.x, k.y, k.z}) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

std::int64_t voxelIndex(double coord, double lo, double voxel) {
  return static_cast<std::int64_t>(std::floor((coord - lo) / voxel));
}

// Clips a convex polygon against axis-aligned half-space coord <= bound
// (side = +1) or coord >= bound (side = -1).
void clipAxis(std::vector<Vec3>* poly, int axis, double bound, int side) {
  std::vector<Vec3> out;
  out.reserve(poly->size() + 2);
  std::size_t n = poly->size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& cur = (*poly)[i];
    const Vec3& nxt = (*poly)[(i + 1) % n];
    double dc = side * (bound - cur[axis]);
    double dn = side * (bound - nxt[axis]);
    bool inCur = dc >= 0.0, inNxt = dn >= 0.0;
    if (inCur) out.push_back(cur);
    if (inCur != inNxt) {
      double t = dc / (dc - dn);
      out.push_back(cur + (nxt - cur) * t);
    }
  }
  *poly = std::move(out);
}

struct VoxelCandidate {
  double dist2 = std::numeric_limits<double>::infinity();
  Vec3 point;
  Vec3 normal;

  bool betterThan(const VoxelCandidate& o) const {
    if (dist2 != o.dist2) return dist2 < o.dist2;
    if (!(point == o.point)) return lexLess(point, o.point);
    return lexLess(normal, o.normal);
  }
};

}  // namespace

std::vector<OrientedPoint> voxelDownsample(const TriangleMesh& mesh, double voxel) {
  if (voxel <= 0.0) throw Error(ErrorCode::kInvalidArg, "voxel size must be positive");
  if (mesh.empty()) return {};
  Vec3 lo, hi;
  mesh.bounds(&lo, &hi);

  std::unordered_map<VoxelKey, VoxelCandidate, VoxelKeyHash> best;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Vec3& a = mesh.triVertex(t, 0);
    const Vec3& b = mesh.triVertex(t, 1);
    const Vec3& c = mesh.triVertex(t, 2);
    Vec3 n = mesh.faceNormal(t);
    Vec3 tlo = min3(a, min3(b, c)), thi = max3(a, max3(b, c));
    std::int64_t ix0 = voxelIndex(tlo.x, lo.x, voxel), ix1 = voxelIndex(thi.x, lo.x, voxel);
    std::int64_t iy0 = voxelIndex(tlo.y, lo.y, voxel), iy1 = voxelIndex(thi.y, lo.y, voxel);
    std::int64_t iz0 = voxelIndex(tlo.z, lo.z, voxel), iz1 = voxelIndex(thi.z, lo.z, voxel);
    for (std::int64_t ix = ix0; ix <= ix1; ++ix) {
      for (std::int64_t iy = iy0; iy <= iy1; ++iy) {
        for (std::int64_t iz = iz0; iz <= iz1; ++iz) {
          Vec3 vlo{lo.x + ix * voxel, lo.y + iy * voxel, lo.z + iz * voxel};
          Vec3 vhi{vlo.x + voxel, vlo.y + voxel, vlo.z + voxel};
          std::vector<Vec3> poly = {a, b, c};
          for (int axis = 0; axis < 3 && !poly.empty(); ++axis) {
            clipAxis(&poly, axis, vlo[axis], -1);
            if (poly.empty()) break;
            clipAxis(&poly, axis, vhi[axis], +1);
          }
          if (poly.empty()) continue;
          // A piece lying entirely on a max face belongs to the neighboring
          // voxel under the half-open convention.
          bool owned = true;
          for (int axis = 0; axis < 3 && owned; ++axis) {
            bool allOnMax = true;
            for (const Vec3& q : poly)
              if (q[axis] < vhi[axis]) {
                allOnMax = false;
                break;
              }
            if (allOnMax) owned = false;
          }
          if (!owned) continue;

          Vec3 center = (vlo + vhi) * 0.5;
          VoxelCandidate cand;
          auto consider = [&](const Vec3& q) {
            VoxelCandidate sub{norm2(q - center), q, n};
            if (sub.betterThan(cand)) cand = sub;
          };
          if (poly.size() == 1) {
            consider(poly[0]);
          } else if (poly.size() == 2) {
            consider(closestPointOnTriangle(center, poly[0], poly[1], poly[1]));
          } else {
            for (std::size_t k = 1; k + 1 < poly.size(); ++k)
              consider(closestPointOnTriangle(center, poly[0], poly[k], poly[k + 1]));
          }
          VoxelKey key{ix, iy, iz};
          auto it = best.find(key);
          if (it == best.end())
            best.emplace(key, cand);
          else if (cand.betterThan(it->second))
            it->second = cand;
        }
      }
    }
  }

  std::vector<std::pair<VoxelKey, VoxelCandidate>> ordered(best.begin(), best.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<OrientedPoint> out;
  out.reserve(ordered.size());
  for (const auto& [key, cand] : ordered) {
    (void)key;
    out.push_back({cand.point, cand.normal});
  }
  return out;
}

namespace {

// Separating-axis triangle versus axis-aligned box test, box centered at the
// origin with half extents h. Closed-box semantics: a tangential touch counts
// as overlap.
bool triBoxOverlap(const Vec3& h, const Vec3& v0, const Vec3& v1, const Vec3& v2) {
  auto separates = [&](const Vec3& axis) {
    double p0 = dot(axis, v0), p1 = dot(axis, v1), p2 = dot(axis, v2);
    double r = h.x * std::abs(axis.x) + h.y * std::abs(axis.y) + h.z * std::abs(axis.z);
    return std::min({p0, p1, p2}) > r || std::max({p0, p1, p2}) < -r;
  };
  Vec3 tlo = min3(v0, min3(v1, v2)), thi = max3(v0, max3(v1, v2));
  if (tlo.x > h.x || thi.x < -h.x) return false;
  if (tlo.y > h.y || thi.y < -h.y) return false;
  if (tlo.z > h.z || thi.z < -h.z) return false;
  Vec3 e0 = v1 - v0, e1 = v2 - v1, e2 = v0 - v2;
  for (const Vec3& e : {e0, e1, e2}) {
    if (separates({0.0, -e.z, e.y})) return false;
    if (separates({e.z, 0.0, -e.x})) return false;
    if (separates({-e.y, e.x, 0.0})) return false;
  }
  return !separates(cross(e0, e1));
}

}  // namespace

std::size_t voxelOccupancyBruteForce(const TriangleMesh& mesh, double voxel) {
  if (voxel <= 0.0) throw Error(ErrorCode::kInvalidArg, "voxel size must be positive");
  if (mesh.empty()) return 0;
  Vec3 lo, hi;
  mesh.bounds(&lo, &hi);
  // Rasterize each triangle over the cells its bounding box reaches. Work in
  // coordinates relative to the grid anchor so faces flush with the bounding
  // box minimum land exactly on the cell boundary; the closed-box test then
  // counts them for the layer the half-open grid assigns them to.
  const Vec3 half{voxel * 0.5, voxel * 0.5, voxel * 0.5};
  std::unordered_map<VoxelKey, char, VoxelKeyHash> occupied;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    Vec3 a = mesh.triVertex(t, 0) - lo, b = mesh.triVertex(t, 1) - lo,
         c = mesh.triVertex(t, 2) - lo;
    Vec3 tlo = min3(a, min3(b, c)), thi = max3(a, max3(b, c));
    VoxelKey klo{voxelIndex(tlo.x, 0.0, voxel), voxelIndex(tlo.y, 0.0, voxel),
                 voxelIndex(tlo.z, 0.0, voxel)};
    VoxelKey khi{voxelIndex(thi.x, 0.0, voxel), voxelIndex(thi.y, 0.0, voxel),
                 voxelIndex(thi.z, 0.0, voxel)};
    for (std::int64_t ix = klo.x; ix <= khi.x; ++ix)
      for (std::int64_t iy = klo.y; iy <= khi.y; ++iy)
        for (std::int64_t iz = klo.z; iz <= khi.z; ++iz) {
          VoxelKey key{ix, iy, iz};
          if (occupied.count(key)) continue;
          Vec3 center{(ix + 0.5) * voxel, (iy + 0.5) * voxel, (iz + 0.5) * voxel};
          if (triBoxOverlap(half, a - center, b - center, c - center)) occupied[key] = 1;
        }
  }
  return occupied.size();
}

}  // namespace cmg
