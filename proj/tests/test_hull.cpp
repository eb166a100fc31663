/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "cmg/hull.hpp"
#include "cmg/mesh.hpp"
#include "cmg/rng.hpp"

using namespace cmg;

namespace {

int planeGroupCount(const ConvexHull& hull) {
  std::set<int> groups;
  for (const HullFacet& f : hull.facets) groups.insert(f.planeGroup);
  return static_cast<int>(groups.size());
}

// Euler characteristic of a simplicial 3-polytope boundary: V - E + F = 2.
// Each edge of a simplicial complex over a convex surface is shared by
// exactly two facets, so E = 3F / 2.
void checkEuler3(const ConvexHull& hull) {
  std::set<int> verts;
  std::set<std::pair<int, int>> edges;
  for (const HullFacet& f : hull.facets) {
    REQUIRE(f.vertices.size() == 3);
    for (int v : f.vertices) verts.insert(v);
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        edges.insert({f.vertices[i], f.vertices[j]});
  }
  CHECK(3 * hull.facets.size() == 2 * edges.size());
  CHECK(static_cast<long>(verts.size()) - static_cast<long>(edges.size()) +
            static_cast<long>(hull.facets.size()) ==
        2);
}

// Every input point must lie on or inside every facet plane. The lattice
// snap perturbs coordinates by at most 2^-48 of the largest magnitude, so a
// 1e-9 slack is generous for unit-scale inputs.
void checkContainment(const ConvexHull& hull, const std::vector<double>& coords, int n, int d) {
  for (const HullFacet& f : hull.facets) {
    for (int p = 0; p < n; ++p) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += f.normal[k] * coords[p * d + k];
      CHECK(s <= f.offset + 1e-9);
    }
  }
}

std::vector<double> flatten(const std::vector<Vec3>& pts) {
  std::vector<double> out;
  out.reserve(pts.size() * 3);
  for (const Vec3& p : pts) {
    out.push_back(p.x);
    out.push_back(p.y);
    out.push_back(p.z);
  }
  return out;
}

}  // namespace

TEST_CASE("cube hull has twelve facets in six plane groups") {
  std::vector<double> coords;
  for (int i = 0; i < 8; ++i) {
    coords.push_back((i & 1) ? 0.5 : -0.5);
    coords.push_back((i & 2) ? 0.5 : -0.5);
    coords.push_back((i & 4) ? 0.5 : -0.5);
  }
  ConvexHull hull = convexHull(coords, 8, 3, true);
  REQUIRE_FALSE(hull.degenerate);
  CHECK(hull.facets.size() == 12);
  CHECK(planeGroupCount(hull) == 6);
  CHECK(inradiusAtOrigin(hull) == doctest::Approx(0.5).epsilon(1e-12));
  checkEuler3(hull);
  checkContainment(hull, coords, 8, 3);
  for (const HullFacet& f : hull.facets) {
    // Axis-aligned planes at distance one half.
    double maxAbs = 0.0, sumAbs = 0.0;
    for (double c : f.normal) {
      maxAbs = std::max(maxAbs, std::abs(c));
      sumAbs += std::abs(c);
    }
    CHECK(maxAbs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sumAbs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.offset == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("cross polytope hulls recover the analytic inradius") {
  // +-e_i in dimension d: every orthant contributes one facet with normal
  // (+-1, ..., +-1)/sqrt(d) at offset 1/sqrt(d).
  for (int d : {3, 6}) {
    std::vector<double> coords(2 * d * d, 0.0);
    for (int i = 0; i < d; ++i) {
      coords[(2 * i) * d + i] = 1.0;
      coords[(2 * i + 1) * d + i] = -1.0;
    }
    ConvexHull hull = convexHull(coords, 2 * d, d, true);
    REQUIRE_FALSE(hull.degenerate);
    CHECK(hull.facets.size() == (std::size_t{1} << d));
    CHECK(planeGroupCount(hull) == (1 << d));
    CHECK(inradiusAtOrigin(hull) == doctest::Approx(1.0 / std::sqrt(d)).epsilon(1e-12));
    for (const HullFacet& f : hull.facets)
      for (double c : f.normal)
        CHECK(std::abs(c) == doctest::Approx(1.0 / std::sqrt(d)).epsilon(1e-12));
  }
}

TEST_CASE("cylinder vertices group into twenty six planes") {
  TriangleMesh cyl = makeCylinder(0.025, 0.08, 24);
  std::vector<double> coords = flatten(cyl.vertices);
  int n = static_cast<int>(cyl.vertices.size());
  ConvexHull hull = convexHull(coords, n, 3, true);
  REQUIRE_FALSE(hull.degenerate);
  // 24 side rectangles and 2 caps. Every planar k-gon face splits into k - 2
  // simplicial facets no matter which diagonals the construction picks, so
  // the facet count is 24 * 2 + 2 * 22.
  CHECK(planeGroupCount(hull) == 26);
  CHECK(hull.facets.size() == 92);
  checkEuler3(hull);
  checkContainment(hull, coords, n, 3);
}

TEST_CASE("degenerate inputs are reported, not misread") {
  // Too few points to span the dimension.
  std::vector<double> tri = {0, 0, 0, 1, 0, 0, 0, 1, 0};
  CHECK(convexHull(tri, 3, 3).degenerate);

  // All points identical, including the all-zero case that defeats scaling.
  std::vector<double> same(4 * 3, 0.0);
  CHECK(convexHull(same, 4, 3).degenerate);
  std::vector<double> rep(5 * 3, 0.7);
  CHECK(convexHull(rep, 5, 3).degenerate);

  // Plenty of points, all coplanar. The plane is axis aligned because the
  // lattice snap preserves equal coordinates exactly, while a tilted plane
  // may legitimately come out full rank after the documented 2^-49
  // perturbation.
  std::vector<double> plane;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      plane.push_back(i * 0.23 + j * 0.011);
      plane.push_back(j * 0.31 - i * 0.07);
      plane.push_back(0.3);
    }
  CHECK(convexHull(plane, 16, 3).degenerate);

  ConvexHull d = convexHull(tri, 3, 3);
  CHECK(d.facets.empty());
  CHECK(inradiusAtOrigin(d) == 0.0);
}

TEST_CASE("inradius clamps when the origin leaves the hull") {
  std::vector<double> coords;
  for (int i = 0; i < 8; ++i) {
    coords.push_back(((i & 1) ? 0.5 : -0.5) + 2.0);
    coords.push_back((i & 2) ? 0.5 : -0.5);
    coords.push_back((i & 4) ? 0.5 : -0.5);
  }
  ConvexHull hull = convexHull(coords, 8, 3, true);
  REQUIRE_FALSE(hull.degenerate);
  CHECK(inradiusAtOrigin(hull) == 0.0);

  // On the boundary counts as not strictly interior.
  std::vector<double> touch;
  for (int i = 0; i < 8; ++i) {
    touch.push_back(((i & 1) ? 0.5 : -0.5) + 0.5);
    touch.push_back((i & 2) ? 0.5 : -0.5);
    touch.push_back((i & 4) ? 0.5 : -0.5);
  }
  CHECK(inradiusAtOrigin(convexHull(touch, 8, 3)) == 0.0);
}

TEST_CASE("duplicate points collapse to the first occurrence") {
  std::vector<double> coords;
  for (int rep = 0; rep < 2; ++rep)
    for (int i = 0; i < 8; ++i) {
      coords.push_back((i & 1) ? 1.0 : -1.0);
      coords.push_back((i & 2) ? 1.0 : -1.0);
      coords.push_back((i & 4) ? 1.0 : -1.0);
    }
  ConvexHull hull = convexHull(coords, 16, 3, true);
  CHECK(hull.facets.size() == 12);
  for (const HullFacet& f : hull.facets)
    for (int v : f.vertices) CHECK(v < 8);
}

TEST_CASE("interior points never appear in facets") {
  Rng rng(31);
  std::vector<double> coords;
  for (int i = 0; i < 8; ++i) {
    coords.push_back((i & 1) ? 1.0 : -1.0);
    coords.push_back((i & 2) ? 1.0 : -1.0);
    coords.push_back((i & 4) ? 1.0 : -1.0);
  }
  for (int i = 0; i < 40; ++i)
    for (int k = 0; k < 3; ++k) coords.push_back(rng.uniform(-0.9, 0.9));
  ConvexHull hull = convexHull(coords, 48, 3, true);
  CHECK(hull.facets.size() == 12);
  for (const HullFacet& f : hull.facets)
    for (int v : f.vertices) CHECK(v < 8);
}

TEST_CASE("random hulls verify, close up, and contain their input") {
  for (unsigned seed : {1u, 2u, 3u, 4u}) {
    Rng rng(seed);
    int n = 30 + static_cast<int>(rng.uniformIndex(30));
    std::vector<double> coords;
    for (int i = 0; i < n; ++i) {
      Vec3 p = rng.unitVector() * rng.uniform(0.2, 1.0);
      coords.push_back(p.x);
      coords.push_back(p.y);
      coords.push_back(p.z);
    }
    ConvexHull hull = convexHull(coords, n, 3, true);
    REQUIRE_FALSE(hull.degenerate);
    checkEuler3(hull);
    checkContainment(hull, coords, n, 3);
    for (const HullFacet& f : hull.facets) {
      double len2 = 0.0;
      for (double c : f.normal) len2 += c * c;
      CHECK(std::sqrt(len2) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::is_sorted(f.vertices.begin(), f.vertices.end()));
    }
  }
}

TEST_CASE("facet combinatorics ignore input order") {
  Rng rng(77);
  int n = 40;
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i) pts.push_back(rng.unitVector() * rng.uniform(0.3, 1.0));
  ConvexHull base = convexHull(flatten(pts), n, 3);

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937 gen(5);
  for (int trial = 0; trial < 3; ++trial) {
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<Vec3> shuffled(n);
    for (int i = 0; i < n; ++i) shuffled[perm[i]] = pts[i];
    ConvexHull moved = convexHull(flatten(shuffled), n, 3);

    // Map facet vertex sets back through the permutation and compare as sets.
    auto canon = [](const ConvexHull& h, const std::vector<int>* mapBack) {
      std::set<std::vector<int>> out;
      for (const HullFacet& f : h.facets) {
        std::vector<int> v = f.vertices;
        if (mapBack)
          for (int& x : v) x = (*mapBack)[x];
        std::sort(v.begin(), v.end());
        out.insert(v);
      }
      return out;
    };
    std::vector<int> inverse(n);
    for (int i = 0; i < n; ++i) inverse[perm[i]] = i;
    CHECK(canon(base, nullptr) == canon(moved, &inverse));
  }
}

TEST_CASE("six dimensional random hulls verify") {
  // Small point counts keep the subset enumeration affordable while still
  // exercising the general-dimension path end to end.
  for (unsigned seed : {11u, 12u}) {
    Rng rng(seed);
    int n = 10;
    std::vector<double> coords;
    for (int i = 0; i < n * 6; ++i) coords.push_back(rng.uniform(-1.0, 1.0));
    ConvexHull hull = convexHull(coords, n, 6, true);
    if (hull.degenerate) continue;
    checkContainment(hull, coords, n, 6);
    for (const HullFacet& f : hull.facets) REQUIRE(f.vertices.size() == 6);
  }
}
