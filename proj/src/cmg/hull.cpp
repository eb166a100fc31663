/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#include "cmg/hull.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>

#include "cmg/error.hpp"

namespace cmg {
namespace {

using ZVec = std::vector<mpz_class>;

// Fraction-free determinant (Bareiss). Destroys its argument.
mpz_class detBareiss(std::vector<ZVec>& m) {
  int k = static_cast<int>(m.size());
  if (k == 0) return mpz_class(1);
  mpz_class denom = 1;
  int sign = 1;
  for (int col = 0; col + 1 < k; ++col) {
    int pivot = -1;
    for (int r = col; r < k; ++r)
      if (m[r][col] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) return mpz_class(0);
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      sign = -sign;
    }
    for (int r = col + 1; r < k; ++r) {
      for (int c = col + 1; c < k; ++c)
        m[r][c] = (m[col][col] * m[r][c] - m[r][col] * m[col][c]) / denom;
      m[r][col] = 0;
    }
    denom = m[col][col];
  }
  return sign > 0 ? m[k - 1][k - 1] : mpz_class(-m[k - 1][k - 1]);
}

// Rank of a set of integer row vectors, again fraction-free.
int rankBareiss(std::vector<ZVec> m) {
  int rows = static_cast<int>(m.size());
  if (rows == 0) return 0;
  int cols = static_cast<int>(m[0].size());
  int rank = 0;
  mpz_class denom = 1;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r)
      if (m[r][col] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(m[pivot], m[rank]);
    for (int r = rank + 1; r < rows; ++r) {
      for (int c = col + 1; c < cols; ++c)
        m[r][c] = (m[rank][col] * m[r][c] - m[r][col] * m[rank][c]) / denom;
      m[r][col] = 0;
    }
    denom = m[rank][col];
    ++rank;
  }
  return rank;
}

// Generalized cross product: the vector orthogonal to d-1 row vectors,
// components given by alternating-sign maximal minors.
ZVec generalizedCross(const std::vector<ZVec>& rows, int d) {
  ZVec a(d);
  for (int i = 0; i < d; ++i) {
    std::vector<ZVec> minor(d - 1, ZVec(d - 1));
    for (int r = 0; r < d - 1; ++r) {
      int cc = 0;
      for (int c = 0; c < d; ++c) {
        if (c == i) continue;
        minor[r][cc++] = rows[r][c];
      }
    }
    mpz_class det = detBareiss(minor);
    a[i] = (i % 2 == 0) ? det : mpz_class(-det);
  }
  return a;
}

struct EFacet {
  std::vector<int> verts;  // sorted indices into the deduped point list
  ZVec a;
  mpz_class b;
  bool alive = true;
};

mpz_class evalPlane(const ZVec& a, const mpz_class& b, const ZVec& p) {
  mpz_class e = -b;
  for (std::size_t i = 0; i < a.size(); ++i) e += a[i] * p[i];
  return e;
}

void computePlane(const std::vector<ZVec>& pts, const std::vector<int>& verts, int d, ZVec* a,
                  mpz_class* b) {
  std::vector<ZVec> rows(d - 1, ZVec(d));
  for (int j = 1; j < d; ++j)
    for (int c = 0; c < d; ++c) rows[j - 1][c] = pts[verts[j]][c] - pts[verts[0]][c];
  *a = generalizedCross(rows, d);
  *b = 0;
  for (int c = 0; c < d; ++c) *b += (*a)[c] * pts[verts[0]][c];
}

bool allZero(const ZVec& a) {
  for (const mpz_class& v : a)
    if (v != 0) return false;
  return true;
}

// Flips the plane so the interior reference (vertex sum of the initial
// simplex, times count) lies strictly on the negative side.
void orientOutward(const ZVec& interiorSum, int interiorCount, ZVec* a, mpz_class* b) {
  mpz_class e = evalPlane(*a, *b * interiorCount, interiorSum);
  // evalPlane computed a . sum - count*b which is count * (a . centroid - b).
  if (e == 0)
    throw Error(ErrorCode::kInternal, "convexHull: interior reference on a facet plane");
  if (e > 0) {
    for (mpz_class& v : *a) v = -v;
    *b = -*b;
  }
}

}  // namespace

ConvexHull convexHull(const std::vector<double>& coords, int n, int d, bool verify) {
  if (d < 2) throw Error(ErrorCode::kInvalidArg, "convexHull: dimension must be at least 2");
  if (n < 0 || coords.size() != static_cast<std::size_t>(n) * d)
    throw Error(ErrorCode::kInvalidArg, "convexHull: coordinate count mismatch");

  ConvexHull out;
  double maxAbs = 0.0;
  for (double c : coords) {
    if (!std::isfinite(c)) throw Error(ErrorCode::kInvalidArg, "convexHull: non-finite input");
    maxAbs = std::max(maxAbs, std::abs(c));
  }
  if (n < d + 1 || maxAbs == 0.0) {
    out.degenerate = true;
    return out;
  }

  // Snap to the integer lattice. 2^48 leaves plenty of headroom below the
  // 2^53 exact-integer limit of double.
  const double kGrid = 281474976710656.0;  // 2^48
  const double scale = maxAbs / kGrid;
  std::vector<ZVec> pts;
  std::vector<int> origIndex;
  {
    std::map<std::vector<std::int64_t>, int> seen;
    for (int i = 0; i < n; ++i) {
      std::vector<std::int64_t> q(d);
      for (int c = 0; c < d; ++c) q[c] = std::llround(coords[i * d + c] / maxAbs * kGrid);
      if (seen.emplace(q, i).second) {
        ZVec z(d);
        for (int c = 0; c < d; ++c) z[c] = mpz_class(static_cast<long>(q[c]));
        pts.push_back(std::move(z));
        origIndex.push_back(i);
      }
    }
  }
  int u = static_cast<int>(pts.size());
  if (u < d + 1) {
    out.degenerate = true;
    return out;
  }

  // Greedy affinely independent subset for the initial simplex.
  std::vector<int> simplex = {0};
  std::vector<ZVec> diffs;
  for (int i = 1; i < u && static_cast<int>(diffs.size()) < d; ++i) {
    ZVec v(d);
    for (int c = 0; c < d; ++c) v[c] = pts[i][c] - pts[0][c];
    std::vector<ZVec> trial = diffs;
    trial.push_back(v);
    if (rankBareiss(trial) == static_cast<int>(trial.size())) {
      diffs.push_back(std::move(v));
      simplex.push_back(i);
    }
  }
  if (static_cast<int>(simplex.size()) < d + 1) {
    out.degenerate = true;
    return out;
  }

  ZVec interiorSum(d, mpz_class(0));
  for (int idx : simplex)
    for (int c = 0; c < d; ++c) interiorSum[c] += pts[idx][c];
  const int interiorCount = d + 1;

  std::vector<EFacet> facets;
  for (int skip = 0; skip <= d; ++skip) {
    EFacet f;
    for (int k = 0; k <= d; ++k)
      if (k != skip) f.verts.push_back(simplex[k]);
    std::sort(f.verts.begin(), f.verts.end());
    computePlane(pts, f.verts, d, &f.a, &f.b);
    if (allZero(f.a)) throw Error(ErrorCode::kInternal, "convexHull: degenerate initial facet");
    orientOutward(interiorSum, interiorCount, &f.a, &f.b);
    facets.push_back(std::move(f));
  }

  std::vector<char> inSimplex(u, 0);
  for (int idx : simplex) inSimplex[idx] = 1;

  for (int i = 0; i < u; ++i) {
    if (inSimplex[i]) continue;
    std::vector<int> visible;
    for (std::size_t f = 0; f < facets.size(); ++f)
      if (facets[f].alive && evalPlane(facets[f].a, facets[f].b, pts[i]) > 0)
        visible.push_back(static_cast<int>(f));
    if (visible.empty()) continue;

    std::vector<char> isVisible(facets.size(), 0);
    for (int f : visible) isVisible[f] = 1;

    std::vector<EFacet> fresh;
    while (true) {
      std::map<std::vector<int>, int> ridgeCount;
      for (int f : visible) {
        const auto& verts = facets[f].verts;
        for (int skip = 0; skip < d; ++skip) {
          std::vector<int> ridge;
          for (int k = 0; k < d; ++k)
            if (k != skip) ridge.push_back(verts[k]);
          ++ridgeCount[ridge];
        }
      }
      fresh.clear();
      const std::vector<int>* absorbRidge = nullptr;
      for (const auto& [ridge, count] : ridgeCount) {
        if (count != 1) continue;
        EFacet f;
        f.verts = ridge;
        f.verts.push_back(i);
        std::sort(f.verts.begin(), f.verts.end());
        computePlane(pts, f.verts, d, &f.a, &f.b);
        if (allZero(f.a)) {
          absorbRidge = &ridge;
          break;
        }
        orientOutward(interiorSum, interiorCount, &f.a, &f.b);
        fresh.push_back(std::move(f));
      }
      if (absorbRidge == nullptr) break;
      // The new point is affinely dependent with this horizon ridge; fold the
      // ridge's invisible neighbor into the replaced set and retry.
      int neighbor = -1;
      for (std::size_t f = 0; f < facets.size() && neighbor < 0; ++f) {
        if (!facets[f].alive || isVisible[f]) continue;
        if (std::includes(facets[f].verts.begin(), facets[f].verts.end(), absorbRidge->begin(),
                          absorbRidge->end()))
          neighbor = static_cast<int>(f);
      }
      if (neighbor < 0)
        throw Error(ErrorCode::kInternal, "convexHull: missing neighbor for degenerate ridge");
      visible.push_back(neighbor);
      isVisible[neighbor] = 1;
    }

    for (int f : visible) facets[f].alive = false;
    for (EFacet& f : fresh) facets.push_back(std::move(f));
  }

  std::vector<const EFacet*> alive;
  for (const EFacet& f : facets)
    if (f.alive) alive.push_back(&f);

  if (verify) {
    for (int i = 0; i < u; ++i)
      for (const EFacet* f : alive)
        if (evalPlane(f->a, f->b, pts[i]) > 0)
          throw Error(ErrorCode::kInternal, "convexHull: verification failed, point outside");
    std::map<std::vector<int>, int> ridgeCount;
    for (const EFacet* f : alive)
      for (int skip = 0; skip < d; ++skip) {
        std::vector<int> ridge;
        for (int k = 0; k < d; ++k)
          if (k != skip) ridge.push_back(f->verts[k]);
        ++ridgeCount[ridge];
      }
    for (const auto& [ridge, count] : ridgeCount) {
      (void)ridge;
      if (count != 2)
        throw Error(ErrorCode::kInternal, "convexHull: verification failed, open ridge");
    }
  }

  // Map to original indices and emit in sorted order with plane groups keyed
  // on the gcd-reduced exact plane.
  struct Emitted {
    std::vector<int> verts;
    const EFacet* src;
  };
  std::vector<Emitted> emitted;
  emitted.reserve(alive.size());
  for (const EFacet* f : alive) {
    Emitted e;
    e.src = f;
    for (int v : f->verts) e.verts.push_back(origIndex[v]);
    std::sort(e.verts.begin(), e.verts.end());
    emitted.push_back(std::move(e));
  }
  std::sort(emitted.begin(), emitted.end(),
            [](const Emitted& x, const Emitted& y) { return x.verts < y.verts; });

  std::map<ZVec, int> groupByPlane;
  for (const Emitted& e : emitted) {
    mpz_class g = 0;
    for (const mpz_class& v : e.src->a) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.src->b.get_mpz_t());
    if (g == 0) g = 1;
    ZVec key(d + 1);
    for (int c = 0; c < d; ++c) key[c] = e.src->a[c] / g;
    key[d] = e.src->b / g;
    auto [it, fresh] = groupByPlane.emplace(key, static_cast<int>(groupByPlane.size()));
    (void)fresh;

    HullFacet hf;
    hf.vertices = e.verts;
    hf.planeGroup = it->second;
    mpz_class s2 = 0;
    for (const mpz_class& v : e.src->a) s2 += v * v;
    double invLen = 1.0 / std::sqrt(s2.get_d());
    hf.normal.resize(d);
    for (int c = 0; c < d; ++c) hf.normal[c] = e.src->a[c].get_d() * invLen;
    hf.offset = e.src->b.get_d() * invLen * scale;
    out.facets.push_back(std::move(hf));
  }
  return out;
}

double inradiusAtOrigin(const ConvexHull& hull) {
  if (hull.degenerate || hull.facets.empty()) return 0.0;
  double m = std::numeric_limits<double>::infinity();
  for (const HullFacet& f : hull.facets) m = std::min(m, f.offset);
  return std::max(0.0, m);
}

}  // namespace cmg
