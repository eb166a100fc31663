/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#pragma once

#include <cstdint>
#include <cmath>
#include <string_view>

#include "cmg/vec.hpp"

namespace cmg {

// splitmix64 step. Small, fast, and fully reproducible across platforms,
// which std::mt19937 + std::normal_distribution are not (distribution
// implementations differ between standard libraries).
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d4a2ca495df95bull;
  return z ^ (z >> 31);
}

// FNV-1a, used to turn stream tags into seed perturbations.
inline std::uint64_t hash64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

// Deterministic generator. Independent streams are derived from a base seed
// plus a tag (string and/or counters), so parallel work items can draw from
// their own streams in a scheduling-independent order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // Decorrelate trivially related seeds (0, 1, 2, ...).
    splitmix64(state_);
    splitmix64(state_);
  }

  static Rng stream(std::uint64_t seed, std::string_view tag, std::uint64_t a = 0,
                    std::uint64_t b = 0) {
    // Absorb each component through a full splitmix round. Every round is a
    // bijection of the running state, so two distinct seeds can never yield
    // the same stream for a fixed tag and counters.
    std::uint64_t s = seed ^ hash64(tag);
    s = splitmix64(s);
    s += 0x9e3779b97f4a7c15ull * a;
    s = splitmix64(s);
    s += 0xbf58476d1ce4e5b9ull * b;
    s = splitmix64(s);
    return Rng(s);
  }

  std::uint64_t nextU64() { return splitmix64(state_); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(nextU64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n); n must be positive.
  std::uint64_t uniformIndex(std::uint64_t n) {
    // Rejection-free modulo is fine here: n is tiny relative to 2^64 in all
    // uses, so the bias is far below anything observable.
    return nextU64() % n;
  }

  // Standard normal via Box-Muller; one spare value is cached.
  double normal() {
    if (hasSpare_) {
      hasSpare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    hasSpare_ = true;
    return r * std::cos(a);
  }

  // Uniform direction on the unit sphere.
  Vec3 unitVector() {
    while (true) {
      Vec3 v{normal(), normal(), normal()};
      double n = norm(v);
      if (n > 1e-12) return v / n;
    }
  }

 private:
  std::uint64_t state_ = 0;
  double spare_ = 0.0;
  bool hasSpare_ = false;
};

}  // namespace cmg
