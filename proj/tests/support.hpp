#pragma once

// Shared helpers for the test binaries: random draws and independent oracles.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "margulis/surface.hpp"

namespace test {

using margulis::MinkVectord;
using margulis::Matrix3d;

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(20260101);
  return engine;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline MinkVectord random_vector(double scale = 3.0) {
  return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)};
}

inline MinkVectord random_spacelike() {
  for (;;) {
    MinkVectord v = random_vector();
    if (v(0) * v(0) + v(1) * v(1) - v(2) * v(2) > 0.1) return v;
  }
}

/// Parameters inside configuration I, theta away from the interval ends.
inline margulis::TriangleParams random_params(std::mt19937_64& engine = rng()) {
  std::uniform_real_distribution<double> d_dist(1.0, 3.0), u_dist(0.2, 1.2), t_dist(0.1, 0.9);
  for (;;) {
    const double d = d_dist(engine), u1 = u_dist(engine), u2 = u_dist(engine);
    try {
      const margulis::ThetaInterval iv = margulis::theta_interval(d, u1, u2);
      return {d, u1, u2, iv.lo + t_dist(engine) * iv.length()};
    } catch (const margulis::Error&) {
    }
  }
}

/// The admissible parameters used for frozen values.
inline margulis::TriangleParams wide_params() { return {1.5, 0.7, 0.9, 1.47175}; }

/// Cofactor expansion along the first row.
inline double leibniz_det(const MinkVectord& a, const MinkVectord& b, const MinkVectord& c) {
  return a(0) * (b(1) * c(2) - b(2) * c(1)) - b(0) * (a(1) * c(2) - a(2) * c(1)) + c(0) * (a(1) * b(2) - a(2) * b(1));
}

inline double minkowski(const MinkVectord& a, const MinkVectord& b) { return a(0) * b(0) + a(1) * b(1) - a(2) * b(2); }

/// Null directions (cos a, sin a, 1) orthogonal to w, found by scanning a.
inline std::vector<MinkVectord> scanned_null_directions(const MinkVectord& w) {
  const auto f = [&](double a) { return std::cos(a) * w(0) + std::sin(a) * w(1) - w(2); };
  std::vector<MinkVectord> roots;
  const int n = 4000;
  const double step = 2 * std::numbers::pi / n;
  for (int k = 0; k < n; ++k) {
    double lo = k * step, hi = (k + 1) * step;
    if (f(lo) == 0) {
      roots.emplace_back(std::cos(lo), std::sin(lo), 1.0);
      continue;
    }
    if (f(lo) * f(hi) >= 0) continue;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (f(lo) * f(mid) > 0 ? lo : hi) = mid;
    }
    roots.emplace_back(std::cos(lo), std::sin(lo), 1.0);
  }
  return roots;
}

/// v -> -v + 2 (v.u)/(u.u) u evaluated column by column.
inline Matrix3d spine_by_columns(const MinkVectord& u) {
  Matrix3d m;
  for (int k = 0; k < 3; ++k) {
    const MinkVectord e = MinkVectord::Unit(k);
    m.col(k) = -e + 2 * minkowski(e, u) / minkowski(u, u) * u;
  }
  return m;
}

}  // namespace test
