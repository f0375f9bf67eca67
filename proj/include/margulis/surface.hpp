#pragma once

// Hyperideal triangle and holonomy of the two-holed cross surface, together
// with its Coxeter extension <R_X, R_Y, i0>.

#include <optional>

#include "margulis/isometry.hpp"
#include "margulis/minkowski.hpp"

namespace margulis {

/// d: distance from the common perpendicular m to p0; u1, u2: distances along
/// m to l_X and l_Y; theta: angle of l0 at p0.
struct TriangleParams {
  double d = 0;
  double u1 = 0;
  double u2 = 0;
  double theta = 0;

  /// Throws InvalidConfiguration unless side_vectors succeeds.
  static TriangleParams admissible(double d, double u1, double u2, double theta);
};

struct SideVectors {
  MinkVectord w1;
  MinkVectord w2;
  MinkVectord w0;
};

/// Which of the two Coxeter fundamental triangles: I is bounded by l_X, l_Y, l0;
/// II by l_X, i0 l_Y and the flipped diagonal l0'.
enum class Triangulation { I, II };

constexpr const char* to_string(Triangulation t) { return t == Triangulation::I ? "I" : "II"; }

struct ThetaInterval {
  double lo = 0;
  double hi = 0;  // may exceed pi when the interval wraps around the period

  double length() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }
  /// Representative of theta (mod pi) in [lo, lo + pi).
  double unwrap(double theta) const;
  bool contains(double theta) const;
};

struct HolonomyGroup {
  Triangulation type = Triangulation::I;
  TriangleParams params;  // theta is always the type-I angle
  double angle = 0;       // angle of this triangulation's third side
  SideVectors sides;
  MinkVectord p0;
  LinearIsometryd RX, RY, i0;
  LinearIsometryd X, Y, A, B;
  MinkVectord X0, Y0, A0, B0;
};

/// Max-entry residuals of each relation, relative to the sizes of the factors.
struct CoxeterResiduals {
  double involutions = 0;   // RX^2, RY^2, i0^2
  double x_relation = 0;    // X = RX i0
  double y_relation = 0;    // Y = i0 RY
  double a_product = 0;     // A = X Y
  double a_reflections = 0; // A = RX RY
  double b_relation = 0;    // B = Y^-1 X
  double b_reflections = 0; // B = RY i0 RX i0
  double i0_conj_x = 0;     // i0 X i0 = X^-1
  double i0_conj_y = 0;     // i0 Y i0 = Y^-1
  double b_xinv_y = 0;      // B X^-1 Y = 1

  double max() const;
};

/// Base point of H^2, the fixed point of i0.
inline MinkVectord origin_point() { return {0.0, 0.0, 1.0}; }

/// The uncanonicalized formulas: w1, the mirrored w2 and w0.
SideVectors raw_side_vectors(const TriangleParams& params);

/// Sign choice making the triple pairwise ultraparallel and consistently
/// oriented, if one exists. Sign patterns are tried in a fixed order.
std::optional<SideVectors> canonical_sides(const MinkVectord& w1, const MinkVectord& w2,
                                           const MinkVectord& w0);

SideVectors side_vectors(const TriangleParams& params);

/// Admissible theta for triangulation I (one period of length pi).
ThetaInterval theta_interval(double d, double u1, double u2);

/// Admissible angle of the flipped diagonal for triangulation II.
ThetaInterval flip_theta_interval(double d, double u1, double u2);

/// Angle at the same relative position of the other triangulation's interval.
double flip_angle(const TriangleParams& params);
double unflip_angle(double d, double u1, double u2, double flipped);

HolonomyGroup holonomy(const TriangleParams& params);

/// Swaps triangulation I and II (generators R_X, i0 R_Y i0, i0).
HolonomyGroup flip(const HolonomyGroup& g);

inline HolonomyGroup flipped_holonomy(const TriangleParams& params) { return flip(holonomy(params)); }

CoxeterResiduals coxeter_check(const HolonomyGroup& g);

}  // namespace margulis
