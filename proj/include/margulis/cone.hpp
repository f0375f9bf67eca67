#pragma once

// The linear map M from stem coefficients to H^1 coordinates (aX, aY, aA)
// and the polygons it cuts out of the projective plane.

#include <string>
#include <vector>

#include "margulis/deform.hpp"
#include "margulis/surface.hpp"

namespace margulis {

using Matrix32d = Eigen::Matrix<double, 3, 2>;
using Matrix36d = Eigen::Matrix<double, 3, 6>;
using RowVector6d = Eigen::Matrix<double, 1, 6>;

/// Blocks of M for one triangulation. Rows are the invariants of that
/// triangulation's own X, Y, A; `complement` is the row of its B.
struct MBlocks {
  Triangulation type = Triangulation::I;
  Matrix32d M1, M2, M3;
  Matrix36d M;
  RowVector6d complement;

  /// Rows (aX, aY, aA) of the original group. For triangulation II the own
  /// A and B rows are exchanged.
  Matrix36d h1() const;
  /// The invariant of the original B, as a row over the six coefficients.
  RowVector6d b_row() const;
};

MBlocks blocks(const HolonomyGroup& g);

/// Blocks of the flipped triangulation.
inline MBlocks flip_blocks(const HolonomyGroup& g) { return blocks(flip(g)); }

struct SingularValues {
  int rank = 0;
  Eigen::VectorXd values;
  double kept_margin = 0;     // smallest kept / largest
  double dropped_margin = 0;  // largest dropped / largest (0 when none)
};

struct RankReport {
  SingularValues m1, m2, m3;
  double w1_box = 0;       // w1 . (X0 [x] A0)
  double w2_box = 0;       // w2 . (Y0 [x] A0)
  double w0_box = 0;       // w0 . (X0 [x] Y0)
  double det_m1 = 0;       // det(M1') / (4 |w1^- . w1^+|)
  double det_m2 = 0;       // det(M2') / (4 |w2^- . w2^+|)
  double det_m3 = 0;       // det(M3') / (4 |w0^- . w0^+|)
  double m1_minus_residual = 0;  // |det_m1 + w1_box| / |w1_box|
  double m1_plus_residual = 0;   // |det_m1 - w1_box| / |w1_box|
  double m2_plus_residual = 0;   // |det_m2 - w2_box| / |w2_box|
  double m3_residual = 0;        // |det_m3 + w0_box|
};

/// Throws RankUnexpected unless the ranks are (2, 2, 1).
RankReport rank_report(const MBlocks& b, const HolonomyGroup& g);
SingularValues singular_values(const Eigen::MatrixXd& m);

/// A ray of H^1, scaled so that h1 + h2 + h3 = 1.
struct ProjPoint {
  Eigen::Vector3d h;

  /// Throws OutOfChart when the coordinate sum vanishes.
  static ProjPoint from_ray(const Eigen::Vector3d& ray);
  Eigen::Vector2d chart() const { return h.head<2>(); }
};

struct ProjPolygon {
  std::string label;
  std::vector<ProjPoint> vertices;  // counterclockwise in the chart

  std::size_t size() const { return vertices.size(); }
};

/// Convex hull of projective rays, counterclockwise, near-duplicates merged.
ProjPolygon convex_polygon(const std::string& label, const std::vector<ProjPoint>& points);

bool contains(const ProjPolygon& poly, const ProjPoint& pt, double margin = 1e-9);
bool contains(const ProjPolygon& outer, const ProjPolygon& inner, double margin = 1e-8);
double area(const ProjPolygon& poly);
/// Intersection of two convex polygons by Sutherland-Hodgman clipping.
ProjPolygon intersect(const ProjPolygon& a, const ProjPolygon& b, const std::string& label);
/// Largest distance from a vertex of either polygon to the nearest vertex of
/// the other (infinity when the counts differ).
double vertex_distance(const ProjPolygon& a, const ProjPolygon& b);

/// Throws DegeneratePolygon unless the images of e1..e6 give five vertices.
ProjPolygon pentagon(const MBlocks& b, const std::string& label = "P1");

/// aB = cX aX + cY aY + cA aA.
struct BFunctional {
  double cX = 0, cY = 0, cA = 0;
  double residual = 0;  // relative

  double operator()(const Eigen::Vector3d& h) const { return cX * h(0) + cY * h(1) + cA * h(2); }
  Eigen::Vector3d normal() const { return {cX, cY, cA}; }
};

BFunctional b_functional(const MBlocks& b, const MBlocks& bf);

/// Invariants of the deformation class with H^1 coordinates h.
MargulisVector lift(const Eigen::Vector3d& h, const BFunctional& beta);

/// Projectivized cone {h >= 0, beta(h) >= 0}. Throws NotQuadrilateral.
ProjPolygon quadrilateral_Q(const BFunctional& beta);

/// Chart distance from p to the line {f . h = 0}.
double line_distance(const ProjPoint& p, const Eigen::Vector3d& f);

struct Witness {
  bool found = false;
  ProjPoint point;
  MargulisVector invariants;
  bool proper = false;
};

struct HexagonReport {
  ProjPolygon P1, P2, Qsmall, H, Q, clipped;
  BFunctional beta;
  bool qsmall_shared = false;     // e1..e4 images agree between P1 and P2
  bool convex = false;            // all six vertices on the convex hull
  double inscription = 0;         // largest distance of an H vertex to its nearest side line of Q
  std::vector<std::string> vertex_lines;  // kernel line of each H vertex
  bool h_in_q = false;
  double clip_error = 0;          // vertex_distance(P1 n P2, Qsmall)
  Witness witness;
};

/// Throws DegeneratePolygon or InscriptionFailure.
HexagonReport hexagon(const MBlocks& b, const MBlocks& bf);

struct OctagonReport {
  ThetaInterval interval;
  std::vector<double> thetas;
  std::vector<HexagonReport> hexagons;
  std::vector<ProjPoint> trace_a, trace_b;  // moving vertices on ker aA and ker aB
  double qsmall_spread = 0;
  double trace_a_residual = 0, trace_b_residual = 0;
  bool trace_a_monotone = false, trace_b_monotone = false;
  ProjPolygon octagon;
  ProjPolygon Q;  // at the first sample
  bool contains_all = false;
  double area_gap = 0;  // area(Q) - area(octagon)
};

/// Sweeps theta over the admissible interval clipped by 1e-4 of its length at
/// each end. Throws NonmonotoneTrace if a trace leaves its kernel line.
OctagonReport octagon_sweep(double d, double u1, double u2, int steps);

}  // namespace margulis
