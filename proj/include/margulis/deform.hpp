#pragma once

// Affine deformations built from stem-quadrant coefficients, their Margulis
// invariants, and crooked planes.

#include <array>
#include <string>
#include <vector>

#include "margulis/isometry.hpp"
#include "margulis/surface.hpp"

namespace margulis {

using Vector6d = Eigen::Matrix<double, 6, 1>;

/// Pairs (u^-, u^+) for w1, w2 and w0, in that order.
struct StemCoeffs {
  std::array<std::array<double, 2>, 3> pairs{};

  static StemCoeffs uniform(double value);
  /// Order (u1-, u1+, u2-, u2+, u0-, u0+), matching the columns e1..e6 of M.
  static StemCoeffs from_vector(const Vector6d& v);
  Vector6d to_vector() const;
  bool strictly_positive() const;
};

struct Deformation {
  HolonomyGroup group;
  StemCoeffs coeffs;
  MinkVectord q1, q2, q0;
};

struct MargulisVector {
  double aX = 0, aY = 0, aA = 0, aB = 0;

  std::array<double, 4> values() const { return {aX, aY, aA, aB}; }
};

struct AffineGenerators {
  AffineIsometryd r1, r2, r0;
  AffineIsometryd X, Y, A, B;
};

/// um w^- - up w^+ in the t = 1 null frame of w.
MinkVectord stem_point(const MinkVectord& w, double um, double up);

/// Throws NegativeCoefficient or InvalidConfiguration for non-finite input.
Deformation make_deformation(const HolonomyGroup& group, const StemCoeffs& coeffs);

/// r1, r2, r0 fix q1, q2, q0; X = r1 r0, Y = r0 r2, A = r1 r2, B = r2 r0 r1 r0.
AffineGenerators affine_generators(const Deformation& d);

/// (g(p) - p) . g0.
double margulis_direct(const AffineIsometryd& g, const MinkVectord& g0, const MinkVectord& p);
MargulisVector margulis_direct(const Deformation& d, const MinkVectord& p = MinkVectord::Zero());

/// Closed forms in the q-points. The B invariant uses the affine image r0(q1).
MargulisVector margulis_closed(const Deformation& d);

bool is_proper(const MargulisVector& m);

struct CrookedPlane {
  MinkVectord director;
  MinkVectord vertex;
};

enum class CrookedPart { Stem, PlusWing, MinusWing, None };

/// Stem: x - p in the timelike part of v^perp. Wings: p + R v^+ + R_{>=0} v and
/// p + R v^- - R_{>=0} v.
CrookedPart classify_point(const CrookedPlane& c, const MinkVectord& x, double tol = 1e-10);

CrookedPlane image(const AffineIsometryd& g, const CrookedPlane& c);

/// Deterministic Halton sample of the plane inside the Euclidean ball of the
/// given radius about the vertex. The first point is the vertex.
std::vector<MinkVectord> crooked_sample(const CrookedPlane& c, double radius, int n);

struct Word {
  std::string label;  // "e" for the identity, otherwise e.g. "r1.r0"
  AffineIsometryd map;
};

/// Reduced words in r1, r2, r0 of length at most max_length.
std::vector<Word> reduced_words(const AffineGenerators& gens, int max_length);

struct DisjointnessReport {
  double min_distance = 0;
  int plane_count = 0;   // distinct planes sampled
  int merged_count = 0;  // images equal to another image of the same base plane
  int closest_first = -1, closest_second = -1;  // indices into `labels`
  std::vector<std::string> labels;
};

/// Applies every word to every base plane and reports the smallest Euclidean
/// distance between samples of distinct planes.
DisjointnessReport disjointness_oracle(const std::vector<CrookedPlane>& planes, const std::vector<Word>& words,
                                       double radius, int n);

std::vector<CrookedPlane> base_planes(const Deformation& d);

}  // namespace margulis
