#pragma once

// Linear algebra of R^{2,1} with the form diag(+1, +1, -1).
// The third coordinate is timelike; "future" means t > 0.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>

#include "margulis/error.hpp"

namespace margulis {

template <typename Scalar>
using MinkVector = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

using MinkVectord = MinkVector<double>;
using Matrix3d = Matrix3<double>;

/// Tolerances, relative to the squared max-norm scale of the inputs.
template <typename Scalar>
struct Tolerance {
  static constexpr Scalar null_class = Scalar(1e-10);
  static constexpr Scalar geometric = Scalar(1e-9);
};

enum class CausalClass { Spacelike, Timelike, Null, Zero };

constexpr const char* to_string(CausalClass c) {
  switch (c) {
    case CausalClass::Spacelike: return "Spacelike";
    case CausalClass::Timelike: return "Timelike";
    case CausalClass::Null: return "Null";
    case CausalClass::Zero: return "Zero";
  }
  return "Unknown";
}

template <typename Scalar>
Matrix3<Scalar> lorentz_form() {
  return MinkVector<Scalar>(Scalar(1), Scalar(1), Scalar(-1)).asDiagonal();
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar lorentz_dot(const Eigen::MatrixBase<DerivedA>& a,
                                      const Eigen::MatrixBase<DerivedB>& b) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(DerivedA, 3);
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(DerivedB, 3);
  return a(0) * b(0) + a(1) * b(1) - a(2) * b(2);
}

template <typename Derived>
typename Derived::Scalar lorentz_norm2(const Eigen::MatrixBase<Derived>& a) {
  return lorentz_dot(a, a);
}

/// Lorentzian cross product: lorentz_dot(box_product(a, b), c) == det(a, b, c).
template <typename DerivedA, typename DerivedB>
MinkVector<typename DerivedA::Scalar> box_product(const Eigen::MatrixBase<DerivedA>& a,
                                                  const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  MinkVector<Scalar> c = a.template head<3>().cross(b.template head<3>());
  c(2) = -c(2);
  return c;
}

template <typename Derived>
typename Derived::Scalar max_norm(const Eigen::MatrixBase<Derived>& v) {
  return v.cwiseAbs().maxCoeff();
}

template <typename Derived>
CausalClass causal_class(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Scalar eps = Tolerance<Scalar>::null_class;
  const Scalar scale = max_norm(v);
  if (scale < eps) return CausalClass::Zero;
  const Scalar q = lorentz_norm2(v);
  if (std::abs(q) < eps * scale * scale) return CausalClass::Null;
  return q > 0 ? CausalClass::Spacelike : CausalClass::Timelike;
}

template <typename Derived>
void require_spacelike(const Eigen::MatrixBase<Derived>& v, const char* who) {
  if (causal_class(v) != CausalClass::Spacelike)
    throw Error(ErrorCode::NotSpacelike, std::string(who) + ": vector is not spacelike");
}

template <typename Derived>
void require_timelike(const Eigen::MatrixBase<Derived>& v, const char* who) {
  if (causal_class(v) != CausalClass::Timelike)
    throw Error(ErrorCode::NotTimelike, std::string(who) + ": vector is not timelike");
}

/// Scales a spacelike (or timelike) vector to |lorentz_dot(v, v)| = 1.
template <typename Derived>
MinkVector<typename Derived::Scalar> lorentz_unit(const Eigen::MatrixBase<Derived>& v) {
  return v / std::sqrt(std::abs(lorentz_norm2(v)));
}

template <typename DA, typename DB, typename DC>
typename DA::Scalar det3(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
                         const Eigen::MatrixBase<DC>& c) {
  Matrix3<typename DA::Scalar> m;
  m.col(0) = a;
  m.col(1) = b;
  m.col(2) = c;
  return m.determinant();
}

/// The two future-pointing null directions of w^perp, normalized to t = 1,
/// ordered so that {minus, plus, w} is right-handed.
template <typename Scalar>
struct NullFrame {
  MinkVector<Scalar> minus;
  MinkVector<Scalar> plus;
};

template <typename Derived>
NullFrame<typename Derived::Scalar> null_frame(const Eigen::MatrixBase<Derived>& w_in) {
  using Scalar = typename Derived::Scalar;
  require_spacelike(w_in, "null_frame");
  const MinkVector<Scalar> w = lorentz_unit(w_in);
  // Null vectors (a, b, 1) with a^2 + b^2 = 1 and a w_x + b w_y = w_t.
  const Scalar r2 = w(0) * w(0) + w(1) * w(1);
  const Scalar h2 = Scalar(1) - w(2) * w(2) / r2;
  if (!(h2 > Tolerance<Scalar>::null_class))
    throw Error(ErrorCode::DegenerateFrame, "null_frame: w^perp is not transverse to the light cone");
  const Scalar h = std::sqrt(h2);
  const Scalar r = std::sqrt(r2);
  const Scalar bx = w(0) * w(2) / r2, by = w(1) * w(2) / r2;
  const Scalar px = -w(1) / r, py = w(0) / r;
  MinkVector<Scalar> first(bx + h * px, by + h * py, Scalar(1));
  MinkVector<Scalar> second(bx - h * px, by - h * py, Scalar(1));
  if (det3(first, second, w) > 0) return {first, second};
  return {second, first};
}

/// Dual geodesics of v and w are disjoint with a common perpendicular.
template <typename DA, typename DB>
bool ultraparallel(const Eigen::MatrixBase<DA>& v, const Eigen::MatrixBase<DB>& w) {
  using Scalar = typename DA::Scalar;
  require_spacelike(v, "ultraparallel");
  require_spacelike(w, "ultraparallel");
  const Scalar vw = lorentz_dot(v, w);
  const Scalar scale = max_norm(v) * max_norm(w);
  return vw * vw - lorentz_norm2(v) * lorentz_norm2(w) > Tolerance<Scalar>::geometric * scale * scale;
}

/// v_i . v_j < 0 and v_i . v_j^{+-} <= 0 for all i != j.
template <typename DA, typename DB, typename DC>
bool consistently_oriented(const Eigen::MatrixBase<DA>& v1, const Eigen::MatrixBase<DB>& v2,
                           const Eigen::MatrixBase<DC>& v3) {
  using Scalar = typename DA::Scalar;
  const std::array<MinkVector<Scalar>, 3> v{v1, v2, v3};
  std::array<NullFrame<Scalar>, 3> frames;
  for (std::size_t i = 0; i < 3; ++i) {
    require_spacelike(v[i], "consistently_oriented");
    frames[i] = null_frame(v[i]);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      if (!(lorentz_dot(v[i], v[j]) < 0)) return false;
      const Scalar margin = Tolerance<Scalar>::geometric * max_norm(v[i]);
      if (lorentz_dot(v[i], frames[j].minus) > margin) return false;
      if (lorentz_dot(v[i], frames[j].plus) > margin) return false;
    }
  }
  return true;
}

}  // namespace margulis
