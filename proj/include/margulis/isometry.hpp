#pragma once

// Linear and affine isometries of R^{2,1}.

#include <Eigen/Dense>

#include <cmath>
#include <optional>

#include "margulis/error.hpp"
#include "margulis/minkowski.hpp"

namespace margulis {

enum class IsometryClass {
  Identity,
  EllipticInvolution,
  LineReflection,
  Hyperbolic,
  GlideReflection,
  Parabolic,
  Other
};

constexpr const char* to_string(IsometryClass c) {
  switch (c) {
    case IsometryClass::Identity: return "Identity";
    case IsometryClass::EllipticInvolution: return "EllipticInvolution";
    case IsometryClass::LineReflection: return "LineReflection";
    case IsometryClass::Hyperbolic: return "Hyperbolic";
    case IsometryClass::GlideReflection: return "GlideReflection";
    case IsometryClass::Parabolic: return "Parabolic";
    case IsometryClass::Other: return "Other";
  }
  return "Unknown";
}

/// A 3x3 matrix preserving the Lorentz form.
template <typename Scalar>
class LinearIsometry {
 public:
  using Matrix = Matrix3<Scalar>;
  using Vector = MinkVector<Scalar>;

  LinearIsometry() : m_(Matrix::Identity()) {}

  /// Validates m^T J m = J and det(m) = +-1 to 1e-9.
  static LinearIsometry from_matrix(const Matrix& m) {
    if (!preserves_form(m))
      throw Error(ErrorCode::InvalidConfiguration, "matrix does not preserve the Lorentz form");
    return LinearIsometry(m);
  }

  /// No validation; for products of validated isometries and for tests that
  /// need to corrupt a matrix.
  static LinearIsometry unchecked(const Matrix& m) { return LinearIsometry(m); }

  static LinearIsometry identity() { return LinearIsometry(); }

  static bool preserves_form(const Matrix& m, Scalar tol = Scalar(1e-9)) {
    const Matrix j = lorentz_form<Scalar>();
    if (((m.transpose() * j * m) - j).cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(std::abs(m.determinant()) - Scalar(1)) <= tol;
  }

  const Matrix& matrix() const { return m_; }

  // J m^T J is the exact inverse of a Lorentz matrix.
  LinearIsometry inverse() const {
    const Matrix j = lorentz_form<Scalar>();
    return LinearIsometry(j * m_.transpose() * j);
  }

  Scalar determinant() const { return m_.determinant(); }

  bool preserves_time_orientation() const { return m_(2, 2) > 0; }

  template <typename Derived>
  Vector operator()(const Eigen::MatrixBase<Derived>& v) const {
    return m_ * v;
  }

  friend LinearIsometry operator*(const LinearIsometry& a, const LinearIsometry& b) {
    return LinearIsometry(a.m_ * b.m_);
  }

 private:
  explicit LinearIsometry(const Matrix& m) : m_(m) {}
  Matrix m_;
};

/// x -> linear(x) + translation.
template <typename Scalar>
struct AffineIsometry {
  LinearIsometry<Scalar> linear;
  MinkVector<Scalar> translation = MinkVector<Scalar>::Zero();

  static AffineIsometry identity() { return {LinearIsometry<Scalar>::identity(), MinkVector<Scalar>::Zero()}; }
};

using LinearIsometryd = LinearIsometry<double>;
using AffineIsometryd = AffineIsometry<double>;

template <typename Scalar>
AffineIsometry<Scalar> compose(const AffineIsometry<Scalar>& g, const AffineIsometry<Scalar>& h) {
  return {g.linear * h.linear, g.linear(h.translation) + g.translation};
}

template <typename Scalar, typename Derived>
MinkVector<Scalar> apply(const AffineIsometry<Scalar>& g, const Eigen::MatrixBase<Derived>& p) {
  return g.linear(p) + g.translation;
}

template <typename Scalar>
AffineIsometry<Scalar> inverse(const AffineIsometry<Scalar>& g) {
  const LinearIsometry<Scalar> inv = g.linear.inverse();
  return {inv, -inv(g.translation)};
}

namespace detail {

template <typename Scalar>
LinearIsometry<Scalar> axial_symmetry(const MinkVector<Scalar>& u) {
  const Matrix3<Scalar> j = lorentz_form<Scalar>();
  const Matrix3<Scalar> m =
      -Matrix3<Scalar>::Identity() + (Scalar(2) / lorentz_norm2(u)) * u * (j * u).transpose();
  return LinearIsometry<Scalar>::unchecked(m);
}

/// Kernel of a rank-2 matrix: the largest cross product of two rows, with an
/// SVD fallback when the closed form leaves a residual above `tol`.
template <typename Scalar>
std::optional<MinkVector<Scalar>> kernel_vector(const Matrix3<Scalar>& a, Scalar tol) {
  MinkVector<Scalar> best = MinkVector<Scalar>::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int k = i + 1; k < 3; ++k) {
      MinkVector<Scalar> c = a.row(i).transpose().cross(a.row(k).transpose());
      if (c.norm() > best.norm()) best = c;
    }
  }
  const Scalar scale = std::max(a.cwiseAbs().maxCoeff(), Scalar(1));
  if (best.norm() > 0) {
    best.normalize();
    if ((a * best).cwiseAbs().maxCoeff() <= tol * scale) return best;
  }
  Eigen::JacobiSVD<Matrix3<Scalar>> svd(a, Eigen::ComputeFullV);
  MinkVector<Scalar> v = svd.matrixV().col(2);
  if ((a * v).cwiseAbs().maxCoeff() <= tol * scale * Scalar(1e3)) return v;
  return std::nullopt;
}

}  // namespace detail

/// v -> -v + 2 (v.u)/(u.u) u for spacelike u.
template <typename Derived>
LinearIsometry<typename Derived::Scalar> spine_reflection(const Eigen::MatrixBase<Derived>& u) {
  require_spacelike(u, "spine_reflection");
  return detail::axial_symmetry<typename Derived::Scalar>(u);
}

/// Same formula with a timelike axis: the half-turn about the point [t] of H^2.
template <typename Derived>
LinearIsometry<typename Derived::Scalar> point_symmetry(const Eigen::MatrixBase<Derived>& t) {
  require_timelike(t, "point_symmetry");
  return detail::axial_symmetry<typename Derived::Scalar>(t);
}

template <typename Scalar>
IsometryClass classify(const LinearIsometry<Scalar>& g) {
  using Matrix = Matrix3<Scalar>;
  const Scalar tol = Tolerance<Scalar>::geometric;
  const Matrix& m = g.matrix();
  const Scalar scale = std::max(m.cwiseAbs().maxCoeff(), Scalar(1));
  if ((m - Matrix::Identity()).cwiseAbs().maxCoeff() <= tol * scale) return IsometryClass::Identity;

  const Scalar det = m.determinant();
  if (det < 0) return IsometryClass::Other;

  if ((m * m - Matrix::Identity()).cwiseAbs().maxCoeff() <= tol * scale * scale) {
    // det +1 involution: eigenvalues {1, -1, -1}; (m + I)/2 projects onto the axis.
    const Matrix proj = (m + Matrix::Identity()) / Scalar(2);
    int col = 0;
    proj.colwise().norm().maxCoeff(&col);
    const MinkVector<Scalar> axis = proj.col(col);
    switch (causal_class(axis)) {
      case CausalClass::Timelike: return IsometryClass::EllipticInvolution;
      case CausalClass::Spacelike: return IsometryClass::LineReflection;
      default: return IsometryClass::Other;
    }
  }

  const Scalar trace = m.trace();
  if (g.preserves_time_orientation()) {
    // Eigenvalues {1, lambda, 1/lambda}: trace - 1 = lambda + 1/lambda.
    const Scalar s = trace - Scalar(1);
    if (std::abs(s - Scalar(2)) <= tol * scale) return IsometryClass::Parabolic;
    if (s > Scalar(2)) return IsometryClass::Hyperbolic;
    return IsometryClass::Other;
  }
  // Time-orientation reversing with det +1: eigenvalues {1, -lambda, -1/lambda}.
  const Scalar s = Scalar(1) - trace;
  if (s > Scalar(2) + tol * scale) return IsometryClass::GlideReflection;
  return IsometryClass::Other;
}

/// Repelling and attracting null eigenvectors of a hyperbolic h, future-pointing, t = 1.
template <typename Scalar>
NullFrame<Scalar> hyperbolic_null_eigenvectors(const LinearIsometry<Scalar>& h) {
  using Matrix = Matrix3<Scalar>;
  const Matrix& m = h.matrix();
  const Scalar s = m.trace() - Scalar(1);
  const Scalar lambda = (s + std::sqrt(s * s - Scalar(4))) / Scalar(2);
  const Scalar tol = Scalar(1e-12);
  auto attracting = detail::kernel_vector<Scalar>(m - lambda * Matrix::Identity(), tol);
  auto repelling = detail::kernel_vector<Scalar>(m - (Scalar(1) / lambda) * Matrix::Identity(), tol);
  if (!attracting || !repelling || std::abs((*attracting)(2)) < tol || std::abs((*repelling)(2)) < tol)
    throw Error(ErrorCode::EigenFailure, "null eigenvectors did not converge");
  return {*repelling / (*repelling)(2), *attracting / (*attracting)(2)};
}

/// Unit spacelike fixed vector g^0, oriented so that det(h^-, h^+, g^0) > 0
/// where h = g (hyperbolic) or g^2 (glide reflection).
template <typename Scalar>
MinkVector<Scalar> neutral_vector(const LinearIsometry<Scalar>& g) {
  const IsometryClass cls = classify(g);
  if (cls != IsometryClass::Hyperbolic && cls != IsometryClass::GlideReflection)
    throw Error(ErrorCode::NotHyperbolicType,
                std::string("neutral_vector: isometry is ") + to_string(cls));
  const LinearIsometry<Scalar> h = cls == IsometryClass::Hyperbolic ? g : g * g;
  auto fixed = detail::kernel_vector<Scalar>(h.matrix() - Matrix3<Scalar>::Identity(), Scalar(1e-12));
  if (!fixed || causal_class(*fixed) != CausalClass::Spacelike)
    throw Error(ErrorCode::EigenFailure, "neutral_vector: no spacelike fixed vector");
  MinkVector<Scalar> g0 = lorentz_unit(*fixed);
  const NullFrame<Scalar> ends = hyperbolic_null_eigenvectors(h);
  if (det3(ends.minus, ends.plus, g0) < 0) g0 = -g0;
  return g0;
}

/// x -> L(x - q) + q for an involutive L.
template <typename Scalar, typename Derived>
AffineIsometry<Scalar> affine_involution(const LinearIsometry<Scalar>& l,
                                         const Eigen::MatrixBase<Derived>& q) {
  const Matrix3<Scalar>& m = l.matrix();
  if ((m * m - Matrix3<Scalar>::Identity()).cwiseAbs().maxCoeff() > Tolerance<Scalar>::geometric)
    throw Error(ErrorCode::NotInvolution, "affine_involution: linear part is not an involution");
  return {l, q - l(q)};
}

}  // namespace margulis
