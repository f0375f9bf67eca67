#include "margulis/surface.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace margulis {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kThetaSamples = 4096;
constexpr int kBisectionSteps = 80;

MinkVectord horizontal(double angle) { return {std::cos(angle), std::sin(angle), 0.0}; }

double residual(const Matrix3d& a, const Matrix3d& b) { return (a - b).cwiseAbs().maxCoeff(); }

bool structurally_valid(double d, double u1, double u2) {
  return std::isfinite(d) && std::isfinite(u1) && std::isfinite(u2) && d >= 0 && u1 > 0 && u2 > 0;
}

// Longest run of admissible angles over [0, pi), refined by bisection at both ends.
ThetaInterval admissible_interval(const std::function<bool(double)>& admissible) {
  std::vector<char> flags(kThetaSamples);
  const double step = kPi / kThetaSamples;
  for (int k = 0; k < kThetaSamples; ++k) flags[k] = admissible(k * step);

  const auto first_false = std::find(flags.begin(), flags.end(), 0);
  if (first_false == flags.end()) return {0.0, kPi};
  const int start = static_cast<int>(first_false - flags.begin());

  int best_begin = -1, best_len = 0;
  for (int i = 0; i < kThetaSamples;) {
    if (!flags[(start + i) % kThetaSamples]) {
      ++i;
      continue;
    }
    int j = i;
    while (j < kThetaSamples && flags[(start + j) % kThetaSamples]) ++j;
    if (j - i > best_len) {
      best_len = j - i;
      best_begin = start + i;
    }
    i = j;
  }
  if (best_len == 0) throw Error(ErrorCode::EmptyInterval, "no admissible theta");

  auto refine = [&](double inside, double outside) {
    for (int k = 0; k < kBisectionSteps; ++k) {
      const double mid = 0.5 * (inside + outside);
      (admissible(mid) ? inside : outside) = mid;
    }
    return inside;
  };
  const double first = best_begin * step;
  const double last = (best_begin + best_len - 1) * step;
  double lo = refine(first, first - step);
  double hi = refine(last, last + step);
  if (lo >= kPi) {
    lo -= kPi;
    hi -= kPi;
  } else if (lo < 0) {
    lo += kPi;
    hi += kPi;
  }
  return {lo, hi};
}

HolonomyGroup assemble(Triangulation type, const TriangleParams& params, double angle,
                       const SideVectors& sides) {
  HolonomyGroup g;
  g.type = type;
  g.params = params;
  g.angle = angle;
  g.sides = sides;
  g.p0 = origin_point();
  g.RX = spine_reflection(sides.w1);
  g.RY = spine_reflection(sides.w2);
  g.i0 = point_symmetry(g.p0);
  g.X = g.RX * g.i0;
  g.Y = g.i0 * g.RY;
  g.A = g.X * g.Y;
  g.B = g.Y.inverse() * g.X;

  struct Expectation {
    const LinearIsometryd* element;
    IsometryClass cls;
    const char* name;
  };
  const std::array<Expectation, 7> expected{{
      {&g.RX, IsometryClass::LineReflection, "R_X"},
      {&g.RY, IsometryClass::LineReflection, "R_Y"},
      {&g.i0, IsometryClass::EllipticInvolution, "i0"},
      {&g.X, IsometryClass::GlideReflection, "X"},
      {&g.Y, IsometryClass::GlideReflection, "Y"},
      {&g.A, IsometryClass::Hyperbolic, "A"},
      {&g.B, IsometryClass::Hyperbolic, "B"},
  }};
  for (const auto& e : expected) {
    const IsometryClass got = classify(*e.element);
    if (got != e.cls)
      throw Error(ErrorCode::ClassificationFailure,
                  std::string(e.name) + " classified as " + to_string(got) + ", expected " + to_string(e.cls));
  }
  // Neutral vectors in long double: B has entries of order e^(2d) and its
  // fixed vector is only as accurate as B itself.
  using Ld = long double;
  const LinearIsometry<Ld> rx = spine_reflection(MinkVector<Ld>(sides.w1.cast<Ld>()));
  const LinearIsometry<Ld> ry = spine_reflection(MinkVector<Ld>(sides.w2.cast<Ld>()));
  const LinearIsometry<Ld> i0 = point_symmetry(MinkVector<Ld>(g.p0.cast<Ld>()));
  const LinearIsometry<Ld> x = rx * i0, y = i0 * ry;
  g.X0 = neutral_vector(x).cast<double>();
  g.Y0 = neutral_vector(y).cast<double>();
  g.A0 = neutral_vector(x * y).cast<double>();
  g.B0 = neutral_vector(y.inverse() * x).cast<double>();
  return g;
}

std::optional<SideVectors> flipped_sides(const SideVectors& s, const LinearIsometryd& i0, double angle) {
  return canonical_sides(s.w1, i0(s.w2), horizontal(angle));
}

}  // namespace

TriangleParams TriangleParams::admissible(double d, double u1, double u2, double theta) {
  TriangleParams p{d, u1, u2, theta};
  side_vectors(p);
  return p;
}

double ThetaInterval::unwrap(double theta) const {
  double t = std::fmod(theta - lo, kPi);
  if (t < 0) t += kPi;
  return lo + t;
}

bool ThetaInterval::contains(double theta) const {
  const double t = unwrap(theta);
  return t > lo && t < hi;
}

double CoxeterResiduals::max() const {
  return std::max({involutions, x_relation, y_relation, a_product, a_reflections, b_relation,
                   b_reflections, i0_conj_x, i0_conj_y, b_xinv_y});
}

SideVectors raw_side_vectors(const TriangleParams& p) {
  const double sd = std::sinh(p.d), cd = std::cosh(p.d);
  const MinkVectord w1(std::cosh(p.u1), std::sinh(p.u1) * sd, std::sinh(p.u1) * cd);
  const MinkVectord w2(std::cosh(p.u2), -std::sinh(p.u2) * sd, -std::sinh(p.u2) * cd);
  return {w1, w2, horizontal(p.theta)};
}

std::optional<SideVectors> canonical_sides(const MinkVectord& w1, const MinkVectord& w2,
                                           const MinkVectord& w0) {
  for (const MinkVectord* w : {&w1, &w2, &w0})
    if (causal_class(*w) != CausalClass::Spacelike) return std::nullopt;
  const MinkVectord u1 = lorentz_unit(w1), u2 = lorentz_unit(w2), u0 = lorentz_unit(w0);
  if (!ultraparallel(u1, u2) || !ultraparallel(u1, u0) || !ultraparallel(u2, u0)) return std::nullopt;
  const double d12 = lorentz_dot(u1, u2), d10 = lorentz_dot(u1, u0), d20 = lorentz_dot(u2, u0);
  for (int mask = 0; mask < 8; ++mask) {
    const double s1 = (mask & 1) ? -1 : 1, s2 = (mask & 2) ? -1 : 1, s0 = (mask & 4) ? -1 : 1;
    if (!(s1 * s2 * d12 < 0 && s1 * s0 * d10 < 0 && s2 * s0 * d20 < 0)) continue;
    const SideVectors s{s1 * u1, s2 * u2, s0 * u0};
    if (consistently_oriented(s.w1, s.w2, s.w0)) return s;
  }
  return std::nullopt;
}

SideVectors side_vectors(const TriangleParams& params) {
  if (!structurally_valid(params.d, params.u1, params.u2) || !std::isfinite(params.theta))
    throw Error(ErrorCode::InvalidConfiguration, "parameters must be finite with d >= 0, u1 > 0, u2 > 0");
  const SideVectors raw = raw_side_vectors(params);
  auto s = canonical_sides(raw.w1, raw.w2, raw.w0);
  if (!s)
    throw Error(ErrorCode::InvalidConfiguration,
                "sides are not pairwise ultraparallel and consistently oriented (outside configuration I)");
  return *s;
}

ThetaInterval theta_interval(double d, double u1, double u2) {
  if (!structurally_valid(d, u1, u2))
    throw Error(ErrorCode::EmptyInterval, "parameters must be finite with d >= 0, u1 > 0, u2 > 0");
  const SideVectors raw = raw_side_vectors({d, u1, u2, 0.0});
  return admissible_interval([&](double theta) {
    return canonical_sides(raw.w1, raw.w2, horizontal(theta)).has_value();
  });
}

ThetaInterval flip_theta_interval(double d, double u1, double u2) {
  const ThetaInterval base = theta_interval(d, u1, u2);
  const SideVectors sides = side_vectors({d, u1, u2, base.midpoint()});
  const LinearIsometryd i0 = point_symmetry(origin_point());
  return admissible_interval([&](double angle) { return flipped_sides(sides, i0, angle).has_value(); });
}

double flip_angle(const TriangleParams& params) {
  const ThetaInterval a = theta_interval(params.d, params.u1, params.u2);
  const ThetaInterval b = flip_theta_interval(params.d, params.u1, params.u2);
  const double t = (a.unwrap(params.theta) - a.lo) / a.length();
  return b.lo + t * b.length();
}

double unflip_angle(double d, double u1, double u2, double flipped) {
  const ThetaInterval a = theta_interval(d, u1, u2);
  const ThetaInterval b = flip_theta_interval(d, u1, u2);
  const double t = (b.unwrap(flipped) - b.lo) / b.length();
  return a.lo + t * a.length();
}

HolonomyGroup holonomy(const TriangleParams& params) {
  return assemble(Triangulation::I, params, params.theta, side_vectors(params));
}

HolonomyGroup flip(const HolonomyGroup& g) {
  const TriangleParams& p = g.params;
  const bool to_flipped = g.type == Triangulation::I;
  const double angle = to_flipped ? flip_angle(p) : unflip_angle(p.d, p.u1, p.u2, g.angle);
  auto sides = flipped_sides(g.sides, g.i0, angle);
  if (!sides)
    throw Error(ErrorCode::InvalidConfiguration, "flipped triangle is not hyperideal at this angle");
  TriangleParams params = p;
  if (!to_flipped) params.theta = angle;
  return assemble(to_flipped ? Triangulation::II : Triangulation::I, params, angle, *sides);
}

CoxeterResiduals coxeter_check(const HolonomyGroup& g) {
  const Matrix3d id = Matrix3d::Identity();
  const Matrix3d& rx = g.RX.matrix();
  const Matrix3d& ry = g.RY.matrix();
  const Matrix3d& i0 = g.i0.matrix();
  const Matrix3d& x = g.X.matrix();
  const Matrix3d& y = g.Y.matrix();
  const Matrix3d xinv = g.X.inverse().matrix();
  const Matrix3d yinv = g.Y.inverse().matrix();
  const auto size = [](const Matrix3d& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); };
  // Each residual is relative to the product of the factor sizes.
  const auto rel = [](const Matrix3d& a, const Matrix3d& b, double scale) { return residual(a, b) / scale; };

  CoxeterResiduals r;
  r.involutions = std::max({rel(rx * rx, id, size(rx) * size(rx)), rel(ry * ry, id, size(ry) * size(ry)),
                            rel(i0 * i0, id, 1.0)});
  r.x_relation = rel(x, rx * i0, size(rx));
  r.y_relation = rel(y, i0 * ry, size(ry));
  r.a_product = rel(g.A.matrix(), x * y, size(x) * size(y));
  r.a_reflections = rel(g.A.matrix(), rx * ry, size(rx) * size(ry));
  r.b_relation = rel(g.B.matrix(), yinv * x, size(yinv) * size(x));
  r.b_reflections = rel(g.B.matrix(), ry * i0 * rx * i0, size(ry) * size(rx));
  r.i0_conj_x = rel(i0 * x * i0 * x, id, size(x) * size(x));
  r.i0_conj_y = rel(i0 * y * i0 * y, id, size(y) * size(y));
  r.b_xinv_y = rel(g.B.matrix() * xinv * y, id, size(g.B.matrix()) * size(xinv) * size(y));
  return r;
}

}  // namespace margulis
