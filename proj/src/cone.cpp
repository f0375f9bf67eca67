#include "margulis/cone.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace margulis {

namespace {

constexpr double kMergeTol = 1e-9;
constexpr double kLineTol = 1e-8;

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a(0) * b(1) - a(1) * b(0); }

ProjPoint from_chart(const Eigen::Vector2d& xy) { return {Eigen::Vector3d(xy(0), xy(1), 1.0 - xy(0) - xy(1))}; }

std::vector<ProjPoint> merge_close(const std::vector<ProjPoint>& points) {
  std::vector<ProjPoint> out;
  for (const ProjPoint& p : points) {
    const bool seen = std::any_of(out.begin(), out.end(), [&](const ProjPoint& q) {
      return (q.chart() - p.chart()).norm() <= kMergeTol;
    });
    if (!seen) out.push_back(p);
  }
  return out;
}

// Counterclockwise order about the centroid, used when the points are not in
// convex position.
std::vector<ProjPoint> angular_order(std::vector<ProjPoint> points) {
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const ProjPoint& p : points) c += p.chart();
  c /= static_cast<double>(points.size());
  std::sort(points.begin(), points.end(), [&](const ProjPoint& a, const ProjPoint& b) {
    const Eigen::Vector2d da = a.chart() - c, db = b.chart() - c;
    return std::atan2(da(1), da(0)) < std::atan2(db(1), db(0));
  });
  return points;
}

const std::array<std::pair<const char*, Eigen::Vector3d>, 3> kCoordinateLines{{
    {"ker aX", Eigen::Vector3d::UnitX()},
    {"ker aY", Eigen::Vector3d::UnitY()},
    {"ker aA", Eigen::Vector3d::UnitZ()},
}};

}  // namespace

Matrix36d MBlocks::h1() const {
  if (type == Triangulation::I) return M;
  Matrix36d h;
  h.row(0) = M.row(0);
  h.row(1) = M.row(1);
  h.row(2) = complement;
  return h;
}

RowVector6d MBlocks::b_row() const { return type == Triangulation::I ? complement : RowVector6d(M.row(2)); }

MBlocks blocks(const HolonomyGroup& g) {
  const auto& [w1, w2, w0] = g.sides;
  const NullFrame<double> f1 = null_frame(w1), f2 = null_frame(w2), f0 = null_frame(w0);
  const auto dot = [](const MinkVectord& a, const MinkVectord& b) { return lorentz_dot(a, b); };

  MBlocks b;
  b.type = g.type;
  b.M1 << dot(f1.minus, g.X0), -dot(f1.plus, g.X0),
          0, 0,
          dot(f1.minus, g.A0), -dot(f1.plus, g.A0);
  b.M2 << 0, 0,
          -dot(f2.minus, g.Y0), dot(f2.plus, g.Y0),
          -dot(f2.minus, g.A0), dot(f2.plus, g.A0);
  b.M3 << -dot(f0.minus, g.X0), dot(f0.plus, g.X0),
          dot(f0.minus, g.Y0), -dot(f0.plus, g.Y0),
          0, 0;
  b.M1 *= 2;
  b.M2 *= 2;
  b.M3 *= 2;
  b.M << b.M1, b.M2, b.M3;

  // aB = 2 B0 . (q2 - r0(q1)) with r0(q1) = i0 q1 + (I - i0) q0.
  const Matrix3d i0 = g.i0.matrix();
  const Matrix3d shift = Matrix3d::Identity() - i0;
  b.complement << -dot(i0 * f1.minus, g.B0), dot(i0 * f1.plus, g.B0),
                  dot(f2.minus, g.B0), -dot(f2.plus, g.B0),
                  -dot(shift * f0.minus, g.B0), dot(shift * f0.plus, g.B0);
  b.complement *= 2;
  return b;
}

SingularValues singular_values(const Eigen::MatrixXd& m) {
  SingularValues s;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  s.values = svd.singularValues();
  const double top = s.values.size() ? s.values(0) : 0.0;
  if (top <= 0) return s;
  for (Eigen::Index i = 0; i < s.values.size(); ++i) {
    if (s.values(i) > 1e-9 * top) {
      ++s.rank;
      s.kept_margin = s.values(i) / top;
    } else {
      s.dropped_margin = std::max(s.dropped_margin, s.values(i) / top);
    }
  }
  return s;
}

RankReport rank_report(const MBlocks& b, const HolonomyGroup& g) {
  RankReport r;
  r.m1 = singular_values(b.M1);
  r.m2 = singular_values(b.M2);
  r.m3 = singular_values(b.M3);

  const auto& [w1, w2, w0] = g.sides;
  const auto frame_scale = [](const MinkVectord& w) {
    const NullFrame<double> f = null_frame(w);
    return std::abs(lorentz_dot(f.minus, f.plus));
  };
  const auto det2 = [](const Matrix32d& m, int r0, int r1) {
    return m(r0, 0) * m(r1, 1) - m(r0, 1) * m(r1, 0);
  };
  r.w1_box = lorentz_dot(w1, box_product(g.X0, g.A0));
  r.w2_box = lorentz_dot(w2, box_product(g.Y0, g.A0));
  r.w0_box = lorentz_dot(w0, box_product(g.X0, g.Y0));
  r.det_m1 = det2(b.M1, 0, 2) / (4 * frame_scale(w1));
  r.det_m2 = det2(b.M2, 1, 2) / (4 * frame_scale(w2));
  r.det_m3 = det2(b.M3, 0, 1) / (4 * frame_scale(w0));
  r.m1_minus_residual = std::abs(r.det_m1 + r.w1_box) / std::abs(r.w1_box);
  r.m1_plus_residual = std::abs(r.det_m1 - r.w1_box) / std::abs(r.w1_box);
  r.m2_plus_residual = std::abs(r.det_m2 - r.w2_box) / std::abs(r.w2_box);
  r.m3_residual = std::abs(r.det_m3 + r.w0_box);

  if (r.m1.rank != 2 || r.m2.rank != 2 || r.m3.rank != 1)
    throw Error(ErrorCode::RankUnexpected, "block ranks are (" + std::to_string(r.m1.rank) + ", " +
                                               std::to_string(r.m2.rank) + ", " + std::to_string(r.m3.rank) +
                                               "), expected (2, 2, 1)");
  return r;
}

ProjPoint ProjPoint::from_ray(const Eigen::Vector3d& ray) {
  const double sum = ray.sum();
  if (!ray.allFinite() || std::abs(sum) <= 1e-12 * std::max(ray.cwiseAbs().maxCoeff(), 1e-300))
    throw Error(ErrorCode::OutOfChart, "ray has zero coordinate sum");
  Eigen::Vector3d h = ray / sum;
  h.array() += 0.0;
  return {h};
}

ProjPolygon convex_polygon(const std::string& label, const std::vector<ProjPoint>& points) {
  std::vector<ProjPoint> pts = merge_close(points);
  std::sort(pts.begin(), pts.end(), [](const ProjPoint& a, const ProjPoint& b) {
    return a.h(0) < b.h(0) || (a.h(0) == b.h(0) && a.h(1) < b.h(1));
  });
  if (pts.size() < 3) return {label, pts};

  std::vector<ProjPoint> hull(2 * pts.size());
  std::size_t k = 0;
  const auto turn = [&](const ProjPoint& o, const ProjPoint& a, const ProjPoint& b) {
    return cross2(a.chart() - o.chart(), b.chart() - o.chart());
  };
  const double eps = 1e-12;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], pts[i]) <= eps) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && turn(hull[k - 2], hull[k - 1], pts[i]) <= eps) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return {label, hull};
}

bool contains(const ProjPolygon& poly, const ProjPoint& pt, double margin) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d a = poly.vertices[i].chart(), b = poly.vertices[(i + 1) % n].chart();
    if (cross2(b - a, pt.chart() - a) < -margin * (b - a).norm()) return false;
  }
  return true;
}

bool contains(const ProjPolygon& outer, const ProjPolygon& inner, double margin) {
  return std::all_of(inner.vertices.begin(), inner.vertices.end(),
                     [&](const ProjPoint& p) { return contains(outer, p, margin); });
}

double area(const ProjPolygon& poly) {
  double s = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) s += cross2(poly.vertices[i].chart(), poly.vertices[(i + 1) % n].chart());
  return 0.5 * s;
}

ProjPolygon intersect(const ProjPolygon& a, const ProjPolygon& b, const std::string& label) {
  std::vector<Eigen::Vector2d> out;
  for (const ProjPoint& p : a.vertices) out.push_back(p.chart());
  const std::size_t m = b.size();
  for (std::size_t e = 0; e < m && !out.empty(); ++e) {
    const Eigen::Vector2d c = b.vertices[e].chart(), d = b.vertices[(e + 1) % m].chart();
    const double len = (d - c).norm();
    const auto side = [&](const Eigen::Vector2d& p) {
      const double s = cross2(d - c, p - c) / len;
      return std::abs(s) <= kMergeTol ? 0.0 : s;
    };
    std::vector<Eigen::Vector2d> next;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const Eigen::Vector2d& p = out[i];
      const Eigen::Vector2d& q = out[(i + 1) % out.size()];
      const double sp = side(p), sq = side(q);
      if (sp >= 0) next.push_back(p);
      if ((sp > 0 && sq < 0) || (sp < 0 && sq > 0)) next.push_back(p + (sp / (sp - sq)) * (q - p));
    }
    out = std::move(next);
  }
  std::vector<ProjPoint> pts;
  for (const Eigen::Vector2d& p : out) pts.push_back(from_chart(p));
  return convex_polygon(label, pts);
}

double vertex_distance(const ProjPolygon& a, const ProjPolygon& b) {
  if (a.size() != b.size() || a.size() == 0) return std::numeric_limits<double>::infinity();
  const auto one_way = [](const ProjPolygon& x, const ProjPolygon& y) {
    double worst = 0;
    for (const ProjPoint& p : x.vertices) {
      double best = std::numeric_limits<double>::infinity();
      for (const ProjPoint& q : y.vertices) best = std::min(best, (p.chart() - q.chart()).norm());
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

ProjPolygon pentagon(const MBlocks& b, const std::string& label) {
  const Matrix36d h = b.h1();
  std::vector<ProjPoint> pts;
  for (int k = 0; k < 6; ++k) pts.push_back(ProjPoint::from_ray(h.col(k)));
  ProjPolygon p = convex_polygon(label, pts);
  if (p.size() != 5)
    throw Error(ErrorCode::DegeneratePolygon, label + " has " + std::to_string(p.size()) + " vertices, expected 5");
  return p;
}

BFunctional b_functional(const MBlocks& b, const MBlocks& bf) {
  Eigen::Matrix<double, 12, 3> a;
  Eigen::Matrix<double, 12, 1> y;
  a.topRows<6>() = b.h1().transpose();
  a.bottomRows<6>() = bf.h1().transpose();
  y.head<6>() = b.b_row().transpose();
  y.tail<6>() = bf.b_row().transpose();

  Eigen::JacobiSVD<Eigen::Matrix<double, 12, 3>> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (!(s(2) > 1e-9 * s(0))) throw Error(ErrorCode::IllConditioned, "H^1 images do not span R^3");
  const Eigen::Vector3d c = svd.solve(y);
  BFunctional beta{c(0), c(1), c(2), 0.0};
  beta.residual = (a * c - y).cwiseAbs().maxCoeff() / std::max(y.cwiseAbs().maxCoeff(), 1e-300);
  return beta;
}

MargulisVector lift(const Eigen::Vector3d& h, const BFunctional& beta) { return {h(0), h(1), h(2), beta(h)}; }

ProjPolygon quadrilateral_Q(const BFunctional& beta) {
  const std::array<Eigen::Vector3d, 4> normals{Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
                                               Eigen::Vector3d::UnitZ(), beta.normal()};
  std::vector<ProjPoint> rays;
  for (std::size_t i = 0; i < normals.size(); ++i) {
    for (std::size_t j = i + 1; j < normals.size(); ++j) {
      const Eigen::Vector3d r = normals[i].cross(normals[j]);
      if (r.norm() <= 1e-12 * normals[i].norm() * normals[j].norm()) continue;
      for (double sign : {1.0, -1.0}) {
        const Eigen::Vector3d ray = sign * r;
        const bool feasible = std::all_of(normals.begin(), normals.end(), [&](const Eigen::Vector3d& n) {
          return n.dot(ray) >= -1e-12 * n.norm() * ray.norm();
        });
        if (feasible && ray.sum() > 0) rays.push_back(ProjPoint::from_ray(ray));
      }
    }
  }
  ProjPolygon q = convex_polygon("Q", rays);
  if (q.size() != 4)
    throw Error(ErrorCode::NotQuadrilateral, "properness cone has " + std::to_string(q.size()) + " extreme rays");
  return q;
}

double line_distance(const ProjPoint& p, const Eigen::Vector3d& f) {
  const Eigen::Vector2d grad(f(0) - f(2), f(1) - f(2));
  return std::abs(f.dot(p.h)) / grad.norm();
}

HexagonReport hexagon(const MBlocks& b, const MBlocks& bf) {
  HexagonReport r;
  r.P1 = pentagon(b, "P1");
  r.P2 = pentagon(bf, "P2");

  const Matrix36d h = b.h1(), hf = bf.h1();
  std::vector<ProjPoint> shared;
  double shared_error = 0;
  for (int k = 0; k < 4; ++k) {
    const ProjPoint p = ProjPoint::from_ray(h.col(k));
    shared_error = std::max(shared_error, (p.chart() - ProjPoint::from_ray(hf.col(k)).chart()).norm());
    shared.push_back(p);
  }
  r.qsmall_shared = shared_error <= kMergeTol;
  r.Qsmall = convex_polygon("Qsmall", shared);
  if (r.Qsmall.size() != 4) throw Error(ErrorCode::DegeneratePolygon, "Qsmall is not a quadrilateral");

  std::vector<ProjPoint> six = r.Qsmall.vertices;
  six.push_back(ProjPoint::from_ray(h.col(4)));
  six.push_back(ProjPoint::from_ray(hf.col(4)));
  six = merge_close(six);
  if (six.size() != 6)
    throw Error(ErrorCode::DegeneratePolygon, "H has " + std::to_string(six.size()) + " distinct vertices");
  const ProjPolygon hull = convex_polygon("H", six);
  r.convex = hull.size() == 6;
  r.H = r.convex ? hull : ProjPolygon{"H", angular_order(six)};

  r.beta = b_functional(b, bf);
  r.Q = quadrilateral_Q(r.beta);

  for (const ProjPoint& v : r.H.vertices) {
    double nearest = std::numeric_limits<double>::infinity();
    std::string lines;
    const auto check = [&](const char* name, const Eigen::Vector3d& f) {
      const double dist = line_distance(v, f);
      nearest = std::min(nearest, dist);
      if (dist <= kLineTol) lines += lines.empty() ? name : std::string(",") + name;
    };
    for (const auto& [name, f] : kCoordinateLines) check(name, f);
    check("ker aB", r.beta.normal());
    r.inscription = std::max(r.inscription, nearest);
    r.vertex_lines.push_back(lines);
  }
  if (r.inscription > kLineTol)
    throw Error(ErrorCode::InscriptionFailure,
                "an H vertex is " + std::to_string(r.inscription) + " from every side line of Q");
  r.h_in_q = contains(r.Q, r.H, kLineTol);

  r.clipped = intersect(r.P1, r.P2, "P1nP2");
  r.clip_error = vertex_distance(r.clipped, r.Qsmall);

  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const ProjPoint& v : r.Q.vertices) centroid += v.chart();
  centroid /= static_cast<double>(r.Q.size());
  for (double t : {1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.2, 0.3}) {
    for (const ProjPoint& v : r.Q.vertices) {
      const ProjPoint p = from_chart(v.chart() + t * (centroid - v.chart()));
      if (!contains(r.Q, p, -kMergeTol) || contains(r.H, p, kMergeTol)) continue;
      r.witness = {true, p, lift(p.h, r.beta), false};
      r.witness.proper = is_proper(r.witness.invariants);
      return r;
    }
  }
  return r;
}

OctagonReport octagon_sweep(double d, double u1, double u2, int steps) {
  if (steps < 2) throw Error(ErrorCode::InvalidConfiguration, "octagon sweep needs at least 2 steps");
  OctagonReport r;
  r.interval = theta_interval(d, u1, u2);
  const double eps = 1e-4 * r.interval.length();
  const double lo = r.interval.lo + eps, span = r.interval.length() - 2 * eps;

  for (int k = 0; k < steps; ++k) {
    const double theta = lo + span * k / (steps - 1);
    const HolonomyGroup g = holonomy({d, u1, u2, theta});
    const MBlocks b = blocks(g), bf = flip_blocks(g);
    r.thetas.push_back(theta);
    r.hexagons.push_back(hexagon(b, bf));
    r.trace_a.push_back(ProjPoint::from_ray(b.h1().col(4)));
    r.trace_b.push_back(ProjPoint::from_ray(bf.h1().col(4)));
  }

  const HexagonReport& first = r.hexagons.front();
  r.Q = first.Q;
  for (const HexagonReport& hex : r.hexagons)
    r.qsmall_spread = std::max(r.qsmall_spread, vertex_distance(hex.Qsmall, first.Qsmall));

  const auto trace_endpoints = [](const std::vector<ProjPoint>& trace, bool& monotone) {
    const Eigen::Vector2d dir = (trace.back().chart() - trace.front().chart()).normalized();
    std::vector<double> s;
    for (const ProjPoint& p : trace) s.push_back(dir.dot(p.chart() - trace.front().chart()));
    monotone = std::is_sorted(s.begin(), s.end());
    const auto [mn, mx] = std::minmax_element(s.begin(), s.end());
    return std::pair{trace[mn - s.begin()], trace[mx - s.begin()]};
  };
  for (const ProjPoint& p : r.trace_a) r.trace_a_residual = std::max(r.trace_a_residual, line_distance(p, Eigen::Vector3d::UnitZ()));
  for (const ProjPoint& p : r.trace_b) r.trace_b_residual = std::max(r.trace_b_residual, line_distance(p, first.beta.normal()));
  if (r.trace_a_residual > kLineTol || r.trace_b_residual > kLineTol)
    throw Error(ErrorCode::NonmonotoneTrace, "a moving vertex leaves its kernel line");

  const auto [a0, a1] = trace_endpoints(r.trace_a, r.trace_a_monotone);
  const auto [b0, b1] = trace_endpoints(r.trace_b, r.trace_b_monotone);
  std::vector<ProjPoint> pts = first.Qsmall.vertices;
  pts.insert(pts.end(), {a0, a1, b0, b1});
  r.octagon = convex_polygon("Octagon", pts);
  r.contains_all = std::all_of(r.hexagons.begin(), r.hexagons.end(),
                               [&](const HexagonReport& hex) { return contains(r.octagon, hex.H, kLineTol); });
  r.area_gap = area(r.Q) - area(r.octagon);
  return r;
}

}  // namespace margulis
