#include "margulis/deform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>
#include <unordered_map>

namespace margulis {

namespace {

double radical_inverse(int index, int base) {
  double result = 0, f = 1.0 / base;
  for (int i = index; i > 0; i /= base) {
    result += f * (i % base);
    f /= base;
  }
  return result;
}

// Planar sector {cos(a) e1 + sin(a) e2 : 0 <= a <= angle} in Euclidean coordinates.
struct Sector {
  MinkVectord e1, e2;
  double angle;
};

Sector sector_between(const MinkVectord& from, const MinkVectord& to) {
  const MinkVectord e1 = from.normalized();
  const MinkVectord e2 = (to - to.dot(e1) * e1).normalized();
  return {e1, e2, std::acos(std::clamp(e1.dot(to.normalized()), -1.0, 1.0))};
}

Sector half_plane(const MinkVectord& edge, const MinkVectord& side) {
  const MinkVectord e1 = edge.normalized();
  return {e1, (side - side.dot(e1) * e1).normalized(), std::numbers::pi};
}

bool same_plane(const CrookedPlane& a, const CrookedPlane& b) {
  const double scale = std::max({1.0, max_norm(a.vertex), max_norm(b.vertex)});
  if (max_norm(a.vertex - b.vertex) > 1e-9 * scale) return false;
  return max_norm(a.director - b.director) <= 1e-9 || max_norm(a.director + b.director) <= 1e-9;
}

struct CellKey {
  long long x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    const std::size_t h = std::hash<long long>{}(k.x);
    return h ^ (std::hash<long long>{}(k.y) * 0x9e3779b97f4a7c15ULL) ^ (std::hash<long long>{}(k.z) * 0xc2b2ae3d27d4eb4fULL);
  }
};

struct ClosestPair {
  double distance = std::numeric_limits<double>::infinity();
  int first = -1, second = -1;
};

// Closest pair of points with different labels among pairs in neighbouring
// cells of a grid with the given cell size.
ClosestPair closest_in_grid(const std::vector<MinkVectord>& points, const std::vector<int>& owner, double cell) {
  auto key = [cell](const MinkVectord& p) {
    return CellKey{static_cast<long long>(std::floor(p(0) / cell)), static_cast<long long>(std::floor(p(1) / cell)),
                   static_cast<long long>(std::floor(p(2) / cell))};
  };
  std::vector<std::pair<CellKey, int>> keyed;
  keyed.reserve(points.size());
  for (int i = 0; i < static_cast<int>(points.size()); ++i) keyed.emplace_back(key(points[i]), i);
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first.x, a.first.y, a.first.z, a.second) < std::tie(b.first.x, b.first.y, b.first.z, b.second);
  });

  // Cells as [begin, end) ranges of `keyed`.
  std::unordered_map<CellKey, std::pair<std::size_t, std::size_t>, CellHash> cells;
  cells.reserve(keyed.size());
  for (std::size_t i = 0; i < keyed.size();) {
    std::size_t j = i;
    while (j < keyed.size() && keyed[j].first == keyed[i].first) ++j;
    cells.emplace(keyed[i].first, std::pair{i, j});
    i = j;
  }

  ClosestPair best;
  double best2 = best.distance;
  const auto scan = [&](std::size_t i, std::size_t j) {
    const int a = keyed[i].second, b = keyed[j].second;
    if (owner[a] == owner[b]) return;
    const double d2 = (points[a] - points[b]).squaredNorm();
    if (d2 < best2 || (d2 == best2 && std::minmax(a, b) < std::minmax(best.first, best.second))) {
      best2 = d2;
      best.first = a;
      best.second = b;
    }
  };
  for (const auto& [k, range] : cells) {
    const auto [begin, end] = range;
    for (std::size_t i = begin; i < end; ++i)
      for (std::size_t j = i + 1; j < end; ++j) scan(i, j);
    // Half of the 26 neighbours: each unordered pair of cells is visited once.
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy)
        for (long long dz = -1; dz <= 1; ++dz) {
          if (std::tie(dx, dy, dz) <= std::tuple<long long, long long, long long>(0, 0, 0)) continue;
          const auto it = cells.find({k.x + dx, k.y + dy, k.z + dz});
          if (it == cells.end()) continue;
          for (std::size_t i = begin; i < end; ++i)
            for (std::size_t j = it->second.first; j < it->second.second; ++j) scan(i, j);
        }
  }
  best.distance = std::sqrt(best2);
  if (best.first >= 0) {
    const int a = best.first, b = best.second;
    best.first = owner[std::min(a, b)];
    best.second = owner[std::max(a, b)];
  }
  return best;
}

void require_coefficient(double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::InvalidConfiguration, "stem coefficient is not finite");
  if (value < 0) throw Error(ErrorCode::NegativeCoefficient, "stem coefficients must be >= 0");
}

}  // namespace

StemCoeffs StemCoeffs::uniform(double value) {
  StemCoeffs c;
  for (auto& p : c.pairs) p = {value, value};
  return c;
}

StemCoeffs StemCoeffs::from_vector(const Vector6d& v) {
  StemCoeffs c;
  for (int i = 0; i < 3; ++i) c.pairs[i] = {v(2 * i), v(2 * i + 1)};
  return c;
}

Vector6d StemCoeffs::to_vector() const {
  Vector6d v;
  for (int i = 0; i < 3; ++i) {
    v(2 * i) = pairs[i][0];
    v(2 * i + 1) = pairs[i][1];
  }
  return v;
}

bool StemCoeffs::strictly_positive() const {
  return std::all_of(pairs.begin(), pairs.end(), [](const auto& p) { return p[0] > 0 && p[1] > 0; });
}

MinkVectord stem_point(const MinkVectord& w, double um, double up) {
  require_spacelike(w, "stem_point");
  require_coefficient(um);
  require_coefficient(up);
  const NullFrame<double> frame = null_frame(w);
  return um * frame.minus - up * frame.plus;
}

Deformation make_deformation(const HolonomyGroup& group, const StemCoeffs& coeffs) {
  const auto& [c1, c2, c0] = coeffs.pairs;
  return {group, coeffs, stem_point(group.sides.w1, c1[0], c1[1]), stem_point(group.sides.w2, c2[0], c2[1]),
          stem_point(group.sides.w0, c0[0], c0[1])};
}

AffineGenerators affine_generators(const Deformation& d) {
  AffineGenerators g;
  g.r1 = affine_involution(d.group.RX, d.q1);
  g.r2 = affine_involution(d.group.RY, d.q2);
  g.r0 = affine_involution(d.group.i0, d.q0);
  g.X = compose(g.r1, g.r0);
  g.Y = compose(g.r0, g.r2);
  g.A = compose(g.r1, g.r2);
  g.B = compose(compose(g.r2, g.r0), compose(g.r1, g.r0));
  return g;
}

double margulis_direct(const AffineIsometryd& g, const MinkVectord& g0, const MinkVectord& p) {
  const IsometryClass cls = classify(g.linear);
  if (cls != IsometryClass::Hyperbolic && cls != IsometryClass::GlideReflection)
    throw Error(ErrorCode::NotHyperbolicType, std::string("margulis_direct: linear part is ") + to_string(cls));
  return lorentz_dot(apply(g, p) - p, g0);
}

MargulisVector margulis_direct(const Deformation& d, const MinkVectord& p) {
  // Evaluated in long double from the side vectors and q-points: the displacement
  // of B has size |B| |q| while B^0 is only as accurate as B, so double loses
  // about |B|^2 eps.
  using Ld = long double;
  using V = MinkVector<Ld>;
  const HolonomyGroup& h = d.group;
  const LinearIsometry<Ld> rx = spine_reflection(V(h.sides.w1.cast<Ld>()));
  const LinearIsometry<Ld> ry = spine_reflection(V(h.sides.w2.cast<Ld>()));
  const LinearIsometry<Ld> i0 = point_symmetry(V(h.p0.cast<Ld>()));
  const AffineIsometry<Ld> r1 = affine_involution(rx, V(d.q1.cast<Ld>()));
  const AffineIsometry<Ld> r2 = affine_involution(ry, V(d.q2.cast<Ld>()));
  const AffineIsometry<Ld> r0 = affine_involution(i0, V(d.q0.cast<Ld>()));
  const V base = p.cast<Ld>();
  const auto displacement = [&](std::initializer_list<const AffineIsometry<Ld>*> word) {
    LinearIsometry<Ld> linear;
    V x = base;
    for (auto it = std::rbegin(word); it != std::rend(word); ++it) {
      x = apply(**it, x);
      linear = (*it)->linear * linear;
    }
    return static_cast<double>(lorentz_dot(V(x - base), neutral_vector(linear)));
  };
  return {displacement({&r1, &r0}), displacement({&r0, &r2}), displacement({&r1, &r2}),
          displacement({&r2, &r0, &r1, &r0})};
}

MargulisVector margulis_closed(const Deformation& d) {
  const HolonomyGroup& g = d.group;
  const AffineIsometryd r0 = affine_involution(g.i0, d.q0);
  return {2 * lorentz_dot(d.q1 - d.q0, g.X0), 2 * lorentz_dot(d.q0 - d.q2, g.Y0),
          2 * lorentz_dot(d.q1 - d.q2, g.A0), 2 * lorentz_dot(d.q2 - apply(r0, d.q1), g.B0)};
}

bool is_proper(const MargulisVector& m) {
  const auto v = m.values();
  double scale = 0;
  for (double a : v) {
    if (!std::isfinite(a)) return false;
    scale = std::max(scale, std::abs(a));
  }
  if (scale == 0) return false;
  const double floor = Tolerance<double>::geometric * scale;
  const bool positive = std::all_of(v.begin(), v.end(), [floor](double a) { return a > floor; });
  const bool negative = std::all_of(v.begin(), v.end(), [floor](double a) { return a < -floor; });
  return positive || negative;
}

CrookedPart classify_point(const CrookedPlane& c, const MinkVectord& x, double tol) {
  const MinkVectord v = lorentz_unit(c.director);
  const NullFrame<double> f = null_frame(v);
  const MinkVectord d = x - c.vertex;
  const double scale = std::max(1.0, max_norm(d));
  if (std::abs(lorentz_dot(d, v)) <= tol * scale && lorentz_norm2(d) <= tol * scale * scale) return CrookedPart::Stem;
  if (std::abs(lorentz_dot(d, f.plus)) <= tol * scale && lorentz_dot(d, v) >= -tol * scale)
    return CrookedPart::PlusWing;
  if (std::abs(lorentz_dot(d, f.minus)) <= tol * scale && lorentz_dot(d, v) <= tol * scale)
    return CrookedPart::MinusWing;
  return CrookedPart::None;
}

CrookedPlane image(const AffineIsometryd& g, const CrookedPlane& c) {
  return {lorentz_unit(g.linear(c.director)), apply(g, c.vertex)};
}

std::vector<MinkVectord> crooked_sample(const CrookedPlane& c, double radius, int n) {
  std::vector<MinkVectord> out;
  if (n < 1 || !(radius > 0)) return out;
  out.reserve(n);
  out.push_back(c.vertex);

  const MinkVectord v = lorentz_unit(c.director);
  const NullFrame<double> f = null_frame(v);
  const std::array<Sector, 4> sectors{sector_between(f.minus, f.plus), sector_between(-f.minus, -f.plus),
                                      half_plane(f.plus, v), half_plane(f.minus, -v)};

  double total_angle = 0;
  for (const Sector& s : sectors) total_angle += s.angle;
  const int remaining = n - 1;
  std::array<int, 4> counts{};
  int assigned = 0;
  for (std::size_t k = 0; k < sectors.size(); ++k) {
    counts[k] = static_cast<int>(std::floor(remaining * sectors[k].angle / total_angle));
    assigned += counts[k];
  }
  for (std::size_t k = 0; assigned < remaining; k = (k + 1) % sectors.size(), ++assigned) ++counts[k];

  for (std::size_t k = 0; k < sectors.size(); ++k) {
    const Sector& s = sectors[k];
    for (int i = 1; i <= counts[k]; ++i) {
      const double r = radius * std::sqrt(radical_inverse(i, 2));
      const double a = s.angle * radical_inverse(i, 3);
      out.push_back(c.vertex + r * (std::cos(a) * s.e1 + std::sin(a) * s.e2));
    }
  }
  return out;
}

std::vector<Word> reduced_words(const AffineGenerators& gens, int max_length) {
  const std::array<std::pair<const char*, const AffineIsometryd*>, 3> letters{
      {{"r1", &gens.r1}, {"r2", &gens.r2}, {"r0", &gens.r0}}};
  std::vector<Word> words{{"e", AffineIsometryd::identity()}};
  std::vector<std::pair<int, std::size_t>> frontier{{-1, 0}};  // (first letter, index into words)
  for (int length = 1; length <= max_length; ++length) {
    std::vector<std::pair<int, std::size_t>> next;
    for (const auto& [first, index] : frontier) {
      for (int l = 0; l < 3; ++l) {
        if (l == first) continue;
        const Word& w = words[index];
        std::string label = letters[l].first;
        if (w.label != "e") label += "." + w.label;
        words.push_back({label, compose(*letters[l].second, w.map)});
        next.emplace_back(l, words.size() - 1);
      }
    }
    frontier = std::move(next);
  }
  return words;
}

std::vector<CrookedPlane> base_planes(const Deformation& d) {
  return {{d.group.sides.w1, d.q1}, {d.group.sides.w2, d.q2}, {d.group.sides.w0, d.q0}};
}

DisjointnessReport disjointness_oracle(const std::vector<CrookedPlane>& planes, const std::vector<Word>& words,
                                       double radius, int n) {
  DisjointnessReport report;
  std::vector<CrookedPlane> images;
  std::vector<std::size_t> base_of;
  for (std::size_t b = 0; b < planes.size(); ++b) {
    const std::size_t first_image = images.size();
    for (const Word& w : words) {
      const CrookedPlane c = image(w.map, planes[b]);
      if (std::any_of(images.begin() + first_image, images.end(),
                      [&](const CrookedPlane& o) { return same_plane(o, c); })) {
        ++report.merged_count;
        continue;
      }
      images.push_back(c);
      base_of.push_back(b);
      report.labels.push_back(w.label + ":C" + std::to_string(b));
    }
  }
  report.plane_count = static_cast<int>(images.size());
  if (images.size() < 2) {
    report.min_distance = std::numeric_limits<double>::infinity();
    return report;
  }

  std::vector<MinkVectord> points;
  std::vector<int> owner;
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (const MinkVectord& p : crooked_sample(images[i], radius, n)) {
      points.push_back(p);
      owner.push_back(static_cast<int>(i));
    }
  }

  double cell = std::max(4 * radius / std::sqrt(static_cast<double>(std::max(n, 1))), 1e-6 * radius);
  ClosestPair best;
  for (;;) {
    best = closest_in_grid(points, owner, cell);
    if (best.distance <= cell) break;
    cell = std::isfinite(best.distance) ? best.distance : 2 * cell;
  }
  report.min_distance = best.distance;
  report.closest_first = best.first;
  report.closest_second = best.second;
  return report;
}

}  // namespace margulis
