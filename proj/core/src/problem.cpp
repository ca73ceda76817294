#include "oum/problem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "oum/errors.hpp"

namespace oum {

DomainPolygon::DomainPolygon(std::vector<Vec2> points) : points_(std::move(points)) {
  const std::size_t n = points_.size();
  if (n < 3) throw ConfigError("domain polygon needs at least 3 points");
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = points_[i], b = points_[(i + 1) % n], c = points_[(i + 2) % n];
    if (cross(b - a, c - b) < 0.0) {
      throw ConfigError("domain polygon must be convex and counterclockwise");
    }
    area2 += cross(a, b);
  }
  if (area2 <= 0.0) throw ConfigError("domain polygon has empty interior");
}

DomainPolygon DomainPolygon::rectangle(double x0, double y0, double x1, double y1) {
  if (!(x1 > x0 && y1 > y0)) throw ConfigError("degenerate domain rectangle");
  return DomainPolygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

bool DomainPolygon::contains(Vec2 x) const {
  const std::size_t n = points_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (cross(points_[(i + 1) % n] - points_[i], x - points_[i]) < 0.0) return false;
  }
  return true;
}

bool DomainPolygon::strictly_inside(Vec2 x) const {
  const std::size_t n = points_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (cross(points_[(i + 1) % n] - points_[i], x - points_[i]) <= 0.0) return false;
  }
  return true;
}

double DomainPolygon::boundary_distance(Vec2 x) const {
  const std::size_t n = points_.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    best = std::min(best, point_segment_distance(x, points_[i], points_[(i + 1) % n]));
  }
  return best;
}

std::optional<std::array<double, 4>> DomainPolygon::as_axis_rectangle() const {
  if (points_.size() != 4) return std::nullopt;
  double x0 = points_[0].x, x1 = points_[0].x, y0 = points_[0].y, y1 = points_[0].y;
  for (const Vec2& p : points_) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  for (const Vec2& p : points_) {
    const bool on_x = (p.x == x0 || p.x == x1);
    const bool on_y = (p.y == y0 || p.y == y1);
    if (!(on_x && on_y)) return std::nullopt;
  }
  return std::array<double, 4>{x0, y0, x1, y1};
}

Vec2 project_to_boundary(const DomainPolygon& domain, Vec2 x) {
  const auto& pts = domain.points();
  const std::size_t n = pts.size();
  double best = std::numeric_limits<double>::infinity();
  Vec2 best_point = pts[0];
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = pts[i], b = pts[(i + 1) % n];
    const SegmentProjection pr = project_to_segment(x, a, b);
    if (pr.distance < best) {
      best = pr.distance;
      best_point = a + pr.t * (b - a);
    }
  }
  return best_point;
}

WeightField WeightField::isotropic(double speed) {
  if (!(speed > 0.0)) throw ConfigError("isotropic speed must be positive");
  WeightField w;
  w.kind_ = Kind::Isotropic;
  w.p0_ = speed;
  w.position_dependent_ = false;
  w.exact_g_min_ = w.exact_g_max_ = 1.0 / speed;
  return w;
}

WeightField WeightField::rectangular(double half_width_x, double half_width_y) {
  if (!(half_width_x > 0.0 && half_width_y > 0.0)) {
    throw ConfigError("rectangular profile half-widths must be positive");
  }
  WeightField w;
  w.kind_ = Kind::Rectangular;
  w.p0_ = half_width_x;
  w.p1_ = half_width_y;
  w.position_dependent_ = false;
  // the fastest direction points at a profile corner, distance hypot(a,b)
  w.exact_g_min_ = 1.0 / std::hypot(half_width_x, half_width_y);
  w.exact_g_max_ = 1.0 / std::min(half_width_x, half_width_y);
  return w;
}

WeightField WeightField::elliptic(double semi_axis_x, double semi_axis_y) {
  if (!(semi_axis_x > 0.0 && semi_axis_y > 0.0)) {
    throw ConfigError("elliptic profile semi-axes must be positive");
  }
  WeightField w;
  w.kind_ = Kind::Elliptic;
  w.p0_ = semi_axis_x;
  w.p1_ = semi_axis_y;
  w.position_dependent_ = false;
  w.exact_g_min_ = 1.0 / std::max(semi_axis_x, semi_axis_y);
  w.exact_g_max_ = 1.0 / std::min(semi_axis_x, semi_axis_y);
  return w;
}

WeightField WeightField::custom(Evaluator eval, bool position_dependent) {
  WeightField w;
  w.kind_ = Kind::Custom;
  w.eval_ = std::move(eval);
  w.position_dependent_ = position_dependent;
  return w;
}

double WeightField::operator()(Vec2 x, Vec2 u) const {
  switch (kind_) {
    case Kind::Isotropic:
      return 1.0 / p0_;
    case Kind::Rectangular:
      return std::max(std::abs(u.x) / p0_, std::abs(u.y) / p1_);
    case Kind::Elliptic: {
      const double a = u.x / p0_, b = u.y / p1_;
      return std::sqrt(a * a + b * b);
    }
    case Kind::Custom:
      return eval_(x, u);
  }
  return 0.0;  // unreachable
}

namespace {

// Deterministic positions in the closed domain: polygon vertices, centroid,
// and low-discrepancy points filtered to the polygon.
std::vector<Vec2> sample_positions(const DomainPolygon& domain, int n) {
  std::vector<Vec2> out;
  Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Vec2 hi{-lo.x, -lo.y};
  Vec2 centroid{0, 0};
  for (const Vec2& p : domain.points()) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
    centroid = centroid + p;
    out.push_back(p);
  }
  out.push_back((1.0 / static_cast<double>(domain.points().size())) * centroid);
  SplitMix64 rng(0x0a1b2c3d4e5f6071ULL);
  int guard = 0;
  while (static_cast<int>(out.size()) < n && guard < 100 * n) {
    ++guard;
    const Vec2 p{lo.x + rng.next_double() * (hi.x - lo.x),
                 lo.y + rng.next_double() * (hi.y - lo.y)};
    if (domain.contains(p)) out.push_back(p);
  }
  return out;
}

// Min or max of theta -> g(x, u(theta)) over the circle: uniform sweep, then
// golden-section refinement around every local extremum bracket.
std::pair<double, double> direction_extrema(const WeightField& weight, Vec2 x,
                                            int n_samples) {
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> val(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    const double theta = two_pi * static_cast<double>(i) / n_samples;
    const double g = weight(x, unit_at_angle(theta));
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw InvalidWeightError("weight evaluated nonpositive or non-finite");
    }
    val[static_cast<std::size_t>(i)] = g;
  }
  auto refine = [&](bool maximize) {
    const double sign = maximize ? -1.0 : 1.0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_samples; ++i) {
      const double c = sign * val[static_cast<std::size_t>(i)];
      const double l = sign * val[static_cast<std::size_t>((i + n_samples - 1) % n_samples)];
      const double r = sign * val[static_cast<std::size_t>((i + 1) % n_samples)];
      if (c <= l && c <= r) {
        const double step = two_pi / n_samples;
        const double theta = two_pi * static_cast<double>(i) / n_samples;
        const ScalarMin m = golden_section_min(
            [&](double th) { return sign * weight(x, unit_at_angle(th)); },
            theta - step, theta + step, 1e-10);
        best = std::min({best, m.value, c});
      }
    }
    return sign * best;
  };
  return {refine(false), refine(true)};
}

}  // namespace

DerivedConstants derive_constants(const WeightField& weight,
                                  const DomainPolygon& domain, int n_dir_samples,
                                  int n_pos_samples) {
  if (n_dir_samples < 64 || n_pos_samples < 64) {
    throw ConfigError("derive_constants needs at least 64 samples per axis");
  }
  const std::vector<Vec2> positions = sample_positions(domain, n_pos_samples);

  DerivedConstants d;
  d.g_min = std::numeric_limits<double>::infinity();
  d.g_max = 0.0;
  for (const Vec2& x : positions) {
    const auto [lo, hi] = direction_extrema(weight, x, n_dir_samples);
    d.g_min = std::min(d.g_min, lo);
    d.g_max = std::max(d.g_max, hi);
    if (!weight.position_dependent()) break;
  }

  if (weight.has_closed_form()) {
    // exact values win; sampling may only sit inside them
    if (d.g_min < weight.exact_g_min() - 1e-12 ||
        d.g_max > weight.exact_g_max() + 1e-12) {
      throw InvalidWeightError("sampled weight escapes its closed-form bounds");
    }
    d.g_min = weight.exact_g_min();
    d.g_max = weight.exact_g_max();
  }
  d.gamma = d.g_max / d.g_min;

  d.l_g_estimate = 0.0;
  if (weight.position_dependent()) {
    const int n_pairs = std::min<int>(48, static_cast<int>(positions.size()));
    const int n_dirs = 64;
    for (int i = 0; i < n_pairs; ++i) {
      for (int j = i + 1; j < n_pairs; ++j) {
        const Vec2 a = positions[static_cast<std::size_t>(i)];
        const Vec2 b = positions[static_cast<std::size_t>(j)];
        const double dist = norm(a - b);
        if (dist < 1e-12) continue;
        for (int k = 0; k < n_dirs; ++k) {
          const Vec2 u = unit_at_angle(2.0 * std::numbers::pi * k / n_dirs);
          d.l_g_estimate = std::max(d.l_g_estimate, std::abs(weight(a, u) - weight(b, u)) / dist);
        }
      }
    }
  }
  return d;
}

BoundaryCost BoundaryCost::constant(double value) {
  BoundaryCost q;
  q.eval_ = [value](Vec2) { return value; };
  q.q_min_ = q.q_max_ = value;
  return q;
}

BoundaryCost BoundaryCost::table(std::vector<Vec2> points, std::vector<double> values) {
  if (points.empty() || points.size() != values.size()) {
    throw ConfigError("boundary cost table needs matching nonempty points/values");
  }
  BoundaryCost q;
  q.q_min_ = *std::min_element(values.begin(), values.end());
  q.q_max_ = *std::max_element(values.begin(), values.end());
  q.eval_ = [pts = std::move(points), vals = std::move(values)](Vec2 x) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double d = norm_sq(x - pts[i]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return vals[best];
  };
  return q;
}

BoundaryCost BoundaryCost::custom(std::function<double(Vec2)> eval, double q_min,
                                  double q_max) {
  BoundaryCost q;
  q.eval_ = std::move(eval);
  q.q_min_ = q_min;
  q.q_max_ = q_max;
  return q;
}

ProblemSpec ProblemSpec::make(DomainPolygon domain, WeightField weight,
                              BoundaryCost boundary_cost, int n_dir_samples,
                              int n_pos_samples) {
  const DerivedConstants d = derive_constants(weight, domain, n_dir_samples, n_pos_samples);
  if (weight.position_dependent()) {
    // outside the domain the weight is read at the nearest boundary point
    WeightField inner = weight;
    DomainPolygon dom = domain;
    weight = WeightField::custom(
        [inner, dom](Vec2 x, Vec2 u) {
          if (!dom.contains(x)) x = project_to_boundary(dom, x);
          return inner(x, u);
        },
        true);
  }
  return ProblemSpec{std::move(domain), std::move(weight), std::move(boundary_cost),
                     d.g_min, d.g_max, d.gamma, d.l_g_estimate};
}

}  // namespace oum
