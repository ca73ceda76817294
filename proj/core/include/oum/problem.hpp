#ifndef OUM_PROBLEM_HPP
#define OUM_PROBLEM_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oum/geometry.hpp"

namespace oum {

// Convex counterclockwise polygon bounding the open region where the value
// function is solved. Vertices outside (or on) the boundary seed the solver.
class DomainPolygon {
 public:
  explicit DomainPolygon(std::vector<Vec2> points);

  static DomainPolygon rectangle(double x0, double y0, double x1, double y1);

  const std::vector<Vec2>& points() const { return points_; }

  bool contains(Vec2 x) const;         // closed region
  bool strictly_inside(Vec2 x) const;  // open region
  double boundary_distance(Vec2 x) const;

  // Axis-aligned rectangle corners if the polygon is one.
  std::optional<std::array<double, 4>> as_axis_rectangle() const;

 private:
  std::vector<Vec2> points_;
};

// Nearest point of the polygon boundary (unique for points outside a convex
// region; ties inside resolve to the lowest polygon edge).
Vec2 project_to_boundary(const DomainPolygon& domain, Vec2 x);

// Positive direction-dependent cost per unit length g(x, u), u a unit vector.
// Built-in profiles are position independent and carry exact extrema so the
// anisotropy coefficient is never underestimated.
class WeightField {
 public:
  enum class Kind { Isotropic, Rectangular, Elliptic, Custom };

  using Evaluator = std::function<double(Vec2, Vec2)>;

  static WeightField isotropic(double speed);
  // g(x,u) = max(|u_x|/half_width_x, |u_y|/half_width_y); the speed profile
  // is the solid rectangle with those half-widths.
  static WeightField rectangular(double half_width_x, double half_width_y);
  // g(x,u) = sqrt((u_x/a)^2 + (u_y/b)^2); elliptic speed profile.
  static WeightField elliptic(double semi_axis_x, double semi_axis_y);
  static WeightField custom(Evaluator eval, bool position_dependent = true);

  double operator()(Vec2 x, Vec2 u) const;

  Kind kind() const { return kind_; }
  bool position_dependent() const { return position_dependent_; }
  bool has_closed_form() const { return kind_ != Kind::Custom; }
  double exact_g_min() const { return exact_g_min_; }
  double exact_g_max() const { return exact_g_max_; }
  double param0() const { return p0_; }
  double param1() const { return p1_; }

 private:
  WeightField() = default;

  Kind kind_ = Kind::Custom;
  double p0_ = 0.0, p1_ = 0.0;
  Evaluator eval_;
  bool position_dependent_ = true;
  double exact_g_min_ = 0.0, exact_g_max_ = 0.0;
};

struct DerivedConstants {
  double g_min = 0.0;
  double g_max = 0.0;
  double gamma = 0.0;  // g_max / g_min
  double l_g_estimate = 0.0;
};

// Samples g over directions (uniform sweep plus golden-section refinement
// around the best samples) and positions inside the domain. For built-in
// profiles the exact extrema are returned and sampling only cross-checks.
DerivedConstants derive_constants(const WeightField& weight,
                                  const DomainPolygon& domain,
                                  int n_dir_samples, int n_pos_samples);

// Exit cost q on the domain boundary.
class BoundaryCost {
 public:
  static BoundaryCost constant(double value);
  // Piecewise-nearest interpolation of tabulated boundary points.
  static BoundaryCost table(std::vector<Vec2> points, std::vector<double> values);
  static BoundaryCost custom(std::function<double(Vec2)> eval, double q_min, double q_max);

  double operator()(Vec2 x) const { return eval_(x); }
  double q_min() const { return q_min_; }
  double q_max() const { return q_max_; }

 private:
  std::function<double(Vec2)> eval_;
  double q_min_ = 0.0, q_max_ = 0.0;
};

// Full problem data with derived constants. Immutable once made.
struct ProblemSpec {
  DomainPolygon domain;
  WeightField weight;
  BoundaryCost boundary_cost;
  double g_min = 0.0;
  double g_max = 0.0;
  double gamma = 0.0;
  double l_g = 0.0;

  // Derives constants, cross-checks built-ins by sampling, and wraps
  // position-dependent custom weights so that evaluations outside the domain
  // use the nearest boundary point.
  static ProblemSpec make(DomainPolygon domain, WeightField weight,
                          BoundaryCost boundary_cost, int n_dir_samples = 512,
                          int n_pos_samples = 64);
};

}  // namespace oum

#endif
