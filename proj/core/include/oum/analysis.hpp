#ifndef OUM_ANALYSIS_HPP
#define OUM_ANALYSIS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "oum/mesh.hpp"
#include "oum/problem.hpp"
#include "oum/solver.hpp"

namespace oum {

using ExactSolution = std::function<double(Vec2)>;

// Value function for the rectangular speed profile on an axis-aligned
// rectangle with zero exit cost: the lower envelope of one plane per wall.
double rect_profile_exact(Vec2 x, const Bounds& bounds, double half_width_x,
                          double half_width_y);

// Distance to the rectangle boundary (unit-speed isotropic value function).
double isotropic_exact(Vec2 x, const Bounds& bounds);

struct ErrorMetrics {
  double avg_error = 0.0;
  double max_error = 0.0;
  std::int64_t vertices_measured = 0;
};

// Vertex errors against an exact solution, restricted to the closed domain.
ErrorMetrics error_metrics(const Solution& solution, const ExactSolution& exact,
                           const TriMesh& mesh, const DomainPolygon& domain);

// Least-squares slope of log(err) against log(h).
double fit_loglog_slope(std::span<const double> h, std::span<const double> err);

struct StudyRow {
  std::int64_t vertices = 0;
  std::int64_t triangles = 0;
  double h_max = 0.0;
  double avg_error = 0.0;
  double r_avg = 0.0;  // incremental rate; NaN on the first row
  double max_error = 0.0;
  double r_max = 0.0;
};

struct ConvergenceReport {
  std::vector<StudyRow> rows;  // sorted by decreasing h_max
  double overall_r_avg = 0.0;
  double overall_r_max = 0.0;
};

// Solves every mesh, measures vertex errors, and fits overall log-log rates.
// Meshes must come in strictly decreasing h_max order; rows can run on up to
// `jobs` threads (each solve is independent and deterministic).
ConvergenceReport convergence_study(std::span<const TriMesh> meshes,
                                    const ProblemSpec& problem,
                                    const ExactSolution& exact, int jobs = 1,
                                    const SolverOptions& opts = {});

// Lemma-style solution checks used across the test suites.
struct BoundsCheck {
  std::int64_t violations = 0;
  double max_excess = 0.0;
};

// q_min <= V <= G_max * dist(x, boundary) + q_max at every vertex.
BoundsCheck check_value_bounds(const Solution& solution, const TriMesh& mesh,
                               const ProblemSpec& problem, double slack = 1e-9);

// |V(xi) - V(xj)| <= M^2 * G_max * |xi - xj| over all vertex pairs.
BoundsCheck check_discrete_lipschitz(const Solution& solution, const TriMesh& mesh,
                                     const ProblemSpec& problem, double slack = 1e-9);

// Accepted values must be nondecreasing along the acceptance order.
BoundsCheck check_acceptance_monotone(const Solution& solution, double slack = 1e-12);

}  // namespace oum

#endif
