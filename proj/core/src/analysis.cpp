#include "oum/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "oum/errors.hpp"

namespace oum {

double rect_profile_exact(Vec2 x, const Bounds& bounds, double half_width_x,
                          double half_width_y) {
  if (x.x < bounds.x0 || x.x > bounds.x1 || x.y < bounds.y0 || x.y > bounds.y1) {
    throw ConfigError("point outside the exact-solution rectangle");
  }
  const double gx = 1.0 / half_width_x;
  const double gy = 1.0 / half_width_y;
  return std::min(std::min((bounds.x1 - x.x) * gx, (x.x - bounds.x0) * gx),
                  std::min((bounds.y1 - x.y) * gy, (x.y - bounds.y0) * gy));
}

double isotropic_exact(Vec2 x, const Bounds& bounds) {
  if (x.x < bounds.x0 || x.x > bounds.x1 || x.y < bounds.y0 || x.y > bounds.y1) {
    throw ConfigError("point outside the exact-solution rectangle");
  }
  return std::min(std::min(bounds.x1 - x.x, x.x - bounds.x0),
                  std::min(bounds.y1 - x.y, x.y - bounds.y0));
}

ErrorMetrics error_metrics(const Solution& solution, const ExactSolution& exact,
                           const TriMesh& mesh, const DomainPolygon& domain) {
  ErrorMetrics m;
  double sum = 0.0;
  for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
    const Vec2 p = mesh.position(v);
    if (!domain.contains(p)) continue;
    const double err = std::abs(solution.values[static_cast<std::size_t>(v)] - exact(p));
    sum += err;
    m.max_error = std::max(m.max_error, err);
    ++m.vertices_measured;
  }
  if (m.vertices_measured > 0) sum /= static_cast<double>(m.vertices_measured);
  m.avg_error = sum;
  return m;
}

double fit_loglog_slope(std::span<const double> h, std::span<const double> err) {
  if (h.size() != err.size() || h.size() < 2) {
    throw ConfigError("slope fit needs at least two (h, err) pairs");
  }
  const auto n = static_cast<double>(h.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceReport convergence_study(std::span<const TriMesh> meshes,
                                    const ProblemSpec& problem,
                                    const ExactSolution& exact, int jobs,
                                    const SolverOptions& opts) {
  if (meshes.size() < 3) throw ConfigError("convergence study needs at least 3 meshes");
  for (std::size_t i = 1; i < meshes.size(); ++i) {
    if (!(meshes[i].quality().h_max < meshes[i - 1].quality().h_max)) {
      throw ConfigError("study meshes must have strictly decreasing h_max");
    }
  }
  jobs = std::max(1, jobs);

  std::vector<ErrorMetrics> metrics(meshes.size());
  std::vector<std::future<void>> running;
  std::size_t next = 0;
  while (next < meshes.size() || !running.empty()) {
    while (next < meshes.size() && static_cast<int>(running.size()) < jobs) {
      const std::size_t i = next++;
      running.push_back(std::async(std::launch::async, [&, i] {
        const Solution sol = solve(meshes[i], problem, opts);
        metrics[i] = error_metrics(sol, exact, meshes[i], problem.domain);
      }));
    }
    running.front().get();
    running.erase(running.begin());
  }

  ConvergenceReport rep;
  std::vector<double> hs, avg_errs, max_errs;
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    StudyRow row;
    row.vertices = meshes[i].vertex_count();
    row.triangles = meshes[i].triangle_count();
    row.h_max = meshes[i].quality().h_max;
    row.avg_error = metrics[i].avg_error;
    row.max_error = metrics[i].max_error;
    if (i == 0) {
      row.r_avg = std::numeric_limits<double>::quiet_NaN();
      row.r_max = std::numeric_limits<double>::quiet_NaN();
    } else {
      const double dh = std::log(rep.rows[i - 1].h_max / row.h_max);
      row.r_avg = std::log(rep.rows[i - 1].avg_error / row.avg_error) / dh;
      row.r_max = std::log(rep.rows[i - 1].max_error / row.max_error) / dh;
    }
    hs.push_back(row.h_max);
    avg_errs.push_back(row.avg_error);
    max_errs.push_back(row.max_error);
    rep.rows.push_back(row);
  }
  rep.overall_r_avg = fit_loglog_slope(hs, avg_errs);
  rep.overall_r_max = fit_loglog_slope(hs, max_errs);
  return rep;
}

BoundsCheck check_value_bounds(const Solution& solution, const TriMesh& mesh,
                               const ProblemSpec& problem, double slack) {
  BoundsCheck c;
  const double q_min = problem.boundary_cost.q_min();
  const double q_max = problem.boundary_cost.q_max();
  for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
    const double val = solution.values[static_cast<std::size_t>(v)];
    const double dist = problem.domain.boundary_distance(mesh.position(v));
    const double lo = q_min - slack;
    const double hi = problem.g_max * dist + q_max + slack;
    if (val < lo || val > hi) {
      ++c.violations;
      c.max_excess = std::max(c.max_excess, std::max(lo - val, val - hi));
    }
  }
  return c;
}

BoundsCheck check_discrete_lipschitz(const Solution& solution, const TriMesh& mesh,
                                     const ProblemSpec& problem, double slack) {
  BoundsCheck c;
  const double m = mesh.quality().ratio_m;
  const double constant = m * m * problem.g_max;
  for (VertexId i = 0; i < mesh.vertex_count(); ++i) {
    for (VertexId j = i + 1; j < mesh.vertex_count(); ++j) {
      const double gap = std::abs(solution.values[static_cast<std::size_t>(i)] -
                                  solution.values[static_cast<std::size_t>(j)]);
      const double allowed =
          constant * norm(mesh.position(i) - mesh.position(j)) + slack;
      if (gap > allowed) {
        ++c.violations;
        c.max_excess = std::max(c.max_excess, gap - allowed);
      }
    }
  }
  return c;
}

BoundsCheck check_acceptance_monotone(const Solution& solution, double slack) {
  BoundsCheck c;
  double prev = -std::numeric_limits<double>::infinity();
  for (VertexId v : solution.accept_order) {
    const double val = solution.values[static_cast<std::size_t>(v)];
    if (val < prev - slack) {
      ++c.violations;
      c.max_excess = std::max(c.max_excess, prev - val);
    }
    prev = std::max(prev, val);
  }
  return c;
}

}  // namespace oum
