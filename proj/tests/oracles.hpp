// Test-only oracles, kept independent of the code paths they check.
#ifndef OUM_TESTS_ORACLES_HPP
#define OUM_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "oum/geometry.hpp"
#include "oum/mesh.hpp"
#include "oum/problem.hpp"

namespace oum::test {

// Brute-force scan of the semi-Lagrangian objective over a dense zeta grid.
inline double grid_scan_edge_update(Vec2 xi, Vec2 a, Vec2 b, double va, double vb,
                                    const WeightField& weight, int n = 100000) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double z = static_cast<double>(i) / n;
    const Vec2 x = z * a + (1.0 - z) * b;
    const Vec2 d = x - xi;
    const double tau = norm(d);
    best = std::min(best, z * va + (1.0 - z) * vb + tau * weight(xi, (1.0 / tau) * d));
  }
  return best;
}

// Dense sweep of the Hamiltonian direction minimization.
inline double direction_scan_hamiltonian(Vec2 x, Vec2 p, const WeightField& weight,
                                         int n = 1000000) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const Vec2 u = unit_at_angle(2.0 * std::numbers::pi * i / n);
    best = std::min(best, dot(p, u) + weight(x, u));
  }
  return -best;
}

// Edge minimization used by the reference solver: dense scan plus golden
// refinement of the best bracket, endpoints exact.
inline double oracle_edge_min(Vec2 xi, Vec2 a, Vec2 b, double va, double vb,
                              const WeightField& weight) {
  auto f = [&](double z) {
    const Vec2 x = z * a + (1.0 - z) * b;
    const Vec2 d = x - xi;
    const double tau = norm(d);
    return z * va + (1.0 - z) * vb + tau * weight(xi, (1.0 / tau) * d);
  };
  constexpr int n = 257;
  double best = std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i <= n; ++i) {
    const double v = f(static_cast<double>(i) / n);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  const double lo = std::max(0.0, static_cast<double>(best_i - 1) / n);
  const double hi = std::min(1.0, static_cast<double>(best_i + 1) / n);
  const ScalarMin m = golden_section_min(f, lo, hi, 1e-13);
  return std::min({best, m.value, f(0.0), f(1.0)});
}

// Independent label-setting solver: no spatial hashing, Accepted Front
// recomputed from scratch every round, and every Considered vertex
// re-minimized over the whole front (keeping its running minimum) before
// each acceptance. Quadratic cost; use on small meshes only.
inline std::vector<double> reference_solve(const TriMesh& mesh,
                                           const ProblemSpec& problem) {
  const auto nv = static_cast<std::size_t>(mesh.vertex_count());
  const double radius = problem.gamma * mesh.quality().h_max;
  enum { kFar, kConsidered, kAccepted };
  std::vector<int> label(nv, kFar);
  std::vector<double> value(nv, std::numeric_limits<double>::infinity());

  for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
    if (problem.domain.strictly_inside(mesh.position(v))) continue;
    label[static_cast<std::size_t>(v)] = kAccepted;
    value[static_cast<std::size_t>(v)] =
        problem.boundary_cost(project_to_boundary(problem.domain, mesh.position(v)));
  }
  for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
    if (label[static_cast<std::size_t>(v)] != kAccepted) continue;
    for (VertexId w : mesh.vertex_neighbors(v)) {
      if (label[static_cast<std::size_t>(w)] == kFar) {
        label[static_cast<std::size_t>(w)] = kConsidered;
      }
    }
  }

  for (;;) {
    // Accepted Front edges: both endpoints Accepted, one with a Considered
    // neighbour
    std::vector<EdgeId> front;
    for (EdgeId e = 0; e < mesh.edge_count(); ++e) {
      const auto [a, b] = mesh.edge(e);
      if (label[static_cast<std::size_t>(a)] != kAccepted ||
          label[static_cast<std::size_t>(b)] != kAccepted) {
        continue;
      }
      bool touches_considered = false;
      for (VertexId u : {a, b}) {
        for (VertexId w : mesh.vertex_neighbors(u)) {
          if (label[static_cast<std::size_t>(w)] == kConsidered) touches_considered = true;
        }
      }
      if (touches_considered) front.push_back(e);
    }

    VertexId best_v = -1;
    for (VertexId w = 0; w < mesh.vertex_count(); ++w) {
      if (label[static_cast<std::size_t>(w)] != kConsidered) continue;
      const Vec2 p = mesh.position(w);
      double best = value[static_cast<std::size_t>(w)];
      for (EdgeId e : front) {
        const auto [a, b] = mesh.edge(e);
        const Vec2 pa = mesh.position(a), pb = mesh.position(b);
        if (point_segment_distance(p, pa, pb) > radius) continue;
        best = std::min(best, oracle_edge_min(p, pa, pb, value[static_cast<std::size_t>(a)],
                                              value[static_cast<std::size_t>(b)],
                                              problem.weight));
      }
      value[static_cast<std::size_t>(w)] = best;
      if (best_v < 0 || best < value[static_cast<std::size_t>(best_v)]) best_v = w;
    }
    if (best_v < 0) break;
    label[static_cast<std::size_t>(best_v)] = kAccepted;
    for (VertexId w : mesh.vertex_neighbors(best_v)) {
      if (label[static_cast<std::size_t>(w)] == kFar) {
        label[static_cast<std::size_t>(w)] = kConsidered;
      }
    }
  }
  return value;
}

}  // namespace oum::test

#endif
