#ifndef OUM_HAMILTONIAN_HPP
#define OUM_HAMILTONIAN_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "oum/mesh.hpp"
#include "oum/problem.hpp"

namespace oum {

// Edge set an update minimizes over, owned by the vertex it updates.
// Never contains an edge through the owner.
struct Stencil {
  VertexId owner = -1;
  std::vector<EdgeId> edges;
};

// Continuous Hamiltonian H(x,p) = -min over unit u of (p.u + g(x,u)).
// The circle is swept with n_samples directions and every local minimum is
// refined by golden-section search to 1e-12 radians.
double hamiltonian(Vec2 x, Vec2 p, const WeightField& weight, int n_samples = 512);

// Discrete analogue: -min over stencil edges and barycentric positions of
//   (interpolated phi - mu) / tau + g(xi, direction).
// phi is indexed by vertex id and must be finite on stencil vertices.
double numerical_hamiltonian(const Stencil& stencil, std::span<const double> phi,
                             VertexId xi, double mu, const TriMesh& mesh,
                             const WeightField& weight);

// Closed ring of edges around xi: the boundary of the triangle patch within
// `hops` graph distance, dropping edges with points farther than max_dist.
// Directionally complete for interior vertices whose patch is a disk.
Stencil build_ring_stencil(const TriMesh& mesh, VertexId xi, int hops,
                           double max_dist);

// True when every direction from the owner hits some stencil edge.
bool directionally_complete(const TriMesh& mesh, const Stencil& stencil,
                            int n_dirs = 720);

// The root in mu of the numerical Hamiltonian must equal the update-formula
// minimum, attained by the same (edge, zeta).
struct EquivalenceReport {
  double mu_tilde = 0.0;        // update-formula value
  double residual = 0.0;        // numerical Hamiltonian at mu_tilde
  double minimizer_gap = 0.0;   // update objective at the Hamiltonian's argmin, minus mu_tilde
  bool pass = false;
};
EquivalenceReport check_equivalence(const Stencil& stencil,
                                    std::span<const double> values, VertexId xi,
                                    const TriMesh& mesh, const WeightField& weight,
                                    double tolerance);

struct MonotonicityReport {
  int trials = 0;
  int violations = 0;
  double max_violation = 0.0;
};
// Randomized trials of phi_lo <= phi_hi; the numerical Hamiltonian must not
// increase when the stencil values increase.
MonotonicityReport check_monotonicity(const Stencil& stencil, VertexId xi,
                                      const TriMesh& mesh, const WeightField& weight,
                                      int trials, std::uint64_t seed = 7u);

// Smooth test field with analytic gradient (hessian_norm_bound is the
// largest singular value of the hessian over the meshes, used only for the
// reported consistency-constant ratio).
struct TestField {
  std::function<double(Vec2)> value;
  std::function<Vec2(Vec2)> grad;
  double hessian_norm_bound = 0.0;
};

struct ConsistencyRow {
  double h_max = 0.0;
  double max_residual = 0.0;
  std::int64_t vertices_checked = 0;
};
struct ConsistencyReport {
  std::vector<ConsistencyRow> rows;
  double fitted_order = 0.0;  // slope of log(residual) against log(h_max)
  // measured residual over the theoretical bound C1 * |hess| * h_max (0 when
  // the bound is zero); reported, not asserted
  double bound_ratio_max = 0.0;
};
// Max |H - H_numerical| over interior vertices of each mesh, with stencils
// built from the mesh geometry, plus the fitted convergence order.
ConsistencyReport check_consistency(std::span<const TriMesh> meshes,
                                    const WeightField& weight,
                                    const TestField& field);

}  // namespace oum

#endif
