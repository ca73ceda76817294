#ifndef OUM_SOLVER_HPP
#define OUM_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <queue>
#include <unordered_map>
#include <utility>
#include <vector>

#include "oum/mesh.hpp"
#include "oum/problem.hpp"

namespace oum {

enum class Label : std::uint8_t { Far, Considered, Accepted };

enum class DebugAssertLevel { Off, Cheap, Full };

struct SolverOptions {
  // edge updates minimize to interval width golden_tol_factor * h_max
  double golden_tol_factor = 1e-9;
  DebugAssertLevel debug_assert_level = DebugAssertLevel::Off;
  // record the Near Front of every interior vertex at acceptance
  bool record_nf_snapshots = false;
};

struct SolveStats {
  std::uint64_t queue_pushes = 0;
  std::uint64_t queue_pops = 0;
  std::uint64_t stale_pops = 0;
  std::uint64_t update_evaluations = 0;  // semi-Lagrangian edge updates run
  std::uint64_t nf_edge_visits = 0;
  std::uint64_t empty_nf_fallbacks = 0;
  std::uint64_t reupdate_attempts = 0;
  std::uint64_t reupdate_improvements = 0;
  // debug-assert counters (Cheap and up)
  std::uint64_t monotonicity_violations = 0;
  // debug-assert counters (Full)
  std::uint64_t gap_bound_checks = 0;
  std::uint64_t gap_bound_violations = 0;
  std::uint64_t full_nf_checks = 0;
  std::uint64_t full_nf_mismatches = 0;
  double max_full_nf_deviation = 0.0;
};

// Near Front edge set of an interior vertex at the instant it was accepted.
struct NfSnapshot {
  VertexId vertex = -1;
  double value = 0.0;
  std::vector<EdgeId> nf_edges;  // sorted
};

struct Solution {
  std::vector<double> values;
  std::vector<VertexId> accept_order;
  SolveStats stats;
  std::vector<NfSnapshot> nf_snapshots;
};

// Uniform spatial hash of ids by cell; items are boxes no larger than the
// cell size. Queries iterate cells in a fixed order, so results are
// deterministic once deduplicated.
class UniformHash {
 public:
  void init(double cell_size);
  void insert(std::int32_t id, Vec2 lo, Vec2 hi);
  void remove(std::int32_t id, Vec2 lo, Vec2 hi);

  template <typename F>
  void for_each_in(Vec2 lo, Vec2 hi, F&& fn) const {
    const auto ix0 = cell_index(lo.x), ix1 = cell_index(hi.x);
    const auto iy0 = cell_index(lo.y), iy1 = cell_index(hi.y);
    for (std::int64_t ix = ix0; ix <= ix1; ++ix) {
      for (std::int64_t iy = iy0; iy <= iy1; ++iy) {
        const auto it = cells_.find(key(ix, iy));
        if (it == cells_.end()) continue;
        for (std::int32_t id : it->second) fn(id);
      }
    }
  }

 private:
  double cell_ = 1.0;
  std::unordered_map<std::uint64_t, std::vector<std::int32_t>> cells_;

  std::int64_t cell_index(double v) const;
  static std::uint64_t key(std::int64_t ix, std::int64_t iy);
};

// Mutable run state of the label-setting loop. Fields mirror the algorithm:
// per-vertex labels and tentative values, the Considered priority queue with
// lazy deletion, and the Accepted Front edge set kept incrementally.
struct SolverState {
  SolverOptions opts;

  std::vector<Label> labels;
  std::vector<double> values;  // Far vertices hold +infinity
  std::vector<char> is_exterior;
  std::vector<std::int32_t> considered_nbr_count;

  using QueueEntry = std::pair<double, VertexId>;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<QueueEntry>> queue;

  std::vector<char> in_accepted_front;  // per edge
  std::int64_t accepted_front_size = 0;
  UniformHash af_edge_hash;
  UniformHash considered_hash;

  std::vector<VertexId> accept_order;
  SolveStats stats;
  std::vector<NfSnapshot> nf_snapshots;

  double nf_radius = 0.0;  // gamma * h_max
  double golden_tol = 0.0;
  double last_accepted_value = 0.0;
  std::uint64_t accept_count = 0;

  // scratch
  std::vector<std::uint32_t> edge_stamp;
  std::vector<std::uint32_t> vertex_stamp;
  std::vector<std::uint32_t> skip_stamp;
  std::vector<double> best_scratch;
  std::uint32_t stamp = 0;
};

struct EdgeUpdateResult {
  double cost = 0.0;
  Barycentric2 zeta;  // weights on (a, b)
};

// Semi-Lagrangian update of xi from segment [a,b] carrying values (va, vb):
// minimizes zeta*va + (1-zeta)*vb + |x(zeta)-xi| * g(xi, direction) over
// zeta in [0,1], x(zeta) = zeta*a + (1-zeta)*b, by golden-section search to
// interval width tol (a length) plus exact endpoint comparison.
EdgeUpdateResult edge_update(Vec2 xi, Vec2 a, Vec2 b, double va, double vb,
                             const WeightField& weight, double tol);

// Accepted Front edges with some point within `radius` of xi, sorted by id.
// Uses the spatial hash when radius matches the state's Near Front radius,
// otherwise falls back to a scan.
std::vector<EdgeId> near_front(VertexId xi, const SolverState& state,
                               const TriMesh& mesh, double radius);
// Plain scan over all Accepted Front edges; oracle for the hashed path.
std::vector<EdgeId> near_front_brute(VertexId xi, const SolverState& state,
                                     const TriMesh& mesh, double radius);

// Steps 1-3: label everything Far, accept exterior vertices with their
// boundary cost, and give initial Considered vertices full Near Front values.
SolverState make_solver_state(const TriMesh& mesh, const ProblemSpec& problem,
                              const SolverOptions& opts = {});

// One round of steps 4-6. Returns the accepted vertex, or nullopt once the
// queue is exhausted.
std::optional<VertexId> accept_next(SolverState& state, const TriMesh& mesh,
                                    const ProblemSpec& problem);

Solution solve(const TriMesh& mesh, const ProblemSpec& problem,
               const SolverOptions& opts = {});

}  // namespace oum

#endif
