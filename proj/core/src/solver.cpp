#include "oum/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "oum/errors.hpp"

namespace oum {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec2 edge_lo(const TriMesh& mesh, EdgeId e) {
  const auto [a, b] = mesh.edge(e);
  const Vec2 pa = mesh.position(a), pb = mesh.position(b);
  return {std::min(pa.x, pb.x), std::min(pa.y, pb.y)};
}

Vec2 edge_hi(const TriMesh& mesh, EdgeId e) {
  const auto [a, b] = mesh.edge(e);
  const Vec2 pa = mesh.position(a), pb = mesh.position(b);
  return {std::max(pa.x, pb.x), std::max(pa.y, pb.y)};
}

bool accepted_front_pred(const SolverState& st, const TriMesh& mesh, EdgeId e) {
  const auto [a, b] = mesh.edge(e);
  return st.labels[static_cast<std::size_t>(a)] == Label::Accepted &&
         st.labels[static_cast<std::size_t>(b)] == Label::Accepted &&
         (st.considered_nbr_count[static_cast<std::size_t>(a)] > 0 ||
          st.considered_nbr_count[static_cast<std::size_t>(b)] > 0);
}

double edge_distance(const SolverState&, const TriMesh& mesh, Vec2 p, EdgeId e) {
  const auto [a, b] = mesh.edge(e);
  return point_segment_distance(p, mesh.position(a), mesh.position(b));
}

std::uint32_t next_stamp(SolverState& st) {
  if (++st.stamp == 0) {  // wrapped; clear lazily-stamped arrays
    std::fill(st.edge_stamp.begin(), st.edge_stamp.end(), 0u);
    std::fill(st.vertex_stamp.begin(), st.vertex_stamp.end(), 0u);
    std::fill(st.skip_stamp.begin(), st.skip_stamp.end(), 0u);
    st.stamp = 1;
  }
  return st.stamp;
}

// Evaluate the update of vertex v from every edge of `edges`, returning the
// smallest cost (min over a set, so evaluation order does not matter).
double min_update_over(SolverState& st, const TriMesh& mesh,
                       const ProblemSpec& problem, VertexId v,
                       const std::vector<EdgeId>& edges) {
  const Vec2 p = mesh.position(v);
  double best = kInf;
  for (EdgeId e : edges) {
    const auto [a, b] = mesh.edge(e);
    const EdgeUpdateResult r = edge_update(
        p, mesh.position(a), mesh.position(b), st.values[static_cast<std::size_t>(a)],
        st.values[static_cast<std::size_t>(b)], problem.weight, st.golden_tol);
    ++st.stats.update_evaluations;
    best = std::min(best, r.cost);
  }
  return best;
}

// Full Near Front update (steps 3 and 5). When no Accepted Front edge lies
// within the radius, falls back to the Accepted Front edges incident to the
// vertex's Accepted neighbours.
double full_nf_update(SolverState& st, const TriMesh& mesh,
                      const ProblemSpec& problem, VertexId v) {
  std::vector<EdgeId> nf = near_front(v, st, mesh, st.nf_radius);
  st.stats.nf_edge_visits += nf.size();
  if (nf.empty()) {
    ++st.stats.empty_nf_fallbacks;
    const std::uint32_t s = next_stamp(st);
    for (VertexId u : mesh.vertex_neighbors(v)) {
      if (st.labels[static_cast<std::size_t>(u)] != Label::Accepted) continue;
      for (EdgeId e : mesh.vertex_edges(u)) {
        if (st.in_accepted_front[static_cast<std::size_t>(e)] &&
            st.edge_stamp[static_cast<std::size_t>(e)] != s) {
          st.edge_stamp[static_cast<std::size_t>(e)] = s;
          nf.push_back(e);
        }
      }
    }
    std::sort(nf.begin(), nf.end());
  }
  return min_update_over(st, mesh, problem, v, nf);
}

void sync_af_edge(SolverState& st, const TriMesh& mesh, EdgeId e,
                  std::vector<EdgeId>* newly_af) {
  const bool want = accepted_front_pred(st, mesh, e);
  const bool have = st.in_accepted_front[static_cast<std::size_t>(e)] != 0;
  if (want == have) return;
  st.in_accepted_front[static_cast<std::size_t>(e)] = want ? 1 : 0;
  if (want) {
    ++st.accepted_front_size;
    st.af_edge_hash.insert(e, edge_lo(mesh, e), edge_hi(mesh, e));
    if (newly_af) newly_af->push_back(e);
  } else {
    --st.accepted_front_size;
    st.af_edge_hash.remove(e, edge_lo(mesh, e), edge_hi(mesh, e));
  }
}

void push_considered(SolverState& st, VertexId v) {
  st.queue.emplace(st.values[static_cast<std::size_t>(v)], v);
  ++st.stats.queue_pushes;
}

}  // namespace

void UniformHash::init(double cell_size) {
  cell_ = std::max(cell_size, 1e-300);
  cells_.clear();
}

std::int64_t UniformHash::cell_index(double v) const {
  return static_cast<std::int64_t>(std::floor(v / cell_));
}

std::uint64_t UniformHash::key(std::int64_t ix, std::int64_t iy) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(iy));
}

void UniformHash::insert(std::int32_t id, Vec2 lo, Vec2 hi) {
  const auto ix0 = cell_index(lo.x), ix1 = cell_index(hi.x);
  const auto iy0 = cell_index(lo.y), iy1 = cell_index(hi.y);
  for (std::int64_t ix = ix0; ix <= ix1; ++ix) {
    for (std::int64_t iy = iy0; iy <= iy1; ++iy) {
      cells_[key(ix, iy)].push_back(id);
    }
  }
}

void UniformHash::remove(std::int32_t id, Vec2 lo, Vec2 hi) {
  const auto ix0 = cell_index(lo.x), ix1 = cell_index(hi.x);
  const auto iy0 = cell_index(lo.y), iy1 = cell_index(hi.y);
  for (std::int64_t ix = ix0; ix <= ix1; ++ix) {
    for (std::int64_t iy = iy0; iy <= iy1; ++iy) {
      auto it = cells_.find(key(ix, iy));
      if (it == cells_.end()) continue;
      auto& v = it->second;
      const auto pos = std::find(v.begin(), v.end(), id);
      if (pos != v.end()) {
        *pos = v.back();
        v.pop_back();
      }
      if (v.empty()) cells_.erase(it);
    }
  }
}

EdgeUpdateResult edge_update(Vec2 xi, Vec2 a, Vec2 b, double va, double vb,
                             const WeightField& weight, double tol) {
  auto objective = [&](double z) {
    const Vec2 x = z * a + (1.0 - z) * b;
    const Vec2 d = x - xi;
    const double tau = norm(d);
    const double g = weight(xi, (1.0 / tau) * d);
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw InvalidWeightError("weight evaluated nonpositive");
    }
    return z * va + (1.0 - z) * vb + tau * g;
  };

  const double seg_len = norm(b - a);
  const double zeta_tol = seg_len > 0.0 ? std::min(1.0, tol / seg_len) : 1.0;
  const ScalarMin interior = golden_section_min(objective, 0.0, 1.0, zeta_tol, 200);

  // golden section only brackets interior minima; the optimum frequently
  // sits at a vertex, so compare the endpoints exactly
  double best_z = interior.x;
  double best_f = interior.value;
  const double f_at_b = objective(0.0);
  if (f_at_b < best_f) {
    best_f = f_at_b;
    best_z = 0.0;
  }
  const double f_at_a = objective(1.0);
  if (f_at_a < best_f) {
    best_f = f_at_a;
    best_z = 1.0;
  }
  return {best_f, Barycentric2{best_z, 1.0 - best_z, 0.0}};
}

std::vector<EdgeId> near_front(VertexId xi, const SolverState& state,
                               const TriMesh& mesh, double radius) {
  if (radius != state.nf_radius) return near_front_brute(xi, state, mesh, radius);
  const Vec2 p = mesh.position(xi);
  std::vector<EdgeId> out;
  state.af_edge_hash.for_each_in({p.x - radius, p.y - radius},
                                 {p.x + radius, p.y + radius}, [&](std::int32_t e) {
                                   if (edge_distance(state, mesh, p, e) <= radius) {
                                     out.push_back(e);
                                   }
                                 });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<EdgeId> near_front_brute(VertexId xi, const SolverState& state,
                                     const TriMesh& mesh, double radius) {
  const Vec2 p = mesh.position(xi);
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < mesh.edge_count(); ++e) {
    if (state.in_accepted_front[static_cast<std::size_t>(e)] &&
        edge_distance(state, mesh, p, e) <= radius) {
      out.push_back(e);
    }
  }
  return out;
}

SolverState make_solver_state(const TriMesh& mesh, const ProblemSpec& problem,
                              const SolverOptions& opts) {
  SolverState st;
  st.opts = opts;
  const auto nv = static_cast<std::size_t>(mesh.vertex_count());
  const auto ne = static_cast<std::size_t>(mesh.edge_count());

  st.labels.assign(nv, Label::Far);
  st.values.assign(nv, kInf);
  st.is_exterior.assign(nv, 0);
  st.considered_nbr_count.assign(nv, 0);
  st.in_accepted_front.assign(ne, 0);
  st.edge_stamp.assign(ne, 0);
  st.vertex_stamp.assign(nv, 0);
  st.skip_stamp.assign(nv, 0);
  st.best_scratch.assign(nv, 0.0);
  st.last_accepted_value = -kInf;

  st.nf_radius = problem.gamma * mesh.quality().h_max;
  st.golden_tol = opts.golden_tol_factor * mesh.quality().h_max;
  st.af_edge_hash.init(st.nf_radius);
  st.considered_hash.init(st.nf_radius);

  // step 2: vertices outside the open domain take the exit cost of the
  // nearest boundary point and start Accepted
  bool any_exterior = false;
  for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
    const Vec2 p = mesh.position(v);
    if (problem.domain.strictly_inside(p)) continue;
    any_exterior = true;
    st.is_exterior[static_cast<std::size_t>(v)] = 1;
    st.labels[static_cast<std::size_t>(v)] = Label::Accepted;
    st.values[static_cast<std::size_t>(v)] =
        problem.boundary_cost(project_to_boundary(problem.domain, p));
  }
  if (!any_exterior) {
    throw SolveError("no vertex lies outside the open domain; boundary set is empty");
  }

  // step 3: relabel Far neighbours of Accepted vertices
  std::vector<VertexId> initial;
  for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
    if (!st.is_exterior[static_cast<std::size_t>(v)]) continue;
    for (VertexId w : mesh.vertex_neighbors(v)) {
      if (st.labels[static_cast<std::size_t>(w)] != Label::Far) continue;
      st.labels[static_cast<std::size_t>(w)] = Label::Considered;
      initial.push_back(w);
      const Vec2 pw = mesh.position(w);
      st.considered_hash.insert(w, pw, pw);
      for (VertexId u : mesh.vertex_neighbors(w)) {
        ++st.considered_nbr_count[static_cast<std::size_t>(u)];
      }
    }
  }

  for (EdgeId e = 0; e < mesh.edge_count(); ++e) {
    sync_af_edge(st, mesh, e, nullptr);
  }

  std::sort(initial.begin(), initial.end());
  for (VertexId w : initial) {
    st.values[static_cast<std::size_t>(w)] = full_nf_update(st, mesh, problem, w);
    push_considered(st, w);
  }
  return st;
}

namespace {

void debug_full_checks_pre_accept(SolverState& st, const TriMesh& mesh,
                                  const ProblemSpec& problem, VertexId v,
                                  double val) {
  // Acceptance gap: value within [min AF value + h_min*G_min,
  //                               min AF value + h_max*G_max]
  double af_min = kInf;
  for (VertexId u = 0; u < mesh.vertex_count(); ++u) {
    if (st.labels[static_cast<std::size_t>(u)] == Label::Accepted &&
        st.considered_nbr_count[static_cast<std::size_t>(u)] > 0) {
      af_min = std::min(af_min, st.values[static_cast<std::size_t>(u)]);
    }
  }
  if (std::isfinite(af_min)) {
    ++st.stats.gap_bound_checks;
    const MeshQuality& q = mesh.quality();
    const double lo = af_min + q.h_min * problem.g_min;
    const double hi = af_min + q.h_max * problem.g_max;
    if (val < lo - 1e-9 || val > hi + 1e-9) ++st.stats.gap_bound_violations;
  }

  // The held value must agree with a fresh minimization over the full
  // current Near Front (the update bookkeeping is incremental).
  std::vector<EdgeId> nf = near_front(v, st, mesh, st.nf_radius);
  if (!nf.empty()) {
    ++st.stats.full_nf_checks;
    const double fresh = min_update_over(st, mesh, problem, v, nf);
    const double dev = std::abs(fresh - val);
    st.stats.max_full_nf_deviation = std::max(st.stats.max_full_nf_deviation, dev);
    if (dev > 1e-9 * std::max(1.0, std::abs(val))) ++st.stats.full_nf_mismatches;
  }

  if (st.accept_count % 1000 == 0) {
    for (EdgeId e = 0; e < mesh.edge_count(); ++e) {
      if ((st.in_accepted_front[static_cast<std::size_t>(e)] != 0) !=
          accepted_front_pred(st, mesh, e)) {
        throw SolveError("incremental Accepted Front diverged from its definition");
      }
    }
  }
}

}  // namespace

std::optional<VertexId> accept_next(SolverState& st, const TriMesh& mesh,
                                    const ProblemSpec& problem) {
  // step 4: pop the Considered vertex of least (value, id); drop stale entries
  VertexId v = -1;
  double val = 0.0;
  for (;;) {
    if (st.queue.empty()) return std::nullopt;
    const auto [qval, qv] = st.queue.top();
    st.queue.pop();
    ++st.stats.queue_pops;
    if (st.labels[static_cast<std::size_t>(qv)] != Label::Considered ||
        st.values[static_cast<std::size_t>(qv)] != qval) {
      ++st.stats.stale_pops;
      continue;
    }
    v = qv;
    val = qval;
    break;
  }
  if (!std::isfinite(val)) {
    throw SolveError("about to accept a non-finite value; mesh does not reach the boundary");
  }

  if (st.opts.debug_assert_level >= DebugAssertLevel::Cheap) {
    if (val < st.last_accepted_value - 1e-12) ++st.stats.monotonicity_violations;
  }
  st.last_accepted_value = std::max(st.last_accepted_value, val);

  if (st.opts.record_nf_snapshots &&
      problem.domain.strictly_inside(mesh.position(v))) {
    NfSnapshot snap;
    snap.vertex = v;
    snap.value = val;
    snap.nf_edges = near_front(v, st, mesh, st.nf_radius);
    st.nf_snapshots.push_back(std::move(snap));
  }
  if (st.opts.debug_assert_level >= DebugAssertLevel::Full) {
    debug_full_checks_pre_accept(st, mesh, problem, v, val);
  }

  // relabel v Accepted
  st.labels[static_cast<std::size_t>(v)] = Label::Accepted;
  st.accept_order.push_back(v);
  ++st.accept_count;
  {
    const Vec2 p = mesh.position(v);
    st.considered_hash.remove(v, p, p);
  }
  for (VertexId u : mesh.vertex_neighbors(v)) {
    --st.considered_nbr_count[static_cast<std::size_t>(u)];
  }

  // step 5 relabeling: Far neighbours of v become Considered
  std::vector<VertexId> fresh;
  for (VertexId w : mesh.vertex_neighbors(v)) {
    if (st.labels[static_cast<std::size_t>(w)] != Label::Far) continue;
    st.labels[static_cast<std::size_t>(w)] = Label::Considered;
    fresh.push_back(w);
    const Vec2 pw = mesh.position(w);
    st.considered_hash.insert(w, pw, pw);
    for (VertexId u : mesh.vertex_neighbors(w)) {
      ++st.considered_nbr_count[static_cast<std::size_t>(u)];
    }
  }
  std::sort(fresh.begin(), fresh.end());

  // re-examine every edge whose Accepted Front membership may have changed:
  // edges at v, and edges at Accepted vertices whose Considered-neighbour
  // count moved (neighbours of v and of the freshly Considered vertices)
  std::vector<EdgeId> newly_af_at_v;
  {
    const std::uint32_t s = next_stamp(st);
    auto examine = [&](EdgeId e) {
      if (st.edge_stamp[static_cast<std::size_t>(e)] == s) return;
      st.edge_stamp[static_cast<std::size_t>(e)] = s;
      std::vector<EdgeId>* sink = mesh.edge_contains(e, v) ? &newly_af_at_v : nullptr;
      sync_af_edge(st, mesh, e, sink);
    };
    for (EdgeId e : mesh.vertex_edges(v)) examine(e);
    auto examine_vertex = [&](VertexId u) {
      if (st.labels[static_cast<std::size_t>(u)] != Label::Accepted) return;
      for (EdgeId e : mesh.vertex_edges(u)) examine(e);
    };
    for (VertexId u : mesh.vertex_neighbors(v)) examine_vertex(u);
    for (VertexId w : fresh) {
      for (VertexId u : mesh.vertex_neighbors(w)) examine_vertex(u);
    }
  }

  // step 5 values: full Near Front minimization for the fresh vertices
  const std::uint32_t fresh_mark = next_stamp(st);
  for (VertexId w : fresh) st.skip_stamp[static_cast<std::size_t>(w)] = fresh_mark;
  for (VertexId w : fresh) {
    st.values[static_cast<std::size_t>(w)] = full_nf_update(st, mesh, problem, w);
    push_considered(st, w);
  }

  // step 6: re-update existing Considered vertices whose Near Front gained
  // edges containing v, using only those edges
  if (!newly_af_at_v.empty()) {
    std::sort(newly_af_at_v.begin(), newly_af_at_v.end());
    const std::uint32_t touched = next_stamp(st);
    std::vector<VertexId> touched_list;
    for (EdgeId e : newly_af_at_v) {
      const auto [ea, eb] = mesh.edge(e);
      const Vec2 pa = mesh.position(ea), pb = mesh.position(eb);
      const Vec2 lo{std::min(pa.x, pb.x) - st.nf_radius, std::min(pa.y, pb.y) - st.nf_radius};
      const Vec2 hi{std::max(pa.x, pb.x) + st.nf_radius, std::max(pa.y, pb.y) + st.nf_radius};
      st.considered_hash.for_each_in(lo, hi, [&](std::int32_t xj) {
        if (st.skip_stamp[static_cast<std::size_t>(xj)] == fresh_mark) return;
        const Vec2 pj = mesh.position(xj);
        if (point_segment_distance(pj, pa, pb) > st.nf_radius) return;
        const EdgeUpdateResult r =
            edge_update(pj, pa, pb, st.values[static_cast<std::size_t>(ea)],
                        st.values[static_cast<std::size_t>(eb)], problem.weight,
                        st.golden_tol);
        ++st.stats.update_evaluations;
        ++st.stats.reupdate_attempts;
        if (st.vertex_stamp[static_cast<std::size_t>(xj)] != touched) {
          st.vertex_stamp[static_cast<std::size_t>(xj)] = touched;
          st.best_scratch[static_cast<std::size_t>(xj)] = r.cost;
          touched_list.push_back(xj);
        } else {
          st.best_scratch[static_cast<std::size_t>(xj)] =
              std::min(st.best_scratch[static_cast<std::size_t>(xj)], r.cost);
        }
      });
    }
    std::sort(touched_list.begin(), touched_list.end());
    for (VertexId xj : touched_list) {
      if (st.best_scratch[static_cast<std::size_t>(xj)] < st.values[static_cast<std::size_t>(xj)]) {
        st.values[static_cast<std::size_t>(xj)] = st.best_scratch[static_cast<std::size_t>(xj)];
        push_considered(st, xj);
        ++st.stats.reupdate_improvements;
      }
    }
  }
  return v;
}

Solution solve(const TriMesh& mesh, const ProblemSpec& problem,
               const SolverOptions& opts) {
  SolverState st = make_solver_state(mesh, problem, opts);
  while (accept_next(st, mesh, problem)) {
  }
  for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
    if (st.labels[static_cast<std::size_t>(v)] != Label::Accepted) {
      throw SolveError("vertex " + std::to_string(v) +
                       " was never accepted; mesh is disconnected from the boundary");
    }
  }
  Solution sol;
  sol.values = std::move(st.values);
  sol.accept_order = std::move(st.accept_order);
  sol.stats = st.stats;
  sol.nf_snapshots = std::move(st.nf_snapshots);
  return sol;
}

}  // namespace oum
