#include <benchmark/benchmark.h>

#include "oum/analysis.hpp"
#include "oum/mesh.hpp"
#include "oum/problem.hpp"
#include "oum/solver.hpp"

namespace {

using namespace oum;

void BM_EdgeUpdate(benchmark::State& state) {
  const WeightField w = WeightField::rectangular(3.0, 1.0);
  const Vec2 xi{0, 0}, a{1.0, -0.7}, b{1.2, 0.9};
  for (auto _ : state) {
    const EdgeUpdateResult r = edge_update(xi, a, b, 0.3, 0.8, w, 1e-9);
    benchmark::DoNotOptimize(r.cost);
  }
}
BENCHMARK(BM_EdgeUpdate);

void BM_GenerateMesh(benchmark::State& state) {
  const double h = 2.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    const TriMesh mesh = generate_rect_mesh({-1, -1, 1, 1}, h, 0.2, 7);
    benchmark::DoNotOptimize(mesh.vertex_count());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_GenerateMesh)->Arg(32)->Arg(128);

void BM_NearFrontHashed(benchmark::State& state) {
  const TriMesh mesh = generate_rect_mesh({-1, -1, 1, 1}, 0.05, 0.2, 3);
  const ProblemSpec problem = ProblemSpec::make(DomainPolygon::rectangle(-1, -1, 1, 1),
                                                WeightField::rectangular(3.0, 1.0),
                                                BoundaryCost::constant(0.0));
  SolverState st = make_solver_state(mesh, problem);
  for (int i = 0; i < 400; ++i) accept_next(st, mesh, problem);
  std::vector<VertexId> considered;
  for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
    if (st.labels[static_cast<std::size_t>(v)] == Label::Considered) considered.push_back(v);
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto nf = near_front(considered[i % considered.size()], st, mesh, st.nf_radius);
    benchmark::DoNotOptimize(nf.size());
    ++i;
  }
}
BENCHMARK(BM_NearFrontHashed);

void BM_NearFrontBrute(benchmark::State& state) {
  const TriMesh mesh = generate_rect_mesh({-1, -1, 1, 1}, 0.05, 0.2, 3);
  const ProblemSpec problem = ProblemSpec::make(DomainPolygon::rectangle(-1, -1, 1, 1),
                                                WeightField::rectangular(3.0, 1.0),
                                                BoundaryCost::constant(0.0));
  SolverState st = make_solver_state(mesh, problem);
  for (int i = 0; i < 400; ++i) accept_next(st, mesh, problem);
  std::vector<VertexId> considered;
  for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
    if (st.labels[static_cast<std::size_t>(v)] == Label::Considered) considered.push_back(v);
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto nf = near_front_brute(considered[i % considered.size()], st, mesh, st.nf_radius);
    benchmark::DoNotOptimize(nf.size());
    ++i;
  }
}
BENCHMARK(BM_NearFrontBrute);

void BM_SolveIsotropic(benchmark::State& state) {
  const double h = 2.0 / static_cast<double>(state.range(0));
  const TriMesh mesh = generate_rect_mesh({-1, -1, 1, 1}, h, 0.2, 5);
  const ProblemSpec problem = ProblemSpec::make(DomainPolygon::rectangle(-1, -1, 1, 1),
                                                WeightField::isotropic(1.0),
                                                BoundaryCost::constant(0.0));
  for (auto _ : state) {
    const Solution sol = solve(mesh, problem);
    benchmark::DoNotOptimize(sol.values.data());
  }
  state.SetItemsProcessed(state.iterations() * mesh.vertex_count());
}
BENCHMARK(BM_SolveIsotropic)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_SolveRectProfile(benchmark::State& state) {
  const double h = 2.0 / static_cast<double>(state.range(0));
  const TriMesh mesh = generate_rect_mesh({-1, -1, 1, 1}, h, 0.2, 5);
  const ProblemSpec problem = ProblemSpec::make(DomainPolygon::rectangle(-1, -1, 1, 1),
                                                WeightField::rectangular(3.0, 1.0),
                                                BoundaryCost::constant(0.0));
  for (auto _ : state) {
    const Solution sol = solve(mesh, problem);
    benchmark::DoNotOptimize(sol.values.data());
  }
  state.SetItemsProcessed(state.iterations() * mesh.vertex_count());
}
BENCHMARK(BM_SolveRectProfile)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
