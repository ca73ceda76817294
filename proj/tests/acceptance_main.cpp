// Acceptance suite: every criterion prints one PASS/FAIL line; the process
// exits nonzero if any fail. Thresholds are fixed here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oum/analysis.hpp"
#include "oum/hamiltonian.hpp"
#include "oum/io.hpp"
#include "oum/mesh.hpp"
#include "oum/problem.hpp"
#include "oum/solver.hpp"

using namespace oum;

namespace {

int g_failures = 0;

void report(int criterion, const char* name, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", criterion, name,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* spec, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, spec, a, b, c);
  return buf;
}

// Lemma bounds applied to every solve this suite performs (criterion 6).
struct LemmaTally {
  std::int64_t solves = 0;
  std::int64_t bound_violations = 0;
  std::int64_t lipschitz_solves = 0;
  std::int64_t lipschitz_violations = 0;
} g_lemmas;

void tally(const Solution& sol, const TriMesh& mesh, const ProblemSpec& problem) {
  ++g_lemmas.solves;
  g_lemmas.bound_violations += check_value_bounds(sol, mesh, problem).violations;
  if (mesh.vertex_count() <= 500) {
    ++g_lemmas.lipschitz_solves;
    g_lemmas.lipschitz_violations +=
        check_discrete_lipschitz(sol, mesh, problem).violations;
  }
}

ProblemSpec paper_problem() {
  return ProblemSpec::make(DomainPolygon::rectangle(-500, -500, 500, 500),
                           WeightField::rectangular(3.0, 1.0),
                           BoundaryCost::constant(0.0));
}

void criterion_1_convergence_rates() {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemSpec problem = paper_problem();
  std::vector<TriMesh> meshes;
  for (int k = 0; k < 4; ++k) {
    meshes.push_back(generate_rect_mesh({-500, -500, 500, 500},
                                        (1000.0 / 64.0) / std::pow(2.0, k), 0.2,
                                        42 + static_cast<std::uint64_t>(k)));
  }
  const Bounds b{-500, -500, 500, 500};
  const ConvergenceReport rep = convergence_study(
      meshes, problem, [&](Vec2 x) { return rect_profile_exact(x, b, 3.0, 1.0); }, 2);
  for (const StudyRow& r : rep.rows) {
    std::printf("  %8lld vertices  h_max %7.3f  avg %8.4f  max %7.3f\n",
                static_cast<long long>(r.vertices), r.h_max, r.avg_error, r.max_error);
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = rep.overall_r_max >= 0.40 && rep.overall_r_max <= 0.70 &&
                    rep.overall_r_avg >= 0.85 && rep.overall_r_avg <= 1.20;
  report(1, "convergence rates (4k to 263k vertices)", pass,
         fmt("r_avg %.4f in [0.85,1.20], r_max %.4f in [0.40,0.70], %.0f s",
             rep.overall_r_avg, rep.overall_r_max, seconds));
}

void criterion_2_isotropic_oracle() {
  const ProblemSpec problem =
      ProblemSpec::make(DomainPolygon::rectangle(-1, -1, 1, 1),
                        WeightField::isotropic(1.0), BoundaryCost::constant(0.0));
  const Bounds b{-1, -1, 1, 1};
  bool pass = true;
  std::string detail;
  double prev = 1e300;
  for (int k = 0; k < 4; ++k) {
    const TriMesh mesh = generate_rect_mesh(b, 0.2 / std::pow(2.0, k), 0.2,
                                            10 + static_cast<std::uint64_t>(k));
    const Solution sol = solve(mesh, problem);
    tally(sol, mesh, problem);
    const ErrorMetrics m = error_metrics(
        sol, [&](Vec2 x) { return isotropic_exact(x, b); }, mesh, problem.domain);
    if (m.max_error > 1.5 * mesh.quality().h_max) pass = false;
    if (!(m.max_error < prev)) pass = false;
    prev = m.max_error;
    detail += fmt("%.4f/", m.max_error, 0, 0);
  }
  report(2, "isotropic distance oracle (max err <= 1.5 h_max, decreasing)", pass,
         "max errors " + detail);
}

void criterion_3_numerical_hjb_residual() {
  const ProblemSpec problem = paper_problem();
  const TriMesh mesh = generate_rect_mesh({-500, -500, 500, 500}, 1000.0 / 64.0, 0.2, 42);
  SolverOptions opts;
  opts.record_nf_snapshots = true;
  const Solution sol = solve(mesh, problem, opts);
  tally(sol, mesh, problem);

  const double tol = 1e-8 * problem.g_max;
  std::int64_t interior = 0;
  for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
    if (problem.domain.strictly_inside(mesh.position(v))) ++interior;
  }
  std::int64_t checked = 0, ok = 0;
  double worst = 0.0;
  for (const NfSnapshot& snap : sol.nf_snapshots) {
    ++checked;
    if (snap.nf_edges.empty()) continue;
    const Stencil s{snap.vertex, snap.nf_edges};
    const double h =
        numerical_hamiltonian(s, sol.values, snap.vertex, snap.value, mesh, problem.weight);
    worst = std::max(worst, std::abs(h));
    if (std::abs(h) <= tol) ++ok;
  }
  const bool pass = checked == interior && ok == checked;
  report(3, "numerical HJB residual on near fronts", pass,
         fmt("%.0f of %.0f interior vertices within 1e-8*G_max; worst |H| %.3g",
             static_cast<double>(ok), static_cast<double>(checked), worst));
}

void criterion_4_monotonicity() {
  const TriMesh mesh = generate_rect_mesh({-4, -4, 4, 4}, 0.4, 0.2, 1);
  const WeightField w = WeightField::rectangular(3.0, 1.0);
  const double gamma = w.exact_g_max() / w.exact_g_min();
  const int hops = static_cast<int>(std::ceil(2.0 * gamma + 1.0));
  const double margin = (hops + 1) * mesh.quality().h_max;

  std::vector<VertexId> picks;
  for (VertexId v = 0; v < mesh.vertex_count() && picks.size() < 20; ++v) {
    const Vec2 p = mesh.position(v);
    if (p.x + 4 < margin || 4 - p.x < margin || p.y + 4 < margin || 4 - p.y < margin) continue;
    picks.push_back(v);
  }
  int trials = 0, violations = 0;
  double worst = 0.0;
  const int per = (10000 + static_cast<int>(picks.size()) - 1) / static_cast<int>(picks.size());
  for (const VertexId v : picks) {
    const Stencil s =
        build_ring_stencil(mesh, v, hops, (2.0 * gamma + 1.0) * mesh.quality().h_max);
    const MonotonicityReport rep =
        check_monotonicity(s, v, mesh, w, per, 1000 + static_cast<std::uint64_t>(v));
    trials += rep.trials;
    violations += rep.violations;
    worst = std::max(worst, rep.max_violation);
  }
  report(4, "monotonicity of the numerical Hamiltonian", trials >= 10000 && violations == 0,
         fmt("%.0f trials, %.0f violations beyond 1e-10, worst gap %.3g",
             static_cast<double>(trials), static_cast<double>(violations), worst));
}

void criterion_5_consistency_order() {
  const WeightField w = WeightField::rectangular(3.0, 1.0);
  std::vector<TriMesh> meshes;
  for (int k = 0; k < 4; ++k) {
    meshes.push_back(generate_rect_mesh({-4, -4, 4, 4}, 0.2 / std::pow(2.0, k), 0.2,
                                        20 + static_cast<std::uint64_t>(k)));
  }
  const TestField quadratic{[](Vec2 x) { return 0.5 * norm_sq(x); },
                            [](Vec2 x) { return x; }, 1.0};
  const ConsistencyReport quad = check_consistency(meshes, w, quadratic);

  const TestField affine{[](Vec2 x) { return 0.4 * x.x - 1.1 * x.y + 3.0; },
                         [](Vec2) { return Vec2{0.4, -1.1}; }, 0.0};
  const ConsistencyReport aff = check_consistency({meshes.data(), 1}, w, affine);

  const bool pass = quad.fitted_order >= 0.8 && aff.rows[0].max_residual <= 1e-8;
  report(5, "consistency order of the numerical Hamiltonian", pass,
         fmt("quadratic slope %.3f (>= 0.8), affine residual %.3g (<= 1e-8)",
             quad.fitted_order, aff.rows[0].max_residual));
}

void criterion_6_lemma_bounds() {
  // dedicated small solves for the all-pairs Lipschitz bound
  for (const std::uint64_t seed : {3ull, 4ull}) {
    const TriMesh mesh = generate_rect_mesh({-1, -1, 1, 1}, 0.15, 0.2, seed);
    const ProblemSpec rect = ProblemSpec::make(DomainPolygon::rectangle(-1, -1, 1, 1),
                                               WeightField::rectangular(3.0, 1.0),
                                               BoundaryCost::constant(0.0));
    tally(solve(mesh, rect), mesh, rect);
    const ProblemSpec iso = ProblemSpec::make(DomainPolygon::rectangle(-1, -1, 1, 1),
                                              WeightField::isotropic(1.0),
                                              BoundaryCost::constant(1.0));
    tally(solve(mesh, iso), mesh, iso);
  }
  const bool pass = g_lemmas.bound_violations == 0 && g_lemmas.lipschitz_violations == 0 &&
                    g_lemmas.lipschitz_solves >= 4;
  report(6, "value bounds and discrete Lipschitz lemmas", pass,
         fmt("%.0f solves, %.0f bound violations; %.0f small solves, all-pairs "
             "Lipschitz violations ",
             static_cast<double>(g_lemmas.solves),
             static_cast<double>(g_lemmas.bound_violations),
             static_cast<double>(g_lemmas.lipschitz_solves)) +
             std::to_string(g_lemmas.lipschitz_violations));
}

void criterion_7_acceptance_order() {
  // Stated gate: nondecreasing accepted values at 1e-12 plus the acceptance
  // gap bound, in a debug-full run on the 4k rectangular-profile mesh. The
  // ordering clause cannot hold for anisotropic weights: step-6 re-updates
  // interpolate between front vertices of different ages, so values may dip
  // up to ~h_max*G_max below the running maximum (they provably stay above
  // the front minimum, which is what the gap bound checks). The isotropic
  // control run, where the dip mechanism vanishes, is reported alongside.
  const ProblemSpec problem = paper_problem();
  const TriMesh mesh = generate_rect_mesh({-500, -500, 500, 500}, 1000.0 / 64.0, 0.2, 42);
  SolverOptions opts;
  opts.debug_assert_level = DebugAssertLevel::Full;
  const Solution sol = solve(mesh, problem, opts);
  tally(sol, mesh, problem);
  const BoundsCheck order = check_acceptance_monotone(sol, 1e-12);
  const double envelope =
      mesh.quality().h_max * problem.g_max - mesh.quality().h_min * problem.g_min;
  const BoundsCheck order_envelope = check_acceptance_monotone(sol, envelope);

  const ProblemSpec iso = ProblemSpec::make(DomainPolygon::rectangle(-500, -500, 500, 500),
                                            WeightField::isotropic(1.0),
                                            BoundaryCost::constant(0.0));
  const Solution iso_sol = solve(mesh, iso, opts);
  tally(iso_sol, mesh, iso);
  const BoundsCheck iso_order = check_acceptance_monotone(iso_sol, 1e-12);

  const bool pass = order.violations == 0 && sol.stats.gap_bound_checks > 0 &&
                    sol.stats.gap_bound_violations == 0 &&
                    iso_sol.stats.gap_bound_violations == 0;
  report(7, "acceptance order and gap bound (debug-full 4k runs)", pass,
         fmt("gap bound: %.0f checks, %.0f violations; ",
             static_cast<double>(sol.stats.gap_bound_checks + iso_sol.stats.gap_bound_checks),
             static_cast<double>(sol.stats.gap_bound_violations +
                                 iso_sol.stats.gap_bound_violations)) +
             fmt("rect ordering drops beyond 1e-12: %.0f (worst %.3g, all within the "
                 "h_max*G_max envelope: ",
                 static_cast<double>(order.violations), order.max_excess) +
             (order_envelope.violations == 0 ? "yes" : "no") +
             fmt("); isotropic control drops: %.0f",
                 static_cast<double>(iso_order.violations)));
}

void criterion_8_determinism() {
  namespace fs = std::filesystem;
  const fs::path a = fs::temp_directory_path() / "oum_acc_det_a";
  const fs::path b = fs::temp_directory_path() / "oum_acc_det_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const std::string spec =
      " solve --gen bounds=-500,-500,500,500,h=31.25,jitter=0.2,seed=42"
      " --weight rect:a=3,b=1 --q const:0 --out ";
  const std::string quiet = " > /dev/null 2>&1";
  const int ra = std::system((std::string(OUM_CLI_PATH) + spec + a.string() + quiet).c_str());
  const int rb = std::system((std::string(OUM_CLI_PATH) + spec + b.string() + quiet).c_str());
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p / "solution.csv", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string ca = slurp(a), cb = slurp(b);
  const bool pass = ra == 0 && rb == 0 && !ca.empty() && ca == cb;
  report(8, "byte-identical solution CSV across reruns", pass,
         fmt("%.0f bytes compared", static_cast<double>(ca.size())));
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion_1_convergence_rates();
  criterion_2_isotropic_oracle();
  criterion_3_numerical_hjb_residual();
  criterion_4_monotonicity();
  criterion_5_consistency_order();
  criterion_6_lemma_bounds();
  criterion_7_acceptance_order();
  criterion_8_determinism();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
