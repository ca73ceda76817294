// Command-line front end: solve, study, diagnose, gen-mesh.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oum/analysis.hpp"
#include "oum/errors.hpp"
#include "oum/hamiltonian.hpp"
#include "oum/io.hpp"
#include "oum/mesh.hpp"
#include "oum/problem.hpp"
#include "oum/solver.hpp"

namespace {

using nlohmann::json;

struct GenSpec {
  oum::Bounds bounds;
  double target_h = 0.0;
  double jitter = 0.2;
  std::uint64_t seed = 1;
};

struct SharedConfig {
  std::string mesh_path;
  std::string gen;
  std::string weight = "isotropic:c=1";
  std::string q = "const:0";
  std::string domain;
  std::string out = ".";
  int jobs = 1;
  std::string debug_asserts = "off";
  std::string config_path;
  bool print_config = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_num(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw oum::ConfigError("cannot parse number '" + s + "' in " + what);
  }
}

GenSpec parse_gen(const std::string& s) {
  GenSpec g;
  bool have_bounds = false, have_h = false;
  const auto tokens = split(s, ',');
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& tok = tokens[i];
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      throw oum::ConfigError("bad --gen token '" + tok + "' (expected key=value)");
    }
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "bounds") {
      if (i + 3 >= tokens.size()) throw oum::ConfigError("--gen bounds needs 4 numbers");
      g.bounds.x0 = parse_num(val, "--gen bounds");
      g.bounds.y0 = parse_num(tokens[i + 1], "--gen bounds");
      g.bounds.x1 = parse_num(tokens[i + 2], "--gen bounds");
      g.bounds.y1 = parse_num(tokens[i + 3], "--gen bounds");
      i += 3;
      have_bounds = true;
    } else if (key == "h") {
      g.target_h = parse_num(val, "--gen h");
      have_h = true;
    } else if (key == "jitter") {
      g.jitter = parse_num(val, "--gen jitter");
    } else if (key == "seed") {
      g.seed = static_cast<std::uint64_t>(parse_num(val, "--gen seed"));
    } else {
      throw oum::ConfigError("unknown --gen key '" + key + "'");
    }
  }
  if (!have_bounds || !have_h) {
    throw oum::ConfigError("--gen needs bounds=<x0,y0,x1,y1> and h=<f>");
  }
  return g;
}

oum::WeightField parse_weight(const std::string& s) {
  const auto colon = s.find(':');
  const std::string kind = s.substr(0, colon);
  std::vector<std::pair<std::string, double>> kv;
  if (colon != std::string::npos) {
    for (const auto& tok : split(s.substr(colon + 1), ',')) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) {
        throw oum::ConfigError("bad --weight token '" + tok + "'");
      }
      kv.emplace_back(tok.substr(0, eq), parse_num(tok.substr(eq + 1), "--weight"));
    }
  }
  auto get = [&](const std::string& key) {
    for (const auto& [k, v] : kv) {
      if (k == key) return v;
    }
    throw oum::ConfigError("--weight " + kind + " needs " + key + "=<f>");
  };
  if (kind == "isotropic") return oum::WeightField::isotropic(get("c"));
  if (kind == "rect") return oum::WeightField::rectangular(get("a"), get("b"));
  if (kind == "ellipse") return oum::WeightField::elliptic(get("a"), get("b"));
  throw oum::ConfigError("unknown weight kind '" + kind +
                         "' (expected isotropic, rect, or ellipse)");
}

oum::BoundaryCost parse_q(const std::string& s, const oum::TriMesh* mesh,
                          const oum::DomainPolygon* domain) {
  const auto colon = s.find(':');
  const std::string kind = s.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
  if (kind == "const") return oum::BoundaryCost::constant(parse_num(arg, "--q"));
  if (kind == "table") {
    if (mesh == nullptr || domain == nullptr) {
      throw oum::ConfigError("--q table requires a mesh");
    }
    std::ifstream in(arg);
    if (!in) throw oum::ConfigError("cannot open boundary cost table: " + arg);
    std::vector<oum::Vec2> points;
    std::vector<double> values;
    long vid = 0;
    double value = 0.0;
    long line = 0;
    std::string row;
    while (std::getline(in, row)) {
      ++line;
      if (row.empty() || row[0] == '#') continue;
      if (std::sscanf(row.c_str(), "%ld %lf", &vid, &value) != 2) {
        throw oum::ParseError("bad boundary cost row", line);
      }
      if (vid < 0 || vid >= mesh->vertex_count()) {
        throw oum::ParseError("boundary cost row names missing vertex", line);
      }
      points.push_back(oum::project_to_boundary(
          *domain, mesh->position(static_cast<oum::VertexId>(vid))));
      values.push_back(value);
    }
    return oum::BoundaryCost::table(std::move(points), std::move(values));
  }
  throw oum::ConfigError("unknown boundary cost kind '" + kind +
                         "' (expected const or table)");
}

oum::SolverOptions parse_solver_options(const SharedConfig& cfg) {
  oum::SolverOptions opts;
  if (cfg.debug_asserts == "off") {
    opts.debug_assert_level = oum::DebugAssertLevel::Off;
  } else if (cfg.debug_asserts == "cheap") {
    opts.debug_assert_level = oum::DebugAssertLevel::Cheap;
  } else if (cfg.debug_asserts == "full") {
    opts.debug_assert_level = oum::DebugAssertLevel::Full;
  } else {
    throw oum::ConfigError("--debug-asserts must be off, cheap, or full");
  }
  return opts;
}

oum::DomainPolygon resolve_domain(const SharedConfig& cfg,
                                  const std::optional<GenSpec>& gen,
                                  const oum::TriMesh& mesh) {
  if (!cfg.domain.empty()) {
    const auto parts = split(cfg.domain, ',');
    if (parts.size() != 4) throw oum::ConfigError("--domain needs x0,y0,x1,y1");
    return oum::DomainPolygon::rectangle(
        parse_num(parts[0], "--domain"), parse_num(parts[1], "--domain"),
        parse_num(parts[2], "--domain"), parse_num(parts[3], "--domain"));
  }
  if (gen) {
    return oum::DomainPolygon::rectangle(gen->bounds.x0, gen->bounds.y0,
                                         gen->bounds.x1, gen->bounds.y1);
  }
  // default for file meshes: the mesh bounding box
  double x0 = mesh.position(0).x, x1 = x0, y0 = mesh.position(0).y, y1 = y0;
  for (const oum::Vec2& p : mesh.positions()) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  return oum::DomainPolygon::rectangle(x0, y0, x1, y1);
}

// Closed-form value function when the configuration has one (isotropic or
// rectangular weight, constant exit cost, axis-aligned rectangular domain).
std::optional<oum::ExactSolution> exact_for(const oum::WeightField& weight,
                                            const std::string& q_spec,
                                            const oum::DomainPolygon& domain) {
  const auto rect = domain.as_axis_rectangle();
  if (!rect) return std::nullopt;
  if (q_spec.rfind("const:", 0) != 0) return std::nullopt;
  const double q0 = parse_num(q_spec.substr(6), "--q");
  const oum::Bounds b{(*rect)[0], (*rect)[1], (*rect)[2], (*rect)[3]};
  if (weight.kind() == oum::WeightField::Kind::Isotropic) {
    const double c = weight.param0();
    return oum::ExactSolution{[b, c, q0](oum::Vec2 x) {
      return oum::isotropic_exact(x, b) / c + q0;
    }};
  }
  if (weight.kind() == oum::WeightField::Kind::Rectangular) {
    const double a = weight.param0();
    const double bw = weight.param1();
    return oum::ExactSolution{[b, a, bw, q0](oum::Vec2 x) {
      return oum::rect_profile_exact(x, b, a, bw) + q0;
    }};
  }
  return std::nullopt;
}

std::string out_path(const SharedConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out);
  return (std::filesystem::path(cfg.out) / name).string();
}

void add_shared_options(CLI::App* cmd, SharedConfig& cfg) {
  cmd->add_option("--mesh", cfg.mesh_path, "Mesh text file");
  cmd->add_option("--gen", cfg.gen,
                  "Generated mesh spec: bounds=<x0,y0,x1,y1>,h=<f>,jitter=<f>,seed=<n>");
  cmd->add_option("--weight", cfg.weight,
                  "Weight: isotropic:c=<f> | rect:a=<f>,b=<f> | ellipse:a=<f>,b=<f>");
  cmd->add_option("--q", cfg.q, "Boundary exit cost: const:<f> | table:<path>");
  cmd->add_option("--domain", cfg.domain,
                  "Domain rectangle x0,y0,x1,y1 (default: gen bounds or mesh bbox)");
  cmd->add_option("--out", cfg.out, "Output directory");
  cmd->add_option("--jobs", cfg.jobs, "Max concurrent study rows");
  cmd->add_option("--debug-asserts", cfg.debug_asserts, "off | cheap | full");
  cmd->add_option("--config", cfg.config_path, "JSON config file (flags take precedence)");
  cmd->add_flag("--print-config", cfg.print_config, "Print resolved config and exit");
}

// flags override config-file values: only keys whose flag was not passed
// are read from the file
void apply_config_file(CLI::App* cmd, SharedConfig& cfg, int& levels, long& trials,
                       bool& vtk) {
  if (cfg.config_path.empty()) return;
  std::ifstream in(cfg.config_path);
  if (!in) throw oum::ConfigError("cannot open config file: " + cfg.config_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw oum::ConfigError("bad config file: " + std::string(e.what()));
  }
  auto maybe = [&](const char* flag, const char* key, auto& target) {
    using T = std::decay_t<decltype(target)>;
    if (cmd->count(flag) == 0 && j.contains(key)) target = j.at(key).get<T>();
  };
  maybe("--mesh", "mesh", cfg.mesh_path);
  maybe("--gen", "gen", cfg.gen);
  maybe("--weight", "weight", cfg.weight);
  maybe("--q", "q", cfg.q);
  maybe("--domain", "domain", cfg.domain);
  maybe("--out", "out", cfg.out);
  maybe("--jobs", "jobs", cfg.jobs);
  maybe("--debug-asserts", "debug_asserts", cfg.debug_asserts);
  if (cmd->get_option_no_throw("--levels") != nullptr) {
    maybe("--levels", "levels", levels);
  }
  if (cmd->get_option_no_throw("--trials") != nullptr) {
    maybe("--trials", "trials", trials);
  }
  if (cmd->get_option_no_throw("--vtk") != nullptr) {
    maybe("--vtk", "vtk", vtk);
  }
}

json resolved_config(const SharedConfig& cfg, int levels, long trials, bool vtk) {
  json j;
  j["mesh"] = cfg.mesh_path;
  j["gen"] = cfg.gen;
  j["weight"] = cfg.weight;
  j["q"] = cfg.q;
  j["domain"] = cfg.domain;
  j["out"] = cfg.out;
  j["jobs"] = cfg.jobs;
  j["debug_asserts"] = cfg.debug_asserts;
  j["levels"] = levels;
  j["trials"] = trials;
  j["vtk"] = vtk;
  return j;
}

oum::TriMesh resolve_mesh(const SharedConfig& cfg, std::optional<GenSpec>& gen) {
  const bool have_file = !cfg.mesh_path.empty();
  const bool have_gen = !cfg.gen.empty();
  if (have_file == have_gen) {
    throw oum::ConfigError("exactly one of --mesh and --gen is required");
  }
  if (have_gen) {
    gen = parse_gen(cfg.gen);
    return oum::generate_rect_mesh(gen->bounds, gen->target_h, gen->jitter, gen->seed);
  }
  return oum::load_mesh_file(cfg.mesh_path);
}

int cmd_solve(SharedConfig& cfg, bool vtk) {
  std::optional<GenSpec> gen;
  const auto t0 = std::chrono::steady_clock::now();
  const oum::TriMesh mesh = resolve_mesh(cfg, gen);
  const oum::DomainPolygon domain = resolve_domain(cfg, gen, mesh);
  const oum::WeightField weight = parse_weight(cfg.weight);
  const oum::ProblemSpec problem =
      oum::ProblemSpec::make(domain, weight, parse_q(cfg.q, &mesh, &domain));

  const oum::Solution sol = oum::solve(mesh, problem, parse_solver_options(cfg));
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const oum::MeshQuality& q = mesh.quality();
  std::printf("vertices %lld\n", static_cast<long long>(q.n_vertices));
  std::printf("triangles %lld\n", static_cast<long long>(q.n_triangles));
  std::printf("h_max %.6g\n", q.h_max);
  std::printf("runtime_s %.3f\n", seconds);
  if (const auto exact = exact_for(weight, cfg.q, domain)) {
    const oum::ErrorMetrics m = oum::error_metrics(sol, *exact, mesh, domain);
    std::printf("avg_error %.6g\n", m.avg_error);
    std::printf("max_error %.6g\n", m.max_error);
  }
  const std::string csv = out_path(cfg, "solution.csv");
  oum::write_solution_csv_file(csv, mesh, sol);
  std::printf("wrote %s\n", csv.c_str());
  if (vtk) {
    const std::string vtk_path = out_path(cfg, "solution.vtk");
    oum::write_solution_vtk_file(vtk_path, mesh, sol);
    std::printf("wrote %s\n", vtk_path.c_str());
  }
  return 0;
}

// error-vs-kink-distance breakdown for the rectangular profile: vertices are
// bucketed by how close the exact solution is to a plane switch
void write_kink_breakdown(const std::string& path,
                          const std::vector<oum::TriMesh>& meshes,
                          const std::vector<oum::Solution>& sols,
                          const oum::Bounds& b, double a, double bw) {
  std::ofstream out(path, std::ios::binary);
  out << "level,margin_lo_h,margin_hi_h,vertices,avg_error,max_error\n";
  const double buckets[] = {0.0, 1.0, 2.0, 4.0, 8.0, 1e30};
  for (std::size_t level = 0; level < meshes.size(); ++level) {
    const oum::TriMesh& mesh = meshes[level];
    const double h = mesh.quality().h_max;
    for (int bk = 0; bk < 5; ++bk) {
      double sum = 0.0, max_err = 0.0;
      long count = 0;
      for (oum::VertexId v = 0; v < mesh.vertex_count(); ++v) {
        const oum::Vec2 p = mesh.position(v);
        if (p.x < b.x0 || p.x > b.x1 || p.y < b.y0 || p.y > b.y1) continue;
        const double planes[4] = {(b.x1 - p.x) / a, (p.x - b.x0) / a,
                                  (b.y1 - p.y) / bw, (p.y - b.y0) / bw};
        double lo1 = 1e300, lo2 = 1e300;
        for (double pl : planes) {
          if (pl < lo1) {
            lo2 = lo1;
            lo1 = pl;
          } else if (pl < lo2) {
            lo2 = pl;
          }
        }
        const double margin = (lo2 - lo1) / h;  // in units of h_max
        if (margin < buckets[bk] || margin >= buckets[bk + 1]) continue;
        const double err =
            std::abs(sols[level].values[static_cast<std::size_t>(v)] - lo1);
        sum += err;
        max_err = std::max(max_err, err);
        ++count;
      }
      char row[160];
      std::snprintf(row, sizeof row, "%zu,%g,%g,%ld,%.17g,%.17g\n", level,
                    buckets[bk], buckets[bk + 1], count,
                    count > 0 ? sum / static_cast<double>(count) : 0.0, max_err);
      out << row;
    }
  }
}

int cmd_study(SharedConfig& cfg, int levels) {
  if (!cfg.mesh_path.empty()) {
    throw oum::ConfigError("study generates its mesh family; use --gen, not --mesh");
  }
  if (cfg.gen.empty()) throw oum::ConfigError("study requires --gen");
  if (levels < 3) throw oum::ConfigError("study needs at least 3 levels");
  const GenSpec base = parse_gen(cfg.gen);

  std::vector<oum::TriMesh> meshes;
  for (int k = 0; k < levels; ++k) {
    GenSpec g = base;
    g.target_h = base.target_h / std::pow(2.0, k);
    g.seed = base.seed + static_cast<std::uint64_t>(k);
    meshes.push_back(oum::generate_rect_mesh(g.bounds, g.target_h, g.jitter, g.seed));
  }

  const std::optional<GenSpec> gen = base;
  const oum::DomainPolygon domain = resolve_domain(cfg, gen, meshes[0]);
  const oum::WeightField weight = parse_weight(cfg.weight);
  const auto exact = exact_for(weight, cfg.q, domain);
  if (!exact) {
    throw oum::ConfigError(
        "study needs a closed-form solution: isotropic or rect weight, const q, "
        "rectangular domain");
  }
  const oum::ProblemSpec problem =
      oum::ProblemSpec::make(domain, weight, parse_q(cfg.q, &meshes[0], &domain));

  // keep solutions for the breakdown report; rows run under --jobs
  std::vector<oum::Solution> sols(meshes.size());
  {
    std::vector<std::future<void>> running;
    std::size_t next = 0;
    const auto opts = parse_solver_options(cfg);
    while (next < meshes.size() || !running.empty()) {
      while (next < meshes.size() && static_cast<int>(running.size()) < std::max(1, cfg.jobs)) {
        const std::size_t i = next++;
        running.push_back(std::async(std::launch::async, [&, i] {
          sols[i] = oum::solve(meshes[i], problem, opts);
        }));
      }
      running.front().get();
      running.erase(running.begin());
    }
  }

  oum::ConvergenceReport rep;
  {
    std::vector<double> hs, avgs, maxs;
    for (std::size_t i = 0; i < meshes.size(); ++i) {
      const oum::ErrorMetrics m = oum::error_metrics(sols[i], *exact, meshes[i], domain);
      oum::StudyRow row;
      row.vertices = meshes[i].vertex_count();
      row.triangles = meshes[i].triangle_count();
      row.h_max = meshes[i].quality().h_max;
      row.avg_error = m.avg_error;
      row.max_error = m.max_error;
      if (i == 0) {
        row.r_avg = row.r_max = std::numeric_limits<double>::quiet_NaN();
      } else {
        const double dh = std::log(rep.rows[i - 1].h_max / row.h_max);
        row.r_avg = std::log(rep.rows[i - 1].avg_error / row.avg_error) / dh;
        row.r_max = std::log(rep.rows[i - 1].max_error / row.max_error) / dh;
      }
      hs.push_back(row.h_max);
      avgs.push_back(row.avg_error);
      maxs.push_back(row.max_error);
      rep.rows.push_back(row);
    }
    rep.overall_r_avg = oum::fit_loglog_slope(hs, avgs);
    rep.overall_r_max = oum::fit_loglog_slope(hs, maxs);
  }

  for (const oum::StudyRow& r : rep.rows) {
    std::printf("%8lld %9lld  h=%-10.4g avg=%-10.4g r_avg=%-8.4g max=%-10.4g r_max=%-8.4g\n",
                static_cast<long long>(r.vertices), static_cast<long long>(r.triangles),
                r.h_max, r.avg_error, r.r_avg, r.max_error, r.r_max);
  }
  std::printf("overall r_avg %.4f\n", rep.overall_r_avg);
  std::printf("overall r_max %.4f\n", rep.overall_r_max);

  const std::string csv = out_path(cfg, "study.csv");
  oum::write_study_csv_file(csv, rep);
  std::printf("wrote %s\n", csv.c_str());

  if (weight.kind() == oum::WeightField::Kind::Rectangular) {
    const auto rect = domain.as_axis_rectangle();
    const oum::Bounds b{(*rect)[0], (*rect)[1], (*rect)[2], (*rect)[3]};
    const std::string breakdown = out_path(cfg, "kink_breakdown.csv");
    write_kink_breakdown(breakdown, meshes, sols, b, weight.param0(), weight.param1());
    std::printf("wrote %s\n", breakdown.c_str());
  }
  return 0;
}

int cmd_diagnose(SharedConfig& cfg, long trials) {
  if (cfg.gen.empty()) {
    cfg.gen = "bounds=-4,-4,4,4,h=0.25,jitter=0.2,seed=1";
  }
  const GenSpec base = parse_gen(cfg.gen);
  const oum::WeightField weight = parse_weight(cfg.weight);

  std::vector<oum::DiagnosticRow> rows;
  bool all_pass = true;
  auto push = [&](oum::DiagnosticRow row) {
    all_pass = all_pass && row.pass;
    rows.push_back(std::move(row));
  };

  const double gamma = weight.exact_g_max() / weight.exact_g_min();
  const int hops = static_cast<int>(std::ceil(2.0 * gamma + 1.0));

  // equivalence + monotonicity on ring stencils of the base mesh
  {
    const oum::TriMesh mesh =
        oum::generate_rect_mesh(base.bounds, base.target_h, base.jitter, base.seed);
    const double h = mesh.quality().h_max;
    const double margin = (hops + 1) * h;
    std::vector<oum::VertexId> picks;
    for (oum::VertexId v = 0; v < mesh.vertex_count() && picks.size() < 25; ++v) {
      const oum::Vec2 p = mesh.position(v);
      if (p.x - base.bounds.x0 < margin || base.bounds.x1 - p.x < margin ||
          p.y - base.bounds.y0 < margin || base.bounds.y1 - p.y < margin) {
        continue;
      }
      picks.push_back(v);
    }
    if (picks.empty()) {
      throw oum::ConfigError("diagnose mesh too small for the stencil margin; lower h");
    }

    oum::SplitMix64 rng(base.seed);
    std::vector<double> phi(static_cast<std::size_t>(mesh.vertex_count()));
    for (auto& x : phi) x = 20.0 * h * rng.next_double();
    const double tol = 1e-8 * weight.exact_g_max();
    for (oum::VertexId v : picks) {
      const oum::Stencil s =
          oum::build_ring_stencil(mesh, v, hops, (2.0 * gamma + 1.0) * h);
      const oum::EquivalenceReport rep =
          oum::check_equivalence(s, phi, v, mesh, weight, tol);
      push({"equivalence", v, rep.residual, tol, rep.pass});
    }

    const long per = std::max<long>(1, trials / static_cast<long>(picks.size()));
    for (oum::VertexId v : picks) {
      const oum::Stencil s =
          oum::build_ring_stencil(mesh, v, hops, (2.0 * gamma + 1.0) * h);
      const oum::MonotonicityReport rep = oum::check_monotonicity(
          s, v, mesh, weight, static_cast<int>(per), base.seed + static_cast<std::uint64_t>(v));
      push({"monotonicity", v, rep.max_violation, 1e-10, rep.violations == 0});
    }
  }

  // consistency over a halving family
  {
    std::vector<oum::TriMesh> family;
    for (int k = 0; k < 4; ++k) {
      family.push_back(oum::generate_rect_mesh(base.bounds,
                                               base.target_h / std::pow(2.0, k),
                                               base.jitter, base.seed + 100 + static_cast<std::uint64_t>(k)));
    }
    const oum::TestField quadratic{
        [](oum::Vec2 x) { return 0.5 * (x.x * x.x + x.y * x.y); },
        [](oum::Vec2 x) { return x; }, 1.0};
    const oum::ConsistencyReport rep = oum::check_consistency(family, weight, quadratic);
    for (const oum::ConsistencyRow& r : rep.rows) {
      const double m = family[0].quality().ratio_m;
      const double c1 = 0.5 * m * (1.0 + (2.0 * gamma + 1.0) * (2.0 * gamma + 1.0));
      push({"consistency_residual", -1, r.max_residual, c1 * r.h_max,
            r.max_residual <= c1 * r.h_max});
    }
    push({"consistency_order", -1, rep.fitted_order, 0.8, rep.fitted_order >= 0.8});

    const oum::TestField affine{[](oum::Vec2 x) { return 0.3 * x.x - 0.7 * x.y + 2.0; },
                                [](oum::Vec2) { return oum::Vec2{0.3, -0.7}; }, 0.0};
    const oum::ConsistencyReport arep =
        oum::check_consistency({family.data(), 1}, weight, affine);
    push({"consistency_affine", -1, arep.rows[0].max_residual, 1e-8,
          arep.rows[0].max_residual <= 1e-8});
  }

  const std::string csv = out_path(cfg, "diagnostics.csv");
  oum::write_diagnostics_csv_file(csv, rows);
  std::printf("wrote %s\n", csv.c_str());
  long fails = 0;
  for (const auto& r : rows) fails += r.pass ? 0 : 1;
  std::printf("%zu checks, %ld failures\n", rows.size(), fails);
  return all_pass ? 0 : 1;
}

int cmd_gen_mesh(SharedConfig& cfg) {
  if (cfg.gen.empty()) throw oum::ConfigError("gen-mesh requires --gen");
  const GenSpec g = parse_gen(cfg.gen);
  const oum::TriMesh mesh = oum::generate_rect_mesh(g.bounds, g.target_h, g.jitter, g.seed);
  const std::string path = out_path(cfg, "mesh.txt");
  oum::save_mesh_file(mesh, path);
  const oum::MeshQuality& q = mesh.quality();
  std::printf("vertices %lld\n", static_cast<long long>(q.n_vertices));
  std::printf("triangles %lld\n", static_cast<long long>(q.n_triangles));
  std::printf("h_max %.6g\n", q.h_max);
  std::printf("h_min %.6g\n", q.h_min);
  std::printf("ratio_m %.6g\n", q.ratio_m);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ordered upwind solver for static HJB boundary value problems"};
  app.require_subcommand(1);

  SharedConfig solve_cfg, study_cfg, diag_cfg, gen_cfg;
  bool vtk = false;
  int levels = 4;
  long trials = 10000;

  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve one problem instance");
  add_shared_options(solve_cmd, solve_cfg);
  solve_cmd->add_flag("--vtk", vtk, "Also write solution.vtk");

  CLI::App* study_cmd = app.add_subcommand("study", "Convergence study over a mesh family");
  add_shared_options(study_cmd, study_cfg);
  study_cmd->add_option("--levels", levels, "Refinement levels (h halves per level)");

  CLI::App* diag_cmd = app.add_subcommand("diagnose", "Numerical Hamiltonian check suites");
  add_shared_options(diag_cmd, diag_cfg);
  diag_cmd->add_option("--trials", trials, "Monotonicity trials");

  CLI::App* gen_cmd = app.add_subcommand("gen-mesh", "Generate a mesh file");
  add_shared_options(gen_cmd, gen_cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (solve_cmd->parsed()) {
      apply_config_file(solve_cmd, solve_cfg, levels, trials, vtk);
      if (solve_cfg.print_config) {
        std::cout << resolved_config(solve_cfg, levels, trials, vtk).dump(2) << "\n";
        return 0;
      }
      return cmd_solve(solve_cfg, vtk);
    }
    if (study_cmd->parsed()) {
      apply_config_file(study_cmd, study_cfg, levels, trials, vtk);
      if (study_cfg.print_config) {
        std::cout << resolved_config(study_cfg, levels, trials, vtk).dump(2) << "\n";
        return 0;
      }
      return cmd_study(study_cfg, levels);
    }
    if (diag_cmd->parsed()) {
      apply_config_file(diag_cmd, diag_cfg, levels, trials, vtk);
      if (diag_cfg.print_config) {
        std::cout << resolved_config(diag_cfg, levels, trials, vtk).dump(2) << "\n";
        return 0;
      }
      return cmd_diagnose(diag_cfg, trials);
    }
    apply_config_file(gen_cmd, gen_cfg, levels, trials, vtk);
    if (gen_cfg.print_config) {
      std::cout << resolved_config(gen_cfg, levels, trials, vtk).dump(2) << "\n";
      return 0;
    }
    return cmd_gen_mesh(gen_cfg);
  } catch (const oum::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const oum::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const oum::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
