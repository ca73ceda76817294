#include "oum/hamiltonian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <unordered_map>

#include "oum/analysis.hpp"
#include "oum/errors.hpp"

namespace oum {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Scan f over [lo,hi] with n_samples points, then refine every local-minimum
// bracket by golden section. Robust against the kinked objectives that
// non-smooth speed profiles produce.
template <typename F>
double scan_golden_min(F&& f, double lo, double hi, int n_samples, double tol) {
  const double step = (hi - lo) / (n_samples - 1);
  std::vector<double> val(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    val[static_cast<std::size_t>(i)] = f(lo + step * i);
  }
  double best = *std::min_element(val.begin(), val.end());
  for (int i = 0; i < n_samples; ++i) {
    const bool left_ok = (i == 0) || val[static_cast<std::size_t>(i)] <= val[static_cast<std::size_t>(i - 1)];
    const bool right_ok = (i == n_samples - 1) || val[static_cast<std::size_t>(i)] <= val[static_cast<std::size_t>(i + 1)];
    if (left_ok && right_ok) {
      const double a = std::max(lo, lo + step * (i - 1));
      const double b = std::min(hi, lo + step * (i + 1));
      const ScalarMin m = golden_section_min([&](double t) { return f(t); }, a, b, tol);
      best = std::min(best, m.value);
    }
  }
  return best;
}

struct EdgeMin {
  double value = kInf;
  double zeta = 0.0;
};

// Inner minimization of the numerical Hamiltonian along one edge.
EdgeMin numham_edge_min(Vec2 p, Vec2 pa, Vec2 pb, double fa, double fb, double mu,
                        const WeightField& weight) {
  auto f = [&](double z) {
    const Vec2 x = z * pa + (1.0 - z) * pb;
    const Vec2 d = x - p;
    const double tau = norm(d);
    const double g = weight(p, (1.0 / tau) * d);
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw InvalidWeightError("weight evaluated nonpositive");
    }
    return (z * fa + (1.0 - z) * fb - mu) / tau + g;
  };
  constexpr int kScan = 65;
  EdgeMin out;
  double prev = kInf, cur = f(0.0), next = 0.0;
  std::array<double, kScan> vals;
  for (int i = 0; i < kScan; ++i) {
    vals[static_cast<std::size_t>(i)] = (i == 0) ? cur : f(static_cast<double>(i) / (kScan - 1));
  }
  for (int i = 0; i < kScan; ++i) {
    cur = vals[static_cast<std::size_t>(i)];
    prev = (i == 0) ? kInf : vals[static_cast<std::size_t>(i - 1)];
    next = (i == kScan - 1) ? kInf : vals[static_cast<std::size_t>(i + 1)];
    if (cur < out.value) {
      out.value = cur;
      out.zeta = static_cast<double>(i) / (kScan - 1);
    }
    if (cur <= prev && cur <= next) {
      const double a = std::max(0.0, static_cast<double>(i - 1) / (kScan - 1));
      const double b = std::min(1.0, static_cast<double>(i + 1) / (kScan - 1));
      const ScalarMin m = golden_section_min(f, a, b, 1e-13);
      if (m.value < out.value) {
        out.value = m.value;
        out.zeta = m.x;
      }
    }
  }
  return out;
}

struct StencilMin {
  double value = kInf;
  EdgeId edge = -1;
  double zeta = 0.0;
};

StencilMin numham_stencil_min(const Stencil& stencil, std::span<const double> phi,
                              VertexId xi, double mu, const TriMesh& mesh,
                              const WeightField& weight) {
  if (stencil.edges.empty()) throw ConfigError("stencil is empty");
  const Vec2 p = mesh.position(xi);
  StencilMin out;
  for (EdgeId e : stencil.edges) {
    if (mesh.edge_contains(e, xi)) {
      throw ConfigError("stencil edge passes through its owner vertex");
    }
    const auto [a, b] = mesh.edge(e);
    const EdgeMin m = numham_edge_min(p, mesh.position(a), mesh.position(b),
                                      phi[static_cast<std::size_t>(a)],
                                      phi[static_cast<std::size_t>(b)], mu, weight);
    if (m.value < out.value) {
      out.value = m.value;
      out.edge = e;
      out.zeta = m.zeta;
    }
  }
  return out;
}

}  // namespace

double hamiltonian(Vec2 x, Vec2 p, const WeightField& weight, int n_samples) {
  auto f = [&](double theta) {
    const Vec2 u = unit_at_angle(theta);
    return dot(p, u) + weight(x, u);
  };
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> val(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    val[static_cast<std::size_t>(i)] = f(two_pi * i / n_samples);
  }
  // collect local minima of the periodic sweep, keep the three deepest
  std::vector<std::pair<double, int>> minima;
  for (int i = 0; i < n_samples; ++i) {
    const double c = val[static_cast<std::size_t>(i)];
    const double l = val[static_cast<std::size_t>((i + n_samples - 1) % n_samples)];
    const double r = val[static_cast<std::size_t>((i + 1) % n_samples)];
    if (c <= l && c <= r) minima.emplace_back(c, i);
  }
  std::sort(minima.begin(), minima.end());
  if (minima.size() > 3) minima.resize(3);

  double best = *std::min_element(val.begin(), val.end());
  const double step = two_pi / n_samples;
  for (const auto& [v, i] : minima) {
    const double theta = two_pi * i / n_samples;
    const ScalarMin m = golden_section_min(f, theta - step, theta + step, 1e-12);
    best = std::min(best, m.value);
  }
  return -best;
}

double numerical_hamiltonian(const Stencil& stencil, std::span<const double> phi,
                             VertexId xi, double mu, const TriMesh& mesh,
                             const WeightField& weight) {
  return -numham_stencil_min(stencil, phi, xi, mu, mesh, weight).value;
}

Stencil build_ring_stencil(const TriMesh& mesh, VertexId xi, int hops,
                           double max_dist) {
  if (hops < 1) throw ConfigError("ring stencil needs at least one hop");
  // BFS over edge-neighbours up to `hops`; the ball is small, so keep all
  // scratch local to it rather than sized by the mesh
  std::unordered_map<VertexId, std::int32_t> depth;
  std::queue<VertexId> fifo;
  depth.emplace(xi, 0);
  fifo.push(xi);
  std::vector<VertexId> reached{xi};
  while (!fifo.empty()) {
    const VertexId v = fifo.front();
    fifo.pop();
    const std::int32_t d = depth[v];
    if (d == hops) continue;
    for (VertexId w : mesh.vertex_neighbors(v)) {
      if (depth.emplace(w, d + 1).second) {
        reached.push_back(w);
        fifo.push(w);
      }
    }
  }

  // patch = triangles with all corners reached; ring = edges of the patch
  // incident to exactly one patch triangle
  std::unordered_map<EdgeId, std::int32_t> incident;
  std::unordered_map<TriId, char> tri_seen;
  for (VertexId v : reached) {
    for (TriId t : mesh.vertex_triangles(v)) {
      if (!tri_seen.emplace(t, 1).second) continue;
      const auto tri = mesh.triangle(t);
      bool inside = true;
      for (VertexId u : tri) {
        if (!depth.contains(u)) inside = false;
      }
      if (!inside) continue;
      for (int k = 0; k < 3; ++k) {
        const EdgeId e = mesh.find_edge(tri[static_cast<std::size_t>(k)],
                                        tri[static_cast<std::size_t>((k + 1) % 3)]);
        ++incident[e];
      }
    }
  }

  const Vec2 p = mesh.position(xi);
  Stencil s;
  s.owner = xi;
  for (const auto& [e, count] : incident) {
    if (count != 1) continue;
    if (mesh.edge_contains(e, xi)) continue;
    const auto [a, b] = mesh.edge(e);
    const double far_dist = std::max(norm(mesh.position(a) - p), norm(mesh.position(b) - p));
    if (far_dist > max_dist) continue;
    s.edges.push_back(e);
  }
  std::sort(s.edges.begin(), s.edges.end());
  if (s.edges.empty()) throw ConfigError("ring stencil is empty");
  return s;
}

bool directionally_complete(const TriMesh& mesh, const Stencil& stencil, int n_dirs) {
  const Vec2 p = mesh.position(stencil.owner);
  for (int i = 0; i < n_dirs; ++i) {
    const Vec2 u = unit_at_angle(2.0 * std::numbers::pi * (i + 0.25) / n_dirs);
    bool hit = false;
    for (EdgeId e : stencil.edges) {
      const auto [a, b] = mesh.edge(e);
      const Vec2 pa = mesh.position(a), pb = mesh.position(b);
      const Vec2 ab = pb - pa;
      const double denom = cross(u, ab);
      if (std::abs(denom) < 1e-300) continue;
      const double t = cross(pa - p, ab) / denom;
      const double s = cross(pa - p, u) / denom;
      if (t > 0.0 && s >= -1e-9 && s <= 1.0 + 1e-9) {
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

EquivalenceReport check_equivalence(const Stencil& stencil,
                                    std::span<const double> values, VertexId xi,
                                    const TriMesh& mesh, const WeightField& weight,
                                    double tolerance) {
  const Vec2 p = mesh.position(xi);

  // update-formula minimum over the stencil (the equivalent-value route)
  double mu_tilde = kInf;
  for (EdgeId e : stencil.edges) {
    const auto [a, b] = mesh.edge(e);
    auto f = [&](double z) {
      const Vec2 x = z * mesh.position(a) + (1.0 - z) * mesh.position(b);
      const Vec2 d = x - p;
      const double tau = norm(d);
      return z * values[static_cast<std::size_t>(a)] +
             (1.0 - z) * values[static_cast<std::size_t>(b)] +
             tau * weight(p, (1.0 / tau) * d);
    };
    mu_tilde = std::min(mu_tilde, scan_golden_min(f, 0.0, 1.0, 65, 1e-13));
  }

  EquivalenceReport rep;
  rep.mu_tilde = mu_tilde;
  const StencilMin hmin = numham_stencil_min(stencil, values, xi, mu_tilde, mesh, weight);
  rep.residual = -hmin.value;

  // the Hamiltonian's minimizer must also attain the update minimum
  {
    const auto [a, b] = mesh.edge(hmin.edge);
    const Vec2 x = hmin.zeta * mesh.position(a) + (1.0 - hmin.zeta) * mesh.position(b);
    const Vec2 d = x - p;
    const double tau = norm(d);
    const double update_at_argmin =
        hmin.zeta * values[static_cast<std::size_t>(a)] +
        (1.0 - hmin.zeta) * values[static_cast<std::size_t>(b)] +
        tau * weight(p, (1.0 / tau) * d);
    rep.minimizer_gap = update_at_argmin - mu_tilde;
  }
  rep.pass = std::abs(rep.residual) <= tolerance && rep.minimizer_gap <= tolerance;
  return rep;
}

MonotonicityReport check_monotonicity(const Stencil& stencil, VertexId xi,
                                      const TriMesh& mesh, const WeightField& weight,
                                      int trials, std::uint64_t seed) {
  std::vector<VertexId> verts;
  for (EdgeId e : stencil.edges) {
    const auto [a, b] = mesh.edge(e);
    verts.push_back(a);
    verts.push_back(b);
  }
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());

  const double scale = 10.0 * mesh.quality().h_max;
  std::vector<double> lo(static_cast<std::size_t>(mesh.vertex_count()), 0.0);
  std::vector<double> hi(static_cast<std::size_t>(mesh.vertex_count()), 0.0);

  SplitMix64 rng(seed);
  MonotonicityReport rep;
  rep.trials = trials;
  for (int t = 0; t < trials; ++t) {
    for (VertexId v : verts) {
      const double base = scale * rng.next_double();
      lo[static_cast<std::size_t>(v)] = base;
      hi[static_cast<std::size_t>(v)] = base + scale * rng.next_double();
    }
    const double mu = scale * rng.next_double();
    const double h_lo = numerical_hamiltonian(stencil, lo, xi, mu, mesh, weight);
    const double h_hi = numerical_hamiltonian(stencil, hi, xi, mu, mesh, weight);
    const double gap = h_hi - h_lo;  // must be <= 0 up to tolerance
    if (gap > rep.max_violation) rep.max_violation = gap;
    if (gap > 1e-10) ++rep.violations;
  }
  return rep;
}

ConsistencyReport check_consistency(std::span<const TriMesh> meshes,
                                    const WeightField& weight,
                                    const TestField& field) {
  if (meshes.empty()) throw ConfigError("consistency check needs meshes");

  double gamma = 0.0;
  if (weight.has_closed_form()) {
    gamma = weight.exact_g_max() / weight.exact_g_min();
  } else {
    double g_lo = kInf, g_hi = 0.0;
    for (int i = 0; i < 4096; ++i) {
      const double g = weight({0, 0}, unit_at_angle(2.0 * std::numbers::pi * i / 4096));
      g_lo = std::min(g_lo, g);
      g_hi = std::max(g_hi, g);
    }
    gamma = g_hi / g_lo;
  }
  const int hops = static_cast<int>(std::ceil(2.0 * gamma + 1.0));

  ConsistencyReport rep;
  std::vector<double> hs, errs;
  for (const TriMesh& mesh : meshes) {
    const double h_max = mesh.quality().h_max;
    const double max_dist = (2.0 * gamma + 1.0) * h_max;
    const double margin = (hops + 1) * h_max;

    Vec2 lo{kInf, kInf}, hi{-kInf, -kInf};
    for (const Vec2& p : mesh.positions()) {
      lo.x = std::min(lo.x, p.x);
      lo.y = std::min(lo.y, p.y);
      hi.x = std::max(hi.x, p.x);
      hi.y = std::max(hi.y, p.y);
    }

    std::vector<double> phi(static_cast<std::size_t>(mesh.vertex_count()));
    for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
      phi[static_cast<std::size_t>(v)] = field.value(mesh.position(v));
    }

    ConsistencyRow row;
    row.h_max = h_max;
    for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
      const Vec2 p = mesh.position(v);
      if (p.x - lo.x < margin || hi.x - p.x < margin || p.y - lo.y < margin ||
          hi.y - p.y < margin) {
        continue;
      }
      const Stencil s = build_ring_stencil(mesh, v, hops, max_dist);
      const double h_cont = hamiltonian(p, field.grad(p), weight);
      const double h_num = numerical_hamiltonian(s, phi, v, phi[static_cast<std::size_t>(v)], mesh, weight);
      row.max_residual = std::max(row.max_residual, std::abs(h_cont - h_num));
      ++row.vertices_checked;
    }
    if (row.vertices_checked == 0) {
      throw ConfigError("mesh too small for the stencil margin in consistency check");
    }
    if (field.hessian_norm_bound > 0.0) {
      const double m = mesh.quality().ratio_m;
      const double c1 = 0.5 * m * (1.0 + (2.0 * gamma + 1.0) * (2.0 * gamma + 1.0));
      rep.bound_ratio_max = std::max(
          rep.bound_ratio_max, row.max_residual / (c1 * field.hessian_norm_bound * h_max));
    }
    rep.rows.push_back(row);
    if (row.max_residual > 0.0) {
      hs.push_back(h_max);
      errs.push_back(row.max_residual);
    }
  }
  rep.fitted_order = hs.size() >= 2 ? fit_loglog_slope(hs, errs)
                                    : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

}  // namespace oum
