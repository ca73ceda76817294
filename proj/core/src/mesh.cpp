#include "oum/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include "oum/errors.hpp"

namespace oum {

namespace {

double signed_area2(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

// CSR builder: items[i] grouped by key, each group sorted ascending.
template <typename Id>
void build_csr(std::int64_t n_keys,
               const std::vector<std::pair<VertexId, Id>>& pairs,
               std::vector<std::int64_t>& offsets, std::vector<Id>& items) {
  offsets.assign(static_cast<std::size_t>(n_keys) + 1, 0);
  for (const auto& [k, v] : pairs) offsets[static_cast<std::size_t>(k) + 1]++;
  for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];
  items.resize(pairs.size());
  std::vector<std::int64_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& [k, v] : pairs) items[static_cast<std::size_t>(cursor[static_cast<std::size_t>(k)]++)] = v;
  for (std::int64_t k = 0; k < n_keys; ++k) {
    std::sort(items.begin() + offsets[static_cast<std::size_t>(k)],
              items.begin() + offsets[static_cast<std::size_t>(k) + 1]);
  }
}

}  // namespace

TriMesh::TriMesh(std::vector<Vec2> positions,
                 std::vector<std::array<VertexId, 3>> triangles)
    : positions_(std::move(positions)), triangles_(std::move(triangles)) {
  const auto nv = static_cast<std::int64_t>(positions_.size());
  if (nv < 3) throw MeshError("mesh needs at least 3 vertices");
  if (triangles_.empty()) throw MeshError("mesh needs at least 1 triangle");

  for (auto& tri : triangles_) {
    for (VertexId v : tri) {
      if (v < 0 || v >= nv) {
        throw MeshError("triangle refers to vertex " + std::to_string(v) +
                        " but mesh has " + std::to_string(nv) + " vertices");
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw MeshError("triangle with repeated vertex");
    }
    const double a2 = signed_area2(position(tri[0]), position(tri[1]), position(tri[2]));
    if (a2 == 0.0) throw MeshError("degenerate triangle (zero area)");
    if (a2 < 0.0) std::swap(tri[1], tri[2]);  // normalize to ccw
  }

  // duplicate triangles violate the shared-face-only intersection rule
  {
    std::vector<std::array<VertexId, 3>> keys(triangles_);
    for (auto& k : keys) std::sort(k.begin(), k.end());
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
      throw MeshError("duplicate triangle");
    }
  }

  build_adjacency();

  quality_ = oum::quality(*this);
  build_locator();
}

void TriMesh::build_adjacency() {
  std::map<std::pair<VertexId, VertexId>, EdgeId> edge_ids;
  edges_.clear();
  edge_tris_.clear();
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
      VertexId a = tri[static_cast<std::size_t>(k)];
      VertexId b = tri[static_cast<std::size_t>((k + 1) % 3)];
      if (a > b) std::swap(a, b);
      auto [it, inserted] = edge_ids.try_emplace({a, b}, static_cast<EdgeId>(edges_.size()));
      if (inserted) {
        edges_.push_back({a, b});
        edge_tris_.push_back({static_cast<TriId>(t), kNoTri});
      } else {
        auto& inc = edge_tris_[static_cast<std::size_t>(it->second)];
        if (inc[1] != kNoTri) {
          throw MeshError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                          ") shared by more than two triangles");
        }
        inc[1] = static_cast<TriId>(t);
      }
    }
  }

  const auto nv = vertex_count();
  std::vector<std::pair<VertexId, EdgeId>> ve;
  ve.reserve(edges_.size() * 2);
  std::vector<std::pair<VertexId, VertexId>> vn;
  vn.reserve(edges_.size() * 2);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [a, b] = edges_[e];
    ve.emplace_back(a, static_cast<EdgeId>(e));
    ve.emplace_back(b, static_cast<EdgeId>(e));
    vn.emplace_back(a, b);
    vn.emplace_back(b, a);
  }
  build_csr(nv, ve, vertex_edge_offsets_, vertex_edge_items_);
  build_csr(nv, vn, vertex_nbr_offsets_, vertex_nbr_items_);

  std::vector<std::pair<VertexId, TriId>> vt;
  vt.reserve(triangles_.size() * 3);
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    for (VertexId v : triangles_[t]) vt.emplace_back(v, static_cast<TriId>(t));
  }
  build_csr(nv, vt, vertex_tri_offsets_, vertex_tri_items_);
}

void TriMesh::build_locator() {
  Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Vec2 hi{-lo.x, -lo.y};
  for (const Vec2& p : positions_) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
  }
  grid_origin_ = lo;
  grid_cell_ = std::max(quality_.h_max, 1e-300);
  grid_nx_ = static_cast<std::int32_t>((hi.x - lo.x) / grid_cell_) + 1;
  grid_ny_ = static_cast<std::int32_t>((hi.y - lo.y) / grid_cell_) + 1;

  auto cell_of = [&](double v, double origin) {
    return static_cast<std::int32_t>(std::floor((v - origin) / grid_cell_));
  };
  std::vector<std::pair<VertexId, TriId>> entries;  // key = flattened cell
  entries.reserve(triangles_.size() * 2);
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    Vec2 blo = position(tri[0]), bhi = blo;
    for (int k = 1; k < 3; ++k) {
      const Vec2 p = position(tri[static_cast<std::size_t>(k)]);
      blo.x = std::min(blo.x, p.x);
      blo.y = std::min(blo.y, p.y);
      bhi.x = std::max(bhi.x, p.x);
      bhi.y = std::max(bhi.y, p.y);
    }
    const std::int32_t ix0 = std::clamp(cell_of(blo.x, grid_origin_.x), 0, grid_nx_ - 1);
    const std::int32_t ix1 = std::clamp(cell_of(bhi.x, grid_origin_.x), 0, grid_nx_ - 1);
    const std::int32_t iy0 = std::clamp(cell_of(blo.y, grid_origin_.y), 0, grid_ny_ - 1);
    const std::int32_t iy1 = std::clamp(cell_of(bhi.y, grid_origin_.y), 0, grid_ny_ - 1);
    for (std::int32_t ix = ix0; ix <= ix1; ++ix) {
      for (std::int32_t iy = iy0; iy <= iy1; ++iy) {
        entries.emplace_back(ix * grid_ny_ + iy, static_cast<TriId>(t));
      }
    }
  }
  build_csr(static_cast<std::int64_t>(grid_nx_) * grid_ny_, entries, grid_offsets_, grid_items_);
}

double TriMesh::edge_length(EdgeId e) const {
  const auto [a, b] = edge(e);
  return norm(position(b) - position(a));
}

double TriMesh::triangle_area(TriId t) const {
  const auto& tri = triangles_[static_cast<std::size_t>(t)];
  return 0.5 * signed_area2(position(tri[0]), position(tri[1]), position(tri[2]));
}

std::span<const EdgeId> TriMesh::vertex_edges(VertexId v) const {
  const auto i = static_cast<std::size_t>(v);
  return {vertex_edge_items_.data() + vertex_edge_offsets_[i],
          static_cast<std::size_t>(vertex_edge_offsets_[i + 1] - vertex_edge_offsets_[i])};
}

std::span<const TriId> TriMesh::vertex_triangles(VertexId v) const {
  const auto i = static_cast<std::size_t>(v);
  return {vertex_tri_items_.data() + vertex_tri_offsets_[i],
          static_cast<std::size_t>(vertex_tri_offsets_[i + 1] - vertex_tri_offsets_[i])};
}

std::span<const VertexId> TriMesh::vertex_neighbors(VertexId v) const {
  const auto i = static_cast<std::size_t>(v);
  return {vertex_nbr_items_.data() + vertex_nbr_offsets_[i],
          static_cast<std::size_t>(vertex_nbr_offsets_[i + 1] - vertex_nbr_offsets_[i])};
}

EdgeId TriMesh::find_edge(VertexId a, VertexId b) const {
  for (EdgeId e : vertex_edges(a)) {
    if (edge_contains(e, b)) return e;
  }
  return -1;
}

Barycentric2 TriMesh::triangle_barycentric(TriId t, Vec2 x) const {
  const auto& tri = triangles_[static_cast<std::size_t>(t)];
  const Vec2 p0 = position(tri[0]), p1 = position(tri[1]), p2 = position(tri[2]);
  const double denom = signed_area2(p0, p1, p2);
  Barycentric2 z;
  z.w0 = signed_area2(x, p1, p2) / denom;
  z.w1 = signed_area2(p0, x, p2) / denom;
  z.w2 = 1.0 - z.w0 - z.w1;
  return z;
}

TriId TriMesh::locate(Vec2 x) const {
  const std::int32_t ix = static_cast<std::int32_t>(std::floor((x.x - grid_origin_.x) / grid_cell_));
  const std::int32_t iy = static_cast<std::int32_t>(std::floor((x.y - grid_origin_.y) / grid_cell_));
  if (ix < 0 || ix >= grid_nx_ || iy < 0 || iy >= grid_ny_) return kNoTri;
  const auto c = static_cast<std::size_t>(ix * grid_ny_ + iy);
  TriId best = kNoTri;
  for (std::int64_t i = grid_offsets_[c]; i < grid_offsets_[c + 1]; ++i) {
    const TriId t = grid_items_[static_cast<std::size_t>(i)];
    const Barycentric2 z = triangle_barycentric(t, x);
    const double scale_eps = 1e-12;
    if (z.w0 >= -scale_eps && z.w1 >= -scale_eps && z.w2 >= -scale_eps) {
      if (best == kNoTri || t < best) best = t;
    }
  }
  return best;
}

EdgePoint barycentric_on_edge(const TriMesh& mesh, Vec2 x, EdgeId e) {
  const auto [a, b] = mesh.edge(e);
  const SegmentProjection pr = project_to_segment(x, mesh.position(a), mesh.position(b));
  return {Barycentric2{1.0 - pr.t, pr.t, 0.0}, pr.distance};
}

MeshQuality quality(const TriMesh& mesh) {
  MeshQuality q;
  q.n_vertices = mesh.vertex_count();
  q.n_triangles = mesh.triangle_count();
  for (EdgeId e = 0; e < mesh.edge_count(); ++e) {
    q.h_max = std::max(q.h_max, mesh.edge_length(e));
  }
  q.h_min = std::numeric_limits<double>::infinity();
  for (TriId t = 0; t < mesh.triangle_count(); ++t) {
    const auto tri = mesh.triangle(t);
    double longest = 0.0;
    for (int k = 0; k < 3; ++k) {
      const Vec2 pa = mesh.position(tri[static_cast<std::size_t>(k)]);
      const Vec2 pb = mesh.position(tri[static_cast<std::size_t>((k + 1) % 3)]);
      longest = std::max(longest, norm(pb - pa));
    }
    // smallest altitude of the triangle = 2*area / longest edge
    q.h_min = std::min(q.h_min, 2.0 * mesh.triangle_area(t) / longest);
  }
  q.ratio_m = q.h_max / q.h_min;
  return q;
}

double interpolate(const TriMesh& mesh, std::span<const double> field, Vec2 x) {
  const TriId t = mesh.locate(x);
  if (t == kNoTri) {
    throw OutsideMeshError("point (" + std::to_string(x.x) + "," +
                           std::to_string(x.y) + ") lies outside the mesh");
  }
  const Barycentric2 z = mesh.triangle_barycentric(t, x);
  const auto tri = mesh.triangle(t);
  return z.w0 * field[static_cast<std::size_t>(tri[0])] +
         z.w1 * field[static_cast<std::size_t>(tri[1])] +
         z.w2 * field[static_cast<std::size_t>(tri[2])];
}

TriMesh load_mesh(std::istream& in) {
  std::vector<Vec2> positions;
  std::vector<std::array<VertexId, 3>> triangles;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line.substr(first));
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      double x, y;
      if (!(ls >> x >> y)) throw ParseError("bad vertex record", line_no);
      positions.push_back({x, y});
    } else if (tag == "t") {
      long i, j, k;
      if (!(ls >> i >> j >> k)) throw ParseError("bad triangle record", line_no);
      const long nv = static_cast<long>(positions.size());
      for (long idx : {i, j, k}) {
        if (idx < 0 || idx >= nv) {
          throw ParseError("triangle refers to undefined vertex " + std::to_string(idx),
                           line_no);
        }
      }
      triangles.push_back({static_cast<VertexId>(i), static_cast<VertexId>(j),
                           static_cast<VertexId>(k)});
    } else {
      throw ParseError("unknown record '" + tag + "'", line_no);
    }
  }
  return TriMesh(std::move(positions), std::move(triangles));
}

TriMesh load_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mesh file: " + path);
  return load_mesh(in);
}

void save_mesh(const TriMesh& mesh, std::ostream& out) {
  char buf[96];
  for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
    const Vec2 p = mesh.position(v);
    std::snprintf(buf, sizeof buf, "v %.17g %.17g\n", p.x, p.y);
    out << buf;
  }
  for (TriId t = 0; t < mesh.triangle_count(); ++t) {
    const auto tri = mesh.triangle(t);
    std::snprintf(buf, sizeof buf, "t %d %d %d\n", tri[0], tri[1], tri[2]);
    out << buf;
  }
}

void save_mesh_file(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write mesh file: " + path);
  save_mesh(mesh, out);
}

TriMesh generate_rect_mesh(const Bounds& bounds, double target_h, double jitter,
                           std::uint64_t seed) {
  if (!(target_h > 0.0)) throw ConfigError("target_h must be positive");
  if (!(jitter >= 0.0 && jitter <= 0.3)) {
    throw ConfigError("jitter must lie in [0, 0.3]");
  }
  const double w = bounds.width(), h = bounds.height();
  if (!(w > 0.0 && h > 0.0)) throw ConfigError("degenerate bounds");
  if (target_h > std::min(w, h)) {
    throw ConfigError("target_h exceeds the smaller bounds extent");
  }

  const auto nx = static_cast<std::int64_t>(std::llround(std::max(1.0, w / target_h)));
  const auto ny = static_cast<std::int64_t>(std::llround(std::max(1.0, h / target_h)));
  const double dx = w / static_cast<double>(nx);
  const double dy = h / static_cast<double>(ny);

  std::vector<Vec2> positions;
  positions.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (std::int64_t j = 0; j <= ny; ++j) {
    for (std::int64_t i = 0; i <= nx; ++i) {
      double x = (i == nx) ? bounds.x1 : bounds.x0 + static_cast<double>(i) * dx;
      double y = (j == ny) ? bounds.y1 : bounds.y0 + static_cast<double>(j) * dy;
      if (i > 0 && i < nx && j > 0 && j < ny && jitter > 0.0) {
        // per-vertex stream keyed by (seed, i, j): insensitive to traversal order
        SplitMix64 rng(hash_combine(hash_combine(seed, static_cast<std::uint64_t>(i)),
                                    static_cast<std::uint64_t>(j)));
        x += jitter * target_h * rng.next_symmetric();
        y += jitter * target_h * rng.next_symmetric();
      }
      positions.push_back({x, y});
    }
  }

  auto vid = [nx](std::int64_t i, std::int64_t j) {
    return static_cast<VertexId>(j * (nx + 1) + i);
  };
  std::vector<std::array<VertexId, 3>> triangles;
  triangles.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (std::int64_t j = 0; j < ny; ++j) {
    for (std::int64_t i = 0; i < nx; ++i) {
      const VertexId a = vid(i, j), b = vid(i + 1, j);
      const VertexId c = vid(i + 1, j + 1), d = vid(i, j + 1);
      const Vec2 pa = positions[static_cast<std::size_t>(a)];
      const Vec2 pb = positions[static_cast<std::size_t>(b)];
      const Vec2 pc = positions[static_cast<std::size_t>(c)];
      const Vec2 pd = positions[static_cast<std::size_t>(d)];
      auto ok = [&](VertexId u, VertexId v, VertexId w2) {
        return signed_area2(positions[static_cast<std::size_t>(u)],
                            positions[static_cast<std::size_t>(v)],
                            positions[static_cast<std::size_t>(w2)]) > 0.0;
      };
      bool use_ac = norm_sq(pc - pa) <= norm_sq(pd - pb);
      // a jittered quad can make the shorter-diagonal split fold over;
      // fall back to the other diagonal before giving up
      if (use_ac && !(ok(a, b, c) && ok(a, c, d))) use_ac = false;
      if (!use_ac && !(ok(a, b, d) && ok(b, c, d))) {
        if (ok(a, b, c) && ok(a, c, d)) {
          use_ac = true;
        } else {
          throw MeshError("jitter produced a non-triangulable cell");
        }
      }
      if (use_ac) {
        triangles.push_back({a, b, c});
        triangles.push_back({a, c, d});
      } else {
        triangles.push_back({a, b, d});
        triangles.push_back({b, c, d});
      }
    }
  }
  return TriMesh(std::move(positions), std::move(triangles));
}

}  // namespace oum
