#ifndef OUM_MESH_HPP
#define OUM_MESH_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "oum/geometry.hpp"

namespace oum {

using VertexId = std::int32_t;
using EdgeId = std::int32_t;
using TriId = std::int32_t;

inline constexpr std::int32_t kNoTri = -1;

// Convex weights on the endpoints of an edge (w0 + w1 = 1) or the corners of
// a triangle (w0 + w1 + w2 = 1, with w2 implied by the first two on edges).
struct Barycentric2 {
  double w0 = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;  // unused for edge coordinates
};

struct MeshQuality {
  double h_max = 0.0;    // longest edge length
  double h_min = 0.0;    // minimum triangle altitude
  double ratio_m = 0.0;  // h_max / h_min
  std::int64_t n_vertices = 0;
  std::int64_t n_triangles = 0;

  // True when 1 <= ratio_m <= max_ratio.
  bool valid(double max_ratio = 50.0) const {
    return ratio_m >= 1.0 && ratio_m <= max_ratio;
  }
};

// Immutable 2-D triangulation with derived edges and adjacency maps.
// Validated at construction: triangles must be non-degenerate (they are
// reoriented counterclockwise), refer to existing vertices, and meet other
// triangles only along shared edges or vertices (structural checks: no
// duplicate triangles, at most two triangles per edge).
class TriMesh {
 public:
  TriMesh(std::vector<Vec2> positions,
          std::vector<std::array<VertexId, 3>> triangles);

  std::int64_t vertex_count() const { return static_cast<std::int64_t>(positions_.size()); }
  std::int64_t edge_count() const { return static_cast<std::int64_t>(edges_.size()); }
  std::int64_t triangle_count() const { return static_cast<std::int64_t>(triangles_.size()); }

  Vec2 position(VertexId v) const { return positions_[static_cast<std::size_t>(v)]; }
  std::span<const Vec2> positions() const { return positions_; }

  // Endpoints of an edge, ordered (low id, high id).
  std::array<VertexId, 2> edge(EdgeId e) const { return edges_[static_cast<std::size_t>(e)]; }
  std::array<VertexId, 3> triangle(TriId t) const { return triangles_[static_cast<std::size_t>(t)]; }

  double edge_length(EdgeId e) const;
  double triangle_area(TriId t) const;

  // Adjacency. Incident lists are sorted by id.
  std::span<const EdgeId> vertex_edges(VertexId v) const;
  std::span<const TriId> vertex_triangles(VertexId v) const;
  std::span<const VertexId> vertex_neighbors(VertexId v) const;
  // Incident triangles of an edge; second entry is kNoTri for boundary edges.
  std::array<TriId, 2> edge_triangles(EdgeId e) const { return edge_tris_[static_cast<std::size_t>(e)]; }
  // Edge id for an existing vertex pair, or -1.
  EdgeId find_edge(VertexId a, VertexId b) const;

  bool edge_contains(EdgeId e, VertexId v) const {
    const auto& ab = edges_[static_cast<std::size_t>(e)];
    return ab[0] == v || ab[1] == v;
  }

  const MeshQuality& quality() const { return quality_; }

  // Triangle containing x (ties broken by lowest triangle id), or kNoTri.
  TriId locate(Vec2 x) const;
  // Barycentric coordinates of x within triangle t.
  Barycentric2 triangle_barycentric(TriId t, Vec2 x) const;

 private:
  std::vector<Vec2> positions_;
  std::vector<std::array<VertexId, 3>> triangles_;
  std::vector<std::array<VertexId, 2>> edges_;
  std::vector<std::array<TriId, 2>> edge_tris_;

  // CSR-style incidence lists
  std::vector<std::int64_t> vertex_edge_offsets_;
  std::vector<EdgeId> vertex_edge_items_;
  std::vector<std::int64_t> vertex_tri_offsets_;
  std::vector<TriId> vertex_tri_items_;
  std::vector<std::int64_t> vertex_nbr_offsets_;
  std::vector<VertexId> vertex_nbr_items_;

  MeshQuality quality_;

  // uniform grid over triangle bboxes for point location
  double grid_cell_ = 0.0;
  Vec2 grid_origin_;
  std::int32_t grid_nx_ = 0, grid_ny_ = 0;
  std::vector<std::int64_t> grid_offsets_;
  std::vector<TriId> grid_items_;

  void build_adjacency();
  void build_locator();
};

// Result of projecting a point onto an edge: clamped barycentric coordinates
// of the foot plus the offset distance from the point to the segment.
struct EdgePoint {
  Barycentric2 zeta;  // weights on (endpoint 0, endpoint 1)
  double distance;
};
EdgePoint barycentric_on_edge(const TriMesh& mesh, Vec2 x, EdgeId e);

MeshQuality quality(const TriMesh& mesh);

// Linear interpolation of a per-vertex field at x. Throws OutsideMeshError
// when x lies in no triangle.
double interpolate(const TriMesh& mesh, std::span<const double> field, Vec2 x);

// Line-oriented text format: `v <x> <y>`, `t <i> <j> <k>`, `#` comments.
TriMesh load_mesh(std::istream& in);
TriMesh load_mesh_file(const std::string& path);
void save_mesh(const TriMesh& mesh, std::ostream& out);
void save_mesh_file(const TriMesh& mesh, const std::string& path);

struct Bounds {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

// Jittered structured triangulation of a rectangle. Interior vertices are
// displaced per axis by uniform [-jitter, jitter] * target_h, deterministic
// in seed; boundary vertices stay exactly on the bounds. Each cell is split
// along its shorter diagonal.
TriMesh generate_rect_mesh(const Bounds& bounds, double target_h,
                           double jitter, std::uint64_t seed);

}  // namespace oum

#endif
