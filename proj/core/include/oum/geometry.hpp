#ifndef OUM_GEOMETRY_HPP
#define OUM_GEOMETRY_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>

namespace oum {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double norm_sq(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline Vec2 unit_at_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Orthogonal projection of x onto segment [a,b], clamped to the segment.
// Returns the segment parameter t in [0,1] (projection = a + t*(b-a)) and
// the distance from x to the projected point.
struct SegmentProjection {
  double t;
  double distance;
};
SegmentProjection project_to_segment(Vec2 x, Vec2 a, Vec2 b);

inline double point_segment_distance(Vec2 x, Vec2 a, Vec2 b) {
  return project_to_segment(x, a, b).distance;
}

// Golden-section minimization of f over [lo, hi] down to interval width tol.
// Only interior points are probed; callers that need exact endpoint values
// compare f(lo), f(hi) themselves.
struct ScalarMin {
  double x;
  double value;
};
ScalarMin golden_section_min(const std::function<double(double)>& f, double lo,
                             double hi, double tol, int max_iter = 200);

// splitmix64: tiny deterministic PRNG used where bit-stable streams matter
// (mesh jitter, randomized diagnostics). Unlike std::uniform_real_distribution
// the output does not depend on the standard library implementation.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform in [-1,1]
  double next_symmetric() { return 2.0 * next_double() - 1.0; }
};

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

}  // namespace oum

#endif
