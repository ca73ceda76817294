#include "oum/geometry.hpp"

#include <algorithm>

namespace oum {

SegmentProjection project_to_segment(Vec2 x, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len_sq = norm_sq(ab);
  double t = 0.0;
  if (len_sq > 0.0) {
    t = std::clamp(dot(x - a, ab) / len_sq, 0.0, 1.0);
  }
  return {t, norm(x - (a + t * ab))};
}

ScalarMin golden_section_min(const std::function<double(double)>& f, double lo,
                             double hi, double tol, int max_iter) {
  static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;  // 0.618...
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int iter = 0; iter < max_iter && (b - a) > tol; ++iter) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? ScalarMin{x1, f1} : ScalarMin{x2, f2};
}

}  // namespace oum
