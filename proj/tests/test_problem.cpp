#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "oum/errors.hpp"
#include "oum/problem.hpp"

using namespace oum;

namespace {

const DomainPolygon kSquare = DomainPolygon::rectangle(-500, -500, 500, 500);

// dense direction sampling, the oracle for every derived extremum here
std::pair<double, double> scan_extrema(const WeightField& w, int n = 4096) {
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = w({0, 0}, unit_at_angle(2.0 * std::numbers::pi * i / n));
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  return {lo, hi};
}

}  // namespace

TEST_CASE("rectangular weight evaluations") {
  const WeightField w = WeightField::rectangular(3.0, 1.0);
  CHECK(w({0, 0}, {1, 0}) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(w({0, 0}, {0, 1}) == doctest::Approx(1.0).epsilon(1e-14));
  // profile boundary radius at the evaluation angle is 1/g
  const auto [lo, hi] = scan_extrema(w);
  CHECK(lo >= w.exact_g_min() - 1e-12);
  CHECK(hi <= w.exact_g_max() + 1e-12);
}

TEST_CASE("square profile stays within its corner and side extrema") {
  const WeightField w = WeightField::rectangular(1.0, 1.0);
  SplitMix64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 u = unit_at_angle(2.0 * std::numbers::pi * rng.next_double());
    const double g = w({0, 0}, u);
    CHECK(g >= 1.0 / std::sqrt(2.0) - 1e-12);
    CHECK(g <= 1.0 + 1e-12);
  }
}

TEST_CASE("derived constants: rectangular (3,1)") {
  const WeightField w = WeightField::rectangular(3.0, 1.0);
  const DerivedConstants d = derive_constants(w, kSquare, 512, 64);
  // the fastest direction points at the profile corner (3,1), |.| = sqrt(10);
  // cross-checked against the dense sampling oracle
  const auto [lo, hi] = scan_extrema(w, 65536);
  CHECK(d.g_min == doctest::Approx(1.0 / std::sqrt(10.0)).epsilon(1e-13));
  CHECK(d.g_min <= lo + 1e-9);
  CHECK(d.g_max == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(d.g_max >= hi - 1e-9);
  CHECK(d.gamma == doctest::Approx(std::sqrt(10.0)).epsilon(1e-13));
  CHECK(d.l_g_estimate == 0.0);
}

TEST_CASE("derived constants: isotropic") {
  const DerivedConstants d = derive_constants(WeightField::isotropic(2.0), kSquare, 512, 64);
  CHECK(d.g_min == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(d.gamma == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d.l_g_estimate == 0.0);
}

TEST_CASE("derived constants: elliptic") {
  const WeightField w = WeightField::elliptic(2.0, 0.5);
  const DerivedConstants d = derive_constants(w, kSquare, 512, 64);
  CHECK(d.g_min == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.g_max == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(d.gamma == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("derived constants: position-dependent custom weight") {
  const WeightField w = WeightField::custom(
      [](Vec2 x, Vec2) { return 1.0 + 0.001 * std::abs(x.x); }, true);
  const DerivedConstants d = derive_constants(w, kSquare, 512, 64);
  CHECK(d.g_min >= 1.0 - 1e-12);
  CHECK(d.g_max <= 1.5 + 1e-12);
  CHECK(d.l_g_estimate > 0.0);
  CHECK(d.l_g_estimate <= 0.001 + 1e-9);
}

TEST_CASE("invalid weight is rejected") {
  const WeightField w = WeightField::custom([](Vec2, Vec2 u) { return u.x; }, false);
  CHECK_THROWS_AS(derive_constants(w, kSquare, 512, 64), InvalidWeightError);
}

TEST_CASE("sample counts below 64 are rejected") {
  CHECK_THROWS_AS(derive_constants(WeightField::isotropic(1.0), kSquare, 32, 64),
                  ConfigError);
}

TEST_CASE("weight positivity and bounds over random samples") {
  const WeightField fields[] = {WeightField::isotropic(3.0),
                                WeightField::rectangular(3.0, 1.0),
                                WeightField::elliptic(1.5, 0.75)};
  for (const WeightField& w : fields) {
    const DerivedConstants d = derive_constants(w, kSquare, 512, 64);
    SplitMix64 rng(11);
    for (int i = 0; i < 10000; ++i) {
      const Vec2 x{1000.0 * rng.next_symmetric(), 1000.0 * rng.next_symmetric()};
      const Vec2 u = unit_at_angle(2.0 * std::numbers::pi * rng.next_double());
      const double g = w(x, u);
      CHECK(g > 0.0);
      CHECK(g >= d.g_min - 1e-12);
      CHECK(g <= d.g_max + 1e-12);
    }
  }
}

TEST_CASE("speed profile convexity for the rectangular profile") {
  // midpoints of boundary-point pairs of the profile stay inside it
  const double a = 3.0, b = 1.0;
  const WeightField w = WeightField::rectangular(a, b);
  SplitMix64 rng(29);
  for (int i = 0; i < 2000; ++i) {
    const Vec2 u1 = unit_at_angle(2.0 * std::numbers::pi * rng.next_double());
    const Vec2 u2 = unit_at_angle(2.0 * std::numbers::pi * rng.next_double());
    const Vec2 p1 = (1.0 / w({0, 0}, u1)) * u1;
    const Vec2 p2 = (1.0 / w({0, 0}, u2)) * u2;
    const Vec2 mid = 0.5 * (p1 + p2);
    CHECK(std::max(std::abs(mid.x) / a, std::abs(mid.y) / b) <= 1.0 + 1e-12);
  }
}

TEST_CASE("project_to_boundary") {
  const Vec2 right = project_to_boundary(kSquare, {510, 0});
  CHECK(right.x == doctest::Approx(500.0));
  CHECK(right.y == doctest::Approx(0.0));

  const Vec2 corner = project_to_boundary(kSquare, {510, 510});
  CHECK(corner.x == doctest::Approx(500.0));
  CHECK(corner.y == doctest::Approx(500.0));

  const Vec2 on = project_to_boundary(kSquare, {500, 123});
  CHECK(on.x == doctest::Approx(500.0));
  CHECK(on.y == doctest::Approx(123.0));
}

TEST_CASE("project_to_boundary: idempotent, lands on an edge") {
  SplitMix64 rng(31);
  for (int i = 0; i < 500; ++i) {
    const Vec2 x{1200.0 * rng.next_symmetric(), 1200.0 * rng.next_symmetric()};
    const Vec2 p = project_to_boundary(kSquare, x);
    CHECK(kSquare.boundary_distance(p) <= 1e-12);
    const Vec2 again = project_to_boundary(kSquare, p);
    CHECK(norm(again - p) <= 1e-12);
  }
}

TEST_CASE("domain polygon validation") {
  CHECK_THROWS_AS(DomainPolygon({{0, 0}, {1, 0}}), ConfigError);
  // clockwise
  CHECK_THROWS_AS(DomainPolygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), ConfigError);
  // non-convex
  CHECK_THROWS_AS(DomainPolygon({{0, 0}, {2, 0}, {1, 0.2}, {2, 2}}), ConfigError);
  const DomainPolygon tri({{0, 0}, {2, 0}, {1, 2}});
  CHECK(tri.contains({1, 0.5}));
  CHECK(tri.strictly_inside({1, 0.5}));
  CHECK(tri.contains({0, 0}));
  CHECK(!tri.strictly_inside({0, 0}));
  CHECK(!tri.contains({-1, -1}));
}

TEST_CASE("boundary cost kinds") {
  const BoundaryCost c = BoundaryCost::constant(2.5);
  CHECK(c({7, 7}) == 2.5);
  CHECK(c.q_min() == 2.5);
  CHECK(c.q_max() == 2.5);

  const BoundaryCost t = BoundaryCost::table({{0, 0}, {10, 0}}, {1.0, 3.0});
  CHECK(t({1, 0}) == 1.0);
  CHECK(t({9, 0}) == 3.0);
  CHECK(t.q_min() == 1.0);
  CHECK(t.q_max() == 3.0);
  CHECK_THROWS_AS(BoundaryCost::table({}, {}), ConfigError);
}

TEST_CASE("ProblemSpec::make wraps position-dependent weights outside the domain") {
  const DomainPolygon dom = DomainPolygon::rectangle(0, 0, 1, 1);
  const WeightField w = WeightField::custom(
      [](Vec2 x, Vec2) { return 1.0 + std::min(1.0, std::max(0.0, x.x)); }, true);
  const ProblemSpec p = ProblemSpec::make(dom, w, BoundaryCost::constant(0.0));
  // outside the domain the weight reads its nearest boundary point
  CHECK(p.weight({5.0, 0.5}, {1, 0}) == doctest::Approx(2.0));
  CHECK(p.weight({-5.0, 0.5}, {1, 0}) == doctest::Approx(1.0));
  CHECK(p.gamma >= 1.0);
}

TEST_CASE("gamma is exactly one for isotropic problems") {
  const ProblemSpec p = ProblemSpec::make(DomainPolygon::rectangle(-1, -1, 1, 1),
                                          WeightField::isotropic(1.0),
                                          BoundaryCost::constant(0.0));
  CHECK(p.gamma == 1.0);
}
