#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mdm/derivative.hpp"
#include "mdm/errors.hpp"
#include "mdm/experiments.hpp"

using namespace mdm;

namespace {

template <class F>
double golden_min(F&& f, double a, double b) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  for (int i = 0; i < 200 && b - a > 1e-15; ++i) {
    if (f(c) < f(d)) { b = d; } else { a = c; }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return f(0.5 * (a + b));
}

// Local length rebuilt without the library's case formulas: case 1 is the
// truncated segment, case 2 the shortest path z1 -> circle(y, r) -> z2 near
// x, cases 3-4 the star from the intersection of the two r-circles nearest
// to x.
double oracle_length(const LocalScene& sc, double eps) {
  const Point2 y = sc.curve.point(sc.s_moving + sc.direction * eps);
  if (sc.case_id == 1) return distance(sc.z[0], y) - sc.r;
  if (sc.case_id == 2) {
    const double phi0 = (sc.x - sc.curve.point(sc.s_moving)).angle();
    return golden_min(
        [&](double phi) {
          const Point2 x = y + from_polar(sc.r, phi);
          return distance(x, sc.z[0]) + distance(x, sc.z[1]);
        },
        phi0 - 0.3, phi0 + 0.3);
  }
  const Point2 y1 = sc.curve.point(sc.s_fixed);
  const double d = distance(y, y1);
  const double half = std::acos(0.5 * d / sc.r);
  const double base = (y - y1).angle();
  const Point2 c1 = y1 + from_polar(sc.r, base + half), c2 = y1 + from_polar(sc.r, base - half);
  const Point2 x = distance(c1, sc.x) < distance(c2, sc.x) ? c1 : c2;
  double len = 0.0;
  for (const Point2& z : sc.z) len += distance(x, z);
  return len;
}

}  // namespace

TEST(Derivative, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(derivative({1, 1.0, 0.0}).value, 1.0);
  EXPECT_NEAR(derivative({1, 1.0, kPi / 3}).value, 0.5, 1e-15);
  EXPECT_NEAR(derivative({2, 1.0, kPi / 3, kPi / 3}).value, 0.5, 1e-15);
  // alpha = pi/6, beta = pi/3, delta = 0: cos(pi/6) sin(pi/2) / sin(pi/3) = 1.
  EXPECT_NEAR(derivative({3, 1.0, kPi / 6, kPi / 3, 0.0, 0.0}).value, 1.0, 1e-15);
  EXPECT_NEAR(derivative({4, 1.0, kPi / 6, kPi / 3, kPi / 3, 0.0}).value, 2.0, 1e-15);
  EXPECT_EQ(derivative({4, 1.0, 0.4, 0.1, 0.2, 0.3}).case_id, 4);
}

TEST(Derivative, SingularConfigurations) {
  EXPECT_THROW(derivative({3, 1.0, kPi / 2, 0.3, 0.0, 0.1}), SingularConfig);
  EXPECT_THROW(derivative({4, 1.0, 0.0, 0.3, 0.2, 0.1}), SingularConfig);
  EXPECT_NO_THROW(derivative({1, 1.0, kPi / 2}));
}

TEST(Derivative, TransitionIdentities) {
  // Case 2 with beta = 0 doubles case 1; case 4 with gamma = beta doubles case 3.
  for (double a = 0.05; a < 1.5; a += 0.1) {
    EXPECT_NEAR(derivative({2, 1.0, a, 0.0}).value, 2.0 * derivative({1, 1.0, a}).value, 1e-15);
    const LocalConfig c3{3, 1.0, a, 0.4, 0.0, 0.2};
    const LocalConfig c4{4, 1.0, a, 0.4, 0.4, 0.2};
    EXPECT_NEAR(derivative(c4).value, 2.0 * derivative(c3).value, 1e-12);
  }
}

TEST(Derivative, MatchesIndependentLocalLength) {
  std::mt19937_64 rng(17);
  for (int c = 1; c <= 4; ++c) {
    for (int k = 0; k < 25; ++k) {
      const LocalScene sc = random_local_scene(c, rng);
      const double exact = derivative(config_from_scene(sc)).value;
      const double h = 1e-4;
      const double fd = (oracle_length(sc, h) - oracle_length(sc, -h)) / (2 * h);
      EXPECT_NEAR(exact, fd, 1e-6) << "case " << c << " #" << k;
      // The library's own length model agrees with the test-side one.
      EXPECT_NEAR(local_length(sc, 0.01), oracle_length(sc, 0.01), 1e-9) << "case " << c;
    }
  }
}

TEST(Derivative, RichardsonOracleTolerance) {
  std::mt19937_64 rng(23);
  for (int c = 1; c <= 4; ++c)
    for (int k = 0; k < 25; ++k) {
      const LocalScene sc = random_local_scene(c, rng);
      EXPECT_NEAR(derivative(config_from_scene(sc)).value, richardson_oracle(sc, 1e-3), 1e-8);
    }
}

TEST(Derivative, OneSidedGivesOutwardSlope) {
  std::mt19937_64 rng(29);
  const LocalScene sc = random_local_scene(1, rng);
  const double d = derivative(config_from_scene(sc)).value;
  EXPECT_NEAR(one_sided_difference(sc, 1e-6), d, 1e-5);
  EXPECT_NEAR(one_sided_difference(sc, -1e-6), d, 1e-5);
}
