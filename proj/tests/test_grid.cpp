#include <cmath>

#include "doctest.h"
#include "pdecg/errors.hpp"
#include "pdecg/grid.hpp"

using namespace pdecg;

TEST_CASE("Grid1D spacing and positions") {
  Grid1D g(101);
  CHECK(g.dx == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(g.x(100) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(Grid1D(2), ConfigError);
  CHECK(Grid1D::with_spacing(0.005).nx == 201);
  CHECK_THROWS_AS(Grid1D::with_spacing(0.3), ConfigError);
}

TEST_CASE("Grid2D spacing") {
  Grid2D g(21, 11);
  CHECK(g.dx == doctest::Approx(0.05));
  CHECK(g.dy == doctest::Approx(0.1));
  CHECK_THROWS_AS(Grid2D(2, 5), ConfigError);
}

TEST_CASE("rectangle-rule L2 norm") {
  Grid1D g(101);
  Field1D zero(101, 0.0), one(101, 1.0);
  CHECK(l2_norm(zero, g) == 0.0);
  // sqrt(101 * 0.01)
  CHECK(l2_distance(zero, one, g) == doctest::Approx(1.00498756211).epsilon(1e-10));
  CHECK_THROWS_AS(l2_distance(zero, Field1D(5), g), InputError);
  CHECK(vector_norm(one) == doctest::Approx(std::sqrt(101.0)));
}

TEST_CASE("2D squared norm weights both components") {
  Grid2D g(5, 5);
  Velocity a(g), b(g);
  a.u.fill(1.0);
  b.v.fill(2.0);
  CHECK(l2_norm_sq(a, g) == doctest::Approx(25 * 0.0625));
  CHECK(l2_distance_sq(a, b, g) == doctest::Approx(25 * 5 * 0.0625));
}

TEST_CASE("trapezoid is exact for linear data") {
  std::vector<double> f{0.0, 0.25, 0.5, 0.75, 1.0};
  CHECK(trapezoid(f, 0.25) == doctest::Approx(0.5).epsilon(1e-15));
  Array2D z(3, 3);
  CHECK(z.all_finite());
  z(1, 1) = NAN;
  CHECK_FALSE(z.all_finite());
}
