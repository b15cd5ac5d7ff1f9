#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pdecg/errors.hpp"
#include "pdecg/profile.hpp"

using namespace pdecg;

TEST_CASE("beta_chebyshev reference values") {
  CHECK(beta_chebyshev(1.0, 7.35, 5.0) == 5.0);
  CHECK(beta_chebyshev(0.0, 8.0, 50.0) == doctest::Approx(50.0).epsilon(1e-14));
  // arccos(0.5) = pi/3; extended-precision evaluation as the oracle
  const long double pi = std::numbers::pi_v<long double>;
  const long double oracle = 5.0L * std::cos(7.35L * pi / 3.0L);
  CHECK(std::abs(beta_chebyshev(0.5, 7.35, 5.0) - static_cast<double>(oracle)) < 1e-12);
  CHECK_THROWS_AS(beta_chebyshev(1.5, 7.35, 5.0), InputError);
  CHECK_THROWS_AS(beta_chebyshev(-0.1, 7.35, 5.0), InputError);
}

TEST_CASE("integer gamma gives Chebyshev polynomials") {
  ChebyshevProfile t8(8.0, 1.0);
  for (double x : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0}) {
    const double x2 = x * x;
    const double poly = 128 * x2 * x2 * x2 * x2 - 256 * x2 * x2 * x2 + 160 * x2 * x2 - 32 * x2 + 1;
    CHECK(t8(x) == doctest::Approx(poly).epsilon(1e-12));
  }
}

TEST_CASE("analytic integral against quadrature") {
  // int_0^1 T_8 = -1/63
  CHECK(ChebyshevProfile(8.0, 1.0).integral(0.0, 1.0) == doctest::Approx(-1.0 / 63.0).epsilon(1e-13));
  CHECK(ChebyshevProfile(0.0, 3.0).integral(0.2, 0.7) == doctest::Approx(1.5));
  CHECK(ChebyshevProfile(1.0, 2.0).integral(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-13));

  // composite Simpson on a smooth sub-interval away from the x = 1 singular derivative
  for (double gamma : {7.35, 8.0, 2.5}) {
    ChebyshevProfile p(gamma, 5.0);
    const int n = 20000;
    const double a = 0.0, b = 0.9, h = (b - a) / n;
    double s = p(a) + p(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * p(a + i * h);
    CHECK(p.integral(a, b) == doctest::Approx(s * h / 3.0).epsilon(1e-10));
  }
}

TEST_CASE("sampled profile") {
  Grid1D g(11);
  CoefficientProfile prof(ChebyshevProfile(7.35, 5.0), g);
  REQUIRE(prof.values.size() == 11);
  CHECK(prof.values[10] == 5.0);
  CHECK(prof.values[3] == beta_chebyshev(g.x(3), 7.35, 5.0));
}
