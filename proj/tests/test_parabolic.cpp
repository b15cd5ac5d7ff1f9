#include <cmath>

#include "doctest.h"
#include "pdecg/errors.hpp"
#include "pdecg/parabolic.hpp"

using namespace pdecg;

namespace {
LambdaProfile zero_lambda(const Grid1D& g) { return LambdaProfile(ChebyshevProfile(0.0, 0.0), g); }
}  // namespace

TEST_CASE("constant field only changes next to the pinned boundary") {
  Grid1D g(21);
  ParabolicSolver s(g, zero_lambda(g), 0.4 * g.dx * g.dx, BoundaryKind::Dirichlet);
  ParabolicState st{Field1D(21, 3.0)};
  st = s.step(st, 3.0);
  CHECK(st.u[0] == 0.0);
  for (int j = 1; j < 21; ++j) CHECK(st.u[j] == doctest::Approx(3.0).epsilon(1e-14));
  st = s.step(st, 3.0);
  CHECK(st.u[1] < 3.0);
  for (int j = 2; j < 21; ++j) CHECK(st.u[j] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("stability bound enforced") {
  Grid1D g(201);
  CHECK_NOTHROW(ParabolicSolver(g, zero_lambda(g), 1e-5, BoundaryKind::Dirichlet));
  CHECK_THROWS_AS(ParabolicSolver(g, zero_lambda(g), 2e-5, BoundaryKind::Dirichlet), ConfigError);
}

TEST_CASE("heat eigenfunction decays at the analytic rate") {
  auto error_at = [](int nx, double dt) {
    Grid1D g(nx);
    ParabolicSolver s(g, zero_lambda(g), dt, BoundaryKind::Dirichlet);
    ParabolicState st{Field1D(nx)};
    for (int j = 0; j < nx; ++j) st.u[j] = std::sin(M_PI * g.x(j));
    const double T = 0.1;
    const int steps = static_cast<int>(std::lround(T / dt));
    for (int n = 0; n < steps; ++n) s.advance(st, 0.0);
    double err = 0.0;
    for (int j = 0; j < nx; ++j)
      err = std::max(err, std::abs(st.u[j] - std::exp(-M_PI * M_PI * T) * std::sin(M_PI * g.x(j))));
    return err;
  };
  // dt tied to dx^2 so both error terms shrink by 4 per halving of dx
  const double e1 = error_at(21, 0.25 / (20.0 * 20.0));
  const double e2 = error_at(41, 0.25 / (40.0 * 40.0));
  CHECK(e1 < 2e-3);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("pinned zero at x=0 and non-increasing heat energy") {
  Grid1D g(51);
  ParabolicSolver s(g, zero_lambda(g), 0.5 * g.dx * g.dx, BoundaryKind::Dirichlet);
  ParabolicState st{Field1D(51)};
  for (int j = 0; j < 51; ++j) st.u[j] = 1.0 + g.x(j) * (1 - g.x(j)) * 4;
  double prev = l2_norm(st.u, g);
  for (int n = 0; n < 500; ++n) {
    s.advance(st, 0.0);
    CHECK(st.u[0] == 0.0);
    const double now = l2_norm(st.u, g);
    CHECK(now <= prev + 1e-15);
    prev = now;
  }
}

TEST_CASE("Neumann boundary") {
  Grid1D g(11);
  ParabolicSolver s(g, zero_lambda(g), 0.4 * g.dx * g.dx, BoundaryKind::Neumann);
  ParabolicState st{Field1D(11, 1.0)};
  st = s.step(st, 3.0);
  CHECK(st.u[10] == doctest::Approx(st.u[9] + 0.1 * 3.0));
}

TEST_CASE("open loop grows for lambda = 50 cos(8 arccos x)") {
  Grid1D g(201);
  ParabolicSolver s(g, LambdaProfile(ChebyshevProfile(8.0, 50.0), g), 1e-5, BoundaryKind::Dirichlet);
  ParabolicState st{Field1D(201, 10.0)};
  std::vector<double> norms;
  for (int n = 1; n <= 100000; ++n) {
    s.advance(st, 0.0);
    if (n % 10000 == 0) norms.push_back(l2_norm(st.u, g));
  }
  // monotone growth after the initial boundary-layer transient
  for (std::size_t i = 4; i < norms.size(); ++i) CHECK(norms[i] > norms[i - 1]);
  CHECK(norms.back() > l2_norm(Field1D(201, 10.0), g));
}
