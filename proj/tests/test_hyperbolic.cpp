#include <cmath>
#include <random>

#include "doctest.h"
#include "pdecg/errors.hpp"
#include "pdecg/hyperbolic.hpp"

using namespace pdecg;

namespace {
BetaProfile zero_beta(const Grid1D& g) { return BetaProfile(ChebyshevProfile(0.0, 0.0), g); }
}  // namespace

TEST_CASE("CFL = 1 shift with Dirichlet fill") {
  Grid1D g(5);
  HyperbolicSolver s(g, zero_beta(g), g.dx, BoundaryKind::Dirichlet);
  HyperbolicState st{{1, 2, 3, 4, 5}, 0.0};
  st = s.step(st, 9.0);
  CHECK(st.u == Field1D{2, 3, 4, 5, 9});
  CHECK(st.t == doctest::Approx(0.25));
}

TEST_CASE("zero state and zero input stay zero") {
  Grid1D g(101);
  HyperbolicSolver s(g, BetaProfile(ChebyshevProfile(7.35, 5.0), g), 1e-4, BoundaryKind::Dirichlet);
  HyperbolicState st{Field1D(101, 0.0), 0.0};
  for (int n = 0; n < 100; ++n) s.advance(st, 0.0);
  for (double x : st.u) CHECK(x == 0.0);
}

TEST_CASE("construction rejects CFL violation and grid mismatch") {
  Grid1D g(101);
  CHECK_THROWS_AS(HyperbolicSolver(g, zero_beta(g), 0.02, BoundaryKind::Dirichlet), ConfigError);
  CHECK_THROWS_AS(HyperbolicSolver(g, zero_beta(Grid1D(51)), 1e-3, BoundaryKind::Dirichlet),
                  ConfigError);
}

TEST_CASE("Neumann boundary uses the updated neighbour") {
  Grid1D g(5);
  HyperbolicSolver s(g, zero_beta(g), g.dx, BoundaryKind::Neumann);
  HyperbolicState st{{1, 2, 3, 4, 5}, 0.0};
  st = s.step(st, 2.0);
  CHECK(st.u[3] == 5.0);
  CHECK(st.u[4] == doctest::Approx(5.0 + 0.25 * 2.0));
}

TEST_CASE("scheme is linear in state and control") {
  Grid1D g(41);
  HyperbolicSolver s(g, BetaProfile(ChebyshevProfile(7.35, 5.0), g), 0.5 * g.dx,
                     BoundaryKind::Dirichlet);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1, 1);
  HyperbolicState a{Field1D(41)}, b{Field1D(41)}, c{Field1D(41)};
  for (int j = 0; j < 41; ++j) {
    a.u[j] = U(rng);
    b.u[j] = U(rng);
    c.u[j] = 2.0 * a.u[j] - 3.0 * b.u[j];
  }
  const auto ra = s.step(a, 0.7), rb = s.step(b, -0.2), rc = s.step(c, 2.0 * 0.7 - 3.0 * -0.2);
  for (int j = 0; j < 41; ++j) CHECK(rc.u[j] == doctest::Approx(2.0 * ra.u[j] - 3.0 * rb.u[j]));
}

TEST_CASE("first-order convergence to the exact transport solution") {
  // u0(x) = sin^2(pi x / 2) scaled so that u0(1) matches a constant boundary feed
  auto u0 = [](double x) { return std::sin(0.5 * M_PI * x) * std::sin(0.5 * M_PI * x); };
  auto error_at = [&](int nx) {
    Grid1D g(nx);
    HyperbolicSolver s(g, zero_beta(g), 0.5 * g.dx, BoundaryKind::Dirichlet);
    HyperbolicState st{Field1D(nx)};
    for (int j = 0; j < nx; ++j) st.u[j] = u0(g.x(j));
    const int steps = static_cast<int>(std::lround(0.5 / s.dt()));
    for (int n = 0; n < steps; ++n) s.advance(st, 1.0);
    double err = 0.0;
    for (int j = 0; j < nx; ++j) err = std::max(err, std::abs(st.u[j] - u0(std::min(g.x(j) + 0.5, 1.0))));
    return err;
  };
  const double e1 = error_at(101), e2 = error_at(201), e3 = error_at(401);
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.15));
  CHECK(e2 / e3 == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("open loop blows up at gamma 7.35") {
  Grid1D g(101);
  HyperbolicSolver s(g, BetaProfile(ChebyshevProfile(7.35, 5.0), g), 1e-4, BoundaryKind::Dirichlet);
  HyperbolicState st{Field1D(101, 10.0)};
  for (int n = 0; n < 50000; ++n) s.advance(st, 0.0);
  CHECK(l2_norm(st.u, g) > 100.0);
}
