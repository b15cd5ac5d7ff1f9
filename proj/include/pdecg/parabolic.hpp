#pragma once

#include "pdecg/boundary.hpp"
#include "pdecg/grid.hpp"
#include "pdecg/profile.hpp"

namespace pdecg {

struct ParabolicState {
  Field1D u;
  double t = 0.0;
};

/// Explicit integrator for u_t = u_xx + lambda(x) u with u(0,t) = 0 and the
/// boundary input at x = 1.
///
/// Interior j = 1..N-1 advances with the centred second difference plus the
/// reaction term (both from the pre-update state), then u_0 is pinned to 0 and
/// u_N is set from the control (Neumann uses the updated u_{N-1}).
class ParabolicSolver {
 public:
  /// Throws ConfigError if dt > dx^2/2.
  ParabolicSolver(const Grid1D& grid, LambdaProfile lambda, double dt, BoundaryKind kind);

  void advance(ParabolicState& state, double control) const;
  ParabolicState step(const ParabolicState& state, double control) const;

  const Grid1D& grid() const { return grid_; }
  const LambdaProfile& lambda() const { return lambda_; }
  double dt() const { return dt_; }
  BoundaryKind kind() const { return kind_; }

 private:
  Grid1D grid_;
  LambdaProfile lambda_;
  double dt_;
  BoundaryKind kind_;
  mutable Field1D scratch_;
};

}  // namespace pdecg
