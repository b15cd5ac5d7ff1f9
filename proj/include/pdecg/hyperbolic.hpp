#pragma once

#include "pdecg/boundary.hpp"
#include "pdecg/grid.hpp"
#include "pdecg/profile.hpp"

namespace pdecg {

struct HyperbolicState {
  Field1D u;
  double t = 0.0;
};

/// Explicit first-order upwind integrator for u_t = u_x + beta(x) u(0,t) on [0,1)
/// with the boundary input applied at x = 1.
///
/// One step of size dt:
///   u_j <- u_j + dt * ((u_{j+1} - u_j)/dx + beta_j * u_0)   for j = 0..N-1
///   u_N <- control                      (Dirichlet)
///   u_N <- u_{N-1} + dx * control       (Neumann, with the updated u_{N-1})
/// The recirculation term reads u_0 from the pre-update state.
class HyperbolicSolver {
 public:
  /// Throws ConfigError if dt > dx (CFL) or the profile grid differs from `grid`.
  HyperbolicSolver(const Grid1D& grid, BetaProfile beta, double dt, BoundaryKind kind);

  /// Advances `state` in place by one step of dt with the given boundary input.
  void advance(HyperbolicState& state, double control) const;

  HyperbolicState step(const HyperbolicState& state, double control) const;

  const Grid1D& grid() const { return grid_; }
  const BetaProfile& beta() const { return beta_; }
  double dt() const { return dt_; }
  BoundaryKind kind() const { return kind_; }

 private:
  Grid1D grid_;
  BetaProfile beta_;
  double dt_;
  BoundaryKind kind_;
  mutable Field1D scratch_;
};

}  // namespace pdecg
