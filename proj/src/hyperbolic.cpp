#include "pdecg/hyperbolic.hpp"

#include <string>

#include "pdecg/errors.hpp"

namespace pdecg {

HyperbolicSolver::HyperbolicSolver(const Grid1D& grid, BetaProfile beta, double dt,
                                   BoundaryKind kind)
    : grid_(grid), beta_(std::move(beta)), dt_(dt), kind_(kind) {
  if (!(beta_.grid == grid_))
    throw ConfigError("beta profile sampled on a different grid");
  if (!(dt_ > 0.0)) throw ConfigError("hyperbolic dt must be positive");
  if (dt_ > grid_.dx * (1.0 + 1e-12))
    throw ConfigError("hyperbolic scheme violates CFL: dt=" + std::to_string(dt_) +
                      " > dx=" + std::to_string(grid_.dx));
}

void HyperbolicSolver::advance(HyperbolicState& state, double control) const {
  auto& u = state.u;
  if (static_cast<int>(u.size()) != grid_.nx)
    throw InputError("hyperbolic state length does not match grid");
  const int n = grid_.nx - 1;
  const double dx = grid_.dx;
  const double u0 = u[0];
  const auto& beta = beta_.values;
  scratch_.resize(u.size());
  for (int j = 0; j < n; ++j)
    scratch_[j] = u[j] + dt_ * ((u[j + 1] - u[j]) / dx + beta[j] * u0);
  scratch_[n] = kind_ == BoundaryKind::Dirichlet ? control : scratch_[n - 1] + dx * control;
  u.swap(scratch_);
  state.t += dt_;
}

HyperbolicState HyperbolicSolver::step(const HyperbolicState& state, double control) const {
  HyperbolicState next = state;
  advance(next, control);
  return next;
}

}  // namespace pdecg
