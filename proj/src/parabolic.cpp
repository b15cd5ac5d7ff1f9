#include "pdecg/parabolic.hpp"

#include <string>

#include "pdecg/errors.hpp"

namespace pdecg {

ParabolicSolver::ParabolicSolver(const Grid1D& grid, LambdaProfile lambda, double dt,
                                 BoundaryKind kind)
    : grid_(grid), lambda_(std::move(lambda)), dt_(dt), kind_(kind) {
  if (!(lambda_.grid == grid_))
    throw ConfigError("lambda profile sampled on a different grid");
  if (!(dt_ > 0.0)) throw ConfigError("parabolic dt must be positive");
  const double bound = 0.5 * grid_.dx * grid_.dx;
  if (dt_ > bound * (1.0 + 1e-12))
    throw ConfigError("parabolic scheme violates dt <= dx^2/2: dt=" + std::to_string(dt_) +
                      " > " + std::to_string(bound));
}

void ParabolicSolver::advance(ParabolicState& state, double control) const {
  auto& u = state.u;
  if (static_cast<int>(u.size()) != grid_.nx)
    throw InputError("parabolic state length does not match grid");
  const int n = grid_.nx - 1;
  const double inv_dx2 = 1.0 / (grid_.dx * grid_.dx);
  const auto& lambda = lambda_.values;
  scratch_.resize(u.size());
  for (int j = 1; j < n; ++j)
    scratch_[j] =
        u[j] + dt_ * ((u[j - 1] - 2.0 * u[j] + u[j + 1]) * inv_dx2 + lambda[j] * u[j]);
  scratch_[0] = 0.0;
  scratch_[n] =
      kind_ == BoundaryKind::Dirichlet ? control : scratch_[n - 1] + grid_.dx * control;
  u.swap(scratch_);
  state.t += dt_;
}

ParabolicState ParabolicSolver::step(const ParabolicState& state, double control) const {
  ParabolicState next = state;
  advance(next, control);
  return next;
}

}  // namespace pdecg
