#pragma once

#include <iosfwd>
#include <vector>

#include "pdecg/grid.hpp"
#include "pdecg/navier_stokes.hpp"

namespace pdecg {

/// One lid speed per control step; values[k] is held over [k dt, (k+1) dt).
struct ControlSchedule {
  std::vector<double> values;
  double dt_control = 0.0;

  int steps() const { return static_cast<int>(values.size()); }
  double horizon() const { return steps() * dt_control; }
};

/// Samples `schedule(k dt_control)` for every control step of the reference.
ControlSchedule schedule_from(const std::function<double(double)>& schedule,
                              const ReferenceTrajectory& reference);

struct CostBreakdown {
  double tracking = 0.0;
  double control = 0.0;
  double total = 0.0;
};

/// Weights of the tracking cost
///   J = 1/2 sum_k ||u_k - uref_k||^2 dt + gamma/2 sum_k (U_k - U_ref)^2 dt.
struct TrackingWeights {
  double gamma_ctrl = 0.1;
  double u_ref = 2.0;
};

/// frames[0] is the rest state; frames[k+1] is the velocity after control step k.
struct ForwardTrajectory {
  std::vector<Velocity> frames;
};

/// Rolls the solver out from rest. The adjoint needs one solver step per control
/// step, so dt_control must equal solver.dt(); throws ConfigError otherwise and
/// BlowUpError naming the step on non-finite values.
ForwardTrajectory rollout(const ControlSchedule& schedule, const NavierStokesSolver& solver,
                          Edge2D edge);

CostBreakdown trajectory_cost(const ForwardTrajectory& forward, const ControlSchedule& schedule,
                              const ReferenceTrajectory& reference, const Grid2D& grid,
                              const TrackingWeights& weights);

/// Throws InputError when schedule and reference disagree on dt_control or length.
CostBreakdown evaluate_cost(const ControlSchedule& schedule, const ReferenceTrajectory& reference,
                            const NavierStokesSolver& solver, const TrackingWeights& weights);

/// lam[k] is the adjoint velocity at t = k dt, lam[N] = 0; mu[k] is the adjoint
/// pressure removed by the projection that produced lam[k].
struct AdjointState {
  std::vector<Velocity> lam;
  std::vector<Array2D> mu;
};

// Backward explicit sweep of
//   d lam/dt = -(G + G^T) u - nu lap(lam) - grad(mu) + source,   G = grad(lam),
// from lam(T) = 0:
//   lam_{k-1} = lam_k - dt [ -(G_k + G_k^T) u_k - nu lap(lam_k) + source_k ],
// then homogeneous boundaries, projection with the forward pressure operator,
// homogeneous boundaries again.

/// General form with explicit sources; sources[k-1] pairs with coefficients[k].
AdjointState solve_adjoint(const std::vector<Velocity>& coefficients,
                           const std::vector<Velocity>& sources,
                           const NavierStokesSolver& solver);

/// Source u_k - uref_k along the forward trajectory.
AdjointState solve_adjoint(const ForwardTrajectory& forward, const ReferenceTrajectory& reference,
                           const NavierStokesSolver& solver);

/// dJ/dU as a density on [0,T] (divide-by-dt form), one entry per control step:
///   g_k = gamma (U_k - U_ref)
///       + nu * trapezoid over the edge of the outward normal difference of the
///         tangential adjoint component at lam[k]
///       + dx dy sum over the controlled edge of (u_{k+1} - uref_{k+1}) tangential.
/// The last term is the direct dependence of the tracking norm on the lid row.
std::vector<double> control_gradient(const AdjointState& adjoint,
                                     const ForwardTrajectory& forward,
                                     const ReferenceTrajectory& reference,
                                     const ControlSchedule& schedule,
                                     const NavierStokesSolver& solver,
                                     const TrackingWeights& weights);

struct OptimizeSettings {
  int iters = 20;
  double step = 10.0;     // initial step on the gradient density
  int max_halvings = 20;

  friend bool operator==(const OptimizeSettings&, const OptimizeSettings&) = default;
};

struct OptimizeResult {
  ControlSchedule schedule;            // best schedule found
  std::vector<CostBreakdown> history;  // history[0] is the initial cost; one entry per accepted step
  bool stalled = false;                // line search exhausted its halvings
};

/// Gradient descent with backtracking: halve the step until the cost decreases.
/// An accepted step doubles the next trial step.
OptimizeResult optimize(const ControlSchedule& initial, const ReferenceTrajectory& reference,
                        const NavierStokesSolver& solver, const TrackingWeights& weights,
                        const OptimizeSettings& settings = {});

/// "iter,tracking,control,total"
void write_cost_history_csv(std::ostream& os, const std::vector<CostBreakdown>& history);
/// "t,U"
void write_schedule_csv(std::ostream& os, const ControlSchedule& schedule);

}  // namespace pdecg
