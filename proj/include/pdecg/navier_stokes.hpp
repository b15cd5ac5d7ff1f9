#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pdecg/boundary.hpp"
#include "pdecg/grid.hpp"

namespace pdecg {

struct FluidParams {
  double nu = 0.1;   // kinematic viscosity
  double rho = 1.0;  // density
};

/// Budget for the damped Jacobi projection solve.
struct PoissonSettings {
  int max_iters = 5000;
  double tol = 1e-10;  // stop when max |update| <= tol * max |p|
  double omega = 0.8;  // Jacobi damping
};

struct PoissonResult {
  Array2D solution;
  int iterations = 0;
  double residual = 0.0;  // max |rhs - A p| over the interior
  bool converged = false;
};

/// Tangential, uniform boundary velocity on one edge.
struct LidControl {
  double value = 0.0;
  Edge2D edge = Edge2D::Top;
};

struct NSState {
  Field2D fields;
  double t = 0.0;
};

/// Zeroes u and v on the three uncontrolled edges, then sets the controlled edge
/// (corners included) to tangential = value, normal = 0.
void apply_velocity_bc(Velocity& w, const LidControl& control);
void apply_velocity_bc(Array2D& u, Array2D& v, const LidControl& control);

/// Centred divergence at interior nodes (boundary nodes are left at 0).
Array2D divergence(const Velocity& w, const Grid2D& grid);

/// max over interior nodes of |centred divergence|.
double max_divergence(const Velocity& w, const Grid2D& grid);

// The pressure operator is the composition the corrector actually applies:
// (A p)_ij = centred divergence of the centred gradient of p, where the gradient
// is taken at interior nodes only (boundary velocities are never corrected) and
// p is closed by homogeneous Neumann mirroring p_0 = p_1, p_N = p_{N-1}.
// Solving A p = (rho/dt) div(u*) therefore makes the corrected field discretely
// divergence-free. The gauge is fixed by anchoring p(1,1) = 0.

/// Overwrites the boundary ring of p with its mirrored interior neighbours.
void mirror_neumann(Array2D& p);

/// Centred gradient at interior nodes, zero on the boundary ring.
Velocity interior_gradient(const Array2D& p, const Grid2D& grid);

/// (A p) at interior nodes; `p` must already be mirrored.
Array2D projection_operator(const Array2D& p, const Grid2D& grid);

/// Damped Jacobi solve of A p = rhs starting from `initial`.
/// Returns the best iterate and residual even when the budget runs out.
PoissonResult solve_projection_poisson(const Array2D& rhs, const Array2D& initial,
                                       const Grid2D& grid, const PoissonSettings& settings);

/// Predictor / pressure-projection / corrector integrator on a collocated grid.
class NavierStokesSolver {
 public:
  /// Throws ConfigError for non-positive parameters or grids smaller than 5x5.
  NavierStokesSolver(const Grid2D& grid, FluidParams params, double dt,
                     PoissonSettings poisson = {});

  /// Explicit centred diffusion minus centred advection at interior nodes;
  /// boundary values are copied from the input.
  Velocity predict(const Velocity& w) const;

  /// Pressure from (rho/dt) * div(star), warm-started from `initial`.
  PoissonResult solve_pressure(const Velocity& star, const Array2D& initial) const;

  /// u = u* - (dt/rho) dp/dx, v = v* - (dt/rho) dp/dy at interior nodes.
  Velocity correct(const Velocity& star, const Array2D& p) const;

  /// BC -> predictor -> BC -> pressure -> corrector -> BC; advances t by dt.
  NSState step(const NSState& state, const LidControl& control,
               PoissonResult* report = nullptr) const;

  /// Non-empty when dt exceeds dx^2/(4 nu) or dx/max_speed.
  std::optional<std::string> stability_warning(double max_speed) const;

  const Grid2D& grid() const { return grid_; }
  const FluidParams& params() const { return params_; }
  double dt() const { return dt_; }
  const PoissonSettings& poisson() const { return poisson_; }

 private:
  Grid2D grid_;
  FluidParams params_;
  double dt_;
  PoissonSettings poisson_;
};

/// Velocity frames produced by a lid schedule, used as the tracking target.
struct ReferenceTrajectory {
  double dt_control = 0.0;
  Edge2D edge = Edge2D::Top;
  std::vector<double> controls;  // controls[k] is held over [k dt, (k+1) dt)
  std::vector<Velocity> frames;  // frames[k] is the velocity at t = (k+1) dt

  int steps() const { return static_cast<int>(frames.size()); }
  /// Throws InputError when `k` has no frame.
  const Velocity& frame(int k) const;
};

/// Rolls the solver out from rest under `schedule`, storing one frame per control step.
/// Throws BlowUpError naming the failing step.
ReferenceTrajectory make_reference(const std::function<double(double)>& schedule,
                                   const NavierStokesSolver& solver, double dt_control,
                                   double horizon, Edge2D edge = Edge2D::Top);

/// U(t) = intercept + slope * t; the default is 3 - 5t.
std::function<double(double)> linear_schedule(double intercept = 3.0, double slope = -5.0);

/// round(a / b), throwing ConfigError unless b divides a to within one part in 1e9.
int checked_ratio(double a, double b, const char* what);

}  // namespace pdecg
