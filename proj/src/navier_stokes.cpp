#include "pdecg/navier_stokes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pdecg/errors.hpp"

namespace pdecg {

void apply_velocity_bc(Array2D& u, Array2D& v, const LidControl& control) {
  const int nx = u.nx(), ny = u.ny();
  for (int i = 0; i < nx; ++i) {
    u(i, 0) = v(i, 0) = 0.0;
    u(i, ny - 1) = v(i, ny - 1) = 0.0;
  }
  for (int j = 0; j < ny; ++j) {
    u(0, j) = v(0, j) = 0.0;
    u(nx - 1, j) = v(nx - 1, j) = 0.0;
  }
  switch (control.edge) {
    case Edge2D::Top:
      for (int i = 0; i < nx; ++i) u(i, ny - 1) = control.value;
      break;
    case Edge2D::Bottom:
      for (int i = 0; i < nx; ++i) u(i, 0) = control.value;
      break;
    case Edge2D::Left:
      for (int j = 0; j < ny; ++j) v(0, j) = control.value;
      break;
    case Edge2D::Right:
      for (int j = 0; j < ny; ++j) v(nx - 1, j) = control.value;
      break;
  }
}

void apply_velocity_bc(Velocity& w, const LidControl& control) {
  apply_velocity_bc(w.u, w.v, control);
}

Array2D divergence(const Velocity& w, const Grid2D& grid) {
  Array2D d(grid.nx, grid.ny);
  const double ax = 0.5 / grid.dx, ay = 0.5 / grid.dy;
  for (int i = 1; i < grid.nx - 1; ++i)
    for (int j = 1; j < grid.ny - 1; ++j)
      d(i, j) = (w.u(i + 1, j) - w.u(i - 1, j)) * ax + (w.v(i, j + 1) - w.v(i, j - 1)) * ay;
  return d;
}

double max_divergence(const Velocity& w, const Grid2D& grid) {
  return divergence(w, grid).max_abs();
}

void mirror_neumann(Array2D& p) {
  const int nx = p.nx(), ny = p.ny();
  for (int j = 1; j < ny - 1; ++j) {
    p(0, j) = p(1, j);
    p(nx - 1, j) = p(nx - 2, j);
  }
  for (int i = 0; i < nx; ++i) {
    p(i, 0) = p(i, 1);
    p(i, ny - 1) = p(i, ny - 2);
  }
}

Velocity interior_gradient(const Array2D& p, const Grid2D& grid) {
  Velocity g(grid);
  const double ax = 0.5 / grid.dx, ay = 0.5 / grid.dy;
  for (int i = 1; i < grid.nx - 1; ++i)
    for (int j = 1; j < grid.ny - 1; ++j) {
      g.u(i, j) = (p(i + 1, j) - p(i - 1, j)) * ax;
      g.v(i, j) = (p(i, j + 1) - p(i, j - 1)) * ay;
    }
  return g;
}

Array2D projection_operator(const Array2D& p, const Grid2D& grid) {
  return divergence(interior_gradient(p, grid), grid);
}

namespace {

// Diagonal of the projection operator: each interior neighbour in a direction
// contributes -1/(4 h^2).
Array2D projection_diagonal(const Grid2D& grid) {
  Array2D diag(grid.nx, grid.ny);
  const double cx = 0.25 / (grid.dx * grid.dx), cy = 0.25 / (grid.dy * grid.dy);
  for (int i = 1; i < grid.nx - 1; ++i)
    for (int j = 1; j < grid.ny - 1; ++j) {
      const int nxn = (i + 1 <= grid.nx - 2) + (i - 1 >= 1);
      const int nyn = (j + 1 <= grid.ny - 2) + (j - 1 >= 1);
      diag(i, j) = -(nxn * cx + nyn * cy);
    }
  return diag;
}

void anchor(Array2D& p) {
  const double ref = p(1, 1);
  if (ref == 0.0) return;
  for (double& x : p.flat()) x -= ref;
  p(1, 1) = 0.0;
}

double interior_residual(const Array2D& rhs, const Array2D& p, const Grid2D& grid) {
  const Array2D ap = projection_operator(p, grid);
  double r = 0.0;
  for (int i = 1; i < grid.nx - 1; ++i)
    for (int j = 1; j < grid.ny - 1; ++j) r = std::max(r, std::abs(rhs(i, j) - ap(i, j)));
  return r;
}

}  // namespace

PoissonResult solve_projection_poisson(const Array2D& rhs, const Array2D& initial,
                                       const Grid2D& grid, const PoissonSettings& settings) {
  if (settings.max_iters < 1) throw ConfigError("Poisson max_iters must be >= 1");
  if (rhs.nx() != grid.nx || rhs.ny() != grid.ny || initial.nx() != grid.nx ||
      initial.ny() != grid.ny)
    throw InputError("Poisson arrays do not match the grid");

  PoissonResult result;
  Array2D p = initial;
  mirror_neumann(p);
  anchor(p);
  mirror_neumann(p);
  const Array2D diag = projection_diagonal(grid);
  Array2D next = p;

  for (int it = 1; it <= settings.max_iters; ++it) {
    const Array2D ap = projection_operator(p, grid);
    double max_update = 0.0;
    for (int i = 1; i < grid.nx - 1; ++i)
      for (int j = 1; j < grid.ny - 1; ++j) {
        const double upd = settings.omega * (rhs(i, j) - ap(i, j)) / diag(i, j);
        next(i, j) = p(i, j) + upd;
        max_update = std::max(max_update, std::abs(upd));
      }
    anchor(next);
    mirror_neumann(next);
    std::swap(p, next);
    result.iterations = it;
    if (max_update <= settings.tol * p.max_abs()) {
      result.converged = true;
      break;
    }
  }
  result.residual = interior_residual(rhs, p, grid);
  result.solution = std::move(p);
  return result;
}

NavierStokesSolver::NavierStokesSolver(const Grid2D& grid, FluidParams params, double dt,
                                       PoissonSettings poisson)
    : grid_(grid), params_(params), dt_(dt), poisson_(poisson) {
  if (grid_.nx < 5 || grid_.ny < 5) throw ConfigError("Navier-Stokes grid must be at least 5x5");
  if (!(params_.nu > 0.0)) throw ConfigError("viscosity nu must be positive");
  if (!(params_.rho > 0.0)) throw ConfigError("density rho must be positive");
  if (!(dt_ > 0.0)) throw ConfigError("Navier-Stokes dt must be positive");
  if (poisson_.max_iters < 1) throw ConfigError("Poisson max_iters must be >= 1");
  if (!(poisson_.omega > 0.0 && poisson_.omega <= 1.0))
    throw ConfigError("Poisson omega must lie in (0, 1]");
  if (!(poisson_.tol >= 0.0)) throw ConfigError("Poisson tol must be non-negative");
}

Velocity NavierStokesSolver::predict(const Velocity& w) const {
  Velocity star = w;
  const double dx = grid_.dx, dy = grid_.dy, nu = params_.nu;
  const double idx2 = 1.0 / (dx * dx), idy2 = 1.0 / (dy * dy);
  const double ax = 0.5 / dx, ay = 0.5 / dy;
  const Array2D& u = w.u;
  const Array2D& v = w.v;
  for (int i = 1; i < grid_.nx - 1; ++i)
    for (int j = 1; j < grid_.ny - 1; ++j) {
      const double uc = u(i, j), vc = v(i, j);
      const double lap_u = (u(i - 1, j) - 2.0 * uc + u(i + 1, j)) * idx2 +
                           (u(i, j - 1) - 2.0 * uc + u(i, j + 1)) * idy2;
      const double lap_v = (v(i - 1, j) - 2.0 * vc + v(i + 1, j)) * idx2 +
                           (v(i, j - 1) - 2.0 * vc + v(i, j + 1)) * idy2;
      const double adv_u =
          uc * (u(i + 1, j) - u(i - 1, j)) * ax + vc * (u(i, j + 1) - u(i, j - 1)) * ay;
      const double adv_v =
          uc * (v(i + 1, j) - v(i - 1, j)) * ax + vc * (v(i, j + 1) - v(i, j - 1)) * ay;
      star.u(i, j) = uc + dt_ * (nu * lap_u) - dt_ * adv_u;
      star.v(i, j) = vc + dt_ * (nu * lap_v) - dt_ * adv_v;
    }
  return star;
}

PoissonResult NavierStokesSolver::solve_pressure(const Velocity& star,
                                                 const Array2D& initial) const {
  Array2D rhs = divergence(star, grid_);
  const double scale = params_.rho / dt_;
  for (double& x : rhs.flat()) x *= scale;
  return solve_projection_poisson(rhs, initial, grid_, poisson_);
}

Velocity NavierStokesSolver::correct(const Velocity& star, const Array2D& p) const {
  Velocity out = star;
  const Velocity g = interior_gradient(p, grid_);
  const double scale = dt_ / params_.rho;
  for (int i = 1; i < grid_.nx - 1; ++i)
    for (int j = 1; j < grid_.ny - 1; ++j) {
      out.u(i, j) -= scale * g.u(i, j);
      out.v(i, j) -= scale * g.v(i, j);
    }
  return out;
}

NSState NavierStokesSolver::step(const NSState& state, const LidControl& control,
                                 PoissonResult* report) const {
  Velocity w = state.fields.velocity();
  apply_velocity_bc(w, control);
  Velocity star = predict(w);
  apply_velocity_bc(star, control);
  PoissonResult pressure = solve_pressure(star, state.fields.p);
  Velocity next = correct(star, pressure.solution);
  apply_velocity_bc(next, control);

  NSState out;
  out.fields.u = std::move(next.u);
  out.fields.v = std::move(next.v);
  out.fields.p = pressure.solution;
  out.t = state.t + dt_;
  if (report) *report = std::move(pressure);
  return out;
}

std::optional<std::string> NavierStokesSolver::stability_warning(double max_speed) const {
  const double h = std::min(grid_.dx, grid_.dy);
  const double diffusive = h * h / (4.0 * params_.nu);
  const double advective = max_speed > 0.0 ? h / max_speed : diffusive;
  if (dt_ <= std::min(diffusive, advective)) return std::nullopt;
  std::ostringstream os;
  os << "Navier-Stokes dt=" << dt_ << " exceeds the explicit stability estimate min(dx^2/(4nu)="
     << diffusive << ", dx/|U|=" << advective << ")";
  return os.str();
}

const Velocity& ReferenceTrajectory::frame(int k) const {
  if (k < 0 || k >= steps())
    throw InputError("reference trajectory has no frame for step " + std::to_string(k));
  return frames[static_cast<std::size_t>(k)];
}

int checked_ratio(double a, double b, const char* what) {
  if (!(a > 0.0) || !(b > 0.0))
    throw ConfigError(std::string(what) + ": durations must be positive");
  const double r = a / b;
  const double n = std::round(r);
  if (n < 1.0 || std::abs(r - n) > 1e-9 * n)
    throw ConfigError(std::string(what) + ": " + std::to_string(b) + " does not divide " +
                      std::to_string(a));
  return static_cast<int>(n);
}

ReferenceTrajectory make_reference(const std::function<double(double)>& schedule,
                                   const NavierStokesSolver& solver, double dt_control,
                                   double horizon, Edge2D edge) {
  const int steps = checked_ratio(horizon, dt_control, "reference horizon");
  const int substeps = checked_ratio(dt_control, solver.dt(), "reference control interval");
  ReferenceTrajectory ref;
  ref.dt_control = dt_control;
  ref.edge = edge;
  ref.controls.reserve(steps);
  ref.frames.reserve(steps);

  NSState state{Field2D(solver.grid()), 0.0};
  for (int k = 0; k < steps; ++k) {
    const double value = schedule(k * dt_control);
    ref.controls.push_back(value);
    for (int s = 0; s < substeps; ++s) state = solver.step(state, {value, edge});
    if (!state.fields.all_finite())
      throw BlowUpError("reference rollout blew up at step " + std::to_string(k), k);
    ref.frames.push_back(state.fields.velocity());
  }
  return ref;
}

std::function<double(double)> linear_schedule(double intercept, double slope) {
  return [intercept, slope](double t) { return intercept + slope * t; };
}

}  // namespace pdecg
