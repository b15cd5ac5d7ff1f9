#include "pdecg/adjoint.hpp"

#include <cmath>
#include <optional>
#include <ostream>
#include <string>

#include "pdecg/errors.hpp"
#include "pdecg/io.hpp"

namespace pdecg {

ControlSchedule schedule_from(const std::function<double(double)>& schedule,
                              const ReferenceTrajectory& reference) {
  ControlSchedule out{{}, reference.dt_control};
  out.values.reserve(reference.steps());
  for (int k = 0; k < reference.steps(); ++k) out.values.push_back(schedule(k * reference.dt_control));
  return out;
}

ForwardTrajectory rollout(const ControlSchedule& schedule, const NavierStokesSolver& solver,
                          Edge2D edge) {
  if (checked_ratio(schedule.dt_control, solver.dt(), "adjoint control interval") != 1)
    throw ConfigError("adjoint optimization needs dt_control equal to the solver dt");
  ForwardTrajectory fw;
  fw.frames.reserve(schedule.values.size() + 1);
  NSState state{Field2D(solver.grid()), 0.0};
  fw.frames.push_back(state.fields.velocity());
  for (int k = 0; k < schedule.steps(); ++k) {
    const double value = schedule.values[k];
    if (!std::isfinite(value))
      throw InputError("non-finite control at step " + std::to_string(k));
    state = solver.step(state, {value, edge});
    if (!state.fields.all_finite())
      throw BlowUpError("forward rollout blew up at step " + std::to_string(k), k);
    fw.frames.push_back(state.fields.velocity());
  }
  return fw;
}

namespace {

void check_compatible(const ControlSchedule& schedule, const ReferenceTrajectory& reference) {
  if (schedule.steps() != reference.steps())
    throw InputError("schedule has " + std::to_string(schedule.steps()) +
                     " steps but the reference has " + std::to_string(reference.steps()));
  if (std::abs(schedule.dt_control - reference.dt_control) > 1e-12 * reference.dt_control)
    throw InputError("schedule and reference use different control intervals");
}

}  // namespace

CostBreakdown trajectory_cost(const ForwardTrajectory& forward, const ControlSchedule& schedule,
                              const ReferenceTrajectory& reference, const Grid2D& grid,
                              const TrackingWeights& weights) {
  check_compatible(schedule, reference);
  if (static_cast<int>(forward.frames.size()) != schedule.steps() + 1)
    throw InputError("forward trajectory length does not match the schedule");
  const double dt = schedule.dt_control;
  CostBreakdown c;
  for (int k = 0; k < schedule.steps(); ++k) {
    c.tracking += 0.5 * l2_distance_sq(forward.frames[k + 1], reference.frame(k), grid) * dt;
    const double d = schedule.values[k] - weights.u_ref;
    c.control += 0.5 * weights.gamma_ctrl * d * d * dt;
  }
  c.total = c.tracking + c.control;
  return c;
}

CostBreakdown evaluate_cost(const ControlSchedule& schedule, const ReferenceTrajectory& reference,
                            const NavierStokesSolver& solver, const TrackingWeights& weights) {
  check_compatible(schedule, reference);
  return trajectory_cost(rollout(schedule, solver, reference.edge), schedule, reference,
                         solver.grid(), weights);
}

namespace {

void zero_boundary(Array2D& f) {
  const int nx = f.nx(), ny = f.ny();
  for (int i = 0; i < nx; ++i) f(i, 0) = f(i, ny - 1) = 0.0;
  for (int j = 0; j < ny; ++j) f(0, j) = f(nx - 1, j) = 0.0;
}

// One explicit backward step of the adjoint momentum equation, interior nodes only.
Velocity backward_step(const Velocity& lam, const Velocity& w, const Velocity& source,
                       const Grid2D& grid, double nu, double dt) {
  Velocity out(grid);
  const double ax = 0.5 / grid.dx, ay = 0.5 / grid.dy;
  const double idx2 = 1.0 / (grid.dx * grid.dx), idy2 = 1.0 / (grid.dy * grid.dy);
  const Array2D& a = lam.u;
  const Array2D& b = lam.v;
  for (int i = 1; i < grid.nx - 1; ++i)
    for (int j = 1; j < grid.ny - 1; ++j) {
      const double ax_ = (a(i + 1, j) - a(i - 1, j)) * ax, ay_ = (a(i, j + 1) - a(i, j - 1)) * ay;
      const double bx_ = (b(i + 1, j) - b(i - 1, j)) * ax, by_ = (b(i, j + 1) - b(i, j - 1)) * ay;
      const double u = w.u(i, j), v = w.v(i, j);
      // (G u)_1 = a_x u + a_y v,  (G^T u)_1 = a_x u + b_x v, and likewise for the second row.
      const double adv_u = -((ax_ * u + ay_ * v) + (ax_ * u + bx_ * v));
      const double adv_v = -((bx_ * u + by_ * v) + (ay_ * u + by_ * v));
      const double lap_a = (a(i - 1, j) - 2.0 * a(i, j) + a(i + 1, j)) * idx2 +
                           (a(i, j - 1) - 2.0 * a(i, j) + a(i, j + 1)) * idy2;
      const double lap_b = (b(i - 1, j) - 2.0 * b(i, j) + b(i + 1, j)) * idx2 +
                           (b(i, j - 1) - 2.0 * b(i, j) + b(i, j + 1)) * idy2;
      out.u(i, j) = a(i, j) - dt * (adv_u - nu * lap_a + source.u(i, j));
      out.v(i, j) = b(i, j) - dt * (adv_v - nu * lap_b + source.v(i, j));
    }
  return out;
}

}  // namespace

AdjointState solve_adjoint(const std::vector<Velocity>& coefficients,
                           const std::vector<Velocity>& sources,
                           const NavierStokesSolver& solver) {
  const int n = static_cast<int>(sources.size());
  if (static_cast<int>(coefficients.size()) != n + 1)
    throw InputError("adjoint needs one more coefficient frame than source frames");
  const Grid2D& grid = solver.grid();
  const double dt = solver.dt();

  AdjointState adj;
  adj.lam.assign(n + 1, Velocity(grid));
  adj.mu.assign(n + 1, Array2D(grid.nx, grid.ny));
  Array2D phi(grid.nx, grid.ny);
  for (int k = n; k >= 1; --k) {
    Velocity lam = backward_step(adj.lam[k], coefficients[k], sources[k - 1], grid,
                                 solver.params().nu, dt);
    zero_boundary(lam.u);
    zero_boundary(lam.v);
    PoissonResult proj = solve_projection_poisson(divergence(lam, grid), phi, grid, solver.poisson());
    phi = std::move(proj.solution);
    const Velocity g = interior_gradient(phi, grid);
    for (int i = 1; i < grid.nx - 1; ++i)
      for (int j = 1; j < grid.ny - 1; ++j) {
        lam.u(i, j) -= g.u(i, j);
        lam.v(i, j) -= g.v(i, j);
      }
    zero_boundary(lam.u);
    zero_boundary(lam.v);
    if (!lam.u.all_finite() || !lam.v.all_finite())
      throw BlowUpError("adjoint sweep blew up at step " + std::to_string(k - 1), k - 1);
    Array2D mu = phi;
    for (double& x : mu.flat()) x /= dt;
    adj.lam[k - 1] = std::move(lam);
    adj.mu[k - 1] = std::move(mu);
  }
  return adj;
}

AdjointState solve_adjoint(const ForwardTrajectory& forward, const ReferenceTrajectory& reference,
                           const NavierStokesSolver& solver) {
  const int n = reference.steps();
  if (static_cast<int>(forward.frames.size()) != n + 1)
    throw InputError("forward trajectory length does not match the reference");
  std::vector<Velocity> sources;
  sources.reserve(n);
  for (int k = 1; k <= n; ++k) {
    Velocity d = forward.frames[k];
    const Velocity& r = reference.frame(k - 1);
    auto du = d.u.flat(), dv = d.v.flat();
    auto ru = r.u.flat(), rv = r.v.flat();
    for (std::size_t m = 0; m < du.size(); ++m) {
      du[m] -= ru[m];
      dv[m] -= rv[m];
    }
    sources.push_back(std::move(d));
  }
  return solve_adjoint(forward.frames, sources, solver);
}

namespace {

struct EdgeSampler {
  int count;      // nodes along the edge
  double along;   // spacing along the edge
  double across;  // spacing normal to the edge
  bool tangential_is_u;
  // (i, j) of edge node m and its interior neighbour
  std::pair<int, int> boundary(int m) const { return at(m, 0); }
  std::pair<int, int> inner(int m) const { return at(m, 1); }

  std::pair<int, int> at(int m, int depth) const {
    switch (edge) {
      case Edge2D::Top: return {m, ny - 1 - depth};
      case Edge2D::Bottom: return {m, depth};
      case Edge2D::Left: return {depth, m};
      case Edge2D::Right: return {nx - 1 - depth, m};
    }
    return {0, 0};
  }

  Edge2D edge;
  int nx;
  int ny;
};

EdgeSampler sampler_for(Edge2D edge, const Grid2D& g) {
  const bool horizontal = edge == Edge2D::Top || edge == Edge2D::Bottom;
  return horizontal ? EdgeSampler{g.nx, g.dx, g.dy, true, edge, g.nx, g.ny}
                    : EdgeSampler{g.ny, g.dy, g.dx, false, edge, g.nx, g.ny};
}

double tangential(const Velocity& w, const EdgeSampler& s, std::pair<int, int> ij) {
  return s.tangential_is_u ? w.u(ij.first, ij.second) : w.v(ij.first, ij.second);
}

}  // namespace

std::vector<double> control_gradient(const AdjointState& adjoint,
                                     const ForwardTrajectory& forward,
                                     const ReferenceTrajectory& reference,
                                     const ControlSchedule& schedule,
                                     const NavierStokesSolver& solver,
                                     const TrackingWeights& weights) {
  check_compatible(schedule, reference);
  const int n = schedule.steps();
  if (static_cast<int>(adjoint.lam.size()) != n + 1 ||
      static_cast<int>(forward.frames.size()) != n + 1)
    throw InputError("adjoint, forward trajectory and schedule lengths differ");
  const Grid2D& grid = solver.grid();
  const EdgeSampler s = sampler_for(reference.edge, grid);
  const double nu = solver.params().nu;

  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) {
    double flux = 0.0, direct = 0.0;
    for (int m = 0; m < s.count; ++m) {
      const double w = (m == 0 || m == s.count - 1) ? 0.5 * s.along : s.along;
      const double normal =
          (tangential(adjoint.lam[k], s, s.boundary(m)) - tangential(adjoint.lam[k], s, s.inner(m))) /
          s.across;
      flux += w * normal;
      direct += tangential(forward.frames[k + 1], s, s.boundary(m)) -
                tangential(reference.frame(k), s, s.boundary(m));
    }
    g[k] = weights.gamma_ctrl * (schedule.values[k] - weights.u_ref) + nu * flux +
           grid.dx * grid.dy * direct;
  }
  return g;
}

OptimizeResult optimize(const ControlSchedule& initial, const ReferenceTrajectory& reference,
                        const NavierStokesSolver& solver, const TrackingWeights& weights,
                        const OptimizeSettings& settings) {
  if (settings.iters < 1) throw ConfigError("optimize needs iters >= 1");
  if (!(settings.step > 0.0) || settings.max_halvings < 0)
    throw ConfigError("invalid line-search settings");
  check_compatible(initial, reference);

  OptimizeResult result;
  result.schedule = initial;
  ForwardTrajectory forward = rollout(initial, solver, reference.edge);
  CostBreakdown cost = trajectory_cost(forward, initial, reference, solver.grid(), weights);
  result.history.push_back(cost);

  double alpha = settings.step;
  for (int it = 0; it < settings.iters; ++it) {
    const AdjointState adj = solve_adjoint(forward, reference, solver);
    const std::vector<double> g =
        control_gradient(adj, forward, reference, result.schedule, solver, weights);
    double gnorm = 0.0;
    for (double x : g) gnorm = std::max(gnorm, std::abs(x));
    if (gnorm == 0.0) break;

    bool accepted = false;
    for (int h = 0; h <= settings.max_halvings; ++h) {
      ControlSchedule trial = result.schedule;
      for (int k = 0; k < trial.steps(); ++k) trial.values[k] -= alpha * g[k];
      std::optional<ForwardTrajectory> fw;
      try {
        fw = rollout(trial, solver, reference.edge);
      } catch (const BlowUpError&) {
      }
      if (fw) {
        const CostBreakdown c = trajectory_cost(*fw, trial, reference, solver.grid(), weights);
        if (std::isfinite(c.total) && c.total < cost.total) {
          result.schedule = std::move(trial);
          forward = std::move(*fw);
          cost = c;
          result.history.push_back(c);
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      result.stalled = true;
      break;
    }
    alpha *= 2.0;
  }
  return result;
}

void write_cost_history_csv(std::ostream& os, const std::vector<CostBreakdown>& history) {
  os << "iter,tracking,control,total\n";
  for (std::size_t i = 0; i < history.size(); ++i)
    os << i << ',' << format_double(history[i].tracking) << ',' << format_double(history[i].control)
       << ',' << format_double(history[i].total) << '\n';
}

void write_schedule_csv(std::ostream& os, const ControlSchedule& schedule) {
  os << "t,U\n";
  for (int k = 0; k < schedule.steps(); ++k)
    os << format_double(k * schedule.dt_control) << ',' << format_double(schedule.values[k]) << '\n';
}

}  // namespace pdecg
