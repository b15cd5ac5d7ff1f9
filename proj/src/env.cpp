#include "pdecg/env.hpp"

#include <algorithm>
#include <cmath>

#include "pdecg/errors.hpp"

namespace pdecg {

double reward_step(std::span<const double> prev, std::span<const double> next, const Grid1D& grid) {
  return -l2_distance(prev, next, grid);
}

double reward_terminal(std::span<const double> final_state, std::span<const double> actions,
                       const RewardSpec1D& spec, const Grid1D& grid) {
  const double norm = l2_norm(final_state, grid);
  if (!(norm <= spec.zeta)) return 0.0;
  double effort = 0.0;
  for (double a : actions) effort += std::abs(a);
  return spec.sigma - effort / spec.eta - norm;
}

double reward_ns(const Velocity& next, const Velocity& ref, double action, const RewardSpecNS& spec,
                 const Grid2D& grid) {
  const double d = action - spec.a_ref;
  return -0.5 * l2_distance_sq(next, ref, grid) - 0.5 * spec.gamma_ctrl * d * d;
}

std::vector<double> observe(std::span<const double> u, SensingMode mode, BoundaryKind actuation,
                            const Grid1D& grid) {
  if (static_cast<int>(u.size()) != grid.nx) throw InputError("state length does not match the grid");
  const int n = grid.nx - 1;
  switch (mode) {
    case SensingMode::FullState:
      return {u.begin(), u.end()};
    case SensingMode::Collocated:
      if (actuation == BoundaryKind::Dirichlet) return {(u[n] - u[n - 1]) / grid.dx};
      return {u[n]};
    case SensingMode::AntiCollocatedValue:
      return {u[0]};
    case SensingMode::AntiCollocatedGradient:
      return {(u[1] - u[0]) / grid.dx};
  }
  return {};
}

void add_noise(std::vector<double>& obs, const NoiseSpec& noise, std::mt19937_64& rng) {
  if (noise.kind == NoiseKind::None || noise.sigma == 0.0) return;
  std::normal_distribution<double> normal(0.0, noise.sigma);
  for (double& x : obs) x += normal(rng);
}

std::shared_ptr<const ReferenceTrajectory> build_reference(const EnvConfig& config) {
  const NavierStokesSolver solver(config.grid_2d(), config.ns.fluid, config.episode.dt_pde,
                                  config.ns.poisson);
  return std::make_shared<const ReferenceTrajectory>(
      make_reference(linear_schedule(config.ns.reference.intercept, config.ns.reference.slope), solver,
                     config.episode.dt_control, config.episode.horizon, config.actuation.edge_2d));
}

Environment::Environment(EnvConfig config, std::shared_ptr<const ReferenceTrajectory> reference)
    : config_(std::move(config)) {
  config_.validate();
  control_steps_ = config_.control_steps();
  substeps_ = config_.substeps();
  const EpisodeConfig& e = config_.episode;
  switch (config_.problem) {
    case Problem::Hyperbolic:
      grid1_ = config_.grid_1d();
      hyp_.emplace(*grid1_, BetaProfile(ChebyshevProfile(config_.profile.gamma_cheb, config_.profile.amplitude), *grid1_),
                   e.dt_pde, config_.actuation.kind);
      break;
    case Problem::Parabolic:
      grid1_ = config_.grid_1d();
      par_.emplace(*grid1_, LambdaProfile(ChebyshevProfile(config_.profile.gamma_cheb, config_.profile.amplitude), *grid1_),
                   e.dt_pde, config_.actuation.kind);
      break;
    case Problem::NavierStokes: {
      grid2_ = config_.grid_2d();
      ns_.emplace(*grid2_, config_.ns.fluid, e.dt_pde, config_.ns.poisson);
      const double speed = std::max({std::abs(e.action_lo), std::abs(e.action_hi)});
      if (auto w = ns_->stability_warning(speed)) warnings_.push_back(*w);
      if (!reference) reference = build_reference(config_);
      if (reference->steps() != control_steps_ ||
          std::abs(reference->dt_control - e.dt_control) > 1e-12 * e.dt_control ||
          reference->edge != config_.actuation.edge_2d)
        throw ConfigError("reference trajectory does not match the episode settings");
      reference_ = std::move(reference);
      break;
    }
  }
}

int Environment::observation_size() const {
  if (grid2_) return 2 * grid2_->nx * grid2_->ny;
  return config_.sensing.mode == SensingMode::FullState ? grid1_->nx : 1;
}

const Field1D& Environment::state_1d() const {
  if (!grid1_) throw StateError("state_1d on a Navier-Stokes environment");
  return u_;
}

const Field2D& Environment::state_2d() const {
  if (!grid2_) throw StateError("state_2d on a 1D environment");
  return ns_state_.fields;
}

std::vector<double> Environment::full_state() const {
  if (grid1_) return u_;
  std::vector<double> out;
  const auto u = ns_state_.fields.u.flat();
  const auto v = ns_state_.fields.v.flat();
  out.reserve(u.size() + v.size());
  out.insert(out.end(), u.begin(), u.end());
  out.insert(out.end(), v.begin(), v.end());
  return out;
}

double Environment::state_l2() const {
  if (grid1_) return l2_norm(u_, *grid1_);
  return std::sqrt(l2_norm_sq(ns_state_.fields.velocity(), *grid2_));
}

std::vector<double> Environment::observation() {
  std::vector<double> obs = grid1_ ? observe(u_, config_.sensing.mode, config_.actuation.kind, *grid1_)
                                   : full_state();
  add_noise(obs, config_.sensing.noise, noise_rng_);
  return obs;
}

std::vector<double> Environment::reset(std::uint64_t seed, std::optional<Field1D> initial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(config_.sensing.noise.seed),
                    static_cast<std::uint32_t>(config_.sensing.noise.seed >> 32)};
  noise_rng_.seed(seq);
  t_ = 0.0;
  step_ = 0;
  actions_.clear();

  if (grid2_) {
    if (initial) throw InputError("Navier-Stokes episodes always start from rest");
    ns_state_ = NSState{Field2D(*grid2_), 0.0};
  } else {
    const int nx = grid1_->nx;
    if (initial) {
      if (static_cast<int>(initial->size()) != nx)
        throw InputError("initial profile has " + std::to_string(initial->size()) + " entries, expected " +
                         std::to_string(nx));
      if (!all_finite(*initial)) throw InputError("initial profile must be finite");
      u_ = std::move(*initial);
    } else {
      const InitialConditionSpec& ic = config_.initial;
      switch (ic.kind) {
        case InitialConditionSpec::Kind::Uniform: {
          std::mt19937_64 rng(seed);
          std::uniform_real_distribution<double> dist(ic.lo, ic.hi);
          u_.assign(nx, dist(rng));
          break;
        }
        case InitialConditionSpec::Kind::Constant:
          u_.assign(nx, ic.value);
          break;
        case InitialConditionSpec::Kind::Profile:
          u_ = ic.values;
          break;
      }
    }
    if (par_) u_[0] = 0.0;
  }
  active_ = true;
  return observation();
}

StepOutcome Environment::step(double action) {
  if (!active_) throw StateError(step_ == 0 ? "step called before reset" : "episode has already ended");
  if (!std::isfinite(action)) throw InputError("action must be finite");
  const double applied = std::clamp(action, config_.episode.action_lo, config_.episode.action_hi);

  StepOutcome out;
  if (grid1_) {
    const Field1D prev = u_;
    HyperbolicState hs;
    ParabolicState ps;
    if (hyp_) {
      hs = {std::move(u_), t_};
      for (int s = 0; s < substeps_; ++s) hyp_->advance(hs, applied);
      u_ = std::move(hs.u);
    } else {
      ps = {std::move(u_), t_};
      for (int s = 0; s < substeps_; ++s) par_->advance(ps, applied);
      u_ = std::move(ps.u);
    }
    out.reward = reward_step(prev, u_, *grid1_);
  } else {
    for (int s = 0; s < substeps_; ++s) ns_state_ = ns_->step(ns_state_, {applied, config_.actuation.edge_2d});
    out.reward = reward_ns(ns_state_.fields.velocity(), reference_->frame(step_), applied, config_.reward_ns,
                           *grid2_);
  }
  actions_.push_back(applied);
  ++step_;
  t_ = step_ * config_.episode.dt_control;

  const double l2 = state_l2();
  const bool finite = grid1_ ? all_finite(u_) : ns_state_.fields.all_finite();
  const bool at_horizon = step_ == control_steps_;
  out.truncated = !finite || (!at_horizon && l2 > config_.episode.blowup_threshold);
  out.terminated = at_horizon && finite;
  if (out.terminated && grid1_) out.reward += reward_terminal(u_, actions_, config_.reward_1d, *grid1_);
  active_ = !(out.terminated || out.truncated);

  out.info.step = step_;
  out.info.t = t_;
  out.info.l2 = l2;
  out.info.applied_action = applied;
  out.info.state = full_state();
  out.observation = observation();
  return out;
}

}  // namespace pdecg
