#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pdecg/config.hpp"
#include "pdecg/hyperbolic.hpp"
#include "pdecg/navier_stokes.hpp"
#include "pdecg/parabolic.hpp"

namespace pdecg {

/// -||next - prev||; throws InputError on a length mismatch.
double reward_step(std::span<const double> prev, std::span<const double> next, const Grid1D& grid);

/// 0 when ||final|| > zeta, else sigma - sum|a|/eta - ||final||.
double reward_terminal(std::span<const double> final_state, std::span<const double> actions,
                       const RewardSpec1D& spec, const Grid1D& grid);

/// -1/2 ||next - ref||^2 - gamma/2 (action - a_ref)^2 over both velocity components.
double reward_ns(const Velocity& next, const Velocity& ref, double action, const RewardSpecNS& spec,
                 const Grid2D& grid);

/// Noise-free measurement of a 1D state. Gradients are one-sided first differences.
/// Collocated sensing returns u_x(1) under Dirichlet actuation and u(1) under Neumann.
std::vector<double> observe(std::span<const double> u, SensingMode mode, BoundaryKind actuation,
                            const Grid1D& grid);

/// Adds N(0, sigma^2) to each entry; a no-op for NoiseKind::None or sigma = 0.
void add_noise(std::vector<double>& obs, const NoiseSpec& noise, std::mt19937_64& rng);

struct StepInfo {
  int step = 0;               // control steps taken so far
  double t = 0.0;
  double l2 = 0.0;            // state norm after the step
  double applied_action = 0.0;
  std::vector<double> state;  // raw full state; Navier-Stokes stores u then v, row-major in i
};

struct StepOutcome {
  std::vector<double> observation;
  double reward = 0.0;
  bool terminated = false;  // horizon reached
  bool truncated = false;   // blow-up guard fired
  StepInfo info;
};

/// One episodic control problem. Not thread-safe; independent instances share nothing
/// mutable (the Navier-Stokes reference is immutable and may be shared).
class Environment {
 public:
  /// Validates the configuration and builds the solver. Navier-Stokes builds its
  /// reference trajectory unless one is supplied.
  explicit Environment(EnvConfig config,
                       std::shared_ptr<const ReferenceTrajectory> reference = nullptr);

  /// Starts an episode. 1D states are drawn from the configured initial condition
  /// with a generator seeded by `seed`, or taken from `initial` when given.
  /// The parabolic state is pinned to u(0) = 0. Navier-Stokes starts at rest.
  std::vector<double> reset(std::uint64_t seed, std::optional<Field1D> initial = std::nullopt);

  /// Clips the action, holds it over substeps() solver steps, and scores the result.
  /// Throws StateError before reset or after the episode ended, InputError for a
  /// non-finite action.
  StepOutcome step(double action);

  const EnvConfig& config() const { return config_; }
  Problem problem() const { return config_.problem; }
  int control_steps() const { return control_steps_; }
  int substeps() const { return substeps_; }
  int observation_size() const;

  bool active() const { return active_; }
  int step_index() const { return step_; }
  double time() const { return t_; }

  /// Raw full state in the StepInfo layout, and its L2 norm.
  std::vector<double> full_state() const;
  double state_l2() const;

  const Field1D& state_1d() const;
  const Field2D& state_2d() const;
  const std::vector<double>& applied_actions() const { return actions_; }

  std::optional<Grid1D> grid_1d() const { return grid1_; }
  std::optional<Grid2D> grid_2d() const { return grid2_; }
  const HyperbolicSolver* hyperbolic() const { return hyp_ ? &*hyp_ : nullptr; }
  const ParabolicSolver* parabolic() const { return par_ ? &*par_ : nullptr; }
  const NavierStokesSolver* navier_stokes() const { return ns_ ? &*ns_ : nullptr; }
  std::shared_ptr<const ReferenceTrajectory> reference() const { return reference_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::vector<double> observation();

  EnvConfig config_;
  int control_steps_ = 0;
  int substeps_ = 0;
  std::optional<Grid1D> grid1_;
  std::optional<Grid2D> grid2_;
  std::optional<HyperbolicSolver> hyp_;
  std::optional<ParabolicSolver> par_;
  std::optional<NavierStokesSolver> ns_;
  std::shared_ptr<const ReferenceTrajectory> reference_;
  std::vector<std::string> warnings_;

  Field1D u_;
  NSState ns_state_;
  double t_ = 0.0;
  int step_ = 0;
  bool active_ = false;
  std::vector<double> actions_;
  std::mt19937_64 noise_rng_;
};

/// Builds the Navier-Stokes tracking reference described by a configuration.
std::shared_ptr<const ReferenceTrajectory> build_reference(const EnvConfig& config);

}  // namespace pdecg
