#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pdecg/boundary.hpp"
#include "pdecg/grid.hpp"
#include "pdecg/navier_stokes.hpp"

namespace pdecg {

enum class Problem { Hyperbolic, Parabolic, NavierStokes };
enum class SensingMode { FullState, Collocated, AntiCollocatedValue, AntiCollocatedGradient };
enum class NoiseKind { None, Gaussian };

std::string_view to_string(Problem p);
std::string_view to_string(SensingMode m);
std::string_view to_string(NoiseKind k);
/// Parsers throw ConfigError on unknown names.
Problem parse_problem(std::string_view s);
SensingMode parse_sensing(std::string_view s);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::None;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

struct SensingSpec {
  SensingMode mode = SensingMode::FullState;
  NoiseSpec noise;
};

/// edge_1d applies to the 1D problems, edge_2d to Navier-Stokes.
struct ActuationSpec {
  Edge1D edge_1d = Edge1D::X1;
  Edge2D edge_2d = Edge2D::Top;
  BoundaryKind kind = BoundaryKind::Dirichlet;
};

struct EpisodeConfig {
  double horizon = 5.0;
  double dt_control = 0.01;
  double dt_pde = 1e-4;
  double action_lo = -20.0;
  double action_hi = 20.0;
  double blowup_threshold = 20.0;
};

/// amplitude * cos(gamma_cheb * arccos x)
struct ProfileSpec {
  double gamma_cheb = 7.35;
  double amplitude = 5.0;
};

struct RewardSpec1D {
  double sigma = 300.0;
  double eta = 1000.0;
  double zeta = 20.0;
};

struct RewardSpecNS {
  double gamma_ctrl = 0.1;
  double a_ref = 2.0;
};

/// Lid schedule U(t) = intercept + slope * t that generates the tracking reference.
struct ReferenceSpec {
  double intercept = 3.0;
  double slope = -5.0;
};

struct NSSpec {
  int nx = 21;
  int ny = 21;
  FluidParams fluid;
  PoissonSettings poisson;
  ReferenceSpec reference;
};

struct InitialConditionSpec {
  enum class Kind { Uniform, Constant, Profile };
  Kind kind = Kind::Uniform;
  double lo = 1.0;   // Uniform
  double hi = 10.0;  // Uniform
  double value = 0.0;           // Constant
  std::vector<double> values;   // Profile, length nx
};

struct EnvConfig {
  Problem problem = Problem::Hyperbolic;
  int nx = 101;  // 1D grid points
  EpisodeConfig episode;
  ActuationSpec actuation;
  SensingSpec sensing;
  ProfileSpec profile;
  RewardSpec1D reward_1d;
  RewardSpecNS reward_ns;
  NSSpec ns;
  InitialConditionSpec initial;

  /// Settings used by the experiments for each problem.
  static EnvConfig defaults(Problem problem);

  Grid1D grid_1d() const { return Grid1D(nx); }
  Grid2D grid_2d() const { return Grid2D(ns.nx, ns.ny); }
  int control_steps() const;
  int substeps() const;

  /// Throws ConfigError naming the offending field or sensing/actuation cell.
  void validate() const;

  friend bool operator==(const EnvConfig&, const EnvConfig&);
};

// Documented schema (all keys optional except "problem"; omitted keys keep the
// problem defaults; unknown keys are rejected with their dotted path):
//
//   problem   "hyperbolic" | "parabolic" | "navier_stokes"
//   nx        int                                   (1D only)
//   episode   { horizon, dt_control, dt_pde, action_lo, action_hi, blowup_threshold }
//   actuation { edge: "x0"|"x1"|"top"|"bottom"|"left"|"right", kind: "dirichlet"|"neumann" }
//   sensing   { mode: "full_state"|"collocated"|"anti_collocated_value"|"anti_collocated_gradient",
//               noise: { kind: "none"|"gaussian", sigma, seed } }
//   profile   { gamma_cheb, amplitude }             (1D only)
//   reward    { sigma, eta, zeta }                  (1D)
//             { gamma_ctrl, a_ref }                 (Navier-Stokes)
//   initial   { kind: "uniform", lo, hi } | { kind: "constant", value } | { kind: "profile", values }
//   ns        { nx, ny, nu, rho, poisson: { max_iters, tol, omega },
//               reference: { intercept, slope } }

EnvConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const EnvConfig& config);

/// TOML tables map one-to-one onto the JSON schema.
nlohmann::json toml_to_json(std::string_view toml_text);

/// Reads a .json or .toml file (chosen by extension) and validates it.
EnvConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError listing every unknown key under `allowed`, with `where` as prefix.
void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& where);

}  // namespace pdecg
