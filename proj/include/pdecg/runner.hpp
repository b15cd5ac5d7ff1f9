#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "pdecg/config.hpp"
#include "pdecg/controllers.hpp"

namespace pdecg {

struct RunManifest {
  EnvConfig config;
  ControllerSpec controller;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;  // empty: keep results in memory only
  int frame_every = 1;            // Navier-Stokes frame subsampling, in control steps

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

// Manifest schema: { "env": <EnvConfig schema>, "controller": { id, constant,
// pipe_command, pipe_timeout, adjoint: { iters, step, max_halvings } },
// "seed": u64, "out": path, "frame_every": int }

nlohmann::json manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& doc);

/// Accepts either a manifest or a bare environment configuration (.json or .toml).
RunManifest load_manifest(const std::filesystem::path& path);

struct EpisodeMetrics {
  double total_reward = 0.0;
  double summed_l2 = 0.0;             // sum of ||u|| over the initial state and every control step
  double final_l2 = 0.0;
  double summed_l2_unweighted = 0.0;  // same sum with the plain vector 2-norm, for comparison
  bool truncated = false;
  bool terminated = false;
  int steps = 0;
  double wall_time = 0.0;
};

nlohmann::json metrics_to_json(const EpisodeMetrics& m);

struct EpisodeRecord {
  EpisodeMetrics metrics;
  std::string trajectory_csv;
  std::vector<double> actions;  // applied actions, one per control step
};

/// Runs one episode. With a non-empty out_dir writes trajectory.csv, metrics.json,
/// manifest.json and, for Navier-Stokes, frames/frame_<step>.csv.
/// 1D trajectory rows: t,action,u_0..u_{nx-1}; the t = 0 row has an empty action.
/// Navier-Stokes rows: t,action,l2,reward.
EpisodeRecord run_episode(const RunManifest& manifest);

/// Same, driving a caller-owned controller and environment.
EpisodeRecord run_episode(const RunManifest& manifest, Environment& env, Controller& controller);

/// Recomputes summed and final L2 from a trajectory CSV.
std::pair<double, double> l2_from_trajectory_csv(const std::string& csv, const EnvConfig& config);

struct SuiteReport {
  std::vector<std::uint64_t> seeds;
  std::vector<EpisodeMetrics> episodes;
  double mean_reward = 0.0;
  double std_reward = 0.0;
  double mean_summed_l2 = 0.0;
  double std_summed_l2 = 0.0;
  int truncated = 0;

  nlohmann::json to_json() const;
  std::string table() const;
};

/// Runs seeds base..base+episodes-1 on up to `threads` workers (0: hardware
/// concurrency). Configuration errors surface before any episode starts.
/// Per-episode outputs go to out_dir/episode_<seed> when out_dir is set.
SuiteReport run_suite(const RunManifest& manifest, int episodes, std::uint64_t seed_base, int threads = 0);

}  // namespace pdecg
