#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "pdecg/adjoint.hpp"
#include "pdecg/backstepping.hpp"
#include "pdecg/env.hpp"

namespace pdecg {

struct ControllerSpec {
  std::string id = "backstepping";  // zero | constant | backstepping | adjoint | reference | pipe
  double constant = 0.0;            // constant
  std::string pipe_command;         // pipe: run through /bin/sh -c
  double pipe_timeout = 10.0;       // pipe: seconds per reply
  OptimizeSettings adjoint;         // adjoint

  friend bool operator==(const ControllerSpec&, const ControllerSpec&) = default;
};

/// Maps observations to actions for one episode at a time.
class Controller {
 public:
  virtual ~Controller() = default;
  /// Called after reset with the initial observation.
  virtual void begin(const Environment& env, const std::vector<double>& observation);
  virtual double act(const Environment& env, const std::vector<double>& observation) = 0;
  /// Called once the episode has ended.
  virtual void end() {}
};

/// Throws ConfigError when the controller cannot drive the configured problem.
std::unique_ptr<Controller> make_controller(const ControllerSpec& spec, const EnvConfig& config);

class ZeroController : public Controller {
 public:
  double act(const Environment&, const std::vector<double>&) override { return 0.0; }
};

class ConstantController : public Controller {
 public:
  explicit ConstantController(double value) : value_(value) {}
  double act(const Environment&, const std::vector<double>&) override { return value_; }

 private:
  double value_;
};

/// Full-state backstepping feedback on the observation; kernels come from the cache.
class BacksteppingController : public Controller {
 public:
  explicit BacksteppingController(const EnvConfig& config);
  double act(const Environment& env, const std::vector<double>& observation) override;

 private:
  Problem problem_;
  Grid1D grid_;
  std::shared_ptr<const KernelHyperbolic> hyperbolic_;
  std::shared_ptr<const KernelParabolic> parabolic_;
};

/// Replays the schedule that generated the Navier-Stokes reference.
class ReferenceController : public Controller {
 public:
  double act(const Environment& env, const std::vector<double>& observation) override;
};

/// Optimizes the lid schedule with the adjoint method at begin(), then replays it.
class AdjointController : public Controller {
 public:
  AdjointController(OptimizeSettings settings, double initial_value)
      : settings_(settings), initial_(initial_value) {}
  void begin(const Environment& env, const std::vector<double>& observation) override;
  double act(const Environment& env, const std::vector<double>& observation) override;
  const OptimizeResult& result() const { return result_; }

 private:
  OptimizeSettings settings_;
  double initial_;
  OptimizeResult result_;
};

/// Child process speaking newline-delimited JSON: receives {"t": float, "obs": [...]}
/// and answers {"action": float}. Throws ProtocolError on malformed replies,
/// timeouts or a child that exits early.
class PipeController : public Controller {
 public:
  PipeController(std::string command, double timeout_seconds);
  ~PipeController() override;
  PipeController(const PipeController&) = delete;
  PipeController& operator=(const PipeController&) = delete;

  void begin(const Environment& env, const std::vector<double>& observation) override;
  double act(const Environment& env, const std::vector<double>& observation) override;
  void end() override;

 private:
  void start();
  void stop();
  std::string read_line();

  std::string command_;
  double timeout_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

}  // namespace pdecg
