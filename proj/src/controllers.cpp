#include "pdecg/controllers.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>

#include "json.hpp"
#include "pdecg/errors.hpp"

namespace pdecg {

void Controller::begin(const Environment&, const std::vector<double>&) {}

std::unique_ptr<Controller> make_controller(const ControllerSpec& spec, const EnvConfig& config) {
  const bool is_1d = config.problem != Problem::NavierStokes;
  if (spec.id == "zero") return std::make_unique<ZeroController>();
  if (spec.id == "constant") {
    if (!std::isfinite(spec.constant)) throw ConfigError("controller.constant must be finite");
    return std::make_unique<ConstantController>(spec.constant);
  }
  if (spec.id == "backstepping") {
    if (!is_1d) throw ConfigError("backstepping applies to the 1D problems only");
    if (config.sensing.mode != SensingMode::FullState)
      throw ConfigError("backstepping needs full_state sensing");
    if (config.actuation.kind != BoundaryKind::Dirichlet)
      throw ConfigError("backstepping needs Dirichlet actuation");
    return std::make_unique<BacksteppingController>(config);
  }
  if (spec.id == "reference") {
    if (is_1d) throw ConfigError("the reference controller applies to navier_stokes only");
    return std::make_unique<ReferenceController>();
  }
  if (spec.id == "adjoint") {
    if (is_1d) throw ConfigError("the adjoint controller applies to navier_stokes only");
    if (checked_ratio(config.episode.dt_control, config.episode.dt_pde, "adjoint") != 1)
      throw ConfigError("the adjoint controller needs episode.dt_pde equal to episode.dt_control");
    if (spec.adjoint.iters < 1 || !(spec.adjoint.step > 0.0) || spec.adjoint.max_halvings < 0)
      throw ConfigError("invalid controller.adjoint settings");
    return std::make_unique<AdjointController>(spec.adjoint, config.reward_ns.a_ref);
  }
  if (spec.id == "pipe") {
    if (spec.pipe_command.empty()) throw ConfigError("the pipe controller needs a command");
    if (!(spec.pipe_timeout > 0.0)) throw ConfigError("controller.pipe_timeout must be positive");
    return std::make_unique<PipeController>(spec.pipe_command, spec.pipe_timeout);
  }
  throw ConfigError("unknown controller '" + spec.id + "'");
}

BacksteppingController::BacksteppingController(const EnvConfig& config)
    : problem_(config.problem), grid_(config.grid_1d()) {
  const CoefficientProfile profile(ChebyshevProfile(config.profile.gamma_cheb, config.profile.amplitude),
                                   grid_);
  if (problem_ == Problem::Hyperbolic)
    hyperbolic_ = cached_kernel_hyperbolic(profile);
  else
    parabolic_ = cached_kernel_parabolic(profile);
}

double BacksteppingController::act(const Environment&, const std::vector<double>& observation) {
  return hyperbolic_ ? control_hyperbolic(*hyperbolic_, observation, grid_)
                     : control_parabolic(*parabolic_, observation, grid_);
}

double ReferenceController::act(const Environment& env, const std::vector<double>&) {
  return env.reference()->controls.at(static_cast<std::size_t>(env.step_index()));
}

void AdjointController::begin(const Environment& env, const std::vector<double>&) {
  const auto& ref = *env.reference();
  ControlSchedule initial{std::vector<double>(ref.steps(), initial_), ref.dt_control};
  const TrackingWeights weights{env.config().reward_ns.gamma_ctrl, env.config().reward_ns.a_ref};
  result_ = optimize(initial, ref, *env.navier_stokes(), weights, settings_);
}

double AdjointController::act(const Environment& env, const std::vector<double>&) {
  return result_.schedule.values.at(static_cast<std::size_t>(env.step_index()));
}

PipeController::PipeController(std::string command, double timeout_seconds)
    : command_(std::move(command)), timeout_(timeout_seconds) {}

PipeController::~PipeController() { stop(); }

void PipeController::start() {
  int in[2], out[2];
  if (pipe2(in, O_CLOEXEC) != 0) throw Error(std::string("pipe: ") + std::strerror(errno));
  if (pipe2(out, O_CLOEXEC) != 0) {
    close(in[0]);
    close(in[1]);
    throw Error(std::string("pipe: ") + std::strerror(errno));
  }
  const pid_t pid = fork();
  if (pid < 0) throw Error(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    setpgid(0, 0);
    dup2(in[0], STDIN_FILENO);
    dup2(out[1], STDOUT_FILENO);
    close(in[0]);
    close(in[1]);
    close(out[0]);
    close(out[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  close(in[0]);
  close(out[1]);
  pid_ = pid;
  to_child_ = in[1];
  from_child_ = out[0];
  buffer_.clear();
  signal(SIGPIPE, SIG_IGN);
}

void PipeController::stop() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      if (waitpid(pid_, &status, WNOHANG) == pid_) {
        kill(-pid_, SIGKILL);
        pid_ = -1;
        return;
      }
      usleep(10000);
    }
    kill(-pid_, SIGKILL);  // the whole group, including anything the shell spawned
    waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

std::string PipeController::read_line() {
  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_);
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw ProtocolError("pipe controller timed out");
    pollfd pfd{from_child_, POLLIN, 0};
    const int r = poll(&pfd, 1, static_cast<int>(left.count()));
    if (r < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("poll: ") + std::strerror(errno));
    }
    if (r == 0) throw ProtocolError("pipe controller timed out");
    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("read: ") + std::strerror(errno));
    }
    if (n == 0) throw ProtocolError("pipe controller closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void PipeController::begin(const Environment&, const std::vector<double>&) {
  stop();
  start();
}

double PipeController::act(const Environment& env, const std::vector<double>& observation) {
  if (to_child_ < 0) throw StateError("pipe controller used before begin()");
  const std::string msg = nlohmann::json{{"t", env.time()}, {"obs", observation}}.dump() + "\n";
  std::size_t sent = 0;
  while (sent < msg.size()) {
    const ssize_t n = write(to_child_, msg.data() + sent, msg.size() - sent);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError("pipe controller stopped reading its input");
    }
    sent += static_cast<std::size_t>(n);
  }
  const std::string line = read_line();
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    throw ProtocolError("pipe controller replied with non-JSON: '" + line.substr(0, 80) + "'");
  }
  if (!reply.is_object() || !reply.contains("action") || !reply.at("action").is_number())
    throw ProtocolError("pipe controller reply lacks a numeric \"action\": '" + line.substr(0, 80) + "'");
  return reply.at("action").get<double>();
}

void PipeController::end() { stop(); }

}  // namespace pdecg
