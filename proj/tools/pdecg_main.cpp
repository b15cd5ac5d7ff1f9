#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "pdecg/adjoint.hpp"
#include "pdecg/backstepping.hpp"
#include "pdecg/errors.hpp"
#include "pdecg/io.hpp"
#include "pdecg/runner.hpp"

namespace {

using namespace pdecg;

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kBlowUp = 3, kProtocol = 4 };

struct Common {
  std::string config_path;
  std::string problem;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string controller;
  std::string pipe;
  std::optional<double> constant;
  std::optional<double> u0;
  std::optional<double> pipe_timeout;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "manifest or environment config (.json or .toml)");
  cmd->add_option("--problem", c.problem, "use the defaults of hyperbolic | parabolic | navier_stokes");
  cmd->add_option("--out", c.out, "output directory");
}

RunManifest resolve(const Common& c) {
  RunManifest m;
  if (!c.config_path.empty()) {
    m = load_manifest(c.config_path);
  } else if (!c.problem.empty()) {
    m.config = EnvConfig::defaults(parse_problem(c.problem));
  } else {
    throw ConfigError("either --config or --problem is required");
  }
  if (m.config.problem == Problem::NavierStokes && m.controller.id == "backstepping") m.controller.id = "adjoint";
  if (c.seed) m.seed = *c.seed;
  if (!c.out.empty()) m.out_dir = c.out;
  if (!c.pipe.empty()) {
    m.controller.id = "pipe";
    m.controller.pipe_command = c.pipe;
  }
  if (!c.controller.empty()) m.controller.id = c.controller;
  if (c.constant) m.controller.constant = *c.constant;
  if (c.pipe_timeout) m.controller.pipe_timeout = *c.pipe_timeout;
  if (c.u0) {
    m.config.initial.kind = InitialConditionSpec::Kind::Constant;
    m.config.initial.value = *c.u0;
  }
  m.config.validate();
  return m;
}

int cmd_run(const Common& c) {
  const RunManifest m = resolve(c);
  const EpisodeRecord rec = run_episode(m);
  nlohmann::json j = metrics_to_json(rec.metrics);
  j["problem"] = to_string(m.config.problem);
  j["controller"] = m.controller.id;
  j["seed"] = m.seed;
  std::cout << j.dump(2) << std::endl;
  return rec.metrics.truncated ? kBlowUp : kOk;
}

int cmd_suite(const Common& c, int episodes, int threads) {
  const RunManifest m = resolve(c);
  const SuiteReport r = run_suite(m, episodes, m.seed, threads);
  std::cout << r.table();
  nlohmann::json summary = r.to_json();
  summary.erase("per_episode");
  std::cout << summary.dump(2) << std::endl;
  return r.truncated > 0 ? kBlowUp : kOk;
}

int cmd_reference(const Common& c) {
  RunManifest m = resolve(c);
  if (m.config.problem != Problem::NavierStokes) throw ConfigError("reference needs a navier_stokes config");
  const auto ref = build_reference(m.config);
  const Grid2D g = m.config.grid_2d();
  const std::filesystem::path dir = c.out.empty() ? std::filesystem::path("reference") : std::filesystem::path(c.out);
  std::ostringstream sched;
  write_schedule_csv(sched, ControlSchedule{ref->controls, ref->dt_control});
  write_text_file(dir / "schedule.csv", sched.str());
  std::ostringstream summary;
  summary << "step,t,l2\n";
  for (int k = 0; k < ref->steps(); ++k) {
    const Velocity& f = ref->frame(k);
    summary << k << ',' << format_double((k + 1) * ref->dt_control) << ','
            << format_double(std::sqrt(l2_norm_sq(f, g))) << '\n';
    std::ostringstream frame;
    frame << "x,y,u,v\n";
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j)
        frame << format_double(g.x(i)) << ',' << format_double(g.y(j)) << ',' << format_double(f.u(i, j)) << ','
              << format_double(f.v(i, j)) << '\n';
    char name[32];
    std::snprintf(name, sizeof name, "frame_%06d.csv", k + 1);
    write_text_file(dir / "frames" / name, frame.str());
  }
  write_text_file(dir / "reference.csv", summary.str());
  std::cout << "wrote " << ref->steps() << " reference frames to " << dir.string() << std::endl;
  return kOk;
}

int cmd_kernel(const Common& c) {
  const RunManifest m = resolve(c);
  if (m.config.problem == Problem::NavierStokes) throw ConfigError("kernels exist for the 1D problems only");
  const Grid1D g = m.config.grid_1d();
  const CoefficientProfile profile(ChebyshevProfile(m.config.profile.gamma_cheb, m.config.profile.amplitude), g);
  std::ostringstream os;
  nlohmann::json info;
  if (m.config.problem == Problem::Hyperbolic) {
    const auto k = cached_kernel_hyperbolic(profile);
    write_kernel_csv(os, *k);
    info = {{"iterations", k->iterations}, {"residual", k->residual}};
  } else {
    const auto k = cached_kernel_parabolic(profile);
    write_kernel_csv(os, *k);
    info = {{"iterations", k->iterations}, {"residual", k->residual}, {"goursat_residual", k->goursat_residual}};
  }
  if (c.out.empty()) {
    std::cout << os.str();
  } else {
    const auto path = std::filesystem::path(c.out) / "kernel.csv";
    write_text_file(path, os.str());
    info["file"] = path.string();
    std::cout << info.dump(2) << std::endl;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PDE boundary-control benchmarks: transport, reaction-diffusion, Navier-Stokes"};
  app.require_subcommand(1);
  Common c;
  int episodes = 50, threads = 0;

  auto* run = app.add_subcommand("run", "run one episode");
  add_common(run, c);
  for (auto* cmd : {run}) {
    cmd->add_option("--seed", c.seed, "episode seed (u64)");
    cmd->add_option("--controller", c.controller, "zero | constant | backstepping | adjoint | reference | pipe");
    cmd->add_option("--pipe", c.pipe, "external controller command (line-delimited JSON)");
    cmd->add_option("--constant", c.constant, "value for the constant controller");
    cmd->add_option("--pipe-timeout", c.pipe_timeout, "seconds to wait for each pipe reply");
    cmd->add_option("--u0", c.u0, "constant initial state (1D)");
  }
  auto* suite = app.add_subcommand("suite", "run seeds base..base+N-1 and aggregate");
  add_common(suite, c);
  suite->add_option("--seed", c.seed, "first seed");
  suite->add_option("--episodes", episodes, "number of episodes")->check(CLI::PositiveNumber);
  suite->add_option("--controller", c.controller, "controller id");
  suite->add_option("--pipe", c.pipe, "external controller command");
  suite->add_option("--threads", threads, "worker threads (0: all cores)");
  auto* reference = app.add_subcommand("reference", "build the Navier-Stokes tracking reference");
  add_common(reference, c);
  auto* kernel = app.add_subcommand("kernel", "dump the backstepping kernel as CSV");
  add_common(kernel, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (run->parsed()) return cmd_run(c);
    if (suite->parsed()) return cmd_suite(c, episodes, threads);
    if (reference->parsed()) return cmd_reference(c);
    if (kernel->parsed()) return cmd_kernel(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return kConfig;
  } catch (const ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << std::endl;
    return kProtocol;
  } catch (const BlowUpError& e) {
    std::cerr << "blow-up: " << e.what() << std::endl;
    return kBlowUp;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kOther;
  }
  return kOther;
}
