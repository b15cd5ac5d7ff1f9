#include "pdecg/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "pdecg/errors.hpp"
#include "pdecg/io.hpp"

namespace pdecg {

using nlohmann::json;

json manifest_to_json(const RunManifest& m) {
  const ControllerSpec& c = m.controller;
  return {{"env", config_to_json(m.config)},
          {"controller",
           {{"id", c.id},
            {"constant", c.constant},
            {"pipe_command", c.pipe_command},
            {"pipe_timeout", c.pipe_timeout},
            {"adjoint",
             {{"iters", c.adjoint.iters}, {"step", c.adjoint.step}, {"max_halvings", c.adjoint.max_halvings}}}}},
          {"seed", m.seed},
          {"out", m.out_dir.string()},
          {"frame_every", m.frame_every}};
}

namespace {

double num(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError("'" + path + "' must be a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError("'" + path + "' must be an integer");
  return v.get<int>();
}

}  // namespace

RunManifest manifest_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("manifest must be an object");
  reject_unknown_keys(doc, {"env", "controller", "seed", "out", "frame_every"}, "");
  if (!doc.contains("env")) throw ConfigError("missing key 'env'");
  RunManifest m;
  m.config = config_from_json(doc.at("env"));
  if (doc.contains("controller")) {
    const json& c = doc.at("controller");
    if (!c.is_object()) throw ConfigError("'controller' must be an object");
    reject_unknown_keys(c, {"id", "constant", "pipe_command", "pipe_timeout", "adjoint"}, "controller.");
    if (c.contains("id")) {
      if (!c.at("id").is_string()) throw ConfigError("'controller.id' must be a string");
      m.controller.id = c.at("id").get<std::string>();
    }
    if (c.contains("constant")) m.controller.constant = num(c.at("constant"), "controller.constant");
    if (c.contains("pipe_command")) {
      if (!c.at("pipe_command").is_string()) throw ConfigError("'controller.pipe_command' must be a string");
      m.controller.pipe_command = c.at("pipe_command").get<std::string>();
    }
    if (c.contains("pipe_timeout")) m.controller.pipe_timeout = num(c.at("pipe_timeout"), "controller.pipe_timeout");
    if (c.contains("adjoint")) {
      const json& a = c.at("adjoint");
      if (!a.is_object()) throw ConfigError("'controller.adjoint' must be an object");
      reject_unknown_keys(a, {"iters", "step", "max_halvings"}, "controller.adjoint.");
      if (a.contains("iters")) m.controller.adjoint.iters = integer(a.at("iters"), "controller.adjoint.iters");
      if (a.contains("step")) m.controller.adjoint.step = num(a.at("step"), "controller.adjoint.step");
      if (a.contains("max_halvings"))
        m.controller.adjoint.max_halvings = integer(a.at("max_halvings"), "controller.adjoint.max_halvings");
    }
  }
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
      throw ConfigError("'seed' must be a non-negative integer");
    m.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("out")) {
    if (!doc.at("out").is_string()) throw ConfigError("'out' must be a string");
    m.out_dir = doc.at("out").get<std::string>();
  }
  if (doc.contains("frame_every")) m.frame_every = integer(doc.at("frame_every"), "frame_every");
  if (m.frame_every < 1) throw ConfigError("'frame_every' must be >= 1");
  return m;
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  json doc;
  if (path.extension() == ".toml") {
    doc = toml_to_json(text);
  } else {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("JSON parse error in " + path.string() + ": " + e.what());
    }
  }
  if (doc.is_object() && doc.contains("env")) return manifest_from_json(doc);
  RunManifest m;
  m.config = config_from_json(doc);
  return m;
}

json metrics_to_json(const EpisodeMetrics& m) {
  return {{"total_reward", m.total_reward},
          {"summed_l2", m.summed_l2},
          {"final_l2", m.final_l2},
          {"summed_l2_unweighted", m.summed_l2_unweighted},
          {"truncated", m.truncated},
          {"terminated", m.terminated},
          {"steps", m.steps},
          {"wall_time", m.wall_time}};
}

namespace {

std::string frame_csv(const Field2D& f, const Grid2D& g) {
  std::string out = "x,y,u,v,p\n";
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      out += format_double(g.x(i));
      out += ',';
      out += format_double(g.y(j));
      out += ',';
      out += format_double(f.u(i, j));
      out += ',';
      out += format_double(f.v(i, j));
      out += ',';
      out += format_double(f.p(i, j));
      out += '\n';
    }
  return out;
}

std::string frame_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06d.csv", step);
  return buf;
}

// Ends the controller's episode on every exit path.
struct EpisodeGuard {
  Controller& controller;
  ~EpisodeGuard() { controller.end(); }
};

}  // namespace

EpisodeRecord run_episode(const RunManifest& manifest) {
  Environment env(manifest.config);
  auto controller = make_controller(manifest.controller, manifest.config);
  return run_episode(manifest, env, *controller);
}

EpisodeRecord run_episode(const RunManifest& manifest, Environment& env, Controller& controller) {
  const auto start = std::chrono::steady_clock::now();
  const bool is_1d = env.problem() != Problem::NavierStokes;
  const bool write = !manifest.out_dir.empty();
  std::vector<std::pair<std::string, std::string>> frames;

  EpisodeRecord rec;
  std::ostringstream csv;
  if (is_1d) {
    csv << "t,action";
    for (int j = 0; j < env.grid_1d()->nx; ++j) csv << ",u_" << j;
    csv << '\n';
  } else {
    csv << "t,action,l2,reward\n";
  }

  std::vector<double> obs = env.reset(manifest.seed);
  controller.begin(env, obs);
  EpisodeGuard guard{controller};

  EpisodeMetrics& m = rec.metrics;
  m.final_l2 = env.state_l2();
  m.summed_l2 = m.final_l2;
  m.summed_l2_unweighted = vector_norm(env.full_state());
  if (is_1d)
    csv << "0,," << join_csv(env.full_state()) << '\n';
  else
    csv << "0,," << format_double(m.final_l2) << ",\n";
  if (!is_1d && write) frames.emplace_back(frame_name(0), frame_csv(env.state_2d(), *env.grid_2d()));

  while (env.active()) {
    const double action = controller.act(env, obs);
    StepOutcome out = env.step(action);
    m.total_reward += out.reward;
    m.summed_l2 += out.info.l2;
    m.summed_l2_unweighted += vector_norm(out.info.state);
    m.final_l2 = out.info.l2;
    m.truncated = out.truncated;
    m.terminated = out.terminated;
    m.steps = out.info.step;
    rec.actions.push_back(out.info.applied_action);
    const std::string t = format_double(out.info.t), a = format_double(out.info.applied_action);
    if (is_1d) {
      csv << t << ',' << a << ',' << join_csv(out.info.state) << '\n';
    } else {
      csv << t << ',' << a << ',' << format_double(out.info.l2) << ',' << format_double(out.reward) << '\n';
      if (write && (out.info.step % manifest.frame_every == 0 || !env.active()))
        frames.emplace_back(frame_name(out.info.step), frame_csv(env.state_2d(), *env.grid_2d()));
    }
    obs = std::move(out.observation);
  }
  m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rec.trajectory_csv = csv.str();

  if (write) {
    const auto& dir = manifest.out_dir;
    write_text_file(dir / "trajectory.csv", rec.trajectory_csv);
    write_text_file(dir / "metrics.json", metrics_to_json(m).dump(2) + "\n");
    write_text_file(dir / "manifest.json", manifest_to_json(manifest).dump(2) + "\n");
    for (const auto& [name, body] : frames) write_text_file(dir / "frames" / name, body);
  }
  return rec;
}

std::pair<double, double> l2_from_trajectory_csv(const std::string& csv, const EnvConfig& config) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  double summed = 0.0, last = 0.0;
  const bool is_1d = config.problem != Problem::NavierStokes;
  const Grid1D grid = is_1d ? config.grid_1d() : Grid1D(3);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream row(line);
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (is_1d) {
      std::vector<double> u;
      for (std::size_t k = 2; k < cells.size(); ++k) u.push_back(parse_double(cells[k]));
      last = l2_norm(u, grid);
    } else {
      if (cells.size() < 3) throw InputError("malformed trajectory row: " + line);
      last = parse_double(cells[2]);
    }
    summed += last;
  }
  return {summed, last};
}

json SuiteReport::to_json() const {
  json eps = json::array();
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    json e = metrics_to_json(episodes[i]);
    e["seed"] = seeds[i];
    eps.push_back(e);
  }
  return {{"episodes", static_cast<int>(episodes.size())},
          {"mean_total_reward", mean_reward},
          {"std_total_reward", std_reward},
          {"mean_summed_l2", mean_summed_l2},
          {"std_summed_l2", std_summed_l2},
          {"truncated", truncated},
          {"per_episode", eps}};
}

std::string SuiteReport::table() const {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-20s %14s %14s %12s %9s\n", "seed", "total_reward", "summed_l2", "final_l2",
                "truncated");
  os << buf;
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    const auto& e = episodes[i];
    std::snprintf(buf, sizeof buf, "%-20llu %14.4f %14.4f %12.4e %9s\n", static_cast<unsigned long long>(seeds[i]),
                  e.total_reward, e.summed_l2, e.final_l2, e.truncated ? "yes" : "no");
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "mean +- std  reward %.4f +- %.4f   summed_l2 %.4f +- %.4f   truncated %d/%zu\n",
                mean_reward, std_reward, mean_summed_l2, std_summed_l2, truncated, episodes.size());
  os << buf;
  return os.str();
}

SuiteReport run_suite(const RunManifest& manifest, int episodes, std::uint64_t seed_base, int threads) {
  if (episodes < 1) throw ConfigError("a suite needs at least one episode");
  manifest.config.validate();
  make_controller(manifest.controller, manifest.config);  // surfaces controller errors up front
  std::shared_ptr<const ReferenceTrajectory> reference;
  if (manifest.config.problem == Problem::NavierStokes) reference = build_reference(manifest.config);

  SuiteReport report;
  report.episodes.resize(episodes);
  report.seeds.resize(episodes);
  for (int i = 0; i < episodes; ++i) report.seeds[i] = seed_base + static_cast<std::uint64_t>(i);

  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, episodes);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      Environment env(manifest.config, reference);
      auto controller = make_controller(manifest.controller, manifest.config);
      for (int i = next++; i < episodes; i = next++) {
        RunManifest m = manifest;
        m.seed = report.seeds[i];
        if (!manifest.out_dir.empty()) m.out_dir = manifest.out_dir / ("episode_" + std::to_string(m.seed));
        report.episodes[i] = run_episode(m, env, *controller).metrics;
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = episodes;
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  double sr = 0.0, sl = 0.0;
  for (const auto& e : report.episodes) {
    sr += e.total_reward;
    sl += e.summed_l2;
    report.truncated += e.truncated ? 1 : 0;
  }
  report.mean_reward = sr / episodes;
  report.mean_summed_l2 = sl / episodes;
  double vr = 0.0, vl = 0.0;
  for (const auto& e : report.episodes) {
    vr += (e.total_reward - report.mean_reward) * (e.total_reward - report.mean_reward);
    vl += (e.summed_l2 - report.mean_summed_l2) * (e.summed_l2 - report.mean_summed_l2);
  }
  report.std_reward = std::sqrt(vr / episodes);
  report.std_summed_l2 = std::sqrt(vl / episodes);

  if (!manifest.out_dir.empty()) {
    write_text_file(manifest.out_dir / "suite.json", report.to_json().dump(2) + "\n");
    write_text_file(manifest.out_dir / "suite.txt", report.table());
  }
  return report;
}

}  // namespace pdecg
