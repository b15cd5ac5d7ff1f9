// Acceptance checks A1-A10. One line per criterion; exits 0 when the set of
// failures equals the --expect-fail set.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pdecg/adjoint.hpp"
#include "pdecg/backstepping.hpp"
#include "pdecg/errors.hpp"
#include "pdecg/io.hpp"
#include "pdecg/runner.hpp"

using namespace pdecg;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within(double value, double target, double rel) { return std::abs(value - target) <= rel * std::abs(target); }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "pdecg_acceptance" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

RunManifest preset(Problem problem, const std::string& controller, std::optional<double> u0) {
  RunManifest m;
  m.config = EnvConfig::defaults(problem);
  m.controller.id = controller;
  if (u0) {
    m.config.initial.kind = InitialConditionSpec::Kind::Constant;
    m.config.initial.value = *u0;
  }
  return m;
}

int shell(const std::string& cmd) {
  const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// A1
Outcome transport_exactness() {
  const Grid1D g(101);
  const HyperbolicSolver solver(g, BetaProfile(ChebyshevProfile(0.0, 0.0), g), g.dx, BoundaryKind::Dirichlet);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  HyperbolicState s{Field1D(101), 0.0};
  for (double& x : s.u) x = dist(rng);
  std::vector<double> inputs(100);
  for (double& x : inputs) x = dist(rng);

  std::vector<double> shifted = s.u;
  double err = 0.0;
  for (int n = 0; n < 100; ++n) {
    solver.advance(s, inputs[n]);
    shifted.erase(shifted.begin());
    shifted.push_back(inputs[n]);
    for (int j = 0; j < 101; ++j) err = std::max(err, std::abs(s.u[j] - shifted[j]));
  }
  return {err <= 1e-12, fmt("max |u - shift| = %.3g over 100 steps", err)};
}

// A2
Outcome hyperbolic_kernel_oracle() {
  const Grid1D g = Grid1D::with_spacing(1e-3);
  double worst = 0.0;
  for (double b : {0.5, 1.0, 2.0}) {
    const auto k = solve_kernel_hyperbolic(BetaProfile(ChebyshevProfile(0.0, b), g));
    for (int j = 0; j < g.nx; ++j) worst = std::max(worst, std::abs(k.k[j] + b * std::exp(b * g.x(j))));
  }
  return {worst < 1e-4, fmt("sup |k + b e^{bx}| = %.3g for b in {0.5, 1, 2}", worst)};
}

// A3 / A5
Outcome stabilization(Problem problem, double target1, double target10, double rel) {
  bool pass = true;
  std::ostringstream os;
  for (double u0 : {1.0, 10.0}) {
    const auto rec = run_episode(preset(problem, "backstepping", u0));
    const double target = u0 == 1.0 ? target1 : target10;
    const bool ok = within(rec.metrics.summed_l2, target, rel) && rec.metrics.final_l2 < 1e-2 &&
                    rec.metrics.terminated;
    pass = pass && ok;
    os << fmt("u0=%g summed %.2f (target %.1f, %+.1f%%) final %.2e", u0, rec.metrics.summed_l2, target,
              100.0 * (rec.metrics.summed_l2 / target - 1.0), rec.metrics.final_l2);
    if (problem == Problem::Parabolic) os << fmt(" unweighted %.1f", rec.metrics.summed_l2_unweighted);
    os << "; ";
    const auto open = run_episode(preset(problem, "zero", u0));
    const bool diverged = open.metrics.truncated || open.metrics.final_l2 > u0;
    pass = pass && diverged;
    os << fmt("open loop %s at step %d (L2 %.3g); ", open.metrics.truncated ? "truncated" : "ran",
              open.metrics.steps, open.metrics.final_l2);
  }
  std::string d = os.str();
  d.resize(d.size() - 2);
  return {pass, d};
}

double chebyshev_t8_integral_01() {
  // T8 = 128x^8 - 256x^6 + 160x^4 - 32x^2 + 1
  return 128.0 / 9 - 256.0 / 7 + 160.0 / 5 - 32.0 / 3 + 1.0;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (b <= a) return 0.0;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double bessel_kernel(double c, double x, double y) {
  const double z2 = c * (x * x - y * y);
  if (z2 < 1e-12) return -0.5 * c * y;
  const double z = std::sqrt(z2);
  return -c * y * std::cyl_bessel_i(1.0, z) / z;
}

// A4
Outcome parabolic_kernel_identities() {
  const Grid1D g = Grid1D::with_spacing(0.005);
  const auto lam = [](double x) { return 50.0 * std::cos(8.0 * std::acos(std::clamp(x, -1.0, 1.0))); };
  const auto k = solve_kernel_parabolic(LambdaProfile(ChebyshevProfile(8.0, 50.0), g));
  double edge = 0.0, diag = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    edge = std::max(edge, std::abs(k(i, 0)));
    diag = std::max(diag, std::abs(k(i, i) + 0.5 * simpson(lam, 0.0, g.x(i), 2000)));
  }
  const double k11_exact = -25.0 * chebyshev_t8_integral_01();  // 25/63
  const double k11 = k(g.nx - 1, g.nx - 1);

  // closed form checked against the PDE before use
  const double c = 10.0, h = 1e-3;
  double pde = 0.0;
  for (double x : {0.3, 0.6, 0.9})
    for (double y : {0.1, 0.2, 0.25}) {
      const double kxx =
          (bessel_kernel(c, x + h, y) - 2 * bessel_kernel(c, x, y) + bessel_kernel(c, x - h, y)) / (h * h);
      const double kyy =
          (bessel_kernel(c, x, y + h) - 2 * bessel_kernel(c, x, y) + bessel_kernel(c, x, y - h)) / (h * h);
      pde = std::max(pde, std::abs(kxx - kyy - c * bessel_kernel(c, x, y)));
    }
  const auto kc = solve_kernel_parabolic(LambdaProfile(ChebyshevProfile(0.0, c), g));
  double bessel = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j <= i; ++j) bessel = std::max(bessel, std::abs(kc(i, j) - bessel_kernel(c, g.x(i), g.x(j))));

  const bool pass = edge == 0.0 && diag < 1e-6 && std::abs(k11 - k11_exact) < 1e-4 && pde < 1e-4 && bessel < 1e-3;
  return {pass, fmt("max|k(x,0)| = %g, diag err %.2e, k(1,1) = %.6f vs %.6f, closed-form PDE residual %.1e, "
                    "Bessel err %.2e",
                    edge, diag, k11, k11_exact, pde, bessel)};
}

// A6
Outcome suite_means() {
  const auto h = run_suite(preset(Problem::Hyperbolic, "backstepping", std::nullopt), 50, 0, 0);
  const auto p = run_suite(preset(Problem::Parabolic, "backstepping", std::nullopt), 50, 0, 0);
  const bool pass = within(h.mean_reward, 246.3, 0.10) && within(p.mean_reward, 299.1, 0.10);
  return {pass, fmt("hyperbolic %.2f +- %.2f (target 246.3, %+.1f%%), parabolic %.2f +- %.2f (target 299.1, %+.1f%%)",
                    h.mean_reward, h.std_reward, 100.0 * (h.mean_reward / 246.3 - 1.0), p.mean_reward, p.std_reward,
                    100.0 * (p.mean_reward / 299.1 - 1.0))};
}

// A7
Outcome projection_property() {
  const EnvConfig cfg = EnvConfig::defaults(Problem::NavierStokes);
  const NavierStokesSolver solver(cfg.grid_2d(), cfg.ns.fluid, cfg.episode.dt_pde, cfg.ns.poisson);
  NSState s{Field2D(solver.grid()), 0.0}, rest = s;
  double worst = 0.0, still = 0.0;
  for (int k = 0; k < 200; ++k) {
    s = solver.step(s, {3.0 - 5.0 * k * 1e-3, Edge2D::Top});
    worst = std::max(worst, max_divergence(s.fields.velocity(), solver.grid()));
    rest = solver.step(rest, {0.0, Edge2D::Top});
  }
  for (const Array2D* a : {&rest.fields.u, &rest.fields.v, &rest.fields.p}) still = std::max(still, a->max_abs());
  return {worst <= 1e-3 && still == 0.0, fmt("max interior divergence %.2e over 200 steps; rest state max %g", worst, still)};
}

// A8
Outcome trivial_optimum() {
  const EnvConfig cfg = EnvConfig::defaults(Problem::NavierStokes);
  const NavierStokesSolver solver(cfg.grid_2d(), cfg.ns.fluid, cfg.episode.dt_pde, cfg.ns.poisson);
  const auto ref = make_reference(linear_schedule(3.0, -5.0), solver, 1e-3, 0.2, Edge2D::Top);
  const auto cost = evaluate_cost(schedule_from(linear_schedule(3.0, -5.0), ref), ref, solver, {0.1, 2.0});
  const double expected = 0.05 / 15.0;
  return {cost.tracking == 0.0 && within(cost.total, expected, 0.05),
          fmt("tracking %g, total %.4e vs %.4e (%+.2f%%)", cost.tracking, cost.total, expected,
              100.0 * (cost.total / expected - 1.0))};
}

// A9
Outcome adjoint_check() {
  const NavierStokesSolver solver(Grid2D(11, 11), {0.1, 1.0}, 1e-3);
  const auto ref = make_reference(linear_schedule(3.0, -5.0), solver, 1e-3, 0.02, Edge2D::Top);
  const TrackingWeights w{0.1, 2.0};
  const ControlSchedule sched{std::vector<double>(20, 0.5), 1e-3};
  const auto fw = rollout(sched, solver, Edge2D::Top);
  const auto g = control_gradient(solve_adjoint(fw, ref, solver), fw, ref, sched, solver, w);
  double num = 0.0, den = 0.0;
  for (int k = 0; k < 20; ++k) {
    ControlSchedule p = sched, m = sched;
    p.values[k] += 1e-4;
    m.values[k] -= 1e-4;
    const double fd = (evaluate_cost(p, ref, solver, w).total - evaluate_cost(m, ref, solver, w).total) / 2e-4 / 1e-3;
    num += (g[k] - fd) * (g[k] - fd);
    den += fd * fd;
  }
  const double rel = std::sqrt(num / den);

  const auto r = optimize({std::vector<double>(20, 0.0), 1e-3}, ref, solver, w, {20, 10.0, 20});
  bool monotone = true;
  for (std::size_t i = 1; i < r.history.size(); ++i) monotone = monotone && r.history[i].total <= r.history[i - 1].total;
  const double first = r.history.front().total, last = r.history.back().total;
  return {rel < 1e-2 && monotone && last < first,
          fmt("gradient vs FD rel err %.2e; %zu accepted steps, monotone %s, cost %.4e -> %.4e", rel,
              r.history.size() - 1, monotone ? "yes" : "no", first, last)};
}

double replay_ns(const std::vector<double>& schedule) {
  Environment env(EnvConfig::defaults(Problem::NavierStokes));
  env.reset(0);
  double total = 0.0;
  for (double a : schedule) total += env.step(a).reward;
  return total;
}

std::string soft_ns() {
  RunManifest m = preset(Problem::NavierStokes, "adjoint", std::nullopt);
  const auto optimized = run_episode(m);

  const EnvConfig cfg = m.config;
  const NavierStokesSolver solver(cfg.grid_2d(), cfg.ns.fluid, cfg.episode.dt_pde, cfg.ns.poisson);
  const auto ref = build_reference(cfg);
  const TrackingWeights w{cfg.reward_ns.gamma_ctrl, cfg.reward_ns.a_ref};
  ControlSchedule sched{std::vector<double>(ref->steps(), w.u_ref), ref->dt_control};
  const auto fw = rollout(sched, solver, Edge2D::Top);
  const auto g = control_gradient(solve_adjoint(fw, *ref, solver), fw, *ref, sched, solver, w);
  std::vector<double> one_shot(sched.values.size());
  for (std::size_t k = 0; k < one_shot.size(); ++k)
    one_shot[k] = std::clamp(sched.values[k] - g[k] / w.gamma_ctrl, cfg.episode.action_lo, cfg.episode.action_hi);
  const double one = replay_ns(one_shot);
  const double r = optimized.metrics.total_reward;
  return fmt("NS  %s  adjoint reward %.3f (one-shot %.3f) vs -7.931 +-25%% [soft, not counted]",
             within(r, -7.931, 0.25) || within(one, -7.931, 0.25) ? "PASS" : "MISS", r, one);
}

// A10
Outcome reproducibility(const std::string& cli, const std::string& child) {
  const fs::path dir = scratch("a10");
  RunManifest m = preset(Problem::Hyperbolic, "backstepping", std::nullopt);
  m.seed = 314159;
  write_text_file(dir / "manifest.json", manifest_to_json(m).dump(2));
  bool ok = true;
  for (const char* sub : {"a", "b"})
    ok = ok && shell(cli + " run --config " + (dir / "manifest.json").string() + " --out " + (dir / sub).string()) == 0;
  if (!ok) return {false, "CLI run failed"};
  const std::string a = read_text_file(dir / "a" / "trajectory.csv"), b = read_text_file(dir / "b" / "trajectory.csv");
  const bool identical = a == b;

  const auto metrics = nlohmann::json::parse(read_text_file(dir / "a" / "metrics.json"));
  const auto [summed, last] = l2_from_trajectory_csv(a, m.config);
  const double recompute = std::max(std::abs(summed - metrics.at("summed_l2").get<double>()),
                                    std::abs(last - metrics.at("final_l2").get<double>()));

  double parity = 0.0;
  for (Problem p : {Problem::Hyperbolic, Problem::Parabolic}) {
    RunManifest pm = preset(p, "backstepping", std::nullopt);
    pm.seed = 5;
    const fs::path kdir = dir / ("kernel_" + std::string(to_string(p)));
    if (shell(cli + " kernel --problem " + std::string(to_string(p)) + " --out " + kdir.string()) != 0)
      return {false, "CLI kernel dump failed"};
    const auto direct = run_episode(pm);
    pm.controller.id = "pipe";
    pm.controller.pipe_command = child + " kernel " + (kdir / "kernel.csv").string();
    const auto piped = run_episode(pm);
    if (piped.actions.size() != direct.actions.size()) return {false, "pipe episode length differs"};
    for (std::size_t k = 0; k < direct.actions.size(); ++k)
      parity = std::max(parity, std::abs(piped.actions[k] - direct.actions[k]));
  }
  return {identical && recompute <= 1e-9 && parity <= 1e-9,
          fmt("trajectory CSVs %s (%zu bytes); CSV vs JSON metrics %.1e; pipe parity max |da| %.1e",
              identical ? "identical" : "DIFFER", a.size(), recompute, parity)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<std::string> expect_fail, only;
  std::string cli = PDECG_CLI, child = PDECG_PIPE_CHILD;
  bool soft = true;
  app.add_option("--expect-fail", expect_fail, "criteria known to fail")->delimiter(',');
  app.add_option("--only", only, "run a subset")->delimiter(',');
  app.add_option("--cli", cli, "pdecg executable");
  app.add_option("--pipe-child", child, "pipe protocol helper");
  app.add_flag("!--no-soft", soft, "skip the soft Navier-Stokes line");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"A1", transport_exactness},
      {"A2", hyperbolic_kernel_oracle},
      {"A3", [] { return stabilization(Problem::Hyperbolic, 106.1, 1060.9, 0.15); }},
      {"A4", parabolic_kernel_identities},
      {"A5", [] { return stabilization(Problem::Parabolic, 1275.4, 12754.4, 0.15); }},
      {"A6", suite_means},
      {"A7", projection_property},
      {"A8", trivial_optimum},
      {"A9", adjoint_check},
      {"A10", [&] { return reproducibility(cli, child); }},
  };
  const std::map<std::string, double> budget = {{"A1", 1},  {"A2", 5},  {"A3", 60}, {"A4", 60},  {"A5", 240},
                                                {"A6", 1800}, {"A7", 60}, {"A8", 60}, {"A9", 600}, {"A10", 300}};

  const std::set<std::string> expected(expect_fail.begin(), expect_fail.end());
  std::set<std::string> failed;
  for (const auto& [id, run] : checks) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > budget.at(id)) {
      o.pass = false;
      o.detail += fmt("; over the %.0f s budget", budget.at(id));
    }
    if (!o.pass) failed.insert(id);
    std::cout << fmt("%-3s %s  ", id.c_str(), o.pass ? "PASS" : "FAIL") << o.detail
              << fmt("  (%.2f s)%s", secs, !o.pass && expected.count(id) ? " [expected]" : "") << std::endl;
  }
  if (soft && (only.empty() || std::find(only.begin(), only.end(), "NS") != only.end())) {
    try {
      std::cout << soft_ns() << std::endl;
    } catch (const std::exception& e) {
      std::cout << "NS  MISS  exception: " << e.what() << std::endl;
    }
  }

  std::set<std::string> expected_run;
  for (const auto& id : expected)
    if (only.empty() || std::find(only.begin(), only.end(), id) != only.end()) expected_run.insert(id);
  const bool ok = failed == expected_run;
  std::cout << fmt("%zu failed", failed.size());
  if (!expected_run.empty()) std::cout << fmt(", %zu expected", expected_run.size());
  std::cout << (ok ? "; OK" : "; MISMATCH with the expected failures") << std::endl;
  return ok ? 0 : 1;
}
