#include "pdecg/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "pdecg/errors.hpp"
#include "pdecg/io.hpp"
#include "toml.hpp"

namespace pdecg {

using nlohmann::json;

std::string_view to_string(Problem p) {
  switch (p) {
    case Problem::Hyperbolic: return "hyperbolic";
    case Problem::Parabolic: return "parabolic";
    case Problem::NavierStokes: return "navier_stokes";
  }
  return "?";
}

std::string_view to_string(SensingMode m) {
  switch (m) {
    case SensingMode::FullState: return "full_state";
    case SensingMode::Collocated: return "collocated";
    case SensingMode::AntiCollocatedValue: return "anti_collocated_value";
    case SensingMode::AntiCollocatedGradient: return "anti_collocated_gradient";
  }
  return "?";
}

std::string_view to_string(NoiseKind k) { return k == NoiseKind::None ? "none" : "gaussian"; }

namespace {

std::string_view to_string(InitialConditionSpec::Kind k) {
  switch (k) {
    case InitialConditionSpec::Kind::Uniform: return "uniform";
    case InitialConditionSpec::Kind::Constant: return "constant";
    case InitialConditionSpec::Kind::Profile: return "profile";
  }
  return "?";
}

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const E (&options)[N], const std::string& what) {
  for (E e : options)
    if (to_string(e) == s) return e;
  std::string names;
  for (E e : options) names += (names.empty() ? "" : ", ") + std::string(to_string(e));
  throw ConfigError(what + ": unknown value '" + std::string(s) + "' (expected one of " + names + ")");
}

constexpr Problem kProblems[] = {Problem::Hyperbolic, Problem::Parabolic, Problem::NavierStokes};
constexpr SensingMode kModes[] = {SensingMode::FullState, SensingMode::Collocated,
                                  SensingMode::AntiCollocatedValue,
                                  SensingMode::AntiCollocatedGradient};
constexpr NoiseKind kNoise[] = {NoiseKind::None, NoiseKind::Gaussian};
constexpr BoundaryKind kKinds[] = {BoundaryKind::Dirichlet, BoundaryKind::Neumann};
constexpr Edge1D kEdges1[] = {Edge1D::X0, Edge1D::X1};
constexpr Edge2D kEdges2[] = {Edge2D::Top, Edge2D::Bottom, Edge2D::Left, Edge2D::Right};
constexpr InitialConditionSpec::Kind kInitial[] = {InitialConditionSpec::Kind::Uniform,
                                                   InitialConditionSpec::Kind::Constant,
                                                   InitialConditionSpec::Kind::Profile};

}  // namespace

Problem parse_problem(std::string_view s) { return parse_enum(s, kProblems, "problem"); }
SensingMode parse_sensing(std::string_view s) { return parse_enum(s, kModes, "sensing.mode"); }

EnvConfig EnvConfig::defaults(Problem problem) {
  EnvConfig c;
  c.problem = problem;
  switch (problem) {
    case Problem::Hyperbolic:
      break;
    case Problem::Parabolic:
      c.nx = 201;
      c.episode = {1.0, 1e-3, 1e-5, -20.0, 20.0, 20.0};
      c.profile = {8.0, 50.0};
      break;
    case Problem::NavierStokes:
      c.episode = {0.2, 1e-3, 1e-3, -10.0, 10.0, 1e4};
      break;
  }
  return c;
}

int EnvConfig::control_steps() const {
  return checked_ratio(episode.horizon, episode.dt_control, "episode.horizon / episode.dt_control");
}

int EnvConfig::substeps() const {
  return checked_ratio(episode.dt_control, episode.dt_pde, "episode.dt_control / episode.dt_pde");
}

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

bool finite_all(std::initializer_list<double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

std::string cell(const EnvConfig& c) {
  const bool is_1d = c.problem != Problem::NavierStokes;
  return "(" + std::string(to_string(c.problem)) + ", " + std::string(to_string(c.sensing.mode)) +
         " sensing, " + std::string(to_string(c.actuation.kind)) + " actuation at " +
         std::string(is_1d ? to_string(c.actuation.edge_1d) : to_string(c.actuation.edge_2d)) + ")";
}

}  // namespace

void EnvConfig::validate() const {
  const EpisodeConfig& e = episode;
  require(finite_all({e.horizon, e.dt_control, e.dt_pde, e.action_lo, e.action_hi, e.blowup_threshold}),
          "episode: all values must be finite");
  require(e.horizon > 0.0, "episode.horizon must be positive");
  require(e.dt_control > 0.0, "episode.dt_control must be positive");
  require(e.dt_pde > 0.0, "episode.dt_pde must be positive");
  require(e.dt_pde <= e.dt_control * (1 + 1e-12), "episode.dt_pde must not exceed episode.dt_control");
  control_steps();
  substeps();
  require(e.action_lo < e.action_hi, "episode.action_lo must be below episode.action_hi");
  require(e.blowup_threshold > 0.0, "episode.blowup_threshold must be positive");
  require(std::isfinite(sensing.noise.sigma) && sensing.noise.sigma >= 0.0,
          "sensing.noise.sigma must be a non-negative number");

  if (problem == Problem::NavierStokes) {
    require(ns.nx >= 5 && ns.ny >= 5, "ns.nx and ns.ny must be at least 5");
    require(ns.fluid.nu > 0.0 && ns.fluid.rho > 0.0, "ns.nu and ns.rho must be positive");
    require(ns.poisson.max_iters >= 1, "ns.poisson.max_iters must be >= 1");
    require(ns.poisson.tol >= 0.0, "ns.poisson.tol must be non-negative");
    require(ns.poisson.omega > 0.0 && ns.poisson.omega <= 1.0, "ns.poisson.omega must lie in (0, 1]");
    require(finite_all({ns.reference.intercept, ns.reference.slope}), "ns.reference must be finite");
    require(reward_ns.gamma_ctrl >= 0.0, "reward.gamma_ctrl must be non-negative");
    require(std::isfinite(reward_ns.a_ref), "reward.a_ref must be finite");
    require(actuation.kind == BoundaryKind::Dirichlet,
            "unsupported configuration " + cell(*this) + ": Navier-Stokes accepts Dirichlet lid actuation only");
    require(sensing.mode == SensingMode::FullState,
            "unsupported configuration " + cell(*this) + ": Navier-Stokes accepts full_state sensing only");
    return;
  }

  require(nx >= 3, "nx must be at least 3");
  require(finite_all({profile.gamma_cheb, profile.amplitude}), "profile values must be finite");
  require(reward_1d.sigma > 0.0 && reward_1d.eta > 0.0 && reward_1d.zeta > 0.0,
          "reward.sigma, reward.eta and reward.zeta must be positive");
  if (problem == Problem::Parabolic) {
    require(actuation.edge_1d == Edge1D::X1,
            "unsupported configuration " + cell(*this) + ": x0 is pinned to zero in the parabolic problem");
    require(sensing.mode != SensingMode::AntiCollocatedValue,
            "unsupported configuration " + cell(*this) + ": u(0,t) is identically zero");
    const double dx = 1.0 / (nx - 1);
    require(e.dt_pde <= 0.5 * dx * dx * (1 + 1e-12),
            "episode.dt_pde exceeds the diffusive stability bound dx^2/2 = " + format_double(0.5 * dx * dx));
  } else {
    require(actuation.edge_1d == Edge1D::X1,
            "unsupported configuration " + cell(*this) + ": actuation at x0 is not implemented");
    require(e.dt_pde <= (1.0 / (nx - 1)) * (1 + 1e-12),
            "episode.dt_pde exceeds the CFL bound dx = " + format_double(1.0 / (nx - 1)));
  }

  switch (initial.kind) {
    case InitialConditionSpec::Kind::Uniform:
      require(std::isfinite(initial.lo) && std::isfinite(initial.hi) && initial.lo <= initial.hi,
              "initial.lo must not exceed initial.hi");
      break;
    case InitialConditionSpec::Kind::Constant:
      require(std::isfinite(initial.value), "initial.value must be finite");
      break;
    case InitialConditionSpec::Kind::Profile:
      require(static_cast<int>(initial.values.size()) == nx,
              "initial.values has " + std::to_string(initial.values.size()) + " entries, expected nx = " +
                  std::to_string(nx));
      require(all_finite(initial.values), "initial.values must be finite");
      break;
  }
}

bool operator==(const EnvConfig& a, const EnvConfig& b) {
  return config_to_json(a) == config_to_json(b);
}

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (std::string_view a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + where + key + "'");
  }
}

namespace {

const json& object_at(const json& doc, const std::string& path) {
  if (!doc.is_object()) throw ConfigError("'" + path + "' must be a table/object");
  return doc;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError("'" + path + "' must be a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError("'" + path + "' must be an integer");
  const auto x = v.get<std::int64_t>();
  if (x < INT32_MIN || x > INT32_MAX) throw ConfigError("'" + path + "' is out of range");
  return static_cast<int>(x);
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError("'" + path + "' must be a string");
  return v.get<std::string>();
}

// Visits the keys of `obj` under prefix `where`; `apply` handles known keys and
// returns false for unknown ones.
template <typename F>
void each_key(const json& obj, const std::string& where, F&& apply) {
  object_at(obj, where.empty() ? "<root>" : where.substr(0, where.size() - 1));
  for (const auto& [key, value] : obj.items())
    if (!apply(key, value, where + key)) throw ConfigError("unknown key '" + where + key + "'");
}

template <typename E, std::size_t N>
E enum_at(const json& v, const std::string& path, const E (&options)[N]) {
  return parse_enum(text(v, path), options, path);
}

}  // namespace

EnvConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("configuration must be an object");
  if (!doc.contains("problem")) throw ConfigError("missing key 'problem'");
  EnvConfig c = EnvConfig::defaults(enum_at(doc.at("problem"), "problem", kProblems));
  const bool is_1d = c.problem != Problem::NavierStokes;

  each_key(doc, "", [&](const std::string& key, const json& v, const std::string& path) {
    if (key == "problem") return true;
    if (key == "nx" && is_1d) {
      c.nx = integer(v, path);
    } else if (key == "episode") {
      each_key(v, path + ".", [&](const std::string& k, const json& x, const std::string& p) {
        double* field = k == "horizon"            ? &c.episode.horizon
                        : k == "dt_control"       ? &c.episode.dt_control
                        : k == "dt_pde"           ? &c.episode.dt_pde
                        : k == "action_lo"        ? &c.episode.action_lo
                        : k == "action_hi"        ? &c.episode.action_hi
                        : k == "blowup_threshold" ? &c.episode.blowup_threshold
                                                  : nullptr;
        if (!field) return false;
        *field = number(x, p);
        return true;
      });
    } else if (key == "actuation") {
      each_key(v, path + ".", [&](const std::string& k, const json& x, const std::string& p) {
        if (k == "edge") {
          if (is_1d)
            c.actuation.edge_1d = enum_at(x, p, kEdges1);
          else
            c.actuation.edge_2d = enum_at(x, p, kEdges2);
        } else if (k == "kind") {
          c.actuation.kind = enum_at(x, p, kKinds);
        } else {
          return false;
        }
        return true;
      });
    } else if (key == "sensing") {
      each_key(v, path + ".", [&](const std::string& k, const json& x, const std::string& p) {
        if (k == "mode") {
          c.sensing.mode = enum_at(x, p, kModes);
        } else if (k == "noise") {
          each_key(x, p + ".", [&](const std::string& nk, const json& nv, const std::string& np) {
            if (nk == "kind") {
              c.sensing.noise.kind = enum_at(nv, np, kNoise);
            } else if (nk == "sigma") {
              c.sensing.noise.sigma = number(nv, np);
            } else if (nk == "seed") {
              if (!nv.is_number_unsigned() && !(nv.is_number_integer() && nv.get<std::int64_t>() >= 0))
                throw ConfigError("'" + np + "' must be a non-negative integer");
              c.sensing.noise.seed = nv.get<std::uint64_t>();
            } else {
              return false;
            }
            return true;
          });
        } else {
          return false;
        }
        return true;
      });
    } else if (key == "profile" && is_1d) {
      each_key(v, path + ".", [&](const std::string& k, const json& x, const std::string& p) {
        if (k == "gamma_cheb") c.profile.gamma_cheb = number(x, p);
        else if (k == "amplitude") c.profile.amplitude = number(x, p);
        else return false;
        return true;
      });
    } else if (key == "reward") {
      each_key(v, path + ".", [&](const std::string& k, const json& x, const std::string& p) {
        double* field = nullptr;
        if (is_1d)
          field = k == "sigma" ? &c.reward_1d.sigma
                  : k == "eta" ? &c.reward_1d.eta
                  : k == "zeta" ? &c.reward_1d.zeta
                                : nullptr;
        else
          field = k == "gamma_ctrl" ? &c.reward_ns.gamma_ctrl : k == "a_ref" ? &c.reward_ns.a_ref : nullptr;
        if (!field) return false;
        *field = number(x, p);
        return true;
      });
    } else if (key == "initial" && is_1d) {
      each_key(v, path + ".", [&](const std::string& k, const json& x, const std::string& p) {
        if (k == "kind") {
          c.initial.kind = enum_at(x, p, kInitial);
        } else if (k == "lo") {
          c.initial.lo = number(x, p);
        } else if (k == "hi") {
          c.initial.hi = number(x, p);
        } else if (k == "value") {
          c.initial.value = number(x, p);
        } else if (k == "values") {
          if (!x.is_array()) throw ConfigError("'" + p + "' must be an array");
          c.initial.values.clear();
          for (std::size_t i = 0; i < x.size(); ++i)
            c.initial.values.push_back(number(x[i], p + "[" + std::to_string(i) + "]"));
        } else {
          return false;
        }
        return true;
      });
    } else if (key == "ns" && !is_1d) {
      each_key(v, path + ".", [&](const std::string& k, const json& x, const std::string& p) {
        if (k == "nx") c.ns.nx = integer(x, p);
        else if (k == "ny") c.ns.ny = integer(x, p);
        else if (k == "nu") c.ns.fluid.nu = number(x, p);
        else if (k == "rho") c.ns.fluid.rho = number(x, p);
        else if (k == "poisson")
          each_key(x, p + ".", [&](const std::string& pk, const json& pv, const std::string& pp) {
            if (pk == "max_iters") c.ns.poisson.max_iters = integer(pv, pp);
            else if (pk == "tol") c.ns.poisson.tol = number(pv, pp);
            else if (pk == "omega") c.ns.poisson.omega = number(pv, pp);
            else return false;
            return true;
          });
        else if (k == "reference")
          each_key(x, p + ".", [&](const std::string& rk, const json& rv, const std::string& rp) {
            if (rk == "intercept") c.ns.reference.intercept = number(rv, rp);
            else if (rk == "slope") c.ns.reference.slope = number(rv, rp);
            else return false;
            return true;
          });
        else return false;
        return true;
      });
    } else {
      return false;
    }
    return true;
  });

  c.validate();
  return c;
}

json config_to_json(const EnvConfig& c) {
  json j;
  j["problem"] = to_string(c.problem);
  const bool is_1d = c.problem != Problem::NavierStokes;
  j["episode"] = {{"horizon", c.episode.horizon},
                  {"dt_control", c.episode.dt_control},
                  {"dt_pde", c.episode.dt_pde},
                  {"action_lo", c.episode.action_lo},
                  {"action_hi", c.episode.action_hi},
                  {"blowup_threshold", c.episode.blowup_threshold}};
  j["actuation"] = {{"edge", is_1d ? to_string(c.actuation.edge_1d) : to_string(c.actuation.edge_2d)},
                    {"kind", to_string(c.actuation.kind)}};
  j["sensing"] = {{"mode", to_string(c.sensing.mode)},
                  {"noise",
                   {{"kind", to_string(c.sensing.noise.kind)},
                    {"sigma", c.sensing.noise.sigma},
                    {"seed", c.sensing.noise.seed}}}};
  if (is_1d) {
    j["nx"] = c.nx;
    j["profile"] = {{"gamma_cheb", c.profile.gamma_cheb}, {"amplitude", c.profile.amplitude}};
    j["reward"] = {{"sigma", c.reward_1d.sigma}, {"eta", c.reward_1d.eta}, {"zeta", c.reward_1d.zeta}};
    json init = {{"kind", to_string(c.initial.kind)}};
    switch (c.initial.kind) {
      case InitialConditionSpec::Kind::Uniform:
        init["lo"] = c.initial.lo;
        init["hi"] = c.initial.hi;
        break;
      case InitialConditionSpec::Kind::Constant:
        init["value"] = c.initial.value;
        break;
      case InitialConditionSpec::Kind::Profile:
        init["values"] = c.initial.values;
        break;
    }
    j["initial"] = init;
  } else {
    j["reward"] = {{"gamma_ctrl", c.reward_ns.gamma_ctrl}, {"a_ref", c.reward_ns.a_ref}};
    j["ns"] = {{"nx", c.ns.nx},
               {"ny", c.ns.ny},
               {"nu", c.ns.fluid.nu},
               {"rho", c.ns.fluid.rho},
               {"poisson",
                {{"max_iters", c.ns.poisson.max_iters},
                 {"tol", c.ns.poisson.tol},
                 {"omega", c.ns.poisson.omega}}},
               {"reference", {{"intercept", c.ns.reference.intercept}, {"slope", c.ns.reference.slope}}}};
  }
  return j;
}

namespace {

json toml_node_to_json(const toml::node& node, const std::string& path) {
  if (const auto* t = node.as_table()) {
    json obj = json::object();
    for (const auto& [k, v] : *t) obj[std::string(k.str())] = toml_node_to_json(v, path + std::string(k.str()) + ".");
    return obj;
  }
  if (const auto* a = node.as_array()) {
    json arr = json::array();
    for (const auto& v : *a) arr.push_back(toml_node_to_json(v, path));
    return arr;
  }
  if (const auto* s = node.as_string()) return s->get();
  if (const auto* i = node.as_integer()) return i->get();
  if (const auto* f = node.as_floating_point()) return f->get();
  if (const auto* b = node.as_boolean()) return b->get();
  throw ConfigError("unsupported TOML value at '" + path.substr(0, path.empty() ? 0 : path.size() - 1) + "'");
}

}  // namespace

json toml_to_json(std::string_view toml_text) {
  try {
    const toml::table tbl = toml::parse(toml_text);
    return toml_node_to_json(tbl, "");
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
    throw ConfigError(os.str());
  }
}

EnvConfig load_config(const std::filesystem::path& path) {
  std::string contents;
  try {
    contents = read_text_file(path);
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  const std::string ext = path.extension().string();
  if (ext == ".toml") return config_from_json(toml_to_json(contents));
  try {
    return config_from_json(json::parse(contents));
  } catch (const json::parse_error& e) {
    throw ConfigError("JSON parse error in " + path.string() + ": " + e.what());
  }
}

}  // namespace pdecg
