#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pdecg/backstepping.hpp"
#include "pdecg/errors.hpp"
#include "pdecg/runner.hpp"

namespace py = pybind11;
using namespace pdecg;

namespace {

nlohmann::json to_json(const py::handle& obj) {
  const auto text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
  return nlohmann::json::parse(text);
}

py::object from_json(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

// A dict is a configuration; a string names a problem whose defaults are used.
EnvConfig config_arg(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) return EnvConfig::defaults(parse_problem(obj.cast<std::string>()));
  return config_from_json(to_json(obj));
}

RunManifest manifest_arg(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) {
    RunManifest m;
    m.config = config_arg(obj);
    return m;
  }
  const auto j = to_json(obj);
  if (j.is_object() && j.contains("env")) return manifest_from_json(j);
  RunManifest m;
  m.config = config_from_json(j);
  return m;
}

py::array_t<double> array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::dict info_dict(const StepInfo& info) {
  py::dict d;
  d["step"] = info.step;
  d["t"] = info.t;
  d["l2"] = info.l2;
  d["applied_action"] = info.applied_action;
  d["state"] = array(info.state);
  return d;
}

CoefficientProfile profile(double gamma_cheb, double amplitude, int nx) {
  return CoefficientProfile(ChebyshevProfile(gamma_cheb, amplitude), Grid1D(nx));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Boundary control environments for 1D transport, 1D reaction-diffusion and 2D Navier-Stokes";

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  static py::exception<ConfigError> config_error(m, "ConfigError", base.ptr());
  static py::exception<InputError> input_error(m, "InputError", base.ptr());
  static py::exception<StateError> state_error(m, "StateError", base.ptr());
  static py::exception<ConvergenceError> convergence_error(m, "ConvergenceError", base.ptr());
  static py::exception<BlowUpError> blowup_error(m, "BlowUpError", base.ptr());
  static py::exception<ProtocolError> protocol_error(m, "ProtocolError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const InputError& e) {
      py::set_error(input_error, e.what());
    } catch (const StateError& e) {
      py::set_error(state_error, e.what());
    } catch (const ConvergenceError& e) {
      py::set_error(convergence_error, e.what());
    } catch (const BlowUpError& e) {
      py::set_error(blowup_error, e.what());
    } catch (const ProtocolError& e) {
      py::set_error(protocol_error, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  m.def("default_config", [](const std::string& problem) {
    return from_json(config_to_json(EnvConfig::defaults(parse_problem(problem))));
  }, py::arg("problem"), "Default configuration of a problem as a dict.");

  m.def("validate_config", [](const py::object& config) {
    const EnvConfig c = config_arg(config);
    c.validate();
    return from_json(config_to_json(c));
  }, py::arg("config"), "Fills in defaults, validates and returns the complete configuration.");

  m.def("load_config", [](const std::string& path) { return from_json(config_to_json(load_config(path))); },
        py::arg("path"));

  py::class_<Environment>(m, "Environment")
      .def(py::init([](const py::object& config) { return std::make_unique<Environment>(config_arg(config)); }),
           py::arg("config"))
      .def("reset",
           [](Environment& env, std::uint64_t seed, std::optional<std::vector<double>> initial) {
             return array(env.reset(seed, std::move(initial)));
           },
           py::arg("seed") = 0, py::arg("initial") = py::none())
      .def("step",
           [](Environment& env, double action) {
             StepOutcome out;
             {
               py::gil_scoped_release release;
               out = env.step(action);
             }
             return py::make_tuple(array(out.observation), out.reward, out.terminated, out.truncated,
                                   info_dict(out.info));
           },
           py::arg("action"), "Returns (observation, reward, terminated, truncated, info).")
      .def_property_readonly("problem", [](const Environment& e) { return std::string(to_string(e.problem())); })
      .def_property_readonly("config", [](const Environment& e) { return from_json(config_to_json(e.config())); })
      .def_property_readonly("observation_size", &Environment::observation_size)
      .def_property_readonly("control_steps", &Environment::control_steps)
      .def_property_readonly("substeps", &Environment::substeps)
      .def_property_readonly("action_bounds",
                             [](const Environment& e) {
                               return py::make_tuple(e.config().episode.action_lo, e.config().episode.action_hi);
                             })
      .def_property_readonly("active", &Environment::active)
      .def_property_readonly("step_index", &Environment::step_index)
      .def_property_readonly("time", &Environment::time)
      .def_property_readonly("warnings", &Environment::warnings)
      .def("full_state", [](const Environment& e) { return array(e.full_state()); })
      .def("state_l2", &Environment::state_l2)
      .def("reference_controls", [](const Environment& e) {
        if (!e.reference()) throw ConfigError("only Navier-Stokes environments have a reference");
        return array(e.reference()->controls);
      });

  m.def("kernel_hyperbolic",
        [](double gamma_cheb, double amplitude, int nx) {
          return array(cached_kernel_hyperbolic(profile(gamma_cheb, amplitude, nx))->k);
        },
        py::arg("gamma_cheb") = 7.35, py::arg("amplitude") = 5.0, py::arg("nx") = 101,
        "Samples k(x_j) of the transport backstepping kernel.");

  m.def("kernel_parabolic",
        [](double gamma_cheb, double amplitude, int nx) {
          const auto k = cached_kernel_parabolic(profile(gamma_cheb, amplitude, nx));
          py::array_t<double> out({nx, nx});
          auto a = out.mutable_unchecked<2>();
          for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nx; ++j) a(i, j) = j <= i ? (*k)(i, j) : 0.0;
          return out;
        },
        py::arg("gamma_cheb") = 8.0, py::arg("amplitude") = 50.0, py::arg("nx") = 201,
        "Lower-triangular k(x_i, y_j) of the reaction-diffusion backstepping kernel.");

  m.def("backstepping_action",
        [](const std::string& problem, const std::vector<double>& u, double gamma_cheb, double amplitude) {
          const int nx = static_cast<int>(u.size());
          const Grid1D g(nx);
          if (parse_problem(problem) == Problem::Hyperbolic)
            return control_hyperbolic(*cached_kernel_hyperbolic(profile(gamma_cheb, amplitude, nx)), u, g);
          if (parse_problem(problem) == Problem::Parabolic)
            return control_parabolic(*cached_kernel_parabolic(profile(gamma_cheb, amplitude, nx)), u, g);
          throw ConfigError("backstepping exists for the 1D problems only");
        },
        py::arg("problem"), py::arg("u"), py::arg("gamma_cheb"), py::arg("amplitude"));

  m.def("reward_step",
        [](const std::vector<double>& prev, const std::vector<double>& next) {
          return reward_step(prev, next, Grid1D(static_cast<int>(prev.size())));
        },
        py::arg("prev"), py::arg("next"));

  m.def("reward_terminal",
        [](const std::vector<double>& final_state, const std::vector<double>& actions, double sigma, double eta,
           double zeta) {
          return reward_terminal(final_state, actions, RewardSpec1D{sigma, eta, zeta},
                                 Grid1D(static_cast<int>(final_state.size())));
        },
        py::arg("final_state"), py::arg("actions"), py::arg("sigma") = 300.0, py::arg("eta") = 1000.0,
        py::arg("zeta") = 20.0);

  m.def("run_episode",
        [](const py::object& manifest, std::optional<std::uint64_t> seed) {
          RunManifest mf = manifest_arg(manifest);
          if (seed) mf.seed = *seed;
          EpisodeRecord rec;
          {
            py::gil_scoped_release release;
            rec = run_episode(mf);
          }
          py::dict d;
          d["metrics"] = from_json(metrics_to_json(rec.metrics));
          d["trajectory_csv"] = rec.trajectory_csv;
          d["actions"] = array(rec.actions);
          return d;
        },
        py::arg("manifest"), py::arg("seed") = py::none(),
        "Runs one episode with the manifest's controller; returns metrics, trajectory CSV and actions.");

  m.def("run_suite",
        [](const py::object& manifest, int episodes, std::uint64_t seed_base, int threads) {
          const RunManifest mf = manifest_arg(manifest);
          SuiteReport r;
          {
            py::gil_scoped_release release;
            r = run_suite(mf, episodes, seed_base, threads);
          }
          return from_json(r.to_json());
        },
        py::arg("manifest"), py::arg("episodes"), py::arg("seed_base") = 0, py::arg("threads") = 0);
}
