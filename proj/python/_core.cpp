// Python bindings for the ldp library.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "ldp/annealed.hpp"
#include "ldp/error.hpp"
#include "ldp/experiment.hpp"
#include "ldp/fluctuation.hpp"
#include "ldp/io.hpp"
#include "ldp/oracle.hpp"
#include "ldp/quenched.hpp"

namespace py = pybind11;
using namespace ldp;

namespace {

// Exception classes live for the whole process.
PyObject* g_base = nullptr;
PyObject* g_schema = nullptr;
PyObject* g_domain = nullptr;
PyObject* g_numeric = nullptr;

void raise_with_code(PyObject* type, const Error& e) {
  py::object exc = py::reinterpret_borrow<py::object>(type)(py::str(e.what()));
  exc.attr("code") = py::str(e.code());
  PyErr_SetObject(type, exc.ptr());
}

py::dict estimate_dict(const ActivationEstimate& e) {
  py::dict d;
  d["value"] = e.value;
  d["log_value"] = e.log_value;
  d["raw_value"] = e.raw_value;
  d["method"] = e.method;
  d["theta"] = e.tilt.theta;
  d["sigma2"] = e.tilt.sigma2;
  d["rate"] = e.tilt.rate;
  d["a"] = e.tilt.a;
  d["reliable"] = e.reliable;
  d["clamped"] = e.clamped;
  d["warnings"] = e.warnings;
  d["env_hash"] = e.env_hash ? py::object(py::str(hex64(*e.env_hash))) : py::object(py::none());
  return d;
}

py::dict tilt_dict(const TiltSolution& t) {
  py::dict d;
  d["theta"] = t.theta;
  d["sigma2"] = t.sigma2;
  d["rate"] = t.rate;
  d["a"] = t.a;
  d["iterations"] = t.iterations;
  return d;
}

py::dict oracle_dict(const OracleEstimate& o) {
  py::dict d;
  d["value"] = o.value;
  d["std_error"] = o.std_error;
  d["method"] = o.method;
  d["draws"] = o.draws;
  d["seed"] = o.seed;
  d["theta"] = o.theta;
  d["states"] = o.states;
  return d;
}

py::dict ratio_dict(const RatioEstimate& r) {
  py::dict d;
  d["value"] = r.value;
  d["log_value"] = r.log_value;
  d["theta"] = r.theta;
  d["slope"] = r.slope;
  d["warnings"] = r.warnings;
  return d;
}

py::dict conditional_dict(const ConditionalMoments& m) {
  py::dict d;
  d["mean"] = m.mean;
  d["variance"] = m.variance;
  d["mean_at_zero"] = m.mean_at_zero;
  d["variance_at_zero"] = m.variance_at_zero;
  d["mean_diff"] = m.mean_diff;
  d["mean_diff_exact"] = m.mean_diff_exact;
  d["variance_diff"] = m.variance_diff;
  d["second_root"] = m.second_root;
  return d;
}

const Environment* env_ptr(const std::optional<Environment>& env) { return env ? &*env : nullptr; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sharp large-deviation activation probabilities (compiled core)";
  m.attr("__version__") = kVersion;

  g_base = PyErr_NewException("ldp_activation._core.LdpError", PyExc_RuntimeError, nullptr);
  g_schema = PyErr_NewException("ldp_activation._core.SchemaError", g_base, nullptr);
  g_domain = PyErr_NewException("ldp_activation._core.DomainError", g_base, nullptr);
  g_numeric = PyErr_NewException("ldp_activation._core.NumericError", g_base, nullptr);
  m.attr("LdpError") = py::handle(g_base);
  m.attr("SchemaError") = py::handle(g_schema);
  m.attr("DomainError") = py::handle(g_domain);
  m.attr("NumericError") = py::handle(g_numeric);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      switch (e.kind()) {
        case ErrorKind::Schema: raise_with_code(g_schema, e); break;
        case ErrorKind::Domain: raise_with_code(g_domain, e); break;
        case ErrorKind::Numeric: raise_with_code(g_numeric, e); break;
      }
    }
  });

  py::class_<BoundedDistribution>(m, "Distribution")
      .def_static("discrete", &BoundedDistribution::discrete, py::arg("support"), py::arg("probs"))
      .def_static("degenerate", &BoundedDistribution::degenerate, py::arg("value"))
      .def_static("uniform_on", &BoundedDistribution::uniform_on, py::arg("support"))
      .def_static("scaled_beta", &BoundedDistribution::scaled_beta, py::arg("alpha"),
                  py::arg("beta"), py::arg("max"),
                  py::arg("nodes") = BoundedDistribution::kDefaultQuadratureNodes)
      .def_static("from_json", [](const std::string& s) { return distribution_from_json(Json::parse(s)); })
      .def("to_json", [](const BoundedDistribution& d) { return to_json(d).dump(); })
      .def_property_readonly("lower", &BoundedDistribution::lower)
      .def_property_readonly("upper", &BoundedDistribution::upper)
      .def_property_readonly("points", &BoundedDistribution::points)
      .def_property_readonly("weights", &BoundedDistribution::weights)
      .def_property_readonly("is_lattice", &BoundedDistribution::is_lattice)
      .def("mean", &BoundedDistribution::mean)
      .def("variance", [](const BoundedDistribution& d) { return d.moments().variance; })
      .def("log_mgf", &BoundedDistribution::log_mgf, py::arg("theta"))
      .def("cumulants",
           [](const BoundedDistribution& d, double t) {
             const auto c = d.cumulants(t);
             return py::make_tuple(c.value, c.d1, c.d2);
           },
           py::arg("theta"))
      .def("tilted", &BoundedDistribution::tilted, py::arg("theta"))
      .def("scaled", &BoundedDistribution::scaled, py::arg("factor"))
      .def("sample",
           [](const BoundedDistribution& d, std::uint64_t seed, int count) {
             Rng rng(seed);
             std::vector<double> out(static_cast<std::size_t>(count));
             for (double& x : out) x = d.sample(rng);
             return out;
           },
           py::arg("seed"), py::arg("count"))
      .def("__repr__", &BoundedDistribution::describe);

  m.def("product_law", &product_law, py::arg("z"), py::arg("w"));
  m.def("stimulation_rate_from_dissociation", &stimulation_rate_from_dissociation, py::arg("r"),
        py::arg("t_star"));

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def_static("from_json", [](const std::string& s) { return model_from_json(Json::parse(s)); })
      .def("to_json", [](const ModelParams& p) { return to_json(p).dump(); })
      .def_readwrite("n_c", &ModelParams::n_c)
      .def_readwrite("n_v", &ModelParams::n_v)
      .def_readwrite("z_f", &ModelParams::z_f)
      .def_readwrite("law_Zc", &ModelParams::law_zc)
      .def_readwrite("law_Zv", &ModelParams::law_zv)
      .def_readwrite("law_W", &ModelParams::law_w)
      .def_readwrite("a", &ModelParams::a)
      .def_readwrite("seed", &ModelParams::seed)
      .def_property_readonly("n", &ModelParams::n)
      .def("with_z_f", &ModelParams::with_z_f, py::arg("z_f"));

  m.def("derived_constants", [](const ModelParams& p) {
    const auto c = derived_constants(p);
    py::dict d;
    d["n"] = c.n;
    d["n_M"] = c.n_M;
    d["q_n"] = c.q_n;
    return d;
  });

  py::class_<Environment>(m, "Environment")
      .def(py::init([](const std::string& kind, std::vector<double> values) {
             Environment e;
             e.kind = environment_kind_from_string(kind);
             e.values = std::move(values);
             return e;
           }),
           py::arg("kind"), py::arg("values"))
      .def_property_readonly("kind", [](const Environment& e) { return to_string(e.kind); })
      .def_readonly("values", &Environment::values)
      .def_readonly("seed", &Environment::seed)
      .def("hash", [](const Environment& e) { return hex64(environment_hash(e)); })
      .def("to_json", [](const Environment& e) { return to_json(e).dump(); });

  m.def("sample_environment",
        [](const ModelParams& p, const std::string& kind, std::uint64_t seed, std::uint64_t stream) {
          Rng rng = Rng::substream(seed, stream);
          return sample_environment(p, environment_kind_from_string(kind), rng);
        },
        py::arg("params"), py::arg("kind"), py::arg("seed"), py::arg("stream") = 0);

  m.def("sample_G",
        [](const ModelParams& p, std::uint64_t seed, int count, std::optional<Environment> env) {
          GSampler sampler(p, env_ptr(env));
          Rng rng(seed);
          std::vector<double> out(static_cast<std::size_t>(count));
          for (double& x : out) x = sampler(rng);
          return out;
        },
        py::arg("params"), py::arg("seed"), py::arg("count"), py::arg("env") = py::none());

  m.def("moments_annealed", [](const ModelParams& p) {
    const auto a = moments_annealed(p);
    py::dict d;
    d["mean"] = a.mean;
    d["variance"] = a.variance;
    d["variance_at_zero"] = a.variance_at_zero;
    d["variance_diff"] = a.variance_diff;
    d["second_root"] = a.second_root;
    return d;
  });
  m.def("moments_quenched_R", [](const ModelParams& p, const Environment& e) {
    return conditional_dict(moments_quenched_R(p, e));
  });
  m.def("moments_quenched_Z", [](const ModelParams& p, const Environment& e) {
    return conditional_dict(moments_quenched_Z(p, e));
  });
  m.def("normal_interval",
        [](const ModelParams& p, double z_f, double coverage, const std::string& regime,
           std::optional<Environment> env) {
          const auto iv = normal_interval(p, z_f, coverage, regime_from_string(regime), env_ptr(env));
          return py::make_tuple(iv.lo, iv.hi);
        },
        py::arg("params"), py::arg("z_f"), py::arg("coverage"), py::arg("regime") = "annealed",
        py::arg("env") = py::none());

  m.def("rate_annealed", [](const ModelParams& p, double a) { return tilt_dict(rate_annealed(p, a)); },
        py::arg("params"), py::arg("a"));
  m.def("probability_annealed",
        [](const ModelParams& p, double a) { return estimate_dict(probability_annealed(p, a)); },
        py::arg("params"), py::arg("a"));
  m.def("rate_quenched",
        [](const ModelParams& p, const Environment& e, double a) { return tilt_dict(rate_quenched(p, e, a)); },
        py::arg("params"), py::arg("env"), py::arg("a"));
  m.def("probability_quenched",
        [](const ModelParams& p, const Environment& e, double a) {
          return estimate_dict(probability_quenched(p, e, a));
        },
        py::arg("params"), py::arg("env"), py::arg("a"));
  m.def("decompose_rate",
        [](const ModelParams& p, const Environment& e, double a) {
          const auto r = decompose_rate(p, e, a);
          py::dict d;
          d["I0"] = r.I0;
          d["theta0"] = r.theta0;
          d["Zn"] = r.Zn;
          d["Zn_d1"] = r.Zn_d1;
          d["Zn_d2"] = r.Zn_d2;
          d["g_d2"] = r.g_d2;
          d["foreign_term"] = r.foreign_term;
          d["remainder"] = r.remainder;
          d["total"] = r.total;
          d["direct_rate"] = r.direct_rate;
          d["discrepancy"] = r.discrepancy;
          return d;
        },
        py::arg("params"), py::arg("env"), py::arg("a"));
  m.def("ratio_annealed",
        [](const ModelParams& p, double a, double z_f) { return ratio_dict(ratio_annealed(p, a, z_f)); },
        py::arg("params"), py::arg("a"), py::arg("z_f"));
  m.def("ratio_quenched_R",
        [](const ModelParams& p, const Environment& e, double a, double z_f) {
          return ratio_dict(ratio_quenched_R(p, e, a, z_f));
        },
        py::arg("params"), py::arg("env"), py::arg("a"), py::arg("z_f"));
  m.def("ratio_quenched_Z",
        [](const ModelParams& p, double a, double z_f) { return ratio_dict(ratio_quenched_Z(p, a, z_f)); },
        py::arg("params"), py::arg("a"), py::arg("z_f"));

  m.def("exact_tail",
        [](const ModelParams& p, double a, std::optional<Environment> env, double resolution,
           long long max_states) {
          ExactOptions o;
          o.resolution = resolution;
          o.max_states = max_states;
          py::gil_scoped_release release;
          return exact_tail(p, env_ptr(env), a, o);
        },
        py::arg("params"), py::arg("a"), py::arg("env") = py::none(), py::arg("resolution") = 1e-9,
        py::arg("max_states") = 10000000LL);
  m.def("naive_mc",
        [](const ModelParams& p, double a, long long draws, std::uint64_t seed,
           std::optional<Environment> env) {
          py::gil_scoped_release release;
          return naive_mc(p, env_ptr(env), a, draws, seed);
        },
        py::arg("params"), py::arg("a"), py::arg("draws"), py::arg("seed"), py::arg("env") = py::none());
  m.def("tilted_is",
        [](const ModelParams& p, double a, long long draws, std::uint64_t seed,
           std::optional<Environment> env, std::optional<double> theta) {
          py::gil_scoped_release release;
          return tilted_is(p, env_ptr(env), a, draws, seed, theta);
        },
        py::arg("params"), py::arg("a"), py::arg("draws"), py::arg("seed"), py::arg("env") = py::none(),
        py::arg("theta") = py::none());
  py::class_<OracleEstimate>(m, "OracleEstimate")
      .def_readonly("value", &OracleEstimate::value)
      .def_readonly("std_error", &OracleEstimate::std_error)
      .def_readonly("method", &OracleEstimate::method)
      .def_readonly("draws", &OracleEstimate::draws)
      .def_readonly("seed", &OracleEstimate::seed)
      .def_readonly("theta", &OracleEstimate::theta)
      .def_readonly("states", &OracleEstimate::states)
      .def("as_dict", &oracle_dict);

  m.def("simulate_fluctuation",
        [](const ModelParams& p, const std::string& kind, const std::vector<double>& a_grid, int replicas,
           std::uint64_t seed) {
          FluctuationReport r;
          {
            py::gil_scoped_release release;
            r = simulate_fluctuation(p, environment_kind_from_string(kind), a_grid, replicas, seed);
          }
          py::dict d;
          d["kind"] = to_string(r.kind);
          d["n"] = r.n;
          d["replicas"] = r.replicas;
          d["seed"] = r.seed;
          d["a_grid"] = r.a_grid;
          d["t_grid"] = r.t_grid;
          d["empirical_mean"] = r.empirical_mean;
          d["empirical_cov"] = r.empirical_cov;
          d["predicted_cov"] = r.predicted_cov;
          d["jackknife_se"] = r.jackknife_se;
          d["max_abs_cov_error"] = r.max_abs_cov_error;
          d["max_cov_zscore"] = r.max_cov_zscore;
          d["normality_pvalues"] = r.normality_pvalues;
          d["min_eigen_empirical"] = r.min_eigen_empirical;
          d["min_eigen_predicted"] = r.min_eigen_predicted;
          py::list invalid;
          for (const auto& ip : r.invalid_points) invalid.append(py::make_tuple(ip.a, ip.code, ip.message));
          d["invalid_points"] = invalid;
          d["samples"] = r.samples;
          return d;
        },
        py::arg("params"), py::arg("kind"), py::arg("a_grid"), py::arg("replicas"), py::arg("seed"));

  // Config-driven entry points take and return JSON text; the Python layer
  // converts to and from dicts.
  m.def("run_config_json",
        [](const std::string& config_json) {
          const auto cfg = config_from_json(Json::parse(config_json));
          RunOutcome out;
          {
            py::gil_scoped_release release;
            out = run_experiment(cfg);
          }
          return py::make_tuple(out.exit_code, out.summary.dump());
        },
        py::arg("config_json"));
  m.def("validate_config_json", [](const std::string& config_json) { config_from_json(Json::parse(config_json)); },
        py::arg("config_json"));
  m.def("config_schema_json", [] { return config_schema().dump(); });
  m.def("summary_schema_json", [] { return summary_schema().dump(); });
}
