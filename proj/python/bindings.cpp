#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "domino/array_model.hpp"
#include "domino/cascade.hpp"
#include "domino/errors.hpp"
#include "domino/experiment.hpp"
#include "domino/percolation.hpp"
#include "domino/powerctl.hpp"
#include "domino/stats.hpp"

namespace py = pybind11;
using namespace domino;
using nlohmann::json;

namespace {

// dicts cross the boundary as JSON text; the python side does the loads/dumps
json parse(const std::string& text) { return json::parse(text); }

std::string array_json(double a1, double delta, double alpha, std::size_t n_max) {
  const auto r = array_cascade(a1, delta, alpha, n_max);
  return json{{"a", r.a},
              {"affected_count", r.affected_count},
              {"outcome", to_string(r.outcome)},
              {"n_evaluated", r.n_evaluated}}
      .dump();
}

std::string bounds_json(double delta_update, double delta, double beta, double d_ii, double alpha,
                        std::size_t n_terms) {
  return to_json(percolation_bounds({delta_update, delta, beta, d_ii, alpha}, n_terms)).dump();
}

std::string network_json(double lambda, double width, double height, double d_ii, double alpha,
                         std::uint64_t seed) {
  NetworkParams p;
  p.window = {width, height};
  p.d_ii = d_ii;
  p.path_loss = {alpha};
  p.density = lambda;
  return to_json(build_network(sample_ppp(lambda, p.window, seed), p, seed ^ 0x5bd1e995u)).dump();
}

std::string min_power_json(const std::string& network, const std::string& backend) {
  const Network net = network_from_json(parse(network));
  const auto g = gain_matrix(net);
  const auto beta = net.betas();
  const auto f = feasibility(g, beta);
  json out = {{"spectral_radius", f.spectral_radius}, {"feasible", f.feasible}};
  if (f.feasible) {
    const Backend b = backend == "direct"      ? Backend::Direct
                      : backend == "iterative" ? Backend::Iterative
                                               : Backend::Auto;
    const auto p = solve_min_power(g, beta, net.noise, b);
    out["p"] = p.p;
    out["sinr"] = sinr(g, p.p, net.noise);
  }
  return out.dump();
}

std::string cascade_json(const std::string& network, double threshold, double p_max,
                         std::size_t origin) {
  const Network net = network_from_json(parse(network));
  CascadeConfig c;
  c.threshold = threshold;
  c.p_max = p_max;
  c.origin = origin;
  const auto r = run_cascade(net, nominal_power(net), c, 0);
  return json{{"origin", r.origin},
              {"rounds", r.rounds},
              {"p_before", r.p_before},
              {"p_after", r.p_after},
              {"clipped", r.clipped},
              {"truncated", r.truncated},
              {"total_affected", r.total_affected()}}
      .dump();
}

std::string poisson_fit_json(const std::vector<std::size_t>& samples) {
  return to_json(poisson_fit(samples)).dump();
}

std::string powerlaw_fit_json(const std::vector<double>& fractions) {
  return to_json(powerlaw_fit(fractions)).dump();
}

std::string normalize_config(const std::string& config) {
  return to_json(parse_config(parse(config))).dump();
}

std::string run_json(const std::string& config) {
  const auto m = run_experiment(parse_config(parse(config)));
  json files = json::array();
  for (const auto& f : m.files) files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return json{{"status", m.status}, {"files", files}, {"wall_time_s", m.wall_time_s}}.dump();
}

}  // namespace

PYBIND11_MODULE(_domino, m) {
  m.doc() = "domino-effect simulation core";
  m.attr("__version__") = kVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  m.def("path_loss", [](double d, double alpha) { return path_loss(d, {alpha}); }, py::arg("d"),
        py::arg("alpha") = 3.0);
  m.def("affected_radius",
        [](double xi, double beta, double d_ii, double delta, double alpha) {
          return affected_radius(xi, beta, d_ii, delta, {alpha});
        },
        py::arg("xi"), py::arg("beta"), py::arg("d_ii"), py::arg("delta"), py::arg("alpha") = 3.0);
  m.def("critical_coupling", &critical_coupling, py::arg("alpha"));
  m.def("find_divergence_threshold", &find_divergence_threshold, py::arg("delta"),
        py::arg("alpha") = 3.0, py::arg("tol") = 1e-9, py::arg("n_max") = kThresholdNMax,
        py::call_guard<py::gil_scoped_release>());
  m.def("existence_density", &existence_density, py::arg("beta"), py::arg("d_ii"), py::arg("delta"),
        py::arg("alpha") = 3.0);
  m.def("edge_probability", &edge_probability, py::arg("lambda_"), py::arg("cell"));

  m.def("_array_cascade", &array_json);
  m.def("_percolation_bounds", &bounds_json);
  m.def("_network", &network_json);
  m.def("_min_power", &min_power_json);
  m.def("_cascade", &cascade_json);
  m.def("_poisson_fit", &poisson_fit_json);
  m.def("_powerlaw_fit", &powerlaw_fit_json);
  m.def("_parse_config", &normalize_config);
  m.def("_run_experiment", &run_json, py::call_guard<py::gil_scoped_release>());
}
