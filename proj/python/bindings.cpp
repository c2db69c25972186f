#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "gdcsma/capacity.hpp"
#include "gdcsma/dependencies.hpp"
#include "gdcsma/dynamics.hpp"
#include "gdcsma/graph.hpp"
#include "gdcsma/optimize.hpp"

namespace py = pybind11;
using namespace gdcsma;

namespace {

InterferenceGraph make_graph(const std::string& family, int n, int k,
                             const std::vector<Edge>& edges) {
  return build_graph({parse_family(family), n, k, edges});
}

std::vector<std::vector<int>> schedules_as_lists(const ScheduleSpace& space) {
  std::vector<std::vector<int>> out;
  out.reserve(space.size());
  for (const Schedule x : space) {
    std::vector<int> on;
    for (int i = 0; i < space.links(); ++i) {
      if (x.transmits(i)) on.push_back(i);
    }
    out.push_back(std::move(on));
  }
  return out;
}

std::vector<std::vector<double>> rows(const DependenciesMatrix& m) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(m.size()));
  for (int i = 0; i < m.size(); ++i) {
    for (int j = 0; j < m.size(); ++j) out[static_cast<std::size_t>(i)].push_back(m(i, j));
  }
  return out;
}

py::dict norms_dict(const MatrixNorms& n) {
  py::dict d;
  d["norm1"] = n.norm1;
  d["norm_inf"] = n.norm_inf;
  d["spectral"] = n.spectral;
  d["dobrushin"] = n.dobrushin;
  return d;
}

DependenciesMatrix matrix_from_rows(const std::vector<std::vector<double>>& r) {
  DependenciesMatrix m(static_cast<int>(r.size()), MatrixKind::kAnalytic);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i].size() != r.size()) throw std::invalid_argument("matrix must be square");
    for (std::size_t j = 0; j < r.size(); ++j) m(static_cast<int>(i), static_cast<int>(j)) = r[i][j];
  }
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "GD-CSMA schedules, dependencies matrices and optimizers";

  py::class_<InterferenceGraph>(m, "Graph")
      .def(py::init([](const std::string& family, int n, int k, const std::vector<Edge>& edges) {
             return make_graph(family, n, k, edges);
           }),
           py::arg("family"), py::arg("n"), py::arg("k") = 0, py::arg("edges") = std::vector<Edge>{})
      .def_property_readonly("n", &InterferenceGraph::size)
      .def_property_readonly("degrees", &InterferenceGraph::degrees)
      .def_property_readonly("edges", &InterferenceGraph::edges)
      .def("adjacent", &InterferenceGraph::adjacent);

  m.def("enumerate_schedules",
        [](const InterferenceGraph& g) { return schedules_as_lists(enumerate_schedules(g)); });
  m.def("max_independent_set_size", &max_independent_set_size);
  m.def("min_vertex_cover_size", &min_vertex_cover_size);

  m.def(
      "stationary_distribution",
      [](const InterferenceGraph& g, std::vector<double> lambda) {
        const Distribution pi = stationary_distribution(g, LinkParams::from_fugacity(std::move(lambda)));
        return std::vector<double>(pi.probs().begin(), pi.probs().end());
      },
      py::arg("graph"), py::arg("fugacity"));
  m.def(
      "service_rates",
      [](const InterferenceGraph& g, std::vector<double> lambda) {
        const ScheduleSpace space = enumerate_schedules(g);
        return service_rates(
            stationary_distribution(space, LinkParams::from_fugacity(std::move(lambda))), space);
      },
      py::arg("graph"), py::arg("fugacity"));
  m.def(
      "simulate_occupancy",
      [](const InterferenceGraph& g, std::vector<double> lambda, std::uint64_t horizon,
         std::uint64_t seed) {
        SimulationOptions opt;
        opt.horizon = horizon;
        opt.seed = seed;
        opt.record_windows = false;
        const Trace t = simulate(g, LinkParams::from_fugacity(std::move(lambda)),
                                 ArrivalConfig::saturated_links(g.size()), opt);
        const Distribution d = t.empirical_occupancy();
        return std::vector<double>(d.probs().begin(), d.probs().end());
      },
      py::arg("graph"), py::arg("fugacity"), py::arg("horizon"), py::arg("seed") = 1);

  m.def(
      "dependencies_matrix",
      [](const InterferenceGraph& g, std::vector<double> lambda, bool exact) {
        return rows(dependencies_matrix_analytic(g, LinkParams::from_fugacity(std::move(lambda)),
                                                 exact ? AnalyticMode::kExact
                                                       : AnalyticMode::kClosedForm));
      },
      py::arg("graph"), py::arg("fugacity"), py::arg("exact") = false);
  m.def(
      "empirical_dependencies",
      [](const InterferenceGraph& g, std::vector<double> lambda, std::uint64_t horizon,
         std::uint64_t seed) {
        SimulationOptions opt;
        opt.horizon = horizon;
        opt.seed = seed;
        opt.track_occupancy = false;
        opt.record_windows = false;
        const Trace t = simulate(g, LinkParams::from_fugacity(std::move(lambda)),
                                 ArrivalConfig::saturated_links(g.size()), opt);
        const DependenciesMatrix r = empirical_dependencies(t, g);
        py::dict d;
        d["entries"] = rows(r);
        d["undefined_rows"] = r.undefined_rows();
        return d;
      },
      py::arg("graph"), py::arg("fugacity"), py::arg("horizon"), py::arg("seed") = 1);
  m.def("matrix_norms", [](const std::vector<std::vector<double>>& r) {
    return norms_dict(matrix_norms(matrix_from_rows(r)));
  });

  m.def(
      "capacity_check",
      [](const InterferenceGraph& g, const std::vector<double>& nu) {
        const CapacityResult r = capacity_check(g, nu);
        py::dict d;
        d["feasible"] = r.feasible;
        d["slack"] = r.slack;
        d["time_shares"] = r.time_shares;
        d["certificate"] = r.certificate;
        return d;
      },
      py::arg("graph"), py::arg("nu"));

  m.def(
      "solve_prime",
      [](const InterferenceGraph& g, const std::vector<double>& nu, bool nonnegative) {
        SolveOptions opt;
        opt.constraint = nonnegative ? SignConstraint::kNonnegative : SignConstraint::kFree;
        const SolveReport r = solve_prime(g, nu, opt);
        py::dict d;
        d["solution"] = r.solution;
        d["objective"] = r.objective;
        d["grad_norm"] = r.grad_norm;
        d["converged"] = r.converged;
        d["capacity_feasible"] = r.capacity_feasible;
        d["diagnostic"] = r.diagnostic;
        return d;
      },
      py::arg("graph"), py::arg("nu"), py::arg("nonnegative") = false);
  m.def(
      "verify_duality",
      [](const InterferenceGraph& g, const std::vector<double>& nu) {
        const DualityReport r = verify_duality(g, nu);
        py::dict d;
        d["primal_value"] = r.primal_value;
        d["dual_value"] = r.dual_value;
        d["gap"] = r.gap;
        d["r_star"] = r.r_star;
        d["product_form_error"] = r.product_form_error;
        return d;
      },
      py::arg("graph"), py::arg("nu"));
  m.def(
      "theorem5_run",
      [](const InterferenceGraph& g, const std::vector<double>& nu, std::size_t max_iter) {
        Theorem5Options opt;
        opt.max_iter = max_iter;
        const Theorem5Report r = theorem5_run(g, nu, opt);
        py::dict d;
        d["service_rate_agnostic"] = r.service_rate_agnostic;
        d["iterations"] = r.iterations;
        d["final_zeta"] = r.final_zeta;
        d["sup_norms"] = r.sup_norms;
        d["jensen_constant"] = r.jensen_constant;
        return d;
      },
      py::arg("graph"), py::arg("nu"), py::arg("max_iter") = 10000);

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const std::length_error& e) {
      PyErr_SetString(PyExc_OverflowError, e.what());
    }
  });
}
