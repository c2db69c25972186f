#include "gdcsma/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "gdcsma/capacity.hpp"
#include "gdcsma/dynamics.hpp"
#include "gdcsma/format.hpp"
#include "gdcsma/optimize.hpp"
#include "gdcsma/rng.hpp"

namespace gdcsma {

namespace {

constexpr int kSweepPoints = 10;

struct Cell {
  std::size_t graph = 0;
  double value = 0.0;
};

GraphSpec graph_spec_from_json(const nlohmann::json& j, int n) {
  if (j.is_string()) return parse_graph_spec(j.get<std::string>(), n);
  if (!j.is_object()) throw std::invalid_argument("graph entries must be strings or objects");
  GraphSpec spec;
  spec.family = parse_family(j.at("family").get<std::string>());
  spec.n = j.value("n", n);
  spec.k = j.value("k", 0);
  if (j.contains("edges")) {
    for (const auto& e : j.at("edges")) spec.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  }
  return spec;
}

struct CellResult {
  SweepRow lifetime;
  std::optional<SweepRow> tail;
};

SweepRow blank_row(const ScenarioConfig& config, const GraphSpec& spec, int n, double value) {
  SweepRow row;
  row.scenario = config.scenario;
  row.graph = spec.label();
  row.n = n;
  if (spec.family == GraphFamily::kCirculant) row.k = spec.k;
  row.sweep_param = config.scenario == 1 ? "U" : "nu";
  row.sweep_value = value;
  return row;
}

CellResult run_cell(const ScenarioConfig& config, const GraphSpec& spec, const InterferenceGraph& g,
                    std::size_t index, double value) {
  SweepRow row = blank_row(config, spec, g.size(), value);

  SimulationOptions sim;
  sim.horizon = config.horizon;
  sim.window_length = config.window_length;
  sim.seed = derive_stream_seed(config.seed, "scenario=" + std::to_string(config.scenario) +
                                                 ";graph=" + row.graph +
                                                 ";index=" + std::to_string(index));
  sim.track_occupancy = false;
  sim.record_windows = false;

  const int n = g.size();
  if (config.scenario == 1) {
    const LinkParams params = LinkParams::uniform_strategy(n, value);
    const Trace trace = simulate(g, params, ArrivalConfig::saturated_links(n), sim);
    const DependenciesMatrix emp = empirical_dependencies(trace, g);
    if (emp.has_undefined_rows()) row.flags.emplace_back("undefined_rows");
    row.empirical = matrix_norms(emp);
    row.analytic = matrix_norms(dependencies_matrix_analytic(g, params));
    return {std::move(row), std::nullopt};
  }

  const std::vector<double> nu(static_cast<std::size_t>(n), value);
  if (!capacity_check(g, nu).feasible) row.flags.emplace_back("infeasible_nu");
  sim.tail_slots = config.tail_window;
  const LearningRateSchedule schedule = config.scenario == 2
                                            ? LearningRateSchedule::constant(config.alpha0)
                                            : LearningRateSchedule::time_varying();
  const Trace trace = simulate(g, LinkParams::uniform_strategy(n, config.initial_U),
                               ArrivalConfig::bernoulli(nu), sim, distributed_policy(schedule));
  row.analytic =
      matrix_norms(dependencies_matrix_analytic(g, LinkParams::from_log_fugacity(trace.final_r)));
  SweepRow tail = row;
  const DependenciesMatrix emp = empirical_dependencies(trace, g);
  if (emp.has_undefined_rows()) row.flags.emplace_back("undefined_rows");
  row.empirical = matrix_norms(emp);
  const DependenciesMatrix emp_tail = empirical_dependencies(trace, g, true);
  if (emp_tail.has_undefined_rows()) tail.flags.emplace_back("undefined_rows");
  tail.empirical = matrix_norms(emp_tail);
  return {std::move(row), std::move(tail)};
}

std::string csv_bool(bool v) { return v ? "1" : "0"; }

}  // namespace

void ScenarioConfig::validate() const {
  if (scenario < 1 || scenario > 3) throw std::invalid_argument("scenario must be 1, 2 or 3");
  if (n < 1 || n > kMaxLinks) throw std::invalid_argument("n must be in [1, 32]");
  for (const double v : sweep) {
    if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("sweep values must lie in (0, 1)");
  }
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (window_length < 1) throw std::invalid_argument("window_length must be at least 1");
  if (!(alpha0 > 0.0)) throw std::invalid_argument("alpha0 must be positive");
  if (!(initial_U > 0.0 && initial_U < 1.0)) throw std::invalid_argument("initial_U must lie in (0, 1)");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1)");
  if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");
  for (const GraphSpec& spec : resolved_graphs()) (void)build_graph(spec);
}

std::vector<GraphSpec> ScenarioConfig::resolved_graphs() const {
  return graphs.empty() ? default_graphs(n) : graphs;
}

std::vector<GraphSpec> default_graphs(int n) {
  std::vector<GraphSpec> out;
  out.push_back({GraphFamily::kStar, n, 0, {}});
  out.push_back({GraphFamily::kCycle, n, 0, {}});
  for (const int k : {6, 8, 10}) out.push_back({GraphFamily::kCirculant, n, k, {}});
  out.push_back({GraphFamily::kComplete, n, 0, {}});
  return out;
}

std::vector<double> default_sweep(int scenario, const InterferenceGraph& g) {
  std::vector<double> out;
  if (scenario == 1) {
    for (int k = 0; k < kSweepPoints; ++k) out.push_back(0.05 + 0.1 * k);
    return out;
  }
  const double top = 0.9 * symmetric_capacity(g);
  constexpr double kBottom = 0.01;
  for (int k = 0; k < kSweepPoints; ++k) {
    out.push_back(kBottom + (top - kBottom) * k / (kSweepPoints - 1));
  }
  return out;
}

GraphSpec parse_graph_spec(const std::string& text, int n) {
  GraphSpec spec;
  spec.n = n;
  std::size_t pos = 0;
  std::string rest = text;
  const std::size_t dash = rest.find('-');
  spec.family = parse_family(rest.substr(0, dash));
  rest = dash == std::string::npos ? "" : rest.substr(dash + 1);
  while (!rest.empty()) {
    const std::size_t next = rest.find('-');
    const std::string part = rest.substr(0, next);
    rest = next == std::string::npos ? "" : rest.substr(next + 1);
    if (part.size() < 2 || (part[0] != 'k' && part[0] != 'n')) {
      throw std::invalid_argument("bad graph tag '" + text + "'");
    }
    const int value = std::stoi(part.substr(1), &pos);
    if (pos != part.size() - 1) throw std::invalid_argument("bad graph tag '" + text + "'");
    (part[0] == 'k' ? spec.k : spec.n) = value;
  }
  return spec;
}

ScenarioConfig scenario_config_from_json(const nlohmann::json& doc, ScenarioConfig base) {
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  static const std::vector<std::string> known = {
      "scenario", "graphs",  "n",   "sweep", "horizon", "window_length", "alpha0",
      "initial_U", "seed",   "epsilon", "out", "svg", "jobs", "tail_window"};
  for (const auto& [key, _] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument("unknown config field '" + key + "'");
    }
  }
  try {
    base.scenario = doc.value("scenario", base.scenario);
    base.n = doc.value("n", base.n);
    if (doc.contains("graphs")) {
      base.graphs.clear();
      for (const auto& g : doc.at("graphs")) base.graphs.push_back(graph_spec_from_json(g, base.n));
    }
    if (doc.contains("sweep")) base.sweep = doc.at("sweep").get<std::vector<double>>();
    base.horizon = doc.value("horizon", base.horizon);
    base.window_length = doc.value("window_length", base.window_length);
    base.alpha0 = doc.value("alpha0", base.alpha0);
    base.initial_U = doc.value("initial_U", base.initial_U);
    base.seed = doc.value("seed", base.seed);
    base.epsilon = doc.value("epsilon", base.epsilon);
    base.out = doc.value("out", base.out);
    base.svg = doc.value("svg", base.svg);
    base.jobs = doc.value("jobs", base.jobs);
    base.tail_window = doc.value("tail_window", base.tail_window);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return base;
}

nlohmann::json to_json(const ScenarioConfig& config) {
  nlohmann::json graphs = nlohmann::json::array();
  for (const GraphSpec& spec : config.resolved_graphs()) {
    nlohmann::json g = {{"family", std::string(to_string(spec.family))}, {"n", spec.n}};
    if (spec.family == GraphFamily::kCirculant) g["k"] = spec.k;
    if (spec.family == GraphFamily::kExplicit) {
      nlohmann::json edges = nlohmann::json::array();
      for (const auto& [a, b] : spec.edges) edges.push_back({a, b});
      g["edges"] = std::move(edges);
    }
    graphs.push_back(std::move(g));
  }
  return {{"scenario", config.scenario}, {"graphs", std::move(graphs)},
          {"n", config.n},               {"sweep", config.sweep},
          {"horizon", config.horizon},   {"window_length", config.window_length},
          {"alpha0", config.alpha0},     {"initial_U", config.initial_U},
          {"seed", config.seed},         {"epsilon", config.epsilon},
          {"out", config.out},           {"svg", config.svg},
          {"jobs", config.jobs},         {"tail_window", config.tail_window}};
}

bool SweepResult::has_failures() const {
  const auto flagged = [](const SweepRow& r) { return !r.flags.empty(); };
  return std::any_of(rows.begin(), rows.end(), flagged);
}

SweepResult run_scenario(const ScenarioConfig& config) {
  config.validate();
  const std::vector<GraphSpec> specs = config.resolved_graphs();
  std::vector<InterferenceGraph> graphs;
  std::vector<std::vector<double>> sweeps;
  std::vector<Cell> cells;
  std::vector<std::size_t> index_in_graph;
  for (std::size_t gi = 0; gi < specs.size(); ++gi) {
    graphs.push_back(build_graph(specs[gi]));
    sweeps.push_back(config.sweep.empty() ? default_sweep(config.scenario, graphs.back())
                                          : config.sweep);
    for (std::size_t k = 0; k < sweeps.back().size(); ++k) {
      cells.push_back({gi, sweeps.back()[k]});
      index_in_graph.push_back(k);
    }
  }

  SweepResult result;
  result.rows.resize(cells.size());
  if (config.scenario != 1) result.tail_rows.resize(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < cells.size(); c = next++) {
      const Cell& cell = cells[c];
      const GraphSpec& spec = specs[cell.graph];
      const InterferenceGraph& g = graphs[cell.graph];
      try {
        CellResult out = run_cell(config, spec, g, index_in_graph[c], cell.value);
        result.rows[c] = std::move(out.lifetime);
        if (out.tail) result.tail_rows[c] = std::move(*out.tail);
      } catch (const std::exception& e) {
        SweepRow row = blank_row(config, spec, g.size(), cell.value);
        row.flags.push_back(std::string("error:") + e.what());
        result.rows[c] = row;
        if (config.scenario != 1) result.tail_rows[c] = std::move(row);
      }
    }
  };
  const unsigned threads = std::min<unsigned>(config.jobs, static_cast<unsigned>(cells.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return result;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "scenario,graph,n,k,sweep_param,sweep_value,norm1_emp,norminf_emp,spectral_emp,"
         "norm1_analytic,dobrushin,flags\n";
  for (const SweepRow& r : rows) {
    std::string flags;
    for (const std::string& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
    if (flags.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (const char ch : flags) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      flags = quoted + "\"";
    }
    out << r.scenario << ',' << r.graph << ',' << r.n << ','
        << (r.k ? std::to_string(*r.k) : std::string()) << ',' << r.sweep_param << ','
        << format_double(r.sweep_value) << ',' << format_double(r.empirical.norm1) << ','
        << format_double(r.empirical.norm_inf) << ',' << format_double(r.empirical.spectral)
        << ',' << format_double(r.analytic.norm1) << ',' << csv_bool(r.analytic.dobrushin) << ','
        << flags << '\n';
  }
}

std::vector<std::string> write_scenario_outputs(const ScenarioConfig& config,
                                                const SweepResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(config.out);
  const std::string stem = "scenario" + std::to_string(config.scenario);
  std::vector<std::string> paths;
  auto open = [&](const std::string& name) {
    const fs::path path = fs::path(config.out) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    paths.push_back(path.string());
    return f;
  };
  {
    std::ofstream f = open(stem + ".csv");
    write_sweep_csv(f, result.rows);
  }
  if (!result.tail_rows.empty()) {
    std::ofstream f = open(stem + "_tail.csv");
    write_sweep_csv(f, result.tail_rows);
  }
  if (config.svg) {
    std::ofstream f = open(stem + ".svg");
    write_sweep_svg(f, result.rows, "Scenario " + std::to_string(config.scenario));
  }
  return paths;
}

}  // namespace gdcsma
