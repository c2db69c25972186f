#ifndef GDCSMA_SCENARIO_HPP
#define GDCSMA_SCENARIO_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gdcsma/dependencies.hpp"
#include "gdcsma/graph.hpp"
#include "json.hpp"

namespace gdcsma {

/// Scenario 1: saturated links at a fixed common U, swept over U.
/// Scenario 2: Bernoulli(nu) arrivals, distributed updates with constant alpha0.
/// Scenario 3: as 2 with the time-varying learning rate.
struct ScenarioConfig {
  int scenario = 1;
  std::vector<GraphSpec> graphs;  ///< empty means default_graphs(n)
  int n = 16;
  std::vector<double> sweep;      ///< empty means default_sweep per graph
  std::uint64_t horizon = 1'000'000;
  std::uint64_t window_length = 100;
  double alpha0 = 0.01;
  double initial_U = 0.5;
  std::uint64_t seed = 1;
  double epsilon = 0.0;
  std::string out = ".";
  bool svg = false;
  unsigned jobs = 1;
  std::uint64_t tail_window = 100'000;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
  std::vector<GraphSpec> resolved_graphs() const;
};

/// Star, cycle, circulant k = 6, 8, 10 and complete, all on n links.
std::vector<GraphSpec> default_graphs(int n);

/// Scenario 1: U = 0.05, 0.15, ..., 0.95. Scenarios 2 and 3: ten evenly spaced
/// nu from 0.01 to 0.9 times the graph's symmetric capacity.
std::vector<double> default_sweep(int scenario, const InterferenceGraph& g);

/// Field names match ScenarioConfig members. Graphs are either family strings
/// ("star", "circulant-k6") or objects {family, n, k, edges}. Fields absent from
/// the document keep their value in `base`.
ScenarioConfig scenario_config_from_json(const nlohmann::json& doc, ScenarioConfig base = {});
nlohmann::json to_json(const ScenarioConfig& config);

/// Accepts "star", "cycle", "complete", "circulant-k6" and the full label form
/// "circulant-k6-n16"; n defaults to `n` when not part of the text.
GraphSpec parse_graph_spec(const std::string& text, int n);

struct SweepRow {
  int scenario = 0;
  std::string graph;
  int n = 0;
  std::optional<int> k;
  std::string sweep_param;
  double sweep_value = 0.0;
  MatrixNorms empirical;
  MatrixNorms analytic;
  std::vector<std::string> flags;  ///< "infeasible_nu", "undefined_rows", "error:<what>"
};

struct SweepResult {
  std::vector<SweepRow> rows;       ///< lifetime-average empirical matrices
  std::vector<SweepRow> tail_rows;  ///< scenarios 2 and 3: last tail_window slots
  bool has_failures() const;
};

/// Cells run on up to config.jobs threads; row order is graph-major and
/// independent of the thread count.
SweepResult run_scenario(const ScenarioConfig& config);

/// Header plus one row per cell; doubles with 12 significant digits.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

/// Line chart of empirical (solid) and analytic (dashed) norm-1 against the
/// sweep value, one series per graph.
void write_sweep_svg(std::ostream& out, std::span<const SweepRow> rows, const std::string& title);

/// Writes scenario<S>.csv, scenario<S>_tail.csv (scenarios 2, 3) and
/// scenario<S>.svg (when config.svg) under config.out; returns the paths.
std::vector<std::string> write_scenario_outputs(const ScenarioConfig& config,
                                                const SweepResult& result);

}  // namespace gdcsma

#endif  // GDCSMA_SCENARIO_HPP
