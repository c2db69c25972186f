#include "gdcsma/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "gdcsma/capacity.hpp"
#include "gdcsma/dependencies.hpp"
#include "gdcsma/dynamics.hpp"
#include "gdcsma/format.hpp"
#include "gdcsma/graph.hpp"
#include "gdcsma/optimize.hpp"
#include "gdcsma/scenario.hpp"

namespace gdcsma {

namespace {

namespace fs = std::filesystem;

struct GraphArgs {
  std::string graph = "star";
  int n = 16;
  int k = 0;
  std::string edge_list;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--graph", graph, "star | cycle | circulant | complete, or a tag like circulant-k6");
    cmd.add_option("-n", n, "number of links");
    cmd.add_option("--k", k, "circulant degree (even)");
    cmd.add_option("--edge-list", edge_list, "edge-list file; overrides --graph");
  }

  InterferenceGraph build(std::string* label = nullptr) const {
    if (!edge_list.empty()) {
      if (label) *label = fs::path(edge_list).stem().string();
      return load_edge_list(edge_list);
    }
    GraphSpec spec = parse_graph_spec(graph, n);
    if (k != 0) spec.k = k;
    if (label) *label = spec.label();
    return build_graph(spec);
  }
};

/// One value broadcast to every link, or exactly n values.
std::vector<double> per_link(const std::string& text, int n, const char* what) {
  std::vector<double> values = parse_double_list(text);
  if (values.size() == 1) return std::vector<double>(static_cast<std::size_t>(n), values.front());
  if (values.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument(std::string(what) + ": expected 1 or " + std::to_string(n) +
                                " values, got " + std::to_string(values.size()));
  }
  return values;
}

std::string braces(Schedule x) { return "{" + to_string(x) + "}"; }

std::ofstream open_output(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

// -- graph-info ---------------------------------------------------------------

int cmd_graph_info(const GraphArgs& ga, bool as_json, std::ostream& out) {
  std::string label;
  const InterferenceGraph g = ga.build(&label);
  nlohmann::json doc = {
      {"graph", label},
      {"n", g.size()},
      {"edges", g.edge_count()},
      {"degrees", g.degrees()},
      {"max_degree", g.max_degree()},
      {"mis", max_independent_set_size(g)},
      {"mvc", min_vertex_cover_size(g)},
      {"jensen_constant", jensen_constant(g)},
      {"log2_n", std::log2(static_cast<double>(g.size()))},
  };
  try {
    doc["schedules"] = enumerate_schedules(g).size();
  } catch (const std::length_error&) {
    doc["schedules"] = nullptr;
  }
  if (as_json) {
    out << doc.dump(2) << '\n';
    return kExitOk;
  }
  for (const char* key : {"graph", "n", "edges", "max_degree", "schedules", "mis", "mvc",
                          "jensen_constant", "log2_n"}) {
    const auto& v = doc[key];
    out << key << ": ";
    if (v.is_number_float()) {
      out << format_double(v.get<double>());
    } else if (v.is_string()) {
      out << v.get<std::string>();
    } else if (v.is_null()) {
      out << "too many to enumerate";
    } else {
      out << v.dump();
    }
    out << '\n';
  }
  out << "degrees:";
  for (const int d : g.degrees()) out << ' ' << d;
  out << '\n';
  return kExitOk;
}

// -- stationary ---------------------------------------------------------------

int cmd_stationary(const GraphArgs& ga, const std::string& lambda, const std::string& out_dir,
                   std::ostream& out) {
  const InterferenceGraph g = ga.build();
  const LinkParams params = LinkParams::from_fugacity(per_link(lambda, g.size(), "--lambda"));
  const ScheduleSpace space = enumerate_schedules(g);
  const Distribution pi = stationary_distribution(space, params);
  const std::vector<double> s = service_rates(pi, space);

  auto write_pi = [&](std::ostream& os) {
    os << "schedule,probability\n";
    for (std::size_t k = 0; k < space.size(); ++k) {
      os << braces(space[k]) << ',' << format_double(pi[k]) << '\n';
    }
  };
  auto write_s = [&](std::ostream& os) {
    os << "link,service_rate\n";
    for (std::size_t i = 0; i < s.size(); ++i) os << i << ',' << format_double(s[i]) << '\n';
  };
  write_pi(out);
  out << '\n';
  write_s(out);
  if (!out_dir.empty()) {
    auto f1 = open_output(out_dir, "stationary.csv");
    write_pi(f1);
    auto f2 = open_output(out_dir, "service_rates.csv");
    write_s(f2);
  }
  return kExitOk;
}

// -- depmatrix ----------------------------------------------------------------

struct DepArgs {
  std::string lambda = "1";
  std::string mode = "analytic";
  std::uint64_t horizon = 1'000'000;
  std::uint64_t window = 100;
  std::uint64_t seed = 1;
  std::uint64_t tail = 0;
  std::string trace_out;
  std::string out_dir;
  bool json = false;
};

int cmd_depmatrix(const GraphArgs& ga, const DepArgs& a, std::ostream& out, std::ostream& err) {
  const InterferenceGraph g = ga.build();
  const LinkParams params = LinkParams::from_fugacity(per_link(a.lambda, g.size(), "--lambda"));
  std::optional<DependenciesMatrix> m;
  if (a.mode == "analytic") {
    m = dependencies_matrix_analytic(g, params, AnalyticMode::kClosedForm);
  } else if (a.mode == "exact") {
    m = dependencies_matrix_analytic(g, params, AnalyticMode::kExact);
  } else if (a.mode == "empirical") {
    Trace trace = Trace::empty(g.size());
    if (a.horizon > 0) {
      SimulationOptions sim;
      sim.horizon = a.horizon;
      sim.window_length = a.window;
      sim.seed = a.seed;
      sim.tail_slots = a.tail;
      sim.track_occupancy = false;
      sim.record_windows = !a.trace_out.empty();
      trace = simulate(g, params, ArrivalConfig::saturated_links(g.size()), sim);
    }
    if (!a.trace_out.empty()) {
      std::ofstream f(a.trace_out, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + a.trace_out);
      write_trace_csv(f, trace);
    }
    m = empirical_dependencies(trace, g, a.tail > 0);
  } else {
    throw std::invalid_argument("--mode must be analytic, exact or empirical");
  }

  if (a.json) {
    out << to_json(*m).dump(2) << '\n';
  } else {
    write_matrix_csv(out, *m);
    const MatrixNorms norms = matrix_norms(*m);
    out << "\nnorm1,norm_inf,spectral,dobrushin\n"
        << format_double(norms.norm1) << ',' << format_double(norms.norm_inf) << ','
        << format_double(norms.spectral) << ',' << (norms.dobrushin ? 1 : 0) << '\n';
  }
  if (!a.out_dir.empty()) {
    auto f = open_output(a.out_dir, "depmatrix.csv");
    write_matrix_csv(f, *m);
    auto j = open_output(a.out_dir, "depmatrix.json");
    j << to_json(*m).dump(2) << '\n';
  }
  if (m->has_undefined_rows()) {
    err << "warning: rows with no conditioning slots are undefined:";
    for (int i = 0; i < m->size(); ++i) {
      if (m->undefined_rows()[static_cast<std::size_t>(i)]) err << ' ' << i;
    }
    err << '\n';
    return kExitCellFailures;
  }
  return kExitOk;
}

// -- optimize -----------------------------------------------------------------

struct OptArgs {
  std::string nu;
  std::string solver = "prime";
  std::string mode = "exact";
  std::string constraint = "free";
  std::string rate = "constant";
  double alpha = 0.01;
  double epsilon = 0.0;
  std::uint64_t horizon = 1'000'000;
  std::uint64_t window = 100;
  std::uint64_t seed = 1;
  std::size_t max_iter = 0;
  std::string delta_rule = "descending";
  std::string out_dir;
};

SignConstraint parse_constraint(const std::string& s) {
  if (s == "free") return SignConstraint::kFree;
  if (s == "nonneg") return SignConstraint::kNonnegative;
  throw std::invalid_argument("--constraint must be free or nonneg");
}

int cmd_optimize(const GraphArgs& ga, const OptArgs& a, std::ostream& out) {
  const InterferenceGraph g = ga.build();
  const std::vector<double> nu = per_link(a.nu, g.size(), "--nu");
  nlohmann::json doc = {{"solver", a.solver}, {"nu", nu}};

  if (a.solver == "prime") {
    SolveOptions opt;
    opt.constraint = parse_constraint(a.constraint);
    opt.keep_trajectory = !a.out_dir.empty();
    opt.seed = a.seed;
    opt.window_length = a.window;
    if (a.mode == "exact") {
      opt.mode = SolveMode::kExact;
      if (a.max_iter > 0) opt.max_iter = a.max_iter;
    } else if (a.mode == "simulated") {
      opt.mode = SolveMode::kSimulated;
      opt.tol = 1e-2;
      opt.max_iter = a.max_iter > 0 ? a.max_iter : static_cast<std::size_t>(a.horizon / a.window);
      if (a.rate == "constant") {
        opt.schedule = LearningRateSchedule::constant(a.alpha);
      } else if (a.rate == "timevar") {
        opt.schedule = LearningRateSchedule::time_varying();
      } else {
        throw std::invalid_argument("--rate must be constant or timevar");
      }
    } else {
      throw std::invalid_argument("--mode must be exact or simulated");
    }
    const SolveReport rep = solve_prime(g, nu, opt);
    if (!rep.capacity_feasible && opt.mode == SolveMode::kExact) {
      throw std::invalid_argument(rep.diagnostic);
    }
    doc["report"] = to_json(rep);
    std::vector<double> lambda;
    for (const double r : rep.solution) lambda.push_back(std::exp(r));
    doc["lambda"] = lambda;
    if (!a.out_dir.empty()) {
      auto f = open_output(a.out_dir, "trajectory.csv");
      write_trajectory_csv(f, rep);
    }
  } else if (a.solver == "dual") {
    const DualityReport rep = verify_duality(g, nu, parse_constraint(a.constraint));
    doc["primal_value"] = rep.primal_value;
    doc["dual_value"] = rep.dual_value;
    doc["duality_gap"] = rep.gap;
    doc["r_star"] = rep.r_star;
    doc["constraint_residuals"] = rep.constraint_residuals;
    doc["complementary_slackness"] = rep.complementary_slackness;
    doc["product_form_error"] = rep.product_form_error;
    doc["converged"] = rep.primal_converged && rep.dual_converged;
  } else if (a.solver == "constrained") {
    ConstrainedDualOptions opt;
    opt.epsilon = a.epsilon;
    const SolveReport rep = solve_constrained_dual(g, nu, opt);
    doc["report"] = to_json(rep);
  } else if (a.solver == "theorem5") {
    Theorem5Options opt;
    opt.epsilon = a.epsilon;
    if (a.max_iter > 0) opt.max_iter = a.max_iter;
    if (a.delta_rule == "any") {
      opt.update.rule = DeltaRule::kAnyRoot;
    } else if (a.delta_rule != "descending") {
      throw std::invalid_argument("--delta-rule must be descending or any");
    }
    const Theorem5Report rep = theorem5_run(g, nu, opt);
    doc["report"] = to_json(rep);
    doc["verdict"] = rep.service_rate_agnostic;
    if (!a.out_dir.empty()) {
      auto f = open_output(a.out_dir, "theorem5_trajectory.csv");
      f << "iter,sup_norm,dual_value,link,zeta\n";
      for (std::size_t t = 0; t < rep.trajectory.size(); ++t) {
        for (std::size_t i = 0; i < rep.trajectory[t].size(); ++i) {
          f << t << ',' << format_double(rep.sup_norms[t]) << ','
            << format_double(rep.dual_values[t]) << ',' << i << ','
            << format_double(rep.trajectory[t][i]) << '\n';
        }
      }
    }
  } else {
    throw std::invalid_argument("--solver must be prime, dual, constrained or theorem5");
  }
  out << doc.dump(2) << '\n';
  if (!a.out_dir.empty()) {
    auto f = open_output(a.out_dir, "optimize.json");
    f << doc.dump(2) << '\n';
  }
  return kExitOk;
}

// -- capacity -----------------------------------------------------------------

int cmd_capacity(const GraphArgs& ga, const std::string& nu_text, std::ostream& out) {
  const InterferenceGraph g = ga.build();
  const ScheduleSpace space = enumerate_schedules(g);
  nlohmann::json doc;
  if (!nu_text.empty()) {
    const std::vector<double> nu = per_link(nu_text, g.size(), "--nu");
    for (const double v : nu) {
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("--nu entries must lie in [0, 1]");
    }
    const CapacityResult res = capacity_check(space, nu);
    doc["nu"] = nu;
    doc["feasible"] = res.feasible;
    doc["slack"] = res.slack;
    doc["certificate"] = res.certificate;
    nlohmann::json mix = nlohmann::json::array();
    for (std::size_t k = 0; k < space.size(); ++k) {
      if (res.time_shares[k] > 1e-12) {
        mix.push_back({{"schedule", braces(space[k])}, {"share", res.time_shares[k]}});
      }
    }
    doc["time_shares"] = std::move(mix);
  }
  const std::vector<double> zero(static_cast<std::size_t>(g.size()), 0.0);
  doc["symmetric_capacity"] = capacity_check(space, zero).slack;
  out << doc.dump(2) << '\n';
  return kExitOk;
}

// -- scenario -----------------------------------------------------------------

struct ScenarioArgs {
  std::string config;
  int scenario = 1;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::string out = ".";
  bool svg = false;
  std::uint64_t horizon = 1'000'000;
  int n = 16;
  std::vector<std::string> graphs;
  std::string sweep;
};

int cmd_scenario(CLI::App& cmd, const ScenarioArgs& a, std::ostream& out, std::ostream& err) {
  ScenarioConfig config;
  if (!a.config.empty()) {
    std::ifstream f(a.config);
    if (!f) throw std::invalid_argument("cannot read config " + a.config);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    config = scenario_config_from_json(doc);
  }
  auto given = [&](const char* name) { return cmd.get_option(name)->count() > 0; };
  if (given("--scenario")) config.scenario = a.scenario;
  if (given("--seed")) config.seed = a.seed;
  if (given("--jobs")) config.jobs = a.jobs;
  if (given("--out")) config.out = a.out;
  if (given("--svg")) config.svg = a.svg;
  if (given("--horizon")) config.horizon = a.horizon;
  if (given("-n")) {
    config.n = a.n;
    for (GraphSpec& spec : config.graphs) spec.n = a.n;
  }
  if (given("--graphs")) {
    config.graphs.clear();
    for (const std::string& s : a.graphs) config.graphs.push_back(parse_graph_spec(s, config.n));
  }
  if (given("--sweep")) config.sweep = parse_double_list(a.sweep);
  config.validate();

  const SweepResult result = run_scenario(config);
  for (const std::string& path : write_scenario_outputs(config, result)) out << path << '\n';
  std::size_t flagged = 0;
  for (const SweepRow& r : result.rows) flagged += r.flags.empty() ? 0 : 1;
  if (flagged > 0) {
    err << flagged << " of " << result.rows.size() << " cells carry flags\n";
    return kExitCellFailures;
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"GD-CSMA analysis: schedules, dependencies matrices, optimizers and sweeps"};
  app.name("gdcsma");
  app.require_subcommand(1);

  GraphArgs info_graph;
  bool info_json = false;
  CLI::App* info = app.add_subcommand("graph-info", "Degrees, schedule count, MIS, MVC and C");
  info_graph.add_to(*info);
  info->add_flag("--json", info_json, "print JSON");

  GraphArgs stat_graph;
  std::string stat_lambda = "1";
  std::string stat_out;
  CLI::App* stat = app.add_subcommand("stationary", "Product-form stationary law and service rates");
  stat_graph.add_to(*stat);
  stat->add_option("--lambda", stat_lambda, "fugacity, one value or one per link");
  stat->add_option("--out", stat_out, "also write CSV files into this directory");

  GraphArgs dep_graph;
  DepArgs dep;
  CLI::App* depm = app.add_subcommand("depmatrix", "Dependencies matrix and its norms");
  dep_graph.add_to(*depm);
  depm->add_option("--lambda", dep.lambda, "fugacity, one value or one per link");
  depm->add_option("--mode", dep.mode, "analytic | exact | empirical");
  depm->add_option("--horizon", dep.horizon, "slots (empirical)");
  depm->add_option("--window", dep.window, "window length (empirical)");
  depm->add_option("--seed", dep.seed, "RNG seed (empirical)");
  depm->add_option("--tail", dep.tail, "restrict counts to the last slots (empirical)");
  depm->add_option("--trace-out", dep.trace_out, "write the windowed trace CSV (empirical)");
  depm->add_option("--out", dep.out_dir, "also write CSV and JSON into this directory");
  depm->add_flag("--json", dep.json, "print JSON instead of CSV");

  GraphArgs opt_graph;
  OptArgs opt;
  CLI::App* optc = app.add_subcommand("optimize", "Primal, dual, constrained dual and ζ-update solvers");
  opt_graph.add_to(*optc);
  optc->add_option("--nu", opt.nu, "arrival rates, one value or one per link")->required();
  optc->add_option("--solver", opt.solver, "prime | dual | constrained | theorem5");
  optc->add_option("--mode", opt.mode, "exact | simulated (prime)");
  optc->add_option("--constraint", opt.constraint, "free | nonneg (prime, dual)");
  optc->add_option("--rate", opt.rate, "constant | timevar (simulated)");
  optc->add_option("--alpha", opt.alpha, "constant learning rate (simulated)");
  optc->add_option("--epsilon", opt.epsilon, "complexity slack (constrained, theorem5)");
  optc->add_option("--horizon", opt.horizon, "slots (simulated)");
  optc->add_option("--window", opt.window, "window length (simulated)");
  optc->add_option("--seed", opt.seed, "RNG seed (simulated)");
  optc->add_option("--max-iter", opt.max_iter, "iteration limit");
  optc->add_option("--delta-rule", opt.delta_rule, "descending | any (theorem5)");
  optc->add_option("--out", opt.out_dir, "write trajectory CSV and JSON summary here");

  GraphArgs cap_graph;
  std::string cap_nu;
  CLI::App* cap = app.add_subcommand("capacity", "Capacity-region membership by linear programming");
  cap_graph.add_to(*cap);
  cap->add_option("--nu", cap_nu, "arrival rates, one value or one per link");

  ScenarioArgs sc;
  CLI::App* scen = app.add_subcommand("scenario", "Seeded parameter sweeps over graph families");
  scen->add_option("--config", sc.config, "JSON file with ScenarioConfig fields");
  scen->add_option("--scenario", sc.scenario, "1, 2 or 3");
  scen->add_option("--seed", sc.seed, "base seed");
  scen->add_option("--jobs", sc.jobs, "concurrent cells");
  scen->add_option("--out", sc.out, "output directory");
  scen->add_flag("--svg", sc.svg, "also write an SVG chart");
  scen->add_option("--horizon", sc.horizon, "slots per cell");
  scen->add_option("-n", sc.n, "links per graph");
  scen->add_option("--graphs", sc.graphs, "graph tags, e.g. star circulant-k6");
  scen->add_option("--sweep", sc.sweep, "comma-separated sweep values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    if (*info) return cmd_graph_info(info_graph, info_json, out);
    if (*stat) return cmd_stationary(stat_graph, stat_lambda, stat_out, out);
    if (*depm) return cmd_depmatrix(dep_graph, dep, out, err);
    if (*optc) return cmd_optimize(opt_graph, opt, out);
    if (*cap) return cmd_capacity(cap_graph, cap_nu, out);
    if (*scen) return cmd_scenario(*scen, sc, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }
  return kExitInvalidInput;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("gdcsma");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& s : storage) argv.push_back(s.data());
  argv.push_back(nullptr);
  return run_cli(static_cast<int>(storage.size()), argv.data(), out, err);
}

}  // namespace gdcsma
