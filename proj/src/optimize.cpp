#include "gdcsma/optimize.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "gdcsma/capacity.hpp"
#include "gdcsma/dependencies.hpp"
#include "gdcsma/format.hpp"

namespace gdcsma {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kDivergenceBound = 500.0;
constexpr int kMaxBacktracks = 60;

void check_rates(std::span<const double> nu, int n, const char* what) {
  if (nu.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(n) +
                                " entries, got " + std::to_string(nu.size()));
  }
  for (const double v : nu) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument(std::string(what) + ": entries must lie in [0, 1]");
    }
  }
}

void check_size(std::span<const double> v, std::size_t n, const char* what) {
  if (v.size() != n) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(n) +
                                " entries, got " + std::to_string(v.size()));
  }
}

/// Second moments of x under p: out(i,j) = E[x_i x_j] - s_i s_j.
Eigen::MatrixXd covariance(const ScheduleSpace& space, const Distribution& p,
                           std::span<const double> s) {
  const int n = space.links();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> on;
  on.reserve(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < space.size(); ++k) {
    const double w = p[k];
    if (w == 0.0) continue;
    on.clear();
    for (int i = 0; i < n; ++i) {
      if (space[k].transmits(i)) on.push_back(i);
    }
    for (const int i : on) {
      for (const int j : on) m(i, j) += w;
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m(i, j) -= s[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(j)];
    }
  }
  return m;
}

struct Derivatives {
  double value = 0.0;
  std::vector<double> grad;
  Eigen::MatrixXd neg_hessian;  // positive semidefinite
};

using ValueFn = std::function<double(std::span<const double>)>;
using DerivFn = std::function<Derivatives(std::span<const double>)>;

double projected_norm(std::span<const double> x, std::span<const double> g, bool nonneg) {
  double out = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool blocked = nonneg && x[i] <= 0.0 && g[i] < 0.0;
    if (!blocked) out = std::max(out, std::abs(g[i]));
  }
  return out;
}

/// Maximizes a smooth concave function, optionally over the nonnegative
/// orthant, by Newton steps on the free coordinates with projected Armijo
/// backtracking.
SolveReport projected_newton(const ValueFn& value, const DerivFn& derivs, std::vector<double> x,
                             bool nonneg, double tol, std::size_t max_iter, bool keep) {
  const std::size_t n = x.size();
  if (nonneg) {
    for (double& v : x) v = std::max(v, 0.0);
  }
  SolveReport report;
  for (std::size_t it = 0;; ++it) {
    const Derivatives d = derivs(x);
    const double gnorm = projected_norm(x, d.grad, nonneg);
    report.iterations = it;
    report.objective = d.value;
    report.grad_norm = gnorm;
    if (keep) report.trajectory.push_back({it, d.value, gnorm, x});
    if (gnorm <= tol) {
      report.converged = true;
      break;
    }
    if (it == max_iter) {
      report.diagnostic = "iteration limit reached";
      break;
    }
    const double xmax = x.empty() ? 0.0 : std::abs(*std::max_element(
                                              x.begin(), x.end(), [](double a, double b) {
                                                return std::abs(a) < std::abs(b);
                                              }));
    if (!std::isfinite(d.value) || xmax > kDivergenceBound) {
      report.diagnostic = "iterates diverged";
      break;
    }

    std::vector<int> free;
    for (std::size_t i = 0; i < n; ++i) {
      if (!nonneg || x[i] > 0.0 || d.grad[i] > 0.0) free.push_back(static_cast<int>(i));
    }
    const auto nf = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd h(nf, nf);
    Eigen::VectorXd gf(nf);
    for (Eigen::Index a = 0; a < nf; ++a) {
      gf(a) = d.grad[static_cast<std::size_t>(free[static_cast<std::size_t>(a)])];
      for (Eigen::Index b = 0; b < nf; ++b) {
        h(a, b) = d.neg_hessian(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(b)]);
      }
    }
    h.diagonal().array() += 1e-12 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
    Eigen::VectorXd step = h.ldlt().solve(gf);
    if (!step.allFinite() || step.dot(gf) <= 0.0) step = gf;

    std::vector<double> dir(n, 0.0);
    for (Eigen::Index a = 0; a < nf; ++a) dir[static_cast<std::size_t>(free[static_cast<std::size_t>(a)])] = step(a);

    double t = 1.0;
    bool accepted = false;
    std::vector<double> trial(n);
    const double slack = 1e-13 * std::max(1.0, std::abs(d.value));
    for (int k = 0; k < kMaxBacktracks; ++k, t *= 0.5) {
      double ascent = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        trial[i] = x[i] + t * dir[i];
        if (nonneg) trial[i] = std::max(trial[i], 0.0);
        ascent += d.grad[i] * (trial[i] - x[i]);
      }
      const double v = value(trial);
      if (std::isfinite(v) && v >= d.value + kArmijo * ascent - slack) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      report.diagnostic = "line search failed";
      break;
    }
    x = trial;
  }
  report.solution = std::move(x);
  return report;
}

Derivatives primal_derivatives(const ScheduleSpace& space, std::span<const double> r,
                               std::span<const double> nu) {
  const Distribution p = gibbs_distribution(space, r);
  const std::vector<double> s = service_rates(p, space);
  Derivatives d;
  d.value = std::inner_product(nu.begin(), nu.end(), r.begin(), 0.0) - log_partition(space, r);
  d.grad.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) d.grad[i] = nu[i] - s[i];
  d.neg_hessian = covariance(space, p, s);
  return d;
}

SolveReport solve_prime_simulated(const InterferenceGraph& g, const ScheduleSpace& space,
                                  std::span<const double> nu, const SolveOptions& options,
                                  std::vector<double> r0) {
  for (double& v : r0) v = std::max(v, 0.0);
  SimulationOptions sim;
  sim.window_length = options.window_length;
  sim.horizon = options.window_length * std::max<std::size_t>(options.max_iter, 1);
  sim.seed = options.seed;
  sim.track_occupancy = false;
  sim.record_windows = options.keep_trajectory;
  const Trace trace =
      simulate(g, LinkParams::from_log_fugacity(r0),
               ArrivalConfig::bernoulli(std::vector<double>(nu.begin(), nu.end())), sim,
               distributed_policy(options.schedule));

  SolveReport report;
  auto record = [&](std::size_t iter, std::span<const double> r) {
    const std::vector<double> grad = grad_F(space, r, nu);
    report.trajectory.push_back(
        {iter, objective_F(space, r, nu), projected_norm(r, grad, true), {r.begin(), r.end()}});
  };
  if (options.keep_trajectory) {
    record(0, r0);
    for (const WindowStats& w : trace.windows) record(w.index, w.r);
  }
  const std::vector<double> grad = grad_F(space, trace.final_r, nu);
  report.iterations = (sim.horizon + sim.window_length - 1) / sim.window_length;
  report.objective = objective_F(space, trace.final_r, nu);
  report.grad_norm = projected_norm(trace.final_r, grad, true);
  report.converged = report.grad_norm <= options.tol;
  if (!report.converged) report.diagnostic = "simulated updates stopped above the gradient tolerance";
  report.solution = trace.final_r;
  return report;
}

// Entropy minimization over p with equality rows A p = b, where the last row
// of A is all ones. Returns p, the row multipliers w, and convergence.
struct EqualitySolve {
  std::vector<double> p;
  std::vector<double> w;
  bool converged = false;
  std::size_t iterations = 0;
};

EqualitySolve entropy_newton(const ScheduleSpace& space, const std::vector<int>& rows,
                             std::span<const double> nu) {
  const auto m = static_cast<Eigen::Index>(space.size());
  const auto k = static_cast<Eigen::Index>(rows.size() + 1);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, m);
  Eigen::VectorXd b(k);
  for (Eigen::Index r = 0; r + 1 < k; ++r) {
    const int link = rows[static_cast<std::size_t>(r)];
    b(r) = nu[static_cast<std::size_t>(link)];
    for (Eigen::Index c = 0; c < m; ++c) {
      a(r, c) = space[static_cast<std::size_t>(c)].transmits(link) ? 1.0 : 0.0;
    }
  }
  a.row(k - 1).setOnes();
  b(k - 1) = 1.0;

  Eigen::VectorXd p = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  Eigen::VectorXd w = Eigen::VectorXd::Zero(k);
  auto residual = [&](const Eigen::VectorXd& pp, const Eigen::VectorXd& ww,
                      Eigen::VectorXd& rd, Eigen::VectorXd& rp) {
    rd = (pp.array().log() + 1.0).matrix() + a.transpose() * ww;
    rp = a * pp - b;
    return std::sqrt(rd.squaredNorm() + rp.squaredNorm());
  };

  EqualitySolve out;
  Eigen::VectorXd rd;
  Eigen::VectorXd rp;
  double norm = residual(p, w, rd, rp);
  constexpr std::size_t kMaxIter = 500;
  for (std::size_t it = 0; it < kMaxIter; ++it) {
    out.iterations = it;
    if (norm <= 1e-12) {
      out.converged = true;
      break;
    }
    // KKT with H = diag(1/p): (A P A^T) dw = rp - A (p o rd), dp = -p o (rd + A^T dw).
    const Eigen::MatrixXd schur = a * p.asDiagonal() * a.transpose();
    const Eigen::VectorXd rhs = rp - a * p.cwiseProduct(rd);
    const Eigen::VectorXd dw = schur.ldlt().solve(rhs);
    const Eigen::VectorXd dp = -p.cwiseProduct(rd + a.transpose() * dw);

    double t = 1.0;
    for (Eigen::Index c = 0; c < m; ++c) {
      if (dp(c) < 0.0) t = std::min(t, 0.99 * -p(c) / dp(c));
    }
    Eigen::VectorXd rd_next;
    Eigen::VectorXd rp_next;
    double next = INFINITY;
    for (int bt = 0; bt < kMaxBacktracks; ++bt, t *= 0.5) {
      next = residual(p + t * dp, w + t * dw, rd_next, rp_next);
      if (next <= (1.0 - 0.01 * t) * norm) break;
    }
    if (!(next < norm)) break;
    p += t * dp;
    w += t * dw;
    rd = rd_next;
    rp = rp_next;
    norm = next;
  }
  if (norm <= 1e-12) out.converged = true;
  out.p.assign(p.data(), p.data() + m);
  out.w.assign(w.data(), w.data() + k);
  return out;
}

Distribution normalized(std::vector<double> p) {
  for (double& v : p) v = std::max(v, 0.0);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= total;
  return Distribution(std::move(p));
}

}  // namespace

// ---------------------------------------------------------------------------

LearningRateSchedule LearningRateSchedule::constant(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("learning rate must be positive and finite");
  }
  return {RateKind::kConstant, alpha};
}

LearningRateSchedule LearningRateSchedule::time_varying() {
  return {RateKind::kTimeVarying, 0.0};
}

double LearningRateSchedule::rate(std::uint64_t t) const {
  if (t < 1) throw std::invalid_argument("learning rate index starts at 1");
  if (kind == RateKind::kConstant) return alpha0;
  const double u = 1.0 + std::pow(static_cast<double>(t), 0.3);
  return 1.0 / (u * std::log(u));
}

double objective_F(const ScheduleSpace& space, std::span<const double> r,
                   std::span<const double> nu) {
  check_size(r, static_cast<std::size_t>(space.links()), "r");
  check_size(nu, static_cast<std::size_t>(space.links()), "nu");
  return std::inner_product(nu.begin(), nu.end(), r.begin(), 0.0) - log_partition(space, r);
}

std::vector<double> grad_F(const ScheduleSpace& space, std::span<const double> r,
                           std::span<const double> nu) {
  check_size(r, static_cast<std::size_t>(space.links()), "r");
  check_size(nu, static_cast<std::size_t>(space.links()), "nu");
  std::vector<double> s = service_rates(gibbs_distribution(space, r), space);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = nu[i] - s[i];
  return s;
}

std::vector<double> distributed_update(std::span<const double> r, std::span<const double> nu_hat,
                                       std::span<const double> s_hat, double alpha) {
  check_size(nu_hat, r.size(), "nu_hat");
  check_size(s_hat, r.size(), "s_hat");
  std::vector<double> out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    out[i] = std::max(0.0, r[i] + alpha * (nu_hat[i] - s_hat[i]));
  }
  return out;
}

WindowPolicy distributed_policy(LearningRateSchedule schedule) {
  return [schedule](const WindowStats& w, const LinkParams& current) {
    return LinkParams::from_log_fugacity(distributed_update(
        current.log_fugacities(), w.nu_hat, w.s_hat, schedule.rate(w.index)));
  };
}

SolveReport solve_prime(const InterferenceGraph& g, std::span<const double> nu,
                        const SolveOptions& options) {
  const int n = g.size();
  check_rates(nu, n, "nu");
  std::vector<double> r0 = options.initial_r;
  if (r0.empty()) r0.assign(static_cast<std::size_t>(n), 0.0);
  check_size(r0, static_cast<std::size_t>(n), "initial r");

  const ScheduleSpace space = enumerate_schedules(g);
  const CapacityResult cap = capacity_check(space, nu);

  SolveReport report;
  if (options.mode == SolveMode::kSimulated) {
    report = solve_prime_simulated(g, space, nu, options, std::move(r0));
  } else {
    const bool nonneg = options.constraint == SignConstraint::kNonnegative;
    report = projected_newton(
        [&](std::span<const double> r) { return objective_F(space, r, nu); },
        [&](std::span<const double> r) { return primal_derivatives(space, r, nu); },
        std::move(r0), nonneg, options.tol, options.max_iter, options.keep_trajectory);
  }
  report.capacity_feasible = cap.feasible;
  if (!cap.feasible) {
    const std::string note = "nu is outside the capacity region (slack " +
                             format_double(cap.slack) + "); no finite maximizer";
    report.diagnostic = report.diagnostic.empty() ? note : note + "; " + report.diagnostic;
  }
  return report;
}

void write_trajectory_csv(std::ostream& out, const SolveReport& report) {
  out << "iter,objective,grad_norm,link,value\n";
  for (const TrajectoryPoint& pt : report.trajectory) {
    for (std::size_t i = 0; i < pt.values.size(); ++i) {
      out << pt.iter << ',' << format_double(pt.objective) << ',' << format_double(pt.grad_norm)
          << ',' << i << ',' << format_double(pt.values[i]) << '\n';
    }
  }
}

nlohmann::json to_json(const SolveReport& report) {
  return {
      {"iterations", report.iterations},
      {"objective", report.objective},
      {"grad_norm", report.grad_norm},
      {"converged", report.converged},
      {"capacity_feasible", report.capacity_feasible},
      {"diagnostic", report.diagnostic},
      {"solution", report.solution},
  };
}

// ---------------------------------------------------------------------------

EntropySolution minimize_neg_entropy(const ScheduleSpace& space, std::span<const double> nu,
                                     SignConstraint constraint) {
  const int n = space.links();
  check_rates(nu, n, "nu");
  std::vector<int> active(static_cast<std::size_t>(n));
  std::iota(active.begin(), active.end(), 0);

  EqualitySolve sol = entropy_newton(space, active, nu);
  std::size_t total_iter = sol.iterations;
  if (constraint == SignConstraint::kNonnegative) {
    // Active-set loop: drop constraints with negative multipliers, re-add the
    // most violated inactive constraint.
    for (int round = 0; round < 4 * n + 4; ++round) {
      int drop = -1;
      double worst = -1e-9;
      for (std::size_t a = 0; a < active.size(); ++a) {
        const double mult = -sol.w[a];
        if (mult < worst) {
          worst = mult;
          drop = static_cast<int>(a);
        }
      }
      if (drop >= 0) {
        active.erase(active.begin() + drop);
      } else {
        const std::vector<double> s = service_rates(normalized(sol.p), space);
        int add = -1;
        double violation = 1e-10;
        for (int i = 0; i < n; ++i) {
          if (std::find(active.begin(), active.end(), i) != active.end()) continue;
          const double v = nu[static_cast<std::size_t>(i)] - s[static_cast<std::size_t>(i)];
          if (v > violation) {
            violation = v;
            add = i;
          }
        }
        if (add < 0) break;
        active.insert(std::upper_bound(active.begin(), active.end(), add), add);
      }
      sol = entropy_newton(space, active, nu);
      total_iter += sol.iterations;
    }
  }

  EntropySolution out;
  out.p = normalized(sol.p);
  out.converged = sol.converged;
  out.iterations = total_iter;
  out.multipliers.assign(static_cast<std::size_t>(n), 0.0);
  for (std::size_t a = 0; a < active.size(); ++a) {
    out.multipliers[static_cast<std::size_t>(active[a])] = -sol.w[a];
  }
  for (const double v : out.p.probs()) {
    if (v > 0.0) out.value += v * std::log(v);
  }
  return out;
}

Distribution solve_dual_maxent(const InterferenceGraph& g, std::span<const double> nu,
                               SignConstraint constraint) {
  check_rates(nu, g.size(), "nu");
  const ScheduleSpace space = enumerate_schedules(g);
  const CapacityResult cap = capacity_check(space, nu);
  if (!cap.feasible) {
    throw std::invalid_argument("nu is outside the capacity region (slack " +
                                format_double(cap.slack) + ")");
  }
  SolveOptions opt;
  opt.constraint = constraint;
  const SolveReport rep = solve_prime(g, nu, opt);
  if (!rep.converged) throw std::runtime_error("primal solve failed: " + rep.diagnostic);
  Distribution p = gibbs_distribution(space, rep.solution);
  const std::vector<double> s = service_rates(p, space);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double miss = nu[i] - s[i];
    const bool violated = constraint == SignConstraint::kFree ? std::abs(miss) > 1e-6 : miss > 1e-6;
    if (violated) throw std::runtime_error("service constraint violated at link " + std::to_string(i));
  }
  return p;
}

DualityReport verify_duality(const InterferenceGraph& g, std::span<const double> nu,
                             SignConstraint constraint) {
  check_rates(nu, g.size(), "nu");
  const ScheduleSpace space = enumerate_schedules(g);
  const CapacityResult cap = capacity_check(space, nu);
  if (!cap.feasible) {
    throw std::invalid_argument("nu is outside the capacity region (slack " +
                                format_double(cap.slack) + ")");
  }
  SolveOptions opt;
  opt.constraint = constraint;
  opt.tol = 1e-11;
  const SolveReport primal = solve_prime(g, nu, opt);
  const EntropySolution dual = minimize_neg_entropy(space, nu, constraint);

  DualityReport out;
  out.primal_value = primal.objective;
  out.dual_value = dual.value;
  out.gap = std::abs(dual.value - primal.objective);
  out.r_star = primal.solution;
  out.primal_converged = primal.converged;
  out.dual_converged = dual.converged;

  const std::vector<double> s_dual = service_rates(dual.p, space);
  const Distribution pi = gibbs_distribution(space, primal.solution);
  const std::vector<double> s_primal = service_rates(pi, space);
  for (std::size_t i = 0; i < nu.size(); ++i) {
    out.constraint_residuals.push_back(s_dual[i] - nu[i]);
    out.complementary_slackness.push_back(primal.solution[i] * (s_primal[i] - nu[i]));
    out.multiplier_error =
        std::max(out.multiplier_error, std::abs(dual.multipliers[i] - primal.solution[i]));
  }
  for (std::size_t k = 0; k < space.size(); ++k) {
    out.product_form_error = std::max(out.product_form_error, std::abs(dual.p[k] - pi[k]));
  }
  return out;
}

// ---------------------------------------------------------------------------

LinkParams lemma1_params(std::span<const double> zeta) {
  std::vector<double> r(zeta.size());
  for (std::size_t i = 0; i < zeta.size(); ++i) r[i] = -zeta[i];
  return LinkParams::from_log_fugacity(std::move(r));
}

Distribution dual_gibbs_distribution(const ScheduleSpace& space, std::span<const double> zeta) {
  check_size(zeta, static_cast<std::size_t>(space.links()), "zeta");
  // exp(-sum zeta_i (1 - x_i)) = exp(-sum zeta_i) exp(sum x_i zeta_i).
  return gibbs_distribution(space, zeta);
}

std::vector<double> dmin_values(const InterferenceGraph& g, const ScheduleSpace& space,
                                std::span<const double> zeta, const ConstrainedDualOptions& opt) {
  const auto n = static_cast<std::size_t>(g.size());
  check_size(zeta, n, "zeta");
  switch (opt.dmin) {
    case DminSource::kPinned:
      if (!(opt.pinned_dmin > 0.0)) throw std::invalid_argument("pinned d_min must be positive");
      return std::vector<double>(n, opt.pinned_dmin);
    case DminSource::kExactRowSummary:
      return row_summary(g, space, lemma1_params(zeta)).d_min;
    case DminSource::kLemma2:
      break;
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = g.degree(static_cast<int>(i)) / (1.0 + std::exp(zeta[i]));
  }
  return out;
}

double dual_objective_D(const InterferenceGraph& g, const ScheduleSpace& space,
                        std::span<const double> zeta, std::span<const double> nu,
                        const ConstrainedDualOptions& opt) {
  check_rates(nu, g.size(), "nu");
  const std::vector<double> dmin = dmin_values(g, space, zeta, opt);
  double linear = 0.0;
  double total_zeta = 0.0;
  for (std::size_t i = 0; i < zeta.size(); ++i) {
    total_zeta += zeta[i];
    const bool isolated = opt.dmin != DminSource::kPinned && g.degree(static_cast<int>(i)) == 0;
    if (isolated || zeta[i] == 0.0) {
      linear += nu[i] * zeta[i];
    } else if (dmin[i] <= 0.0) {
      return -std::numeric_limits<double>::infinity();
    } else {
      linear += (nu[i] - (1.0 - opt.epsilon) / dmin[i]) * zeta[i];
    }
  }
  return linear - (log_partition(space, zeta) - total_zeta);
}

std::vector<double> grad_D(const InterferenceGraph& g, const ScheduleSpace& space,
                           std::span<const double> zeta, std::span<const double> nu,
                           const ConstrainedDualOptions& opt) {
  check_rates(nu, g.size(), "nu");
  check_size(zeta, static_cast<std::size_t>(g.size()), "zeta");
  if (opt.dmin == DminSource::kExactRowSummary) {
    throw std::invalid_argument("grad_D supports the closed-form and pinned d_min only");
  }
  const std::vector<double> sq = service_rates(gibbs_distribution(space, zeta), space);
  std::vector<double> out(zeta.size());
  for (std::size_t i = 0; i < zeta.size(); ++i) {
    const int d = g.degree(static_cast<int>(i));
    double penalty = 0.0;
    if (opt.dmin == DminSource::kPinned) {
      penalty = (1.0 - opt.epsilon) / opt.pinned_dmin;
    } else if (d > 0) {
      // d/dz [z (1 + e^z) / d] = (1 + (1 + z) e^z) / d.
      penalty = (1.0 - opt.epsilon) * (1.0 + (1.0 + zeta[i]) * std::exp(zeta[i])) / d;
    }
    out[i] = nu[i] - penalty + 1.0 - sq[i];
  }
  return out;
}

SolveReport solve_constrained_dual(const InterferenceGraph& g, std::span<const double> nu,
                                   const ConstrainedDualOptions& opt, double tol,
                                   std::size_t max_iter) {
  check_rates(nu, g.size(), "nu");
  if (opt.dmin == DminSource::kExactRowSummary) {
    throw std::invalid_argument("the exact row-summary d_min is not differentiable; use kLemma2");
  }
  const ScheduleSpace space = enumerate_schedules(g);
  auto derivs = [&](std::span<const double> z) {
    Derivatives d;
    d.value = dual_objective_D(g, space, z, nu, opt);
    d.grad = grad_D(g, space, z, nu, opt);
    const Distribution q = gibbs_distribution(space, z);
    const std::vector<double> sq = service_rates(q, space);
    d.neg_hessian = covariance(space, q, sq);
    if (opt.dmin == DminSource::kLemma2) {
      for (int i = 0; i < g.size(); ++i) {
        const int deg = g.degree(i);
        if (deg == 0) continue;
        const double z_i = z[static_cast<std::size_t>(i)];
        d.neg_hessian(i, i) += (1.0 - opt.epsilon) * (2.0 + z_i) * std::exp(z_i) / deg;
      }
    }
    return d;
  };
  return projected_newton(
      [&](std::span<const double> z) { return dual_objective_D(g, space, z, nu, opt); }, derivs,
      std::vector<double>(static_cast<std::size_t>(g.size()), 0.0), true, tol, max_iter, false);
}

}  // namespace gdcsma
