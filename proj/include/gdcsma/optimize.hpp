#ifndef GDCSMA_OPTIMIZE_HPP
#define GDCSMA_OPTIMIZE_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gdcsma/dynamics.hpp"
#include "gdcsma/graph.hpp"
#include "json.hpp"

namespace gdcsma {

// ---------------------------------------------------------------------------
// Learning rates
// ---------------------------------------------------------------------------

enum class RateKind { kConstant, kTimeVarying };

struct LearningRateSchedule {
  RateKind kind = RateKind::kConstant;
  double alpha0 = 0.01;

  static LearningRateSchedule constant(double alpha);
  /// alpha(t) = 1 / ((1 + t^0.3) log(1 + t^0.3)), natural log.
  static LearningRateSchedule time_varying();

  /// Rate for update number t >= 1.
  double rate(std::uint64_t t) const;
};

// ---------------------------------------------------------------------------
// Primal throughput problem
// ---------------------------------------------------------------------------

/// F(r; nu) = sum_i nu_i r_i - log sum_X exp(sum_i x_i r_i).
double objective_F(const ScheduleSpace& space, std::span<const double> r,
                   std::span<const double> nu);

/// dF/dr_i = nu_i - s_i(r).
std::vector<double> grad_F(const ScheduleSpace& space, std::span<const double> r,
                           std::span<const double> nu);

/// r_i <- [r_i + alpha (nu_hat_i - s_hat_i)]_+.
std::vector<double> distributed_update(std::span<const double> r, std::span<const double> nu_hat,
                                       std::span<const double> s_hat, double alpha);

/// Window policy applying distributed_update with alpha = schedule.rate(window index).
WindowPolicy distributed_policy(LearningRateSchedule schedule);

enum class SolveMode { kExact, kSimulated };

/// kFree lets r range over the reals, so at the optimum s(r*) = nu exactly.
/// kNonnegative keeps r >= 0, pairing with the inequality-constrained dual.
enum class SignConstraint { kFree, kNonnegative };

struct SolveOptions {
  SolveMode mode = SolveMode::kExact;
  SignConstraint constraint = SignConstraint::kFree;
  LearningRateSchedule schedule{};
  double tol = 1e-10;
  std::size_t max_iter = 500;  ///< Newton iterations (exact) or windows (simulated)
  std::vector<double> initial_r;
  bool keep_trajectory = false;
  std::uint64_t window_length = 100;
  std::uint64_t seed = 1;
};

struct TrajectoryPoint {
  std::size_t iter = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  std::vector<double> values;
};

struct SolveReport {
  std::size_t iterations = 0;
  double objective = 0.0;
  double grad_norm = 0.0;  ///< projected gradient, infinity norm
  bool converged = false;
  bool capacity_feasible = true;
  std::string diagnostic;
  std::vector<double> solution;
  std::vector<TrajectoryPoint> trajectory;
};

/// Maximizes F. Exact mode runs projected Newton on the exact gradient and
/// covariance Hessian; simulated mode runs the distributed windowed updates on
/// a live chain and reports the exact gradient at the final parameters.
SolveReport solve_prime(const InterferenceGraph& g, std::span<const double> nu,
                        const SolveOptions& options = {});

/// CSV `iter,objective,grad_norm,link,value`.
void write_trajectory_csv(std::ostream& out, const SolveReport& report);
nlohmann::json to_json(const SolveReport& report);

// ---------------------------------------------------------------------------
// Max-entropy dual
// ---------------------------------------------------------------------------

struct EntropySolution {
  Distribution p;
  double value = 0.0;             ///< sum_X p log p
  std::vector<double> multipliers;  ///< one per link, 0 for inactive constraints
  bool converged = false;
  std::size_t iterations = 0;
};

/// min sum_X p(X) log p(X) subject to sum_X p(X) x_i = nu_i (kFree) or >= nu_i
/// (kNonnegative), solved directly over p by infeasible-start Newton.
EntropySolution minimize_neg_entropy(const ScheduleSpace& space, std::span<const double> nu,
                                     SignConstraint constraint = SignConstraint::kFree);

/// Gibbs distribution at the primal optimum. Throws std::invalid_argument when
/// nu is outside the capacity region and std::runtime_error when the solve
/// fails or leaves a constraint violated by more than 1e-6.
Distribution solve_dual_maxent(const InterferenceGraph& g, std::span<const double> nu,
                               SignConstraint constraint = SignConstraint::kFree);

struct DualityReport {
  double primal_value = 0.0;  ///< max F
  double dual_value = 0.0;    ///< min sum p log p
  double gap = 0.0;           ///< |dual - primal|
  std::vector<double> r_star;
  std::vector<double> constraint_residuals;      ///< s_i(p*) - nu_i
  std::vector<double> complementary_slackness;   ///< r*_i (s_i(r*) - nu_i)
  double product_form_error = 0.0;  ///< max_X |p*(X) - pi_{r*}(X)|
  double multiplier_error = 0.0;    ///< max_i |multiplier_i - r*_i|
  bool primal_converged = false;
  bool dual_converged = false;
};

DualityReport verify_duality(const InterferenceGraph& g, std::span<const double> nu,
                             SignConstraint constraint = SignConstraint::kFree);

// ---------------------------------------------------------------------------
// Complexity-constrained dual
// ---------------------------------------------------------------------------

enum class DminSource {
  kLemma2,           ///< d_i / (1 + e^{zeta_i})
  kExactRowSummary,  ///< min_X of per-state row sums at lambda = e^{-zeta}
  kPinned,           ///< fixed value on every link
};

struct ConstrainedDualOptions {
  double epsilon = 0.0;
  DminSource dmin = DminSource::kLemma2;
  double pinned_dmin = 1.0;
};

/// lambda_i = e^{-zeta_i}.
LinkParams lemma1_params(std::span<const double> zeta);

/// p(X) proportional to exp(-sum_i zeta_i (1 - x_i)).
Distribution dual_gibbs_distribution(const ScheduleSpace& space, std::span<const double> zeta);

/// Per-link d_min for the chosen source.
std::vector<double> dmin_values(const InterferenceGraph& g, const ScheduleSpace& space,
                                std::span<const double> zeta, const ConstrainedDualOptions& opt);

/// D(zeta; nu) = sum_i (nu_i - (1 - eps) / d_min_i) zeta_i
///               - log sum_X exp(sum_i (x_i - 1) zeta_i).
/// Links of degree 0 contribute nu_i zeta_i (except under kPinned). Returns
/// -inf when some d_min is 0 while its zeta is positive.
double dual_objective_D(const InterferenceGraph& g, const ScheduleSpace& space,
                        std::span<const double> zeta, std::span<const double> nu,
                        const ConstrainedDualOptions& opt = {});

/// Gradient of D; kLemma2 and kPinned only.
std::vector<double> grad_D(const InterferenceGraph& g, const ScheduleSpace& space,
                           std::span<const double> zeta, std::span<const double> nu,
                           const ConstrainedDualOptions& opt = {});

/// Maximizes D over zeta >= 0 by projected Newton; solution holds zeta*.
SolveReport solve_constrained_dual(const InterferenceGraph& g, std::span<const double> nu,
                                   const ConstrainedDualOptions& opt = {}, double tol = 1e-9,
                                   std::size_t max_iter = 500);

// ---------------------------------------------------------------------------
// Auxiliary-function update for the service-rate agnostic regime
// ---------------------------------------------------------------------------

/// A(zeta, delta) = log(1 + sum_X sum_i (1 - x_i)/C (e^{-C delta_i} - 1))
///                  + sum_i [-delta_i nu_i + (zeta_i + delta_i)/d_min(zeta_i + delta_i)
///                           - zeta_i / d_min(zeta_i)]
/// with C = jensen_constant(g) and d_min(u) = d_i / (1 + e^u); the d_min terms
/// vanish on isolated links. Throws std::domain_error unless delta_i > -zeta_i
/// and the logarithm's argument is positive.
double aux_function_A(const InterferenceGraph& g, const ScheduleSpace& space,
                      std::span<const double> zeta, std::span<const double> delta,
                      std::span<const double> nu);

/// (s_i - 1) e^{-C delta_i} - nu_i + (1 + zeta_i + delta_i) e^{zeta_i + delta_i} / d_i,
/// third term dropped when d_i = 0.
std::vector<double> aux_derivative(const InterferenceGraph& g, std::span<const double> zeta,
                                   std::span<const double> delta, std::span<const double> nu,
                                   std::span<const double> s);

enum class DeltaRule {
  /// Bisection only on a bracket that is positive at -zeta_i and negative at
  /// delta_max; every other case takes the corner -zeta_i.
  kDescendingBracket,
  /// Bisection on any sign change; the corner otherwise.
  kAnyRoot,
};

struct ZetaUpdateOptions {
  DeltaRule rule = DeltaRule::kDescendingBracket;
  double delta_max = 10.0;
  double bisection_tol = 1e-10;
};

/// zeta_i <- max(0, zeta_i + delta*_i) with s taken from the stationary law at
/// lambda = e^{-zeta}.
std::vector<double> zeta_update(const InterferenceGraph& g, const ScheduleSpace& space,
                                std::span<const double> zeta, std::span<const double> nu,
                                const ZetaUpdateOptions& options = {});

struct Theorem5Options {
  double epsilon = 0.0;
  std::size_t max_iter = 10000;
  std::vector<double> initial_zeta;  ///< empty means all ones
  double tol = 1e-6;
  ZetaUpdateOptions update{};
};

struct Theorem5Report {
  std::vector<std::vector<double>> trajectory;  ///< zeta per iterate, starting point first
  std::vector<double> sup_norms;
  std::vector<double> dual_values;
  std::vector<double> final_zeta;
  std::size_t iterations = 0;
  bool service_rate_agnostic = false;  ///< ||zeta||_inf < tol at termination
  bool exhausted = false;              ///< stopped on max_iter
  int jensen_constant = 0;
  int min_vertex_cover = 0;
  double log_n = 0.0;
  double log2_n = 0.0;
};

Theorem5Report theorem5_run(const InterferenceGraph& g, std::span<const double> nu,
                            const Theorem5Options& options = {});

nlohmann::json to_json(const Theorem5Report& report);

}  // namespace gdcsma

#endif  // GDCSMA_OPTIMIZE_HPP
