#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gdcsma/optimize.hpp"

namespace gdcsma {

namespace {

void check_len(std::span<const double> v, int n, const char* what) {
  if (v.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(n) +
                                " entries, got " + std::to_string(v.size()));
  }
}

/// u / d_min(u) with d_min(u) = d / (1 + e^u).
double scaled_penalty(double u, int degree) {
  return u * (1.0 + std::exp(u)) / degree;
}

double derivative_at(double s, double nu, double zeta, double delta, int degree, int c) {
  double out = (s - 1.0) * std::exp(-c * delta) - nu;
  if (degree > 0) out += (1.0 + zeta + delta) * std::exp(zeta + delta) / degree;
  return out;
}

double sup_norm(std::span<const double> v) {
  double out = 0.0;
  for (const double x : v) out = std::max(out, std::abs(x));
  return out;
}

}  // namespace

double aux_function_A(const InterferenceGraph& g, const ScheduleSpace& space,
                      std::span<const double> zeta, std::span<const double> delta,
                      std::span<const double> nu) {
  const int n = g.size();
  check_len(zeta, n, "zeta");
  check_len(delta, n, "delta");
  check_len(nu, n, "nu");
  const int c = jensen_constant(g);
  double inner = 1.0;
  double linear = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (!(delta[ui] > -zeta[ui])) {
      throw std::domain_error("A is defined only for delta_i > -zeta_i");
    }
    std::size_t silent = 0;
    for (const Schedule x : space) silent += x.transmits(i) ? 0 : 1;
    inner += static_cast<double>(silent) / c * std::expm1(-c * delta[ui]);
    linear -= delta[ui] * nu[ui];
    const int d = g.degree(i);
    if (d > 0) {
      linear += scaled_penalty(zeta[ui] + delta[ui], d) - scaled_penalty(zeta[ui], d);
    }
  }
  if (!(inner > 0.0)) throw std::domain_error("A: logarithm argument is not positive");
  return std::log(inner) + linear;
}

std::vector<double> aux_derivative(const InterferenceGraph& g, std::span<const double> zeta,
                                   std::span<const double> delta, std::span<const double> nu,
                                   std::span<const double> s) {
  const int n = g.size();
  check_len(zeta, n, "zeta");
  check_len(delta, n, "delta");
  check_len(nu, n, "nu");
  check_len(s, n, "s");
  const int c = jensen_constant(g);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    out[ui] = derivative_at(s[ui], nu[ui], zeta[ui], delta[ui], g.degree(i), c);
  }
  return out;
}

std::vector<double> zeta_update(const InterferenceGraph& g, const ScheduleSpace& space,
                                std::span<const double> zeta, std::span<const double> nu,
                                const ZetaUpdateOptions& options) {
  const int n = g.size();
  check_len(zeta, n, "zeta");
  check_len(nu, n, "nu");
  for (const double z : zeta) {
    if (!(z >= 0.0) || !std::isfinite(z)) throw std::invalid_argument("zeta must be finite and >= 0");
  }
  const int c = jensen_constant(g);
  const std::vector<double> s = service_rates(stationary_distribution(space, lemma1_params(zeta)), space);

  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const int d = g.degree(i);
    auto f = [&](double delta) { return derivative_at(s[ui], nu[ui], zeta[ui], delta, d, c); };
    double lo = -zeta[ui];
    double hi = options.delta_max;
    const double f_lo = f(lo);
    const double f_hi = f(hi);
    const bool bracket = options.rule == DeltaRule::kDescendingBracket
                             ? (f_lo > 0.0 && f_hi < 0.0)
                             : (f_lo < 0.0) != (f_hi < 0.0) && f_lo != 0.0 && f_hi != 0.0;
    double delta = lo;
    if (bracket) {
      const bool lo_positive = f_lo > 0.0;
      while (hi - lo > options.bisection_tol) {
        const double mid = 0.5 * (lo + hi);
        if ((f(mid) > 0.0) == lo_positive) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      delta = 0.5 * (lo + hi);
    }
    out[ui] = std::max(0.0, zeta[ui] + delta);
  }
  return out;
}

Theorem5Report theorem5_run(const InterferenceGraph& g, std::span<const double> nu,
                            const Theorem5Options& options) {
  const int n = g.size();
  check_len(nu, n, "nu");
  std::vector<double> zeta = options.initial_zeta;
  if (zeta.empty()) zeta.assign(static_cast<std::size_t>(n), 1.0);
  check_len(zeta, n, "initial zeta");

  const ScheduleSpace space = enumerate_schedules(g);
  ConstrainedDualOptions dual;
  dual.epsilon = options.epsilon;

  Theorem5Report report;
  report.jensen_constant = jensen_constant(g);
  report.min_vertex_cover = min_vertex_cover_size(g);
  report.log_n = std::log(static_cast<double>(n));
  report.log2_n = std::log2(static_cast<double>(n));

  auto record = [&](const std::vector<double>& z) {
    report.trajectory.push_back(z);
    report.sup_norms.push_back(sup_norm(z));
    report.dual_values.push_back(dual_objective_D(g, space, z, nu, dual));
  };
  record(zeta);
  while (report.sup_norms.back() >= options.tol) {
    if (report.iterations == options.max_iter) {
      report.exhausted = true;
      break;
    }
    zeta = zeta_update(g, space, zeta, nu, options.update);
    ++report.iterations;
    record(zeta);
  }
  report.service_rate_agnostic = report.sup_norms.back() < options.tol;
  report.final_zeta = zeta;
  return report;
}

nlohmann::json to_json(const Theorem5Report& report) {
  return {
      {"iterations", report.iterations},
      {"service_rate_agnostic", report.service_rate_agnostic},
      {"exhausted", report.exhausted},
      {"jensen_constant", report.jensen_constant},
      {"min_vertex_cover", report.min_vertex_cover},
      {"log_n", report.log_n},
      {"log2_n", report.log2_n},
      {"final_zeta", report.final_zeta},
      {"sup_norms", report.sup_norms},
      {"dual_values", report.dual_values},
  };
}

}  // namespace gdcsma
