#include "gdcsma/dependencies.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "gdcsma/format.hpp"

namespace gdcsma {

namespace {

constexpr double kPowerIterationTol = 1e-10;
constexpr int kPowerIterationMax = 200000;

double bernoulli_tv(double p, double q) {
  const double mu[2] = {1.0 - p, p};
  const double nu[2] = {1.0 - q, q};
  return tv_distance(mu, nu);
}

void check_normalized(std::span<const double> d) {
  double total = 0.0;
  for (const double v : d) {
    if (!(v >= 0.0)) throw std::invalid_argument("tv_distance: negative probability");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("tv_distance: input sums to " + format_double(total));
  }
}

}  // namespace

std::string_view to_string(MatrixKind kind) {
  switch (kind) {
    case MatrixKind::kAnalytic: return "analytic";
    case MatrixKind::kPerState: return "per_state";
    case MatrixKind::kExpected: return "expected";
    case MatrixKind::kEmpirical: return "empirical";
  }
  return "unknown";
}

DependenciesMatrix::DependenciesMatrix(int n, MatrixKind kind)
    : n_(n),
      kind_(kind),
      entries_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0),
      undefined_(static_cast<std::size_t>(n), false) {}

double DependenciesMatrix::row_sum(int i) const {
  double s = 0.0;
  for (int j = 0; j < n_; ++j) s += (*this)(i, j);
  return s;
}

double DependenciesMatrix::column_sum(int j) const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i) s += (*this)(i, j);
  return s;
}

std::vector<double> DependenciesMatrix::row_sums() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) out.push_back(row_sum(i));
  return out;
}

bool DependenciesMatrix::has_undefined_rows() const {
  return std::find(undefined_.begin(), undefined_.end(), true) != undefined_.end();
}

double tv_distance(std::span<const double> mu, std::span<const double> nu) {
  if (mu.size() != nu.size()) throw std::invalid_argument("tv_distance: supports differ");
  check_normalized(mu);
  check_normalized(nu);
  double acc = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) acc += std::abs(mu[k] - nu[k]);
  return 0.5 * acc;
}

double conditional_marginal(const InterferenceGraph& g, const LinkParams& params, Schedule x,
                            int link) {
  return g.neighbors_silent(link, x) ? params.strategy(link) : 0.0;
}

DependenciesMatrix dependencies_matrix_analytic(const InterferenceGraph& g, const LinkParams& params,
                                                AnalyticMode mode) {
  const int n = g.size();
  DependenciesMatrix r(n, MatrixKind::kAnalytic);
  if (mode == AnalyticMode::kClosedForm) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (g.adjacent(i, j)) r(i, j) = params.strategy(i);
      }
    }
    return r;
  }

  // Brute force: conditional marginals read off the stationary law itself.
  const ScheduleSpace space = enumerate_schedules(g);
  const Distribution pi = stationary_distribution(space, params);
  auto marginal = [&](Schedule x, int i) {
    const double p_off = pi[*space.index_of(x.with(i, false))];
    const auto on = space.index_of(x.with(i, true));
    const double p_on = on ? pi[*on] : 0.0;
    return p_on / (p_on + p_off);
  };
  for (int j = 0; j < n; ++j) {
    for (const Schedule x : space) {
      if (x.transmits(j)) continue;
      const Schedule y = x.with(j, true);
      if (!space.contains(y)) continue;
      for (int i = 0; i < n; ++i) {
        if (i == j) continue;
        r(i, j) = std::max(r(i, j), bernoulli_tv(marginal(x, i), marginal(y, i)));
      }
    }
  }
  return r;
}

DependenciesMatrix dependencies_matrix_state(const InterferenceGraph& g, const LinkParams& params,
                                             Schedule x) {
  if (!g.is_independent(x)) throw std::invalid_argument("state is not a feasible schedule");
  const int n = g.size();
  DependenciesMatrix r(n, MatrixKind::kPerState);
  for (int j = 0; j < n; ++j) {
    const Schedule y = x.flipped(j);
    if (!g.is_independent(y)) continue;
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      r(i, j) = bernoulli_tv(conditional_marginal(g, params, x, i),
                             conditional_marginal(g, params, y, i));
    }
  }
  return r;
}

DependenciesMatrix expected_dependencies(const InterferenceGraph& g, const ScheduleSpace& space,
                                         const LinkParams& params, const Distribution& p) {
  if (p.size() != space.size()) {
    throw std::invalid_argument("distribution and schedule space differ in size");
  }
  const int n = g.size();
  DependenciesMatrix out(n, MatrixKind::kExpected);
  for (std::size_t k = 0; k < space.size(); ++k) {
    if (p[k] == 0.0) continue;
    const DependenciesMatrix rx = dependencies_matrix_state(g, params, space[k]);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) out(i, j) += p[k] * rx(i, j);
    }
  }
  return out;
}

RowSummary row_summary(std::span<const DependenciesMatrix> per_state, const Distribution* p) {
  if (per_state.empty()) throw std::invalid_argument("row_summary needs at least one state");
  if (p != nullptr && p->size() != per_state.size()) {
    throw std::invalid_argument("row_summary: distribution size does not match the states");
  }
  const auto n = static_cast<std::size_t>(per_state.front().size());
  RowSummary out;
  out.d_min.assign(n, INFINITY);
  out.d_max.assign(n, 0.0);
  if (p != nullptr) out.expected.emplace(n, 0.0);
  for (std::size_t k = 0; k < per_state.size(); ++k) {
    auto sums = per_state[k].row_sums();
    for (std::size_t i = 0; i < n; ++i) {
      out.d_min[i] = std::min(out.d_min[i], sums[i]);
      out.d_max[i] = std::max(out.d_max[i], sums[i]);
      if (p != nullptr) (*out.expected)[i] += (*p)[k] * sums[i];
    }
    out.state_row_sums.push_back(std::move(sums));
  }
  return out;
}

RowSummary row_summary(const InterferenceGraph& g, const ScheduleSpace& space,
                       const LinkParams& params, const Distribution* p) {
  std::vector<DependenciesMatrix> states;
  states.reserve(space.size());
  for (const Schedule x : space) states.push_back(dependencies_matrix_state(g, params, x));
  return row_summary(states, p);
}

std::vector<double> lemma2_estimate(const InterferenceGraph& g, const LinkParams& params) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(g.size()));
  for (int i = 0; i < g.size(); ++i) out.push_back(g.degree(i) * params.strategy(i));
  return out;
}

DependenciesMatrix empirical_dependencies(const Trace& trace, const InterferenceGraph& g,
                                          bool tail_only) {
  if (trace.links != g.size()) throw std::invalid_argument("trace and graph differ in size");
  const ConditionalCounts& counts = tail_only ? trace.tail : trace.lifetime;
  const int n = g.size();
  DependenciesMatrix r(n, MatrixKind::kEmpirical);
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (counts.conditioning.empty() || counts.conditioning[ui] == 0) {
      r.mark_undefined(i);
      continue;
    }
    const double p_hat = static_cast<double>(counts.transmissions[ui]) /
                         static_cast<double>(counts.conditioning[ui]);
    for (int j = 0; j < n; ++j) {
      if (g.adjacent(i, j)) r(i, j) = p_hat;
    }
  }
  return r;
}

MatrixNorms matrix_norms(const DependenciesMatrix& m) {
  const int n = m.size();
  MatrixNorms out;
  for (int i = 0; i < n; ++i) {
    out.norm_inf = std::max(out.norm_inf, m.row_sum(i));
    out.norm1 = std::max(out.norm1, m.column_sum(i));
  }
  out.dobrushin = out.norm_inf < 1.0;
  if (out.norm_inf == 0.0) return out;

  // Power iteration on M^T M from the all-ones vector; M is nonnegative, so the
  // start overlaps the leading singular vector.
  const auto un = static_cast<std::size_t>(n);
  std::vector<double> v(un, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> mv(un);
  std::vector<double> w(un);
  double eig = 0.0;
  for (int it = 0; it < kPowerIterationMax; ++it) {
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += m(i, j) * v[static_cast<std::size_t>(j)];
      mv[static_cast<std::size_t>(i)] = acc;
    }
    double norm2 = 0.0;
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += m(i, j) * mv[static_cast<std::size_t>(i)];
      w[static_cast<std::size_t>(j)] = acc;
      norm2 += acc * acc;
    }
    const double next = std::sqrt(norm2);
    if (next == 0.0) break;
    for (std::size_t j = 0; j < un; ++j) v[j] = w[j] / next;
    const bool done = std::abs(next - eig) <= kPowerIterationTol * std::max(1.0, next);
    eig = next;
    if (done) break;
  }
  out.spectral = std::sqrt(eig);
  return out;
}

void write_matrix_csv(std::ostream& out, const DependenciesMatrix& m) {
  for (int i = 0; i < m.size(); ++i) {
    for (int j = 0; j < m.size(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

nlohmann::json to_json(const DependenciesMatrix& m) {
  const MatrixNorms norms = matrix_norms(m);
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.size(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  nlohmann::json undefined = nlohmann::json::array();
  for (int i = 0; i < m.size(); ++i) {
    if (m.undefined_rows()[static_cast<std::size_t>(i)]) undefined.push_back(i);
  }
  return {
      {"kind", std::string(to_string(m.kind()))},
      {"n", m.size()},
      {"entries", std::move(rows)},
      {"row_sums", m.row_sums()},
      {"norms",
       {{"norm1", norms.norm1},
        {"norm_inf", norms.norm_inf},
        {"spectral", norms.spectral},
        {"dobrushin", norms.dobrushin}}},
      {"undefined_rows", std::move(undefined)},
  };
}

}  // namespace gdcsma
