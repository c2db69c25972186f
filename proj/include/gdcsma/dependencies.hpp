#ifndef GDCSMA_DEPENDENCIES_HPP
#define GDCSMA_DEPENDENCIES_HPP

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gdcsma/dynamics.hpp"
#include "gdcsma/graph.hpp"
#include "json.hpp"

namespace gdcsma {

enum class MatrixKind { kAnalytic, kPerState, kExpected, kEmpirical };

std::string_view to_string(MatrixKind kind);

/// Square matrix of dependencies. Row i holds how strongly the conditional
/// marginal of link i reacts to each other link j.
class DependenciesMatrix {
 public:
  DependenciesMatrix(int n, MatrixKind kind);

  int size() const { return n_; }
  MatrixKind kind() const { return kind_; }

  double operator()(int i, int j) const { return entries_[index(i, j)]; }
  double& operator()(int i, int j) { return entries_[index(i, j)]; }
  std::span<const double> entries() const { return entries_; }

  double row_sum(int i) const;
  double column_sum(int j) const;
  std::vector<double> row_sums() const;

  /// Empirical matrices flag rows whose conditioning event never occurred.
  const std::vector<bool>& undefined_rows() const { return undefined_; }
  void mark_undefined(int i) { undefined_[static_cast<std::size_t>(i)] = true; }
  bool has_undefined_rows() const;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }
  int n_;
  MatrixKind kind_;
  std::vector<double> entries_;
  std::vector<bool> undefined_;
};

/// Half the L1 distance. Throws std::invalid_argument on mismatched sizes or
/// inputs that are not probability vectors.
double tv_distance(std::span<const double> mu, std::span<const double> nu);

/// Probability that `link` transmits given the states of all other links in
/// `x` (its own bit is ignored): 0 if a neighbour is on, U_link otherwise.
double conditional_marginal(const InterferenceGraph& g, const LinkParams& params, Schedule x,
                            int link);

enum class AnalyticMode {
  kClosedForm,  ///< R_ij = U_i on edges, 0 elsewhere
  kExact,       ///< maximum over all pairs in the schedule space differing at j, marginals from pi
};

/// R_ij = max over (X, Y) differing only at j of the TV distance between the
/// conditional marginals of link i.
DependenciesMatrix dependencies_matrix_analytic(const InterferenceGraph& g, const LinkParams& params,
                                                AnalyticMode mode = AnalyticMode::kClosedForm);

/// R^X_ij for a single feasible state X. Flips of j that leave the schedule
/// space contribute 0.
DependenciesMatrix dependencies_matrix_state(const InterferenceGraph& g, const LinkParams& params,
                                             Schedule x);

/// I = sum_X p(X) R^X.
DependenciesMatrix expected_dependencies(const InterferenceGraph& g, const ScheduleSpace& space,
                                         const LinkParams& params, const Distribution& p);

struct RowSummary {
  /// d_i^X: one row of n sums per state, in schedule-space order.
  std::vector<std::vector<double>> state_row_sums;
  std::vector<double> d_min;
  std::vector<double> d_max;
  /// sum_X p(X) d_i^X when a distribution was supplied.
  std::optional<std::vector<double>> expected;
};

RowSummary row_summary(std::span<const DependenciesMatrix> per_state,
                       const Distribution* p = nullptr);
RowSummary row_summary(const InterferenceGraph& g, const ScheduleSpace& space,
                       const LinkParams& params, const Distribution* p = nullptr);

/// d_i * lambda_i / (1 + lambda_i).
std::vector<double> lemma2_estimate(const InterferenceGraph& g, const LinkParams& params);

/// R_ij estimated as the observed frequency of link i transmitting while all of
/// its neighbours are silent, placed on the edges of i. Rows with no
/// conditioning slots are flagged undefined and left at 0.
DependenciesMatrix empirical_dependencies(const Trace& trace, const InterferenceGraph& g,
                                          bool tail_only = false);

struct MatrixNorms {
  double norm1 = 0.0;     ///< max column sum
  double norm_inf = 0.0;  ///< max row sum
  double spectral = 0.0;  ///< largest singular value
  bool dobrushin = false; ///< norm_inf < 1
};

MatrixNorms matrix_norms(const DependenciesMatrix& m);

/// n lines of n comma-separated entries.
void write_matrix_csv(std::ostream& out, const DependenciesMatrix& m);

/// {kind, n, entries, row_sums, norms, undefined_rows}
nlohmann::json to_json(const DependenciesMatrix& m);

}  // namespace gdcsma

#endif  // GDCSMA_DEPENDENCIES_HPP
