#ifndef GDCSMA_SRC_SIMPLEX_HPP
#define GDCSMA_SRC_SIMPLEX_HPP

#include <vector>

namespace gdcsma::detail {

struct LpSolution {
  bool optimal = false;
  bool unbounded = false;
  double objective = 0.0;
  std::vector<double> x;     ///< structural variables
  std::vector<double> dual;  ///< one multiplier per row, >= 0
};

/// max c.x  s.t.  A x <= b, x >= 0, with b >= 0 (the slack basis is feasible).
/// Dense tableau, Dantzig pricing with a switch to Bland's rule after a run of
/// degenerate pivots.
LpSolution maximize_standard_form(const std::vector<std::vector<double>>& a,
                                  const std::vector<double>& b, const std::vector<double>& c);

}  // namespace gdcsma::detail

#endif  // GDCSMA_SRC_SIMPLEX_HPP
