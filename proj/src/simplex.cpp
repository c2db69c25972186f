#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

namespace gdcsma::detail {

namespace {
constexpr double kEps = 1e-12;
constexpr int kDegenerateRunBeforeBland = 50;
}  // namespace

LpSolution maximize_standard_form(const std::vector<std::vector<double>>& a,
                                  const std::vector<double>& b, const std::vector<double>& c) {
  const std::size_t m = b.size();
  const std::size_t nvar = c.size();
  if (a.size() != m) throw std::invalid_argument("lp: row count mismatch");
  const std::size_t cols = nvar + m;

  // Row-major tableau; last column holds the right-hand side.
  std::vector<double> t((m + 1) * (cols + 1), 0.0);
  auto at = [&](std::size_t r, std::size_t col) -> double& { return t[r * (cols + 1) + col]; };
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) {
    if (a[r].size() != nvar) throw std::invalid_argument("lp: column count mismatch");
    if (b[r] < 0.0) throw std::invalid_argument("lp: negative right-hand side");
    for (std::size_t j = 0; j < nvar; ++j) at(r, j) = a[r][j];
    at(r, nvar + r) = 1.0;
    at(r, cols) = b[r];
    basis[r] = nvar + r;
  }
  // Objective row stores reduced costs as -c; optimal when all entries >= 0.
  for (std::size_t j = 0; j < nvar; ++j) at(m, j) = -c[j];

  int degenerate_run = 0;
  const std::size_t max_pivots = 50 * (cols + m) + 1000;
  LpSolution sol;
  for (std::size_t pivot = 0; pivot < max_pivots; ++pivot) {
    const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
    std::size_t enter = cols;
    double best = -kEps;
    for (std::size_t j = 0; j < cols; ++j) {
      const double rc = at(m, j);
      if (rc < best) {
        enter = j;
        if (bland) break;
        best = rc;
      }
    }
    if (enter == cols) {
      sol.optimal = true;
      break;
    }
    std::size_t leave = m;
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m; ++r) {
      const double coef = at(r, enter);
      if (coef <= kEps) continue;
      const double q = at(r, cols) / coef;
      if (q < ratio - kEps || (q <= ratio + kEps && leave < m && basis[r] < basis[leave])) {
        ratio = q;
        leave = r;
      }
    }
    if (leave == m) {
      sol.unbounded = true;
      return sol;
    }
    degenerate_run = ratio <= kEps ? degenerate_run + 1 : 0;

    const double p = at(leave, enter);
    for (std::size_t j = 0; j <= cols; ++j) at(leave, j) /= p;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols; ++j) at(r, j) -= f * at(leave, j);
    }
    basis[leave] = enter;
  }
  if (!sol.optimal) throw std::runtime_error("lp: pivot limit reached");

  sol.x.assign(nvar, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < nvar) sol.x[basis[r]] = at(r, cols);
  }
  sol.dual.resize(m);
  for (std::size_t r = 0; r < m; ++r) sol.dual[r] = std::max(0.0, at(m, nvar + r));
  sol.objective = at(m, cols);
  return sol;
}

}  // namespace gdcsma::detail
