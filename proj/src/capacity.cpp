#include "gdcsma/capacity.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "simplex.hpp"

namespace gdcsma {

CapacityResult capacity_check(const ScheduleSpace& space, std::span<const double> nu) {
  const auto n = static_cast<std::size_t>(space.links());
  if (nu.size() != n) throw std::invalid_argument("arrival vector size does not match the graph");
  for (const double v : nu) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("arrival rates must lie in [0, 1]");
  }

  // Variables: t_X for every schedule, then y = slack + 1 >= 0.
  //   y - sum_X t_X x_i <= 1 - nu_i   (one row per link)
  //   sum_X t_X        <= 1
  // Any leftover time share can sit on the empty schedule without hurting a row.
  const std::size_t nx = space.size();
  std::vector<std::vector<double>> a(n + 1, std::vector<double>(nx + 1, 0.0));
  std::vector<double> b(n + 1, 1.0);
  std::vector<double> c(nx + 1, 0.0);
  c[nx] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    a[i][nx] = 1.0;
    b[i] = 1.0 - nu[i];
    for (std::size_t k = 0; k < nx; ++k) {
      if (space[k].transmits(static_cast<int>(i))) a[i][k] = -1.0;
    }
  }
  for (std::size_t k = 0; k < nx; ++k) a[n][k] = 1.0;

  const auto lp = detail::maximize_standard_form(a, b, c);
  if (!lp.optimal) throw std::runtime_error("capacity LP did not reach optimality");

  CapacityResult out;
  out.slack = lp.objective - 1.0;
  out.feasible = out.slack > kCapacitySlackTolerance;
  out.time_shares.assign(lp.x.begin(), lp.x.begin() + static_cast<std::ptrdiff_t>(nx));
  const double used = std::accumulate(out.time_shares.begin(), out.time_shares.end(), 0.0);
  out.time_shares[0] += std::max(0.0, 1.0 - used);  // schedule 0 is the empty one
  out.certificate.assign(lp.dual.begin(), lp.dual.begin() + static_cast<std::ptrdiff_t>(n));
  const double mass = std::accumulate(out.certificate.begin(), out.certificate.end(), 0.0);
  if (mass > 0.0) {
    for (double& w : out.certificate) w /= mass;
  }
  return out;
}

CapacityResult capacity_check(const InterferenceGraph& g, std::span<const double> nu) {
  return capacity_check(enumerate_schedules(g), nu);
}

double symmetric_capacity(const InterferenceGraph& g) {
  const std::vector<double> zero(static_cast<std::size_t>(g.size()), 0.0);
  return capacity_check(g, zero).slack;
}

}  // namespace gdcsma
