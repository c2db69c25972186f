#ifndef GDCSMA_CAPACITY_HPP
#define GDCSMA_CAPACITY_HPP

#include <span>
#include <vector>

#include "gdcsma/graph.hpp"

namespace gdcsma {

/// Arrival vectors must be strictly dominated: optimum slack above this.
inline constexpr double kCapacitySlackTolerance = 1e-9;

struct CapacityResult {
  bool feasible = false;
  /// max over time-sharings t of min_i (sum_X t_X x_i - nu_i).
  double slack = 0.0;
  /// Optimal time-sharing over the schedule space (sums to 1).
  std::vector<double> time_shares;
  /// Link weights w >= 0, sum 1, with max_X w.X - w.nu == slack. When infeasible
  /// this certifies that no schedule mix strictly dominates nu.
  std::vector<double> certificate;
};

/// Exact linear feasibility test for membership in the capacity region.
CapacityResult capacity_check(const ScheduleSpace& space, std::span<const double> nu);
CapacityResult capacity_check(const InterferenceGraph& g, std::span<const double> nu);

/// Largest rate every link can be served at simultaneously (capacity_check at nu = 0).
double symmetric_capacity(const InterferenceGraph& g);

}  // namespace gdcsma

#endif  // GDCSMA_CAPACITY_HPP
