#ifndef GDCSMA_DYNAMICS_HPP
#define GDCSMA_DYNAMICS_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "gdcsma/graph.hpp"
#include "gdcsma/rng.hpp"

namespace gdcsma {

/// Per-link fugacity lambda, log-fugacity r = log(lambda) and transmission
/// strategy U = lambda / (1 + lambda), kept mutually consistent.
class LinkParams {
 public:
  /// lambda_i > 0 and finite.
  static LinkParams from_fugacity(std::vector<double> lambda);
  /// Any finite r_i.
  static LinkParams from_log_fugacity(std::vector<double> r);
  /// U_i in (0, 1).
  static LinkParams from_strategy(std::vector<double> u);

  static LinkParams uniform_fugacity(int n, double lambda);
  static LinkParams uniform_strategy(int n, double u);

  int size() const { return static_cast<int>(lambda_.size()); }
  double fugacity(int i) const { return lambda_[static_cast<std::size_t>(i)]; }
  double log_fugacity(int i) const { return r_[static_cast<std::size_t>(i)]; }
  double strategy(int i) const { return u_[static_cast<std::size_t>(i)]; }

  std::span<const double> fugacities() const { return lambda_; }
  std::span<const double> log_fugacities() const { return r_; }
  std::span<const double> strategies() const { return u_; }

 private:
  LinkParams() = default;
  std::vector<double> lambda_;
  std::vector<double> r_;
  std::vector<double> u_;
};

/// Bernoulli arrival probabilities per link. Saturated links always have a
/// packet and ignore nu.
struct ArrivalConfig {
  std::vector<double> nu;
  bool saturated = false;

  static ArrivalConfig saturated_links(int n);
  static ArrivalConfig bernoulli(std::vector<double> nu);

  /// Throws std::invalid_argument unless nu has n entries in [0, 1] (or saturated).
  void validate(int n) const;
};

/// A probability per schedule, aligned with a ScheduleSpace.
class Distribution {
 public:
  Distribution() = default;
  /// Throws unless entries are nonnegative and sum to 1 within 1e-12 (relative to size).
  explicit Distribution(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  static Distribution point_mass(std::size_t size, std::size_t at);
  static Distribution uniform(std::size_t size);

 private:
  std::vector<double> probs_;
};

/// One GD-CSMA slot with explicit randomness: `link` is the uniformly drawn
/// link and `draw` the uniform number compared against U_link.
Schedule gd_csma_step(Schedule x, const LinkParams& params, const InterferenceGraph& g, int link,
                      double draw);

/// One GD-CSMA slot: pick a link uniformly; if its neighbourhood is silent it
/// transmits with probability U_i and is silent otherwise, else it is silenced.
Schedule gd_csma_step(Schedule x, const LinkParams& params, const InterferenceGraph& g, Rng& rng);

/// One-slot kernel P(from -> to) of the chain above.
double transition_probability(const InterferenceGraph& g, const LinkParams& params,
                              Schedule from, Schedule to);

/// log sum_X exp(sum_i x_i w_i) over the space, max-shifted.
double log_partition(const ScheduleSpace& space, std::span<const double> weights);

/// Gibbs distribution exp(sum_i x_i w_i) / Z over the space.
Distribution gibbs_distribution(const ScheduleSpace& space, std::span<const double> weights);

/// Product-form stationary law pi(X) proportional to prod_{i in X} lambda_i.
Distribution stationary_distribution(const ScheduleSpace& space, const LinkParams& params);
Distribution stationary_distribution(const InterferenceGraph& g, const LinkParams& params);

/// s_i = sum over schedules with x_i = 1 of their probability.
std::vector<double> service_rates(const Distribution& dist, const ScheduleSpace& space);

struct WindowStats {
  std::size_t index = 0;        ///< 1-based window number
  std::uint64_t first_slot = 0;
  std::uint64_t length = 0;
  std::vector<double> nu_hat;   ///< arrivals per slot (1 for saturated links)
  std::vector<double> s_hat;    ///< slots with x_i = 1 at slot end, per slot
  std::vector<double> r;        ///< log-fugacity after the window's update
};

/// Per link: slots in which every neighbour was silent, and how many of those
/// had the link transmitting. Evaluated on the state at the end of each slot.
struct ConditionalCounts {
  std::vector<std::uint64_t> conditioning;
  std::vector<std::uint64_t> transmissions;
};

/// Called at every window boundary with the window's statistics; returns the
/// parameters for the next window.
using WindowPolicy = std::function<LinkParams(const WindowStats&, const LinkParams&)>;

struct SimulationOptions {
  std::uint64_t horizon = 1'000'000;
  std::uint64_t window_length = 100;
  std::uint64_t seed = 1;
  std::uint64_t tail_slots = 0;  ///< also count conditional statistics over the last slots
  bool track_occupancy = true;   ///< enumerate the schedule space and count visits
  bool record_windows = true;
  bool record_history = false;
  Schedule initial{};
};

struct Trace {
  int links = 0;
  std::uint64_t horizon = 0;
  std::uint64_t window_length = 0;
  std::uint64_t tail_slots = 0;

  std::optional<ScheduleSpace> space;  ///< set when occupancy was tracked
  std::vector<std::uint64_t> occupancy;
  ConditionalCounts lifetime;
  ConditionalCounts tail;
  std::vector<WindowStats> windows;
  std::vector<Schedule> history;

  std::vector<std::uint64_t> served;    ///< slots with x_i = 1, whole run
  std::vector<std::uint64_t> arrivals;  ///< Bernoulli arrivals, whole run
  std::vector<double> final_r;
  Schedule final_state{};

  /// A trace of zero slots over n links.
  static Trace empty(int n);

  /// Visit frequencies over `space`; throws when occupancy was not tracked or horizon is 0.
  Distribution empirical_occupancy() const;
};

/// Runs the chain for options.horizon slots (>= 1) from options.initial.
/// Deterministic in options.seed. Throws std::invalid_argument on bad sizes.
Trace simulate(const InterferenceGraph& g, const LinkParams& params, const ArrivalConfig& arrivals,
               const SimulationOptions& options, const WindowPolicy& policy = {});

/// |time-averaged windowed service - exact s_i| per link. Throws when the
/// trace carries no windows.
std::vector<double> mixing_gap(const Trace& trace, std::span<const double> exact);

/// CSV `slot_window,link,nu_hat,s_hat,r`, one row per (window, link).
void write_trace_csv(std::ostream& out, const Trace& trace);

}  // namespace gdcsma

#endif  // GDCSMA_DYNAMICS_HPP
