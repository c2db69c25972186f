#include "gdcsma/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "gdcsma/format.hpp"

namespace gdcsma {

namespace {

// Neumaier-compensated sum.
double accurate_sum(std::span<const double> values) {
  double sum = 0.0;
  double c = 0.0;
  for (const double v : values) {
    const double t = sum + v;
    c += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return sum + c;
}

void require_size(std::size_t got, int n, const char* what) {
  if (got != static_cast<std::size_t>(n)) {
    throw std::invalid_argument(std::string(what) + " has " + std::to_string(got) +
                                " entries, graph has " + std::to_string(n) + " links");
  }
}

}  // namespace

LinkParams LinkParams::from_fugacity(std::vector<double> lambda) {
  LinkParams p;
  for (const double l : lambda) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw std::invalid_argument("fugacity must be positive and finite, got " + format_double(l));
    }
    p.r_.push_back(std::log(l));
    p.u_.push_back(l / (1.0 + l));
  }
  p.lambda_ = std::move(lambda);
  return p;
}

LinkParams LinkParams::from_log_fugacity(std::vector<double> r) {
  LinkParams p;
  for (const double v : r) {
    if (!std::isfinite(v)) throw std::invalid_argument("log-fugacity must be finite");
    p.lambda_.push_back(std::exp(v));
    p.u_.push_back(1.0 / (1.0 + std::exp(-v)));
  }
  p.r_ = std::move(r);
  return p;
}

LinkParams LinkParams::from_strategy(std::vector<double> u) {
  LinkParams p;
  for (const double v : u) {
    if (!(v > 0.0 && v < 1.0)) {
      throw std::invalid_argument("transmission strategy must lie in (0, 1), got " +
                                  format_double(v));
    }
    p.lambda_.push_back(v / (1.0 - v));
    p.r_.push_back(std::log(v) - std::log1p(-v));
  }
  p.u_ = std::move(u);
  return p;
}

LinkParams LinkParams::uniform_fugacity(int n, double lambda) {
  return from_fugacity(std::vector<double>(static_cast<std::size_t>(n), lambda));
}

LinkParams LinkParams::uniform_strategy(int n, double u) {
  return from_strategy(std::vector<double>(static_cast<std::size_t>(n), u));
}

ArrivalConfig ArrivalConfig::saturated_links(int n) {
  return ArrivalConfig{std::vector<double>(static_cast<std::size_t>(n), 1.0), true};
}

ArrivalConfig ArrivalConfig::bernoulli(std::vector<double> nu) {
  return ArrivalConfig{std::move(nu), false};
}

void ArrivalConfig::validate(int n) const {
  if (saturated) return;
  require_size(nu.size(), n, "arrival vector");
  for (const double v : nu) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("arrival probability must lie in [0, 1], got " +
                                  format_double(v));
    }
  }
}

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("distribution over an empty space");
  for (const double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("distribution has a negative or non-finite entry");
    }
  }
  const double total = accurate_sum(probs_);
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("distribution sums to " + format_double(total) + ", not 1");
  }
}

Distribution Distribution::point_mass(std::size_t size, std::size_t at) {
  std::vector<double> p(size, 0.0);
  p.at(at) = 1.0;
  return Distribution(std::move(p));
}

Distribution Distribution::uniform(std::size_t size) {
  return Distribution(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

Schedule gd_csma_step(Schedule x, const LinkParams& params, const InterferenceGraph& g, int link,
                      double draw) {
  if (!g.neighbors_silent(link, x)) return x.with(link, false);
  return x.with(link, draw < params.strategy(link));
}

Schedule gd_csma_step(Schedule x, const LinkParams& params, const InterferenceGraph& g, Rng& rng) {
  const int link = static_cast<int>(rng.below(static_cast<std::uint32_t>(g.size())));
  if (!g.neighbors_silent(link, x)) return x.with(link, false);
  return x.with(link, rng.uniform() < params.strategy(link));
}

double transition_probability(const InterferenceGraph& g, const LinkParams& params, Schedule from,
                              Schedule to) {
  const double pick = 1.0 / g.size();
  double p = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    if (g.neighbors_silent(i, from)) {
      if (from.with(i, true) == to) p += pick * params.strategy(i);
      if (from.with(i, false) == to) p += pick * (1.0 - params.strategy(i));
    } else if (from.with(i, false) == to) {
      p += pick;
    }
  }
  return p;
}

double log_partition(const ScheduleSpace& space, std::span<const double> weights) {
  require_size(weights.size(), space.links(), "weight vector");
  std::vector<double> exponents;
  exponents.reserve(space.size());
  double top = -INFINITY;
  for (const Schedule x : space) {
    double e = 0.0;
    for (LinkMask rest = x.bits; rest != 0U; rest &= rest - 1U) {
      e += weights[static_cast<std::size_t>(std::countr_zero(rest))];
    }
    exponents.push_back(e);
    top = std::max(top, e);
  }
  double acc = 0.0;
  for (const double e : exponents) acc += std::exp(e - top);
  return top + std::log(acc);
}

Distribution gibbs_distribution(const ScheduleSpace& space, std::span<const double> weights) {
  const double log_z = log_partition(space, weights);
  std::vector<double> p;
  p.reserve(space.size());
  for (const Schedule x : space) {
    double e = 0.0;
    for (LinkMask rest = x.bits; rest != 0U; rest &= rest - 1U) {
      e += weights[static_cast<std::size_t>(std::countr_zero(rest))];
    }
    p.push_back(std::exp(e - log_z));
  }
  // Renormalize away the last few ulps.
  const double total = accurate_sum(p);
  for (double& v : p) v /= total;
  return Distribution(std::move(p));
}

Distribution stationary_distribution(const ScheduleSpace& space, const LinkParams& params) {
  require_size(static_cast<std::size_t>(params.size()), space.links(), "link parameters");
  return gibbs_distribution(space, params.log_fugacities());
}

Distribution stationary_distribution(const InterferenceGraph& g, const LinkParams& params) {
  return stationary_distribution(enumerate_schedules(g), params);
}

std::vector<double> service_rates(const Distribution& dist, const ScheduleSpace& space) {
  if (dist.size() != space.size()) {
    throw std::invalid_argument("distribution and schedule space differ in size");
  }
  std::vector<double> s(static_cast<std::size_t>(space.links()), 0.0);
  for (std::size_t k = 0; k < space.size(); ++k) {
    for (LinkMask rest = space[k].bits; rest != 0U; rest &= rest - 1U) {
      s[static_cast<std::size_t>(std::countr_zero(rest))] += dist[k];
    }
  }
  return s;
}

Trace Trace::empty(int n) {
  Trace t;
  t.links = n;
  const auto un = static_cast<std::size_t>(n);
  t.lifetime = {std::vector<std::uint64_t>(un, 0), std::vector<std::uint64_t>(un, 0)};
  t.tail = t.lifetime;
  t.served.assign(un, 0);
  t.arrivals.assign(un, 0);
  return t;
}

Distribution Trace::empirical_occupancy() const {
  if (!space) throw std::invalid_argument("trace did not track occupancy");
  if (horizon == 0) throw std::invalid_argument("trace has no slots");
  std::vector<double> p;
  p.reserve(occupancy.size());
  for (const std::uint64_t c : occupancy) {
    p.push_back(static_cast<double>(c) / static_cast<double>(horizon));
  }
  const double total = accurate_sum(p);
  for (double& v : p) v /= total;
  return Distribution(std::move(p));
}

Trace simulate(const InterferenceGraph& g, const LinkParams& params, const ArrivalConfig& arrivals,
               const SimulationOptions& options, const WindowPolicy& policy) {
  const int n = g.size();
  const auto un = static_cast<std::size_t>(n);
  require_size(static_cast<std::size_t>(params.size()), n, "link parameters");
  arrivals.validate(n);
  if (options.horizon < 1) throw std::invalid_argument("simulation horizon must be >= 1");
  if (options.window_length < 1) throw std::invalid_argument("window length must be >= 1");
  if (!g.is_independent(options.initial)) {
    throw std::invalid_argument("initial schedule is not feasible");
  }

  Trace trace = Trace::empty(n);
  trace.horizon = options.horizon;
  trace.window_length = options.window_length;
  trace.tail_slots = std::min(options.tail_slots, options.horizon);
  if (options.track_occupancy) {
    trace.space = enumerate_schedules(g);
    trace.occupancy.assign(trace.space->size(), 0);
  }
  if (options.record_history) trace.history.reserve(options.horizon);

  Rng rng(options.seed);
  LinkParams current = params;
  std::vector<double> strategy(current.strategies().begin(), current.strategies().end());
  std::vector<LinkMask> nbr(un);
  for (int i = 0; i < n; ++i) nbr[static_cast<std::size_t>(i)] = g.neighbors(i);

  std::vector<std::uint64_t> window_arrivals(un, 0);
  std::vector<std::uint64_t> window_served(un, 0);
  std::uint64_t window_start = 0;
  std::size_t window_index = 0;
  const std::uint64_t tail_start = options.horizon - trace.tail_slots;

  Schedule x = options.initial;
  Schedule last_counted{~LinkMask{0}};
  std::size_t last_index = 0;

  for (std::uint64_t slot = 0; slot < options.horizon; ++slot) {
    const auto link = static_cast<int>(rng.below(static_cast<std::uint32_t>(n)));
    if ((nbr[static_cast<std::size_t>(link)] & x.bits) == 0U) {
      x = x.with(link, rng.uniform() < strategy[static_cast<std::size_t>(link)]);
    } else {
      x = x.with(link, false);
    }

    if (!arrivals.saturated) {
      for (std::size_t i = 0; i < un; ++i) {
        if (rng.uniform() < arrivals.nu[i]) ++window_arrivals[i];
      }
    }
    for (LinkMask rest = x.bits; rest != 0U; rest &= rest - 1U) {
      ++window_served[static_cast<std::size_t>(std::countr_zero(rest))];
    }

    const bool in_tail = slot >= tail_start;
    for (std::size_t i = 0; i < un; ++i) {
      if ((nbr[i] & x.bits) != 0U) continue;
      const bool on = ((x.bits >> i) & 1U) != 0U;
      ++trace.lifetime.conditioning[i];
      if (on) ++trace.lifetime.transmissions[i];
      if (in_tail) {
        ++trace.tail.conditioning[i];
        if (on) ++trace.tail.transmissions[i];
      }
    }

    if (trace.space) {
      if (x != last_counted) {
        last_index = *trace.space->index_of(x);
        last_counted = x;
      }
      ++trace.occupancy[last_index];
    }
    if (options.record_history) trace.history.push_back(x);

    const std::uint64_t elapsed = slot + 1 - window_start;
    if (elapsed == options.window_length || slot + 1 == options.horizon) {
      WindowStats ws;
      ws.index = ++window_index;
      ws.first_slot = window_start;
      ws.length = elapsed;
      ws.nu_hat.resize(un);
      ws.s_hat.resize(un);
      const auto len = static_cast<double>(elapsed);
      for (std::size_t i = 0; i < un; ++i) {
        ws.nu_hat[i] = arrivals.saturated ? 1.0 : static_cast<double>(window_arrivals[i]) / len;
        ws.s_hat[i] = static_cast<double>(window_served[i]) / len;
        trace.arrivals[i] += arrivals.saturated ? elapsed : window_arrivals[i];
        trace.served[i] += window_served[i];
      }
      if (policy) {
        current = policy(ws, current);
        require_size(static_cast<std::size_t>(current.size()), n, "policy output");
        strategy.assign(current.strategies().begin(), current.strategies().end());
      }
      if (options.record_windows) {
        ws.r.assign(current.log_fugacities().begin(), current.log_fugacities().end());
        trace.windows.push_back(std::move(ws));
      }
      std::fill(window_arrivals.begin(), window_arrivals.end(), 0);
      std::fill(window_served.begin(), window_served.end(), 0);
      window_start = slot + 1;
    }
  }
  trace.final_r.assign(current.log_fugacities().begin(), current.log_fugacities().end());
  trace.final_state = x;
  return trace;
}

std::vector<double> mixing_gap(const Trace& trace, std::span<const double> exact) {
  if (trace.windows.empty()) throw std::invalid_argument("trace has no windows to average");
  require_size(exact.size(), trace.links, "exact service vector");
  std::vector<double> avg(exact.size(), 0.0);
  double slots = 0.0;
  for (const auto& w : trace.windows) {
    const auto len = static_cast<double>(w.length);
    for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += w.s_hat[i] * len;
    slots += len;
  }
  for (std::size_t i = 0; i < avg.size(); ++i) avg[i] = std::abs(avg[i] / slots - exact[i]);
  return avg;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "slot_window,link,nu_hat,s_hat,r\n";
  for (const auto& w : trace.windows) {
    for (std::size_t i = 0; i < w.s_hat.size(); ++i) {
      out << w.index << ',' << i << ',' << format_double(w.nu_hat[i]) << ','
          << format_double(w.s_hat[i]) << ',' << format_double(w.r[i]) << '\n';
    }
  }
}

}  // namespace gdcsma
