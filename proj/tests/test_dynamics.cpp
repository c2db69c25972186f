#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "gdcsma/dependencies.hpp"
#include "gdcsma/dynamics.hpp"
#include "test_support.hpp"

using namespace gdcsma;

namespace {

std::vector<double> random_fugacity(int n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> logl(-1.5, 1.5);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (double& v : out) v = std::exp(logl(gen));
  return out;
}

}  // namespace

TEST_CASE("link parameters stay consistent") {
  const LinkParams a = LinkParams::from_fugacity({1.0, 3.0});
  CHECK(a.strategy(0) == doctest::Approx(0.5));
  CHECK(a.strategy(1) == doctest::Approx(0.75));
  CHECK(a.log_fugacity(1) == doctest::Approx(std::log(3.0)));
  const LinkParams b = LinkParams::from_strategy({0.2});
  CHECK(b.fugacity(0) == doctest::Approx(0.25));
  const LinkParams c = LinkParams::from_log_fugacity({-std::log(2.0)});
  CHECK(c.fugacity(0) == doctest::Approx(0.5));
  CHECK(LinkParams::uniform_strategy(4, 0.5).fugacity(3) == doctest::Approx(1.0));
  CHECK_THROWS_AS(LinkParams::from_fugacity({0.0}), std::invalid_argument);
  CHECK_THROWS_AS(LinkParams::from_fugacity({-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(LinkParams::from_strategy({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(LinkParams::from_log_fugacity({INFINITY}), std::invalid_argument);
}

TEST_CASE("distribution validation") {
  CHECK_NOTHROW(Distribution({0.25, 0.75}));
  CHECK_THROWS_AS(Distribution({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(Distribution({-0.1, 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(Distribution(std::vector<double>{}), std::invalid_argument);
  CHECK(Distribution::point_mass(3, 1)[1] == 1.0);
  CHECK(Distribution::uniform(4)[2] == 0.25);
}

TEST_CASE("single step rules") {
  const InterferenceGraph p3(3, std::vector<Edge>{{0, 1}, {1, 2}});
  const LinkParams u = LinkParams::uniform_strategy(3, 0.5);
  // Blocked link is forced off even when the draw would activate it.
  CHECK(gd_csma_step(Schedule{0b001}, u, p3, 1, 0.0).bits == 0b001);
  CHECK(gd_csma_step(Schedule{0b000}, u, p3, 1, 0.49).bits == 0b010);
  CHECK(gd_csma_step(Schedule{0b010}, u, p3, 1, 0.51).bits == 0b000);
  CHECK(gd_csma_step(Schedule{0b001}, u, p3, 2, 0.2).bits == 0b101);
}

TEST_CASE("kernel rows are stochastic and preserve feasibility") {
  std::mt19937_64 gen(3);
  for (int n = 2; n <= 6; ++n) {
    for (const GraphSpec& spec : test::families(n)) {
      const InterferenceGraph g = build_graph(spec);
      const LinkParams params = LinkParams::from_fugacity(random_fugacity(n, gen));
      const ScheduleSpace space = enumerate_schedules(g);
      for (const Schedule x : space) {
        double row = 0.0;
        for (const Schedule y : space) row += transition_probability(g, params, x, y);
        CHECK(row == doctest::Approx(1.0).epsilon(1e-13));
        // Mass outside the space would be a feasibility violation.
        for (int i = 0; i < n; ++i) {
          const Schedule y = x.flipped(i);
          if (!space.contains(y)) CHECK(transition_probability(g, params, x, y) == 0.0);
        }
      }
    }
  }
}

TEST_CASE("detailed balance holds on every family up to n = 6") {
  std::mt19937_64 gen(4);
  for (int n = 1; n <= 6; ++n) {
    for (const GraphSpec& spec : test::families(n)) {
      const InterferenceGraph g = build_graph(spec);
      const LinkParams params = LinkParams::from_fugacity(random_fugacity(n, gen));
      const ScheduleSpace space = enumerate_schedules(g);
      const Distribution pi = stationary_distribution(space, params);
      double worst = 0.0;
      for (std::size_t a = 0; a < space.size(); ++a) {
        for (std::size_t b = 0; b < space.size(); ++b) {
          const double lhs = pi[a] * transition_probability(g, params, space[a], space[b]);
          const double rhs = pi[b] * transition_probability(g, params, space[b], space[a]);
          worst = std::max(worst, std::abs(lhs - rhs));
        }
      }
      CAPTURE(test::describe(spec));
      CHECK(worst < 1e-12);
    }
  }
}

TEST_CASE("product form matches brute-force weights and the kernel fixed point") {
  std::mt19937_64 gen(5);
  for (const GraphSpec& spec : test::families(5)) {
    const InterferenceGraph g = build_graph(spec);
    const std::vector<double> lambda = random_fugacity(5, gen);
    const LinkParams params = LinkParams::from_fugacity(lambda);
    const ScheduleSpace space = enumerate_schedules(g);
    const Distribution pi = stationary_distribution(space, params);

    const auto sets = test::brute_independent_sets(g);
    double z = 0.0;
    for (const auto s : sets) z += test::product_weight(s, lambda);
    for (std::size_t k = 0; k < sets.size(); ++k) {
      CHECK(pi[k] == doctest::Approx(test::product_weight(sets[k], lambda) / z).epsilon(1e-12));
    }

    // Power iteration on the kernel from the uniform law.
    std::vector<double> v(space.size(), 1.0 / static_cast<double>(space.size()));
    for (int it = 0; it < 20000; ++it) {
      std::vector<double> next(space.size(), 0.0);
      for (std::size_t a = 0; a < space.size(); ++a) {
        for (std::size_t b = 0; b < space.size(); ++b) {
          next[b] += v[a] * transition_probability(g, params, space[a], space[b]);
        }
      }
      v.swap(next);
    }
    for (std::size_t k = 0; k < space.size(); ++k) CHECK(v[k] == doctest::Approx(pi[k]).epsilon(1e-9));
  }
}

TEST_CASE("stationary examples") {
  const InterferenceGraph k2 = build_graph({GraphFamily::kComplete, 2, 0, {}});
  const Distribution pi = stationary_distribution(k2, LinkParams::uniform_fugacity(2, 1.0));
  REQUIRE(pi.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(pi[k] == doctest::Approx(1.0 / 3.0));

  const InterferenceGraph one(1, std::span<const Edge>{});
  const ScheduleSpace s1 = enumerate_schedules(one);
  const auto s = service_rates(stationary_distribution(s1, LinkParams::from_fugacity({3.0})), s1);
  CHECK(s[0] == doctest::Approx(0.75));

  const InterferenceGraph c4 = build_graph({GraphFamily::kCycle, 4, 0, {}});
  const Distribution pc = stationary_distribution(c4, LinkParams::uniform_fugacity(4, 1.0));
  CHECK(pc.size() == 7);
  CHECK(std::accumulate(pc.probs().begin(), pc.probs().end(), 0.0) == doctest::Approx(1.0));
}

TEST_CASE("log partition is stable for large weights") {
  const InterferenceGraph k3 = build_graph({GraphFamily::kComplete, 3, 0, {}});
  const ScheduleSpace space = enumerate_schedules(k3);
  const std::vector<double> w{800.0, 800.0, 0.0};
  CHECK(log_partition(space, w) == doctest::Approx(800.0 + std::log(2.0)));
  const Distribution p = gibbs_distribution(space, w);
  CHECK(p[*space.index_of(Schedule{0b001})] == doctest::Approx(0.5));
}

TEST_CASE("empirical occupancy converges to the product form") {
  const InterferenceGraph c5 = build_graph({GraphFamily::kCycle, 5, 0, {}});
  const LinkParams params = LinkParams::uniform_fugacity(5, 1.0);
  SimulationOptions opt;
  opt.horizon = 400000;
  opt.seed = 9;
  const Trace t = simulate(c5, params, ArrivalConfig::saturated_links(5), opt);
  const Distribution emp = t.empirical_occupancy();
  const Distribution pi = stationary_distribution(*t.space, params);
  CHECK(tv_distance(emp.probs(), pi.probs()) < 0.01);
}

TEST_CASE("simulation is deterministic in the seed") {
  const InterferenceGraph g = build_graph({GraphFamily::kStar, 6, 0, {}});
  const LinkParams params = LinkParams::uniform_fugacity(6, 2.0);
  SimulationOptions opt;
  opt.horizon = 5000;
  opt.record_history = true;
  const Trace a = simulate(g, params, ArrivalConfig::bernoulli(std::vector<double>(6, 0.2)), opt);
  const Trace b = simulate(g, params, ArrivalConfig::bernoulli(std::vector<double>(6, 0.2)), opt);
  CHECK(a.history == b.history);
  CHECK(a.arrivals == b.arrivals);
  opt.seed = 2;
  const Trace c = simulate(g, params, ArrivalConfig::bernoulli(std::vector<double>(6, 0.2)), opt);
  CHECK(a.history != c.history);
  for (const Schedule x : a.history) CHECK(g.is_independent(x));
}

TEST_CASE("window accounting") {
  const InterferenceGraph g = build_graph({GraphFamily::kComplete, 3, 0, {}});
  SimulationOptions opt;
  opt.horizon = 1050;
  opt.window_length = 100;
  opt.record_history = true;
  std::size_t calls = 0;
  const WindowPolicy policy = [&](const WindowStats& w, const LinkParams& current) {
    ++calls;
    CHECK(w.index == calls);
    return current;
  };
  const Trace t = simulate(g, LinkParams::uniform_fugacity(3, 1.0),
                           ArrivalConfig::saturated_links(3), opt, policy);
  REQUIRE(t.windows.size() == 11);
  CHECK(calls == 11);
  CHECK(t.windows.back().length == 50);
  CHECK(t.windows.back().first_slot == 1000);
  for (const WindowStats& w : t.windows) CHECK(w.nu_hat[0] == 1.0);

  // s_hat counts slot-end transmissions.
  std::vector<double> served(3, 0.0);
  for (std::size_t s = 0; s < 100; ++s) {
    for (int i = 0; i < 3; ++i) served[static_cast<std::size_t>(i)] += t.history[s].transmits(i);
  }
  for (int i = 0; i < 3; ++i) {
    CHECK(t.windows[0].s_hat[static_cast<std::size_t>(i)] ==
          doctest::Approx(served[static_cast<std::size_t>(i)] / 100.0));
  }
}

TEST_CASE("policy output drives later windows") {
  const InterferenceGraph g(1, std::span<const Edge>{});
  SimulationOptions opt;
  opt.horizon = 20000;
  opt.window_length = 1000;
  // After the first window the link is pushed to U close to 1.
  const WindowPolicy policy = [](const WindowStats&, const LinkParams&) {
    return LinkParams::from_log_fugacity({8.0});
  };
  const Trace t = simulate(g, LinkParams::uniform_strategy(1, 0.5),
                           ArrivalConfig::saturated_links(1), opt, policy);
  CHECK(t.final_r[0] == 8.0);
  CHECK(t.windows.back().s_hat[0] > 0.99);
}

TEST_CASE("conditional counts and tail restriction") {
  const InterferenceGraph g = build_graph({GraphFamily::kComplete, 2, 0, {}});
  SimulationOptions opt;
  opt.horizon = 200;
  opt.tail_slots = 50;
  opt.record_history = true;
  const Trace t = simulate(g, LinkParams::uniform_fugacity(2, 1.0),
                           ArrivalConfig::saturated_links(2), opt);
  std::uint64_t cond = 0;
  std::uint64_t on = 0;
  std::uint64_t tail_cond = 0;
  for (std::size_t s = 0; s < t.history.size(); ++s) {
    if (!t.history[s].transmits(1)) {
      ++cond;
      on += t.history[s].transmits(0);
      if (s >= 150) ++tail_cond;
    }
  }
  CHECK(t.lifetime.conditioning[0] == cond);
  CHECK(t.lifetime.transmissions[0] == on);
  CHECK(t.tail.conditioning[0] == tail_cond);
}

TEST_CASE("simulation input validation") {
  const InterferenceGraph g = build_graph({GraphFamily::kComplete, 2, 0, {}});
  SimulationOptions opt;
  opt.horizon = 0;
  CHECK_THROWS_AS(simulate(g, LinkParams::uniform_fugacity(2, 1.0), ArrivalConfig::saturated_links(2), opt),
                  std::invalid_argument);
  opt.horizon = 10;
  opt.initial = Schedule{0b11};
  CHECK_THROWS_AS(simulate(g, LinkParams::uniform_fugacity(2, 1.0), ArrivalConfig::saturated_links(2), opt),
                  std::invalid_argument);
  opt.initial = Schedule{};
  CHECK_THROWS_AS(simulate(g, LinkParams::uniform_fugacity(3, 1.0), ArrivalConfig::saturated_links(2), opt),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate(g, LinkParams::uniform_fugacity(2, 1.0), ArrivalConfig::bernoulli({0.5, 1.5}), opt),
                  std::invalid_argument);
}

TEST_CASE("mixing gap and trace export") {
  const InterferenceGraph g = build_graph({GraphFamily::kCycle, 4, 0, {}});
  const LinkParams params = LinkParams::uniform_fugacity(4, 1.0);
  SimulationOptions opt;
  opt.horizon = 200000;
  const Trace t = simulate(g, params, ArrivalConfig::saturated_links(4), opt);
  const auto exact = service_rates(stationary_distribution(g, params), enumerate_schedules(g));
  for (const double gap : mixing_gap(t, exact)) CHECK(gap < 0.01);

  std::ostringstream csv;
  write_trace_csv(csv, t);
  const std::string text = csv.str();
  CHECK(text.rfind("slot_window,link,nu_hat,s_hat,r\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 4 * 2000);

  opt.record_windows = false;
  const Trace bare = simulate(g, params, ArrivalConfig::saturated_links(4), opt);
  CHECK_THROWS(mixing_gap(bare, exact));
}
