#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "gdcsma/capacity.hpp"
#include "gdcsma/optimize.hpp"
#include "test_support.hpp"

using namespace gdcsma;

namespace {

/// nu = theta * (service vector of a random time-sharing), strictly inside the
/// capacity region for theta < 1.
std::vector<double> interior_nu(const ScheduleSpace& space, double theta, std::mt19937_64& gen) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> t(space.size());
  double total = 0.0;
  for (double& v : t) total += (v = expo(gen));
  std::vector<double> nu(static_cast<std::size_t>(space.links()), 0.0);
  for (std::size_t k = 0; k < space.size(); ++k) {
    for (int i = 0; i < space.links(); ++i) {
      if (space[k].transmits(i)) nu[static_cast<std::size_t>(i)] += theta * t[k] / total;
    }
  }
  return nu;
}

double fd(const std::function<double(std::vector<double>)>& f, std::vector<double> x, std::size_t i,
          double h) {
  std::vector<double> up = x;
  std::vector<double> dn = x;
  up[i] += h;
  dn[i] -= h;
  return (f(up) - f(dn)) / (2 * h);
}

}  // namespace

TEST_CASE("learning rates") {
  CHECK(LearningRateSchedule::constant(0.01).rate(1) == 0.01);
  CHECK(LearningRateSchedule::constant(0.01).rate(1000) == 0.01);
  const LearningRateSchedule tv = LearningRateSchedule::time_varying();
  CHECK(tv.rate(1) == doctest::Approx(1.0 / (2.0 * std::log(2.0))));
  const double u = 1.0 + std::pow(1000.0, 0.3);
  CHECK(tv.rate(1000) == doctest::Approx(1.0 / (u * std::log(u))));
  for (std::uint64_t t = 1; t < 5000; t += 7) CHECK(tv.rate(t + 1) < tv.rate(t));
  CHECK_THROWS_AS(tv.rate(0), std::invalid_argument);
  CHECK_THROWS_AS(LearningRateSchedule::constant(0.0), std::invalid_argument);
}

TEST_CASE("distributed update projects onto r >= 0") {
  const std::vector<double> r{0.5, 0.01, 1.0};
  const std::vector<double> nu{0.2, 0.0, 0.5};
  const std::vector<double> s{0.1, 0.9, 0.5};
  const auto next = distributed_update(r, nu, s, 0.1);
  CHECK(next[0] == doctest::Approx(0.51));
  CHECK(next[1] == 0.0);
  CHECK(next[2] == 1.0);
  CHECK_THROWS_AS(distributed_update(r, std::vector<double>{0.1}, s, 0.1), std::invalid_argument);
}

TEST_CASE("distributed policy uses the window index") {
  const WindowPolicy policy = distributed_policy(LearningRateSchedule::time_varying());
  WindowStats w;
  w.index = 3;
  w.nu_hat = {0.6};
  w.s_hat = {0.1};
  const LinkParams next = policy(w, LinkParams::from_log_fugacity({1.0}));
  CHECK(next.log_fugacity(0) ==
        doctest::Approx(1.0 + LearningRateSchedule::time_varying().rate(3) * 0.5));
}

TEST_CASE("gradient of F matches central differences") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 6;
    const InterferenceGraph g = test::random_graph(n, 0.4, gen);
    const ScheduleSpace space = enumerate_schedules(g);
    std::vector<double> r(static_cast<std::size_t>(n));
    std::vector<double> nu(static_cast<std::size_t>(n));
    for (double& v : r) v = 4.0 * unif(gen) - 2.0;
    for (double& v : nu) v = unif(gen);
    const auto grad = grad_F(space, r, nu);
    const auto f = [&](std::vector<double> x) { return objective_F(space, x, nu); };
    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(grad[i] == doctest::Approx(fd(f, r, i, 1e-5)).epsilon(1e-7).scale(1.0));
    }
  }
}

TEST_CASE("primal optimum on K2") {
  const InterferenceGraph k2 = build_graph({GraphFamily::kComplete, 2, 0, {}});
  const std::vector<double> nu{0.25, 0.25};
  const SolveReport rep = solve_prime(k2, nu);
  REQUIRE(rep.converged);
  CHECK(std::exp(rep.solution[0]) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(std::exp(rep.solution[1]) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(rep.capacity_feasible);
}

TEST_CASE("sign-constrained primal at zero demand is the uniform law") {
  const InterferenceGraph c5 = build_graph({GraphFamily::kCycle, 5, 0, {}});
  SolveOptions opt;
  opt.constraint = SignConstraint::kNonnegative;
  const SolveReport rep = solve_prime(c5, std::vector<double>(5, 0.0), opt);
  REQUIRE(rep.converged);
  for (const double r : rep.solution) CHECK(r == 0.0);
  const Distribution p = solve_dual_maxent(c5, std::vector<double>(5, 0.0), SignConstraint::kNonnegative);
  for (const double v : p.probs()) CHECK(v == doctest::Approx(1.0 / 11.0));
}

TEST_CASE("sign-constrained primal keeps slack links at zero") {
  // Link 2 of P3 is served well above its demand by the optimum of the free problem.
  const InterferenceGraph p3(3, std::vector<Edge>{{0, 1}, {1, 2}});
  SolveOptions opt;
  opt.constraint = SignConstraint::kNonnegative;
  const std::vector<double> nu{0.6, 0.05, 0.05};
  const SolveReport rep = solve_prime(p3, nu, opt);
  REQUIRE(rep.converged);
  const ScheduleSpace space = enumerate_schedules(p3);
  const auto grad = grad_F(space, rep.solution, nu);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(rep.solution[i] >= 0.0);
    // KKT: r_i > 0 implies s_i = nu_i; r_i = 0 implies s_i >= nu_i.
    if (rep.solution[i] > 1e-9) CHECK(std::abs(grad[i]) < 1e-9);
    else CHECK(grad[i] <= 1e-9);
  }
  CHECK(rep.solution[0] > 0.0);
}

TEST_CASE("demand outside the capacity region is diagnosed") {
  const InterferenceGraph k3 = build_graph({GraphFamily::kComplete, 3, 0, {}});
  const std::vector<double> nu(3, 0.4);
  const SolveReport rep = solve_prime(k3, nu);
  CHECK_FALSE(rep.capacity_feasible);
  CHECK_FALSE(rep.converged);
  CHECK(rep.diagnostic.find("capacity") != std::string::npos);
  CHECK_THROWS_AS(solve_dual_maxent(k3, nu), std::invalid_argument);
  CHECK_THROWS_AS(verify_duality(k3, nu), std::invalid_argument);
}

TEST_CASE("strong duality and product form") {
  std::mt19937_64 gen(32);
  for (const GraphFamily fam : {GraphFamily::kStar, GraphFamily::kCycle, GraphFamily::kComplete}) {
    for (const int n : {3, 5, 7}) {
      const InterferenceGraph g = build_graph({fam, n, 0, {}});
      const ScheduleSpace space = enumerate_schedules(g);
      const std::vector<double> nu = interior_nu(space, 0.7, gen);
      for (const SignConstraint c : {SignConstraint::kFree, SignConstraint::kNonnegative}) {
        const DualityReport rep = verify_duality(g, nu, c);
        CAPTURE(n);
        CHECK(rep.primal_converged);
        CHECK(rep.dual_converged);
        CHECK(rep.gap < 1e-8);
        CHECK(rep.product_form_error < 1e-10);
        CHECK(rep.multiplier_error < 1e-6);
        for (const double cs : rep.complementary_slackness) CHECK(std::abs(cs) < 1e-9);
        for (const double res : rep.constraint_residuals) {
          if (c == SignConstraint::kFree) CHECK(std::abs(res) < 1e-9);
          else CHECK(res > -1e-9);
        }
      }
    }
  }
}

TEST_CASE("simulated distributed updates approach the exact optimum") {
  const InterferenceGraph k2 = build_graph({GraphFamily::kComplete, 2, 0, {}});
  const std::vector<double> nu{0.3, 0.3};
  SolveOptions opt;
  opt.mode = SolveMode::kSimulated;
  opt.schedule = LearningRateSchedule::constant(0.01);
  opt.max_iter = 20000;
  opt.tol = 0.05;
  opt.keep_trajectory = true;
  const SolveReport rep = solve_prime(k2, nu, opt);
  CHECK(rep.converged);
  CHECK(rep.trajectory.size() == 20001);
  // Exact optimum: s = lambda / (1 + 2 lambda) = 0.3 gives lambda = 0.75.
  for (const double r : rep.solution) CHECK(std::exp(r) == doctest::Approx(0.75).epsilon(0.15));
  std::ostringstream csv;
  write_trajectory_csv(csv, rep);
  CHECK(csv.str().rfind("iter,objective,grad_norm,link,value\n", 0) == 0);
  CHECK(to_json(rep).at("converged") == true);
}

TEST_CASE("trajectory records every Newton iterate") {
  const InterferenceGraph c4 = build_graph({GraphFamily::kCycle, 4, 0, {}});
  SolveOptions opt;
  opt.keep_trajectory = true;
  const SolveReport rep = solve_prime(c4, std::vector<double>(4, 0.3), opt);
  REQUIRE(rep.converged);
  CHECK(rep.trajectory.size() == rep.iterations + 1);
  for (std::size_t k = 1; k < rep.trajectory.size(); ++k) {
    CHECK(rep.trajectory[k].objective >= rep.trajectory[k - 1].objective - 1e-12);
  }
}

TEST_CASE("constrained dual at pinned d_min = 1 and zero slack is F at r = zeta") {
  std::mt19937_64 gen(33);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (const GraphSpec& spec : test::families(6)) {
    const InterferenceGraph g = build_graph(spec);
    const ScheduleSpace space = enumerate_schedules(g);
    std::vector<double> zeta(6);
    std::vector<double> nu(6);
    for (double& z : zeta) z = 2.0 * unif(gen);
    for (double& v : nu) v = 0.3 * unif(gen);
    ConstrainedDualOptions opt;
    opt.dmin = DminSource::kPinned;
    opt.pinned_dmin = 1.0;
    CHECK(dual_objective_D(g, space, zeta, nu, opt) ==
          doctest::Approx(objective_F(space, zeta, nu)).epsilon(1e-12));
  }
}

TEST_CASE("gradient of D matches central differences") {
  std::mt19937_64 gen(34);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (const GraphSpec& spec : test::families(5)) {
    const InterferenceGraph g = build_graph(spec);
    const ScheduleSpace space = enumerate_schedules(g);
    std::vector<double> zeta(5);
    std::vector<double> nu(5);
    for (double& z : zeta) z = 0.1 + 1.5 * unif(gen);
    for (double& v : nu) v = 0.3 * unif(gen);
    for (const double eps : {0.0, 0.2}) {
      ConstrainedDualOptions opt;
      opt.epsilon = eps;
      const auto grad = grad_D(g, space, zeta, nu, opt);
      const auto f = [&](std::vector<double> z) { return dual_objective_D(g, space, z, nu, opt); };
      for (std::size_t i = 0; i < 5; ++i) {
        CHECK(grad[i] == doctest::Approx(fd(f, zeta, i, 1e-6)).epsilon(1e-6).scale(1.0));
      }
    }
  }
}

TEST_CASE("constrained dual maximizer satisfies projected KKT") {
  for (const GraphSpec& spec : test::families(6)) {
    const InterferenceGraph g = build_graph(spec);
    const ScheduleSpace space = enumerate_schedules(g);
    const std::vector<double> nu(6, 0.1);
    const SolveReport rep = solve_constrained_dual(g, nu);
    CAPTURE(test::describe(spec));
    REQUIRE(rep.converged);
    const auto grad = grad_D(g, space, rep.solution, nu);
    for (std::size_t i = 0; i < 6; ++i) {
      if (rep.solution[i] > 0.0) CHECK(std::abs(grad[i]) < 1e-8);
      else CHECK(grad[i] <= 1e-8);
    }
  }
}

TEST_CASE("d_min sources") {
  const InterferenceGraph star = build_graph({GraphFamily::kStar, 5, 0, {}});
  const ScheduleSpace space = enumerate_schedules(star);
  const std::vector<double> zeta{0.5, 0.0, 1.0, 0.2, 0.3};
  const auto lemma2 = dmin_values(star, space, zeta, {});
  CHECK(lemma2[0] == doctest::Approx(4.0 / (1.0 + std::exp(0.5))));
  CHECK(lemma2[1] == doctest::Approx(0.5));
  ConstrainedDualOptions exact;
  exact.dmin = DminSource::kExactRowSummary;
  for (const double d : dmin_values(star, space, zeta, exact)) CHECK(d == 0.0);
  // The exact row summary makes every positive coordinate infinitely costly.
  CHECK(std::isinf(dual_objective_D(star, space, zeta, std::vector<double>(5, 0.1), exact)));
  CHECK(dual_objective_D(star, space, std::vector<double>(5, 0.0), std::vector<double>(5, 0.1), exact) ==
        doctest::Approx(-std::log(static_cast<double>(space.size()))));
  CHECK_THROWS_AS(grad_D(star, space, zeta, std::vector<double>(5, 0.1), exact), std::invalid_argument);
}

TEST_CASE("the exponential-family law of the dual variables is the stationary law at lambda = e^zeta") {
  std::mt19937_64 gen(35);
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  for (const GraphSpec& spec : test::families(5)) {
    const InterferenceGraph g = build_graph(spec);
    const ScheduleSpace space = enumerate_schedules(g);
    std::vector<double> zeta(5);
    for (double& z : zeta) z = unif(gen);
    const Distribution q = dual_gibbs_distribution(space, zeta);
    std::vector<double> lambda_plus(5);
    for (std::size_t i = 0; i < 5; ++i) lambda_plus[i] = std::exp(zeta[i]);
    const Distribution pi_plus = stationary_distribution(space, LinkParams::from_fugacity(lambda_plus));
    // Direct evaluation of exp(-sum zeta_i (1 - x_i)) / normalizer.
    double z = 0.0;
    std::vector<double> w(space.size());
    for (std::size_t k = 0; k < space.size(); ++k) {
      double e = 0.0;
      for (int i = 0; i < 5; ++i) e -= zeta[static_cast<std::size_t>(i)] * (1 - space[k].transmits(i));
      z += (w[k] = std::exp(e));
    }
    for (std::size_t k = 0; k < space.size(); ++k) {
      CHECK(q[k] == doctest::Approx(w[k] / z).epsilon(1e-12));
      CHECK(q[k] == doctest::Approx(pi_plus[k]).epsilon(1e-12));
    }
    CHECK(lemma1_params(zeta).fugacity(0) == doctest::Approx(std::exp(-zeta[0])));
  }
}
