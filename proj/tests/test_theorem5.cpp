#include <cmath>
#include <random>

#include "doctest.h"
#include "gdcsma/capacity.hpp"
#include "gdcsma/optimize.hpp"
#include "test_support.hpp"

using namespace gdcsma;

TEST_CASE("auxiliary function domain and origin") {
  const InterferenceGraph c5 = build_graph({GraphFamily::kCycle, 5, 0, {}});
  const ScheduleSpace space = enumerate_schedules(c5);
  const std::vector<double> zeta(5, 0.5);
  const std::vector<double> nu(5, 0.1);
  CHECK(aux_function_A(c5, space, zeta, std::vector<double>(5, 0.0), nu) == 0.0);
  std::vector<double> bad(5, 0.0);
  bad[2] = -0.5;
  CHECK_THROWS_AS(aux_function_A(c5, space, zeta, bad, nu), std::domain_error);
  CHECK_THROWS_AS(aux_function_A(c5, space, zeta, std::vector<double>(4, 0.0), nu), std::invalid_argument);
}

TEST_CASE("auxiliary function by direct summation") {
  const InterferenceGraph p3(3, std::vector<Edge>{{0, 1}, {1, 2}});
  const ScheduleSpace space = enumerate_schedules(p3);  // {}, {0}, {1}, {2}, {0,2}
  const std::vector<double> zeta{0.4, 1.0, 0.2};
  const std::vector<double> delta{0.1, -0.3, 0.05};
  const std::vector<double> nu{0.2, 0.3, 0.1};
  const int c = jensen_constant(p3);
  REQUIRE(c == 2);
  // Silent counts per link: link 0 is off in {}, {1}, {2}; link 1 in all but {1}.
  const double silent[3] = {3.0, 4.0, 3.0};
  const int degree[3] = {1, 2, 1};
  double inner = 1.0;
  double linear = 0.0;
  for (int i = 0; i < 3; ++i) {
    inner += silent[i] / c * (std::exp(-c * delta[i]) - 1.0);
    const double u = zeta[i] + delta[i];
    linear += -delta[i] * nu[i] + u * (1 + std::exp(u)) / degree[i] -
              zeta[i] * (1 + std::exp(zeta[i])) / degree[i];
  }
  CHECK(aux_function_A(p3, space, zeta, delta, nu) == doctest::Approx(std::log(inner) + linear).epsilon(1e-13));
}

TEST_CASE("auxiliary derivative formula") {
  const InterferenceGraph star = build_graph({GraphFamily::kStar, 4, 0, {}});
  const std::vector<double> zeta{0.3, 0.0, 1.2, 0.7};
  const std::vector<double> delta{-0.1, 0.2, 0.0, -0.5};
  const std::vector<double> nu{0.1, 0.2, 0.3, 0.05};
  const std::vector<double> s{0.2, 0.6, 0.5, 0.4};
  const auto g = aux_derivative(star, zeta, delta, nu, s);
  const int c = 2;  // 1 + cover {hub}
  const int degree[4] = {3, 1, 1, 1};
  for (std::size_t i = 0; i < 4; ++i) {
    const double u = zeta[i] + delta[i];
    const double expected = (s[i] - 1) * std::exp(-c * delta[i]) - nu[i] + (1 + u) * std::exp(u) / degree[i];
    CHECK(g[i] == doctest::Approx(expected).epsilon(1e-14));
  }
  const InterferenceGraph isolated(2, std::span<const Edge>{});
  const auto h = aux_derivative(isolated, std::vector<double>{1.0, 1.0}, std::vector<double>{0.0, 0.0},
                                std::vector<double>{0.1, 0.1}, std::vector<double>{0.5, 0.5});
  CHECK(h[0] == doctest::Approx(-0.5 - 0.1));
}

TEST_CASE("zeta = 0 is a fixed point of the descending-bracket update") {
  for (const GraphSpec& spec : test::families(6)) {
    const InterferenceGraph g = build_graph(spec);
    const ScheduleSpace space = enumerate_schedules(g);
    for (const double z : zeta_update(g, space, std::vector<double>(6, 0.0), std::vector<double>(6, 0.1))) {
      CHECK(z == 0.0);
    }
  }
}

TEST_CASE("the any-root rule leaves zeta = 0 on a link with degree >= 2") {
  // At zeta = 0 the derivative is s - nu - 1 + 1/d < 0 and grows without bound
  // in delta, so a positive root exists.
  const InterferenceGraph star = build_graph({GraphFamily::kStar, 6, 0, {}});
  const ScheduleSpace space = enumerate_schedules(star);
  ZetaUpdateOptions opt;
  opt.rule = DeltaRule::kAnyRoot;
  const auto next = zeta_update(star, space, std::vector<double>(6, 0.0), std::vector<double>(6, 0.1), opt);
  CHECK(next[0] > 0.0);
  for (std::size_t i = 1; i < 6; ++i) CHECK(next[i] == 0.0);
  Theorem5Options run;
  run.update = opt;
  run.max_iter = 200;
  const Theorem5Report rep = theorem5_run(star, std::vector<double>(6, 0.1), run);
  CHECK(rep.exhausted);
  CHECK_FALSE(rep.service_rate_agnostic);
}

TEST_CASE("update output is non-negative and validated") {
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> unif(0.0, 3.0);
  const InterferenceGraph g = build_graph({GraphFamily::kCirculant, 8, 4, {}});
  const ScheduleSpace space = enumerate_schedules(g);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> zeta(8);
    for (double& z : zeta) z = unif(gen);
    for (const double z : zeta_update(g, space, zeta, std::vector<double>(8, 0.05))) CHECK(z >= 0.0);
  }
  CHECK_THROWS_AS(zeta_update(g, space, std::vector<double>(8, -1.0), std::vector<double>(8, 0.05)),
                  std::invalid_argument);
}

TEST_CASE("star and complete graphs reach the service-rate agnostic regime") {
  for (const GraphFamily fam : {GraphFamily::kStar, GraphFamily::kComplete}) {
    const InterferenceGraph g = build_graph({fam, 16, 0, {}});
    const std::vector<double> nu(16, 0.9 * symmetric_capacity(g));
    const Theorem5Report rep = theorem5_run(g, nu);
    CHECK(rep.service_rate_agnostic);
    CHECK_FALSE(rep.exhausted);
    CHECK(rep.iterations <= 10000);
    CHECK(rep.sup_norms.size() == rep.iterations + 1);
    CHECK(rep.trajectory.front() == std::vector<double>(16, 1.0));
    for (std::size_t k = 1; k < rep.sup_norms.size(); ++k) CHECK(rep.sup_norms[k] <= rep.sup_norms[k - 1]);
  }
  const Theorem5Report star = theorem5_run(build_graph({GraphFamily::kStar, 16, 0, {}}), std::vector<double>(16, 0.1));
  CHECK(star.min_vertex_cover == 1);
  CHECK(star.jensen_constant == 2);
  CHECK(star.min_vertex_cover <= star.log2_n);
  const nlohmann::json j = to_json(star);
  CHECK(j.at("service_rate_agnostic") == true);
  CHECK(j.at("min_vertex_cover") == 1);
}

TEST_CASE("iteration budget is reported") {
  const InterferenceGraph g = build_graph({GraphFamily::kCycle, 6, 0, {}});
  Theorem5Options opt;
  opt.max_iter = 0;
  const Theorem5Report rep = theorem5_run(g, std::vector<double>(6, 0.1), opt);
  CHECK(rep.exhausted);
  CHECK(rep.iterations == 0);
  CHECK_FALSE(rep.service_rate_agnostic);
  CHECK(rep.final_zeta == std::vector<double>(6, 1.0));
  opt.initial_zeta = std::vector<double>(6, 0.0);
  const Theorem5Report zero = theorem5_run(g, std::vector<double>(6, 0.1), opt);
  CHECK(zero.service_rate_agnostic);
  CHECK_FALSE(zero.exhausted);
}
