#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "oracle.hpp"
#include "pinstop/dp_solver.hpp"
#include "pinstop/filtering.hpp"
#include "pinstop/montecarlo.hpp"

using namespace pinstop;

TEST_CASE("simulation grid is uniform in sqrt(1 - t)") {
  std::vector<double> t = simulation_times(0.0, 1000);
  REQUIRE(t.size() == 1001);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == 1.0);
  // sqrt(1 - t_k) must fall linearly in k.
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    CHECK(t[k] < t[k + 1]);
    double u = std::sqrt(1.0 - t[k]);
    double expected = 1.0 - static_cast<double>(k) / 1000;
    CHECK(u == doctest::Approx(expected).epsilon(1e-12));
  }

  std::vector<double> late = simulation_times(0.75, 4);
  CHECK(late.front() == 0.75);
  CHECK(late.back() == 1.0);
  CHECK(std::sqrt(1.0 - late[2]) == doctest::Approx(0.25).epsilon(1e-12));

  CHECK_THROWS_AS(simulation_times(1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(simulation_times(-0.1, 10), std::invalid_argument);
  CHECK_THROWS_AS(simulation_times(0.0, 0), std::invalid_argument);
}

TEST_CASE("point-mass paths pin exactly") {
  Prior pm = Prior::point_mass(0.4);
  for (std::uint64_t seed : {1ULL, 99ULL}) {
    PathSample path = sample_path(pm, 0.0, 0.0, 64, seed);
    REQUIRE(path.values.size() == 65);
    CHECK(path.values.front() == 0.0);
    CHECK(path.pin == 0.4);
    CHECK(path.values.back() == 0.4);  // final transition has zero variance
  }
}

TEST_CASE("bridge marginals match the gaussian-pin closed form") {
  // Pin ~ N(0, 1/2) makes Z an ordinary bridge to time T = 2 on [0, 1]:
  // Var Z_t = t (T - t)/T.  Sample a grid time and compare moments.
  Prior nm = Prior::normal(0.0, 0.5);
  const int n_paths = 20000, n_steps = 64, k = 32;
  std::vector<double> zk(n_paths), pins(n_paths);
  double t_k = 0.0;
  for (int p = 0; p < n_paths; ++p) {
    PathSample path = sample_path(nm, 0.0, 0.0, n_steps, 1000 + p);
    zk[p] = path.values[k];
    pins[p] = path.pin;
    t_k = path.times[k];
  }
  double mean = 0.0, var = 0.0;
  for (double z : zk) mean += z;
  mean /= n_paths;
  for (double z : zk) var += (z - mean) * (z - mean);
  var /= n_paths - 1;

  const double target = t_k * (2.0 - t_k) / 2.0;
  // 4 sigma bands: SE(mean) = sd/sqrt(n), SE(var) ~ var * sqrt(2/n).
  CHECK(std::abs(mean) < 4.0 * std::sqrt(target / n_paths));
  CHECK(std::abs(var - target) < 4.0 * target * std::sqrt(2.0 / n_paths));

  double pvar = 0.0, pmean = 0.0;
  for (double x : pins) pmean += x;
  pmean /= n_paths;
  for (double x : pins) pvar += (x - pmean) * (x - pmean);
  pvar /= n_paths - 1;
  CHECK(std::abs(pmean) < 4.0 * std::sqrt(0.5 / n_paths));
  CHECK(std::abs(pvar - 0.5) < 4.0 * 0.5 * std::sqrt(2.0 / n_paths));
}

TEST_CASE("posterior mean along paths is a martingale") {
  // E h(t, Z_t) = E X at every t; compare two interior grid times.
  Prior tp = Prior::two_point(1.0, -1.0, 0.5);
  const int n_paths = 20000, n_steps = 64;
  const int k1 = 16, k2 = 48;
  double s1 = 0.0, s2 = 0.0, sq1 = 0.0, sq2 = 0.0;
  for (int p = 0; p < n_paths; ++p) {
    PathSample path = sample_path(tp, 0.0, 0.0, n_steps, 5000 + p);
    double h1 = posterior_mean(tp, path.times[k1], path.values[k1]);
    double h2 = posterior_mean(tp, path.times[k2], path.values[k2]);
    s1 += h1;
    sq1 += h1 * h1;
    s2 += h2;
    sq2 += h2 * h2;
  }
  double m1 = s1 / n_paths, m2 = s2 / n_paths;
  double v1 = sq1 / n_paths - m1 * m1, v2 = sq2 / n_paths - m2 * m2;
  double se = std::sqrt((v1 + v2) / n_paths);
  CHECK(std::abs(m1 - m2) < 4.0 * se);
}

TEST_CASE("known-pin rule recovers the classical value") {
  SimResult res = evaluate_rule(KnownPinRule{0.0}, Prior::point_mass(0.0),
                                100000, 1000, 42);
  // 4 SE plus a small allowance for stopping only at grid times.
  CHECK(std::abs(res.mean - oracle::kValueAtOrigin) < 4.0 * res.std_error + 1.5e-3);
  CHECK(res.std_error < 2.5e-3);
  CHECK(res.n_paths == 100000);
  CHECK(res.seed == 42);
}

TEST_CASE("hold-to-end pays the prior mean") {
  Prior tp = Prior::two_point(1.0, -1.0, 0.5);
  SimResult res = evaluate_rule(HoldToEnd{}, tp, 50000, 200, 7);
  CHECK(std::abs(res.mean - 0.0) < 4.0 * res.std_error);
  CHECK(res.std_error == doctest::Approx(1.0 / std::sqrt(50000.0)).epsilon(0.02));
}

TEST_CASE("region rule dominates threshold rules on common paths") {
  Prior tp = Prior::two_point(1.0, -1.0, 0.5);
  auto field = std::make_shared<ValueField>(
      solve(tp, GridSpec::for_prior(tp, 300, 301), TerminalScheme::Reveal));

  std::vector<StoppingRule> rules = {RegionRule{field}, HoldToEnd{},
                                     StopAtLevel{0.3}, StopAtLevel{0.8},
                                     StopAtLevel{1.5}};
  std::vector<SimResult> res = evaluate_rules(rules, tp, 100000, 500, 11);
  REQUIRE(res.size() == rules.size());
  const SimResult& region = res[0];
  for (std::size_t r = 1; r < res.size(); ++r) {
    double combined = std::sqrt(region.std_error * region.std_error +
                                res[r].std_error * res[r].std_error);
    CHECK(region.mean >= res[r].mean - 3.0 * combined);
  }
  // And it reproduces the solver's own start value.
  double v00 = field->value(0, (field->n_z() - 1) / 2);
  CHECK(std::abs(region.mean - v00) < 4.0 * region.std_error + 2.0 * field->label_tol + 2e-3);
}

TEST_CASE("single-boundary rule behaves like its known-pin counterpart") {
  // A dense square-root boundary fed through the generic boundary rule has
  // to reproduce the dedicated known-pin rule exactly on the same paths.
  Boundary b;
  b.kind = Boundary::Kind::Upper;
  const int n = 2001;
  const double beta = 0.839923675692372690;
  for (int i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / (n - 1);
    b.times.push_back(t);
    b.levels.push_back(beta * std::sqrt(1.0 - t));
  }
  std::vector<SimResult> res =
      evaluate_rules({BoundaryRule{b}, KnownPinRule{0.0}}, Prior::point_mass(0.0),
                     20000, 500, 3);
  CHECK(std::abs(res[0].mean - res[1].mean) < 2e-3);
}

TEST_CASE("identical seeds are bitwise reproducible") {
  Prior tp = Prior::two_point(1.0, -1.0, 0.5);
  SimResult a = evaluate_rule(HoldToEnd{}, tp, 20000, 300, 12345);
  SimResult b = evaluate_rule(HoldToEnd{}, tp, 20000, 300, 12345);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);

  SimResult c = evaluate_rule(HoldToEnd{}, tp, 20000, 300, 12346);
  CHECK(a.mean != c.mean);
}

TEST_CASE("per-path streams are independent of the rule set") {
  // Each path's randomness is a function of (seed, path index) alone, so
  // evaluating a rule alongside others must not change its estimate.
  Prior tp = Prior::two_point(1.0, -1.0, 0.5);
  SimResult alone = evaluate_rule(StopAtLevel{0.5}, tp, 20000, 300, 777);
  std::vector<SimResult> grouped = evaluate_rules(
      {HoldToEnd{}, StopAtLevel{0.5}, KnownPinRule{1.0}}, tp, 20000, 300, 777);
  CHECK(alone.mean == grouped[1].mean);
  CHECK(alone.std_error == grouped[1].std_error);
}

TEST_CASE("argument validation") {
  Prior pm = Prior::point_mass(0.0);
  CHECK_THROWS_AS(evaluate_rules({}, pm, 10, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_rule(HoldToEnd{}, pm, 0, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_path(pm, 0.0, 0.0, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_rule(RegionRule{nullptr}, pm, 10, 10, 1),
                  std::invalid_argument);
  Boundary multi;
  multi.kind = Boundary::Kind::Multiple;
  multi.times = {0.0, 0.5};
  multi.levels = {1.0, 0.5};
  CHECK_THROWS_AS(evaluate_rule(BoundaryRule{multi}, pm, 10, 10, 1),
                  std::invalid_argument);
}
