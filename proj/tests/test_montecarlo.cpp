#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bdris/montecarlo.hpp"

using namespace bdris;

namespace {

ScenarioConfig<double> small_scenario(int m_x, int m_y) {
  ScenarioConfig<double> cfg = default_scenario<double>();
  cfg.channel.array.m_x = m_x;
  cfg.channel.array.m_y = m_y;
  return cfg;
}

}  // namespace

TEST_CASE("element factorization is near-square with m_x >= m_y") {
  CHECK(factor_elements(8) == std::pair<int, int>{4, 2});
  CHECK(factor_elements(16) == std::pair<int, int>{4, 4});
  CHECK(factor_elements(32) == std::pair<int, int>{8, 4});
  CHECK(factor_elements(64) == std::pair<int, int>{8, 8});
  CHECK(factor_elements(1) == std::pair<int, int>{1, 1});
  CHECK(factor_elements(7) == std::pair<int, int>{7, 1});
  CHECK_THROWS_AS(factor_elements(0), std::invalid_argument);
}

TEST_CASE("run_trial is a pure function of config and trial index") {
  const auto cfg = small_scenario(4, 2);
  for (const Method method :
       {Method::Optimized, Method::RandomPhase, Method::DiagonalRis}) {
    auto c = cfg;
    c.method = method;
    const auto a = run_trial(c, 7);
    const auto b = run_trial(c, 7);
    CHECK(a.metrics.secrecy_rate == b.metrics.secrecy_rate);
    CHECK(a.power.p_star == b.power.p_star);
    REQUIRE(a.trace.outer.size() == b.trace.outer.size());
    for (std::size_t i = 0; i < a.trace.outer.size(); ++i)
      CHECK(a.trace.outer[i].secrecy_rate == b.trace.outer[i].secrecy_rate);
  }
}

TEST_CASE("optimized dominates the random benchmark on paired seeds") {
  auto optimized = small_scenario(4, 4);
  optimized.method = Method::Optimized;
  auto random = optimized;
  random.method = Method::RandomPhase;
  const int trials = 500;
  int dominated = 0;
  for (int t = 0; t < trials; ++t) {
    const double opt = run_trial(optimized, t).metrics.secrecy_rate;
    const double rnd = run_trial(random, t).metrics.secrecy_rate;
    if (opt >= rnd - 1e-12) ++dominated;
  }
  CHECK(dominated >= trials * 9 / 10);
}

TEST_CASE("diagonal optimizer stays on the product of circles") {
  RngStream rng(301);
  ChannelConfig<double> config;
  config.array.m_x = 4;
  config.array.m_y = 2;
  const auto channels = draw_channel_set(config, rng);
  const PowerConfig<double> powers;
  const auto phi0 = PhaseShiftMatrix<double>::RandomDiagonal(8, rng);
  const auto decision = optimal_power(channels, phi0, powers);
  if (decision.branch == PowerBranch::Transmit) {
    const auto result = optimize_diagonal(channels, phi0, decision.p_star, powers,
                                          ManifoldOptConfig<double>{});
    const auto& phi = result.phi.matrix();
    for (Eigen::Index i = 0; i < phi.rows(); ++i) {
      CHECK(std::abs(std::abs(phi(i, i)) - 1.0) < 1e-12);
      for (Eigen::Index j = 0; j < phi.cols(); ++j)
        if (i != j) CHECK(phi(i, j) == std::complex<double>(0.0, 0.0));
    }
    // Subset feasibility: diagonal iterates satisfy the full constraint set.
    CHECK(unitarity_defect(phi) < 1e-12);
    CHECK(effective_gain(channels.g, result.phi) * decision.p_star <=
          powers.i_th * (1 + 1e-6));
  }
}

TEST_CASE("diagonal and full BD-RIS coincide at M = 1") {
  auto full = small_scenario(1, 1);
  full.method = Method::Optimized;
  auto diag = full;
  diag.method = Method::DiagonalRis;
  for (int t = 0; t < 25; ++t) {
    const double a = run_trial(full, t).metrics.secrecy_rate;
    const double b = run_trial(diag, t).metrics.secrecy_rate;
    CHECK(a == doctest::Approx(b).epsilon(1e-6));
  }
}

TEST_CASE("full BD-RIS mean secrecy is at least the diagonal baseline's") {
  auto cfg = small_scenario(8, 4);
  cfg.trials = 60;
  const auto sweep =
      run_sweep(cfg, SweepAxis::PMax, std::vector<double>{20.0},
                std::vector<Method>{Method::Optimized, Method::DiagonalRis}, 0);
  const double full = sweep.series[0].mean_secrecy[0];
  const double diagonal = sweep.series[1].mean_secrecy[0];
  CHECK(full >= diagonal - 1e-9);
}

TEST_CASE("sweep rejects bad inputs") {
  const auto cfg = small_scenario(2, 2);
  CHECK_THROWS_AS(run_sweep(cfg, SweepAxis::PMax, std::vector<double>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_sweep(cfg, SweepAxis::PMax, std::vector<double>{30.0, 20.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_sweep(cfg, SweepAxis::PMax, std::vector<double>{20.0},
                            std::vector<Method>{}),
                  std::invalid_argument);
}

TEST_CASE("sweep results are invariant to the thread count") {
  auto cfg = small_scenario(4, 2);
  cfg.trials = 24;
  cfg.method = Method::Optimized;
  const std::vector<double> points{20.0, 25.0};
  const auto serial = run_sweep(cfg, SweepAxis::PMax, points, 1);
  const auto parallel = run_sweep(cfg, SweepAxis::PMax, points, 4);
  for (std::size_t j = 0; j < points.size(); ++j) {
    CHECK(serial.series[0].mean_secrecy[j] == parallel.series[0].mean_secrecy[j]);
    CHECK(serial.series[0].trial_secrecy[j] == parallel.series[0].trial_secrecy[j]);
  }
}

TEST_CASE("per-trial results at a sweep point do not depend on other points") {
  auto cfg = small_scenario(4, 2);
  cfg.trials = 12;
  const auto both = run_sweep(cfg, SweepAxis::PMax, std::vector<double>{20.0, 26.0});
  const auto alone = run_sweep(cfg, SweepAxis::PMax, std::vector<double>{26.0});
  CHECK(both.series[0].trial_secrecy[1] == alone.series[0].trial_secrecy[0]);

  // More trials at the same point extend, not perturb, the shorter run.
  auto more = cfg;
  more.trials = 24;
  const auto extended = run_sweep(more, SweepAxis::PMax, std::vector<double>{26.0});
  for (std::size_t t = 0; t < 12; ++t)
    CHECK(extended.series[0].trial_secrecy[0][t] ==
          alone.series[0].trial_secrecy[0][t]);
}

TEST_CASE("standard errors shrink like one over root trials") {
  auto cfg = small_scenario(4, 2);
  cfg.method = Method::RandomPhase;  // cheap
  // A vacuous interference cap keeps p* = P_max, so the per-trial secrecy
  // has mild tails and the sample deviation stabilizes at these counts.
  cfg.powers.i_th = 1e3;
  cfg.trials = 300;
  const auto small = run_sweep(cfg, SweepAxis::PMax, std::vector<double>{20.0});
  cfg.trials = 1200;
  const auto large = run_sweep(cfg, SweepAxis::PMax, std::vector<double>{20.0});
  const double ratio = small.series[0].std_error[0] / large.series[0].std_error[0];
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.20));
}

TEST_CASE("iterations axis reads the trace and carries final values forward") {
  auto cfg = small_scenario(4, 2);
  cfg.trials = 10;
  cfg.method = Method::Optimized;
  const std::vector<double> points{1.0, 3.0, 50.0};
  const auto sweep = run_sweep(cfg, SweepAxis::Iterations, points);
  REQUIRE(sweep.series.size() == 1);
  const auto& mean = sweep.series[0].mean_secrecy;
  REQUIRE(mean.size() == 3);
  // The trace is per-iteration nondecreasing, so the means must be too.
  CHECK(mean[0] <= mean[1] + 1e-9);
  CHECK(mean[1] <= mean[2] + 1e-9);
}

TEST_CASE("method names round trip") {
  for (const Method m : {Method::Optimized, Method::RandomPhase, Method::DiagonalRis})
    CHECK(method_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(method_from_string("nope"), std::invalid_argument);
  for (const SweepAxis a :
       {SweepAxis::PMax, SweepAxis::ITh, SweepAxis::Elements, SweepAxis::Iterations})
    CHECK(sweep_axis_from_string(to_string(a)) == a);
}
