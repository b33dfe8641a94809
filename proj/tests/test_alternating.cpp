#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bdris/alternating.hpp"
#include "bdris/verification.hpp"

using namespace bdris;

namespace {

ChannelSet<double> eve_dominant_channels(RngStream& rng) {
  ChannelConfig<double> config;
  config.array.m_x = 2;
  config.array.m_y = 2;
  ChannelSet<double> set = draw_channel_set(config, rng);
  // Eve sees an amplified copy of the SU channel with the same interference
  // state, so her normalized gain dominates for every Phi.
  set.h_e = 3.0 * set.h_s;
  set.f_e = set.f_s;
  return set;
}

}  // namespace

TEST_CASE("an everywhere-dominant eavesdropper yields silent zero secrecy") {
  RngStream rng(200);
  const auto channels = eve_dominant_channels(rng);
  PowerConfig<double> powers;
  powers.sigma_e_sq = powers.sigma_s_sq;
  AoConfig<double> cfg;
  const auto result = solve(channels, powers, cfg, rng);
  CHECK(result.status == SolveStatus::SilentChannel);
  CHECK(result.power.p_star == 0.0);
  CHECK(result.metrics.secrecy_rate == 0.0);
  CHECK(result.trace.redraws == cfg.silent_redraws);
  CHECK(result.trace.outer.size() == 1);
}

TEST_CASE("solve is deterministic given the stream state") {
  RngStream channel_rng(201);
  ChannelConfig<double> config;
  config.array.m_x = 4;
  config.array.m_y = 2;
  const auto channels = draw_channel_set(config, channel_rng);
  const PowerConfig<double> powers;
  const AoConfig<double> cfg;
  RngStream a(77), b(77);
  const auto first = solve(channels, powers, cfg, a);
  const auto second = solve(channels, powers, cfg, b);
  CHECK(first.metrics.secrecy_rate == second.metrics.secrecy_rate);
  CHECK(first.power.p_star == second.power.p_star);
  CHECK((first.phi.matrix() - second.phi.matrix()).norm() == 0.0);
  REQUIRE(first.trace.outer.size() == second.trace.outer.size());
}

TEST_CASE("per-iteration secrecy is nondecreasing and iterates stay feasible") {
  RngStream rng(202);
  ChannelConfig<double> config;
  config.array.m_x = 4;
  config.array.m_y = 2;
  const PowerConfig<double> powers;
  const AoConfig<double> cfg;
  for (int k = 0; k < 50; ++k) {
    const auto channels = draw_channel_set(config, rng);
    const auto result = solve(channels, powers, cfg, rng);
    const auto& outer = result.trace.outer;
    for (std::size_t i = 0; i < outer.size(); ++i) {
      if (i > 0) CHECK(outer[i].secrecy_rate >= outer[i - 1].secrecy_rate - 1e-9);
      CHECK(outer[i].secrecy_rate >= 0.0);
      CHECK(std::isfinite(outer[i].secrecy_rate));
      CHECK(outer[i].p_s <= powers.p_max * (1 + 1e-12));
      CHECK(outer[i].p_s >= 0.0);
      CHECK(outer[i].interference_slack >= -powers.i_th * 1e-6);
      CHECK(outer[i].inner_iterations >= 0);
      CHECK(outer[i].wall_time >= 0.0);
    }
    CHECK(unitarity_defect(result.phi.matrix()) <= 1e-8);
    CHECK(static_cast<int>(outer.size()) <= cfg.max_outer_iterations);
  }
}

TEST_CASE("verification ao monotonicity suite passes") {
  VerifyOptions opt;
  opt.ao_instances = 30;
  const auto report = ao_monotonicity_check(opt);
  INFO(report.detail);
  CHECK(report.passed);
}

TEST_CASE("default-scenario traces stabilize within the outer budget") {
  RngStream rng(203);
  ChannelConfig<double> config;  // M = 32 default (8 x 4)
  const PowerConfig<double> powers;
  const AoConfig<double> cfg;
  for (int k = 0; k < 10; ++k) {
    const auto channels = draw_channel_set(config, rng);
    const auto result = solve(channels, powers, cfg, rng);
    CHECK(result.status != SolveStatus::MaxIterations);
    if (result.trace.outer.size() >= 2) {
      const auto& outer = result.trace.outer;
      CHECK(std::abs(outer.back().secrecy_rate -
                     outer[outer.size() - 2].secrecy_rate) < 1e-4);
    }
  }
}

TEST_CASE("optimized solve never falls below its own starting point") {
  // Same-seed comparison against the benchmark evaluation of the Haar
  // initialization; the ascent plus re-optimized power can only improve.
  RngStream rng(204);
  ChannelConfig<double> config;
  config.array.m_x = 4;
  config.array.m_y = 2;
  const PowerConfig<double> powers;
  const AoConfig<double> cfg;
  for (int k = 0; k < 40; ++k) {
    const auto channels = draw_channel_set(config, rng);
    RngStream solver_a(500 + k), solver_b(500 + k);
    const auto phi0 = PhaseShiftMatrix<double>::Random(8, solver_a);
    const auto d0 = optimal_power(channels, phi0, powers);
    const auto baseline = link_metrics(channels, phi0, d0.p_star, powers);
    const auto result = solve(channels, powers, cfg, solver_b);
    CHECK(result.metrics.secrecy_rate >= baseline.secrecy_rate - 1e-12);
  }
}
