#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "bdris/montecarlo.hpp"

namespace bdris {

struct CheckReport {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  int grad_instances_m4 = 100;
  int grad_instances_m16 = 20;
  int unitarity_steps = 10000;
  int power_instances = 1000;
  int power_grid_points = 10000;
  int ao_instances = 100;
  std::uint64_t seed = 12345;
};

namespace verification {

// Lagrangian evaluated from scratch on an arbitrary (not necessarily
// unitary) matrix; the finite-difference oracle needs the ambient function
// and must not route through the gradient implementation under test.
template <typename Scalar>
Scalar ambient_lagrangian(const ChannelSet<Scalar>& channels,
                          const ComplexMatrix<Scalar>& phi, Scalar p_s,
                          const PowerConfig<Scalar>& powers, Scalar lambda) {
  const ComplexVector<Scalar> w = combining_vector<Scalar>(phi.rows());
  const Scalar den_s = powers.sigma_s_sq + std::norm(channels.f_s) * powers.q_p;
  const Scalar den_e = powers.sigma_e_sq + std::norm(channels.f_e) * powers.q_p;
  const Scalar gamma_s =
      std::norm((channels.h_s.transpose() * phi * w).value()) * p_s / den_s;
  const Scalar gamma_e =
      std::norm((channels.h_e.transpose() * phi * w).value()) * p_s / den_e;
  const Scalar interference =
      std::norm((channels.g.transpose() * phi * w).value()) * p_s;
  return std::log2(Scalar(1) + gamma_s) - std::log2(Scalar(1) + gamma_e) -
         lambda * (interference - powers.i_th);
}

// Central finite differences over every real and imaginary coordinate.
template <typename Scalar>
ComplexMatrix<Scalar> finite_difference_gradient(
    const ChannelSet<Scalar>& channels, const ComplexMatrix<Scalar>& phi,
    Scalar p_s, const PowerConfig<Scalar>& powers, Scalar lambda, Scalar step) {
  const Eigen::Index m = phi.rows();
  ComplexMatrix<Scalar> grad(m, m);
  ComplexMatrix<Scalar> probe = phi;
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const Complex<Scalar> original = probe(i, j);
      probe(i, j) = original + Complex<Scalar>(step, 0);
      const Scalar re_plus = ambient_lagrangian(channels, probe, p_s, powers, lambda);
      probe(i, j) = original - Complex<Scalar>(step, 0);
      const Scalar re_minus = ambient_lagrangian(channels, probe, p_s, powers, lambda);
      probe(i, j) = original + Complex<Scalar>(0, step);
      const Scalar im_plus = ambient_lagrangian(channels, probe, p_s, powers, lambda);
      probe(i, j) = original - Complex<Scalar>(0, step);
      const Scalar im_minus = ambient_lagrangian(channels, probe, p_s, powers, lambda);
      probe(i, j) = original;
      grad(i, j) = Complex<Scalar>((re_plus - re_minus) / (Scalar(2) * step),
                                   (im_plus - im_minus) / (Scalar(2) * step));
    }
  }
  return grad;
}

template <typename Scalar>
ChannelSet<Scalar> random_channels(int m, RngStream& rng) {
  ScenarioConfig<Scalar> cfg = default_scenario<Scalar>();
  const auto [mx, my] = factor_elements(m);
  cfg.channel.array.m_x = mx;
  cfg.channel.array.m_y = my;
  return draw_channel_set(cfg.channel, rng);
}

}  // namespace verification

// Acceptance gate for the analytic gradient: closed form vs central finite
// differences (step 1e-6), relative error < 1e-5, excluding near-equal-rate
// instances where the reported secrecy is non-smooth.
inline CheckReport gradient_finite_difference_check(const VerifyOptions& opt = {}) {
  using Scalar = double;
  RngStream rng(opt.seed);
  const PowerConfig<Scalar> powers;
  Scalar worst = 0;
  int checked = 0;

  const auto run_batch = [&](int m, int instances) {
    for (int k = 0; k < instances; ++k) {
      const ChannelSet<Scalar> channels = verification::random_channels<Scalar>(m, rng);
      const PhaseShiftMatrix<Scalar> phi = PhaseShiftMatrix<Scalar>::Random(m, rng);
      const Scalar p_s = uniform_in(rng, 0.01, powers.p_max);
      const Scalar lambda = (k % 2 == 0) ? Scalar(0) : uniform_in(rng, 0.0, 10.0);

      const LinkMetrics<Scalar> metrics = link_metrics(channels, phi, p_s, powers);
      if (std::abs(metrics.rate_s - metrics.rate_e) < 1e-6) continue;

      const ComplexMatrix<Scalar> analytic =
          euclidean_gradient(channels, phi, p_s, powers, lambda);
      const ComplexMatrix<Scalar> numeric = verification::finite_difference_gradient(
          channels, phi.matrix(), p_s, powers, lambda, Scalar(1e-6));
      const Scalar rel = (analytic - numeric).norm() / numeric.norm();
      worst = std::max(worst, rel);
      ++checked;
    }
  };
  run_batch(4, opt.grad_instances_m4);
  run_batch(16, opt.grad_instances_m16);

  std::ostringstream detail;
  detail << "max relative error " << worst << " over " << checked << " instances";
  return {"gradient_finite_difference", worst < 1e-5 && checked > 0, detail.str()};
}

// Unitarity after chained random retractions at several sizes.
inline CheckReport unitarity_stress_check(const VerifyOptions& opt = {}) {
  using Scalar = double;
  RngStream rng(opt.seed + 1);
  const std::vector<int> dims = {4, 8, 16};
  const int steps_per_dim = opt.unitarity_steps / static_cast<int>(dims.size());
  double worst = 0;
  for (const int m : dims) {
    PhaseShiftMatrix<Scalar> phi = PhaseShiftMatrix<Scalar>::Random(m, rng);
    for (int k = 0; k < steps_per_dim; ++k) {
      const ComplexMatrix<Scalar> tangent =
          phi.matrix() * random_skew_hermitian<Scalar>(m, rng);
      phi = retract(phi, tangent, uniform_in(rng, 0.0, 1.0));
      worst = std::max(worst, double(unitarity_defect(phi.matrix())));
      if (worst >= 1e-8) break;
    }
  }
  std::ostringstream detail;
  detail << "max ||Phi Phi^H - I||_F = " << worst << " over " << opt.unitarity_steps
         << " retractions";
  return {"unitarity_preservation", worst < 1e-8, detail.str()};
}

// Grid-search oracle for the closed-form power switch: the switch value must
// match the dense-grid argmax within one grid step, both in power and in
// achieved secrecy rate.
inline CheckReport power_switch_grid_check(const VerifyOptions& opt = {}) {
  using Scalar = double;
  RngStream rng(opt.seed + 2);
  double worst_rate_gap = 0;
  double worst_p_gap_steps = 0;
  bool ok = true;

  for (int k = 0; k < opt.power_instances && ok; ++k) {
    const int m = 8;
    const ChannelSet<Scalar> channels = verification::random_channels<Scalar>(m, rng);
    const PhaseShiftMatrix<Scalar> phi = PhaseShiftMatrix<Scalar>::Random(m, rng);
    PowerConfig<Scalar> powers;
    powers.i_th = 1e-5 * std::pow(10.0, uniform_in(rng, 0.0, 4.0));
    powers.p_max = 100.0 * std::pow(10.0, uniform_in(rng, -2.0, 1.0));

    const PowerDecision<Scalar> decision = optimal_power(channels, phi, powers);
    const ComplexVector<Scalar> w = combining_vector<Scalar>(m);
    const Scalar a = effective_gain(channels.h_s, phi.matrix(), w) /
                     (powers.sigma_s_sq + std::norm(channels.f_s) * powers.q_p);
    const Scalar b = effective_gain(channels.h_e, phi.matrix(), w) /
                     (powers.sigma_e_sq + std::norm(channels.f_e) * powers.q_p);
    const Scalar g_gain = effective_gain(channels.g, phi.matrix(), w);
    const Scalar p_hi = g_gain > 0 ? std::min(powers.i_th / g_gain, powers.p_max)
                                   : powers.p_max;
    const auto secrecy_at = [&](Scalar p) {
      return std::max(0.0, std::log2(1 + a * p) - std::log2(1 + b * p));
    };

    const int n = opt.power_grid_points;
    const Scalar spacing = p_hi / Scalar(n - 1);
    Scalar best = 0, best_p = 0, prev = secrecy_at(0), max_delta = 0;
    for (int i = 0; i < n; ++i) {
      const Scalar p = Scalar(i) * spacing;
      const Scalar r = secrecy_at(p);
      max_delta = std::max(max_delta, std::abs(r - prev));
      prev = r;
      if (r > best) {
        best = r;
        best_p = p;
      }
    }
    const Scalar rate_gap = best - secrecy_at(decision.p_star);
    const Scalar p_gap = std::abs(decision.p_star - best_p);
    worst_rate_gap = std::max(worst_rate_gap, rate_gap - max_delta);
    worst_p_gap_steps = std::max(worst_p_gap_steps, p_gap / spacing);
    ok = rate_gap <= max_delta + 1e-12 && p_gap <= spacing * (1 + 1e-9);

    // Feasibility of the switch itself.
    ok = ok && g_gain * decision.p_star <= powers.i_th * (1 + 1e-9) &&
         decision.p_star <= powers.p_max;
  }
  std::ostringstream detail;
  detail << "worst (rate gap - grid delta) = " << worst_rate_gap
         << ", worst |p* - argmax| = " << worst_p_gap_steps << " grid steps";
  return {"power_switch_optimality", ok, detail.str()};
}

// Per-outer-iteration monotonicity and feasibility of the alternating
// optimization on random instances.
inline CheckReport ao_monotonicity_check(const VerifyOptions& opt = {}) {
  using Scalar = double;
  RngStream channel_rng(opt.seed + 3);
  const ScenarioConfig<Scalar> base = default_scenario<Scalar>();
  bool ok = true;
  double worst_drop = 0;

  for (int k = 0; k < opt.ao_instances && ok; ++k) {
    ScenarioConfig<Scalar> cfg = base;
    cfg.channel.array.m_x = 4;
    cfg.channel.array.m_y = 2;
    const ChannelSet<Scalar> channels = draw_channel_set(cfg.channel, channel_rng);
    RngStream solver_rng(opt.seed + 1000 + static_cast<std::uint64_t>(k));
    const SolveResult<Scalar> result = solve(channels, cfg.powers, cfg.ao, solver_rng);

    for (std::size_t i = 0; i < result.trace.outer.size(); ++i) {
      const auto& it = result.trace.outer[i];
      if (i > 0) {
        const double drop = result.trace.outer[i - 1].secrecy_rate - it.secrecy_rate;
        worst_drop = std::max(worst_drop, drop);
        ok = ok && drop <= 1e-9;
      }
      ok = ok && it.p_s <= cfg.powers.p_max * (1 + 1e-12) &&
           it.interference_slack >= -cfg.powers.i_th * 1e-6;
    }
    ok = ok && unitarity_defect(result.phi.matrix()) <= 1e-8;
  }
  std::ostringstream detail;
  detail << "worst per-iteration drop = " << worst_drop << " over " << opt.ao_instances
         << " instances";
  return {"ao_monotonicity", ok, detail.str()};
}

inline std::vector<CheckReport> run_verification_suite(const VerifyOptions& opt = {}) {
  return {gradient_finite_difference_check(opt), unitarity_stress_check(opt),
          power_switch_grid_check(opt), ao_monotonicity_check(opt)};
}

}  // namespace bdris
