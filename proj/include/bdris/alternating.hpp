#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "bdris/manifold.hpp"
#include "bdris/power.hpp"

namespace bdris {

template <typename Scalar = double>
struct AoConfig {
  int max_outer_iterations = 50;
  Scalar secrecy_tolerance = Scalar(1e-4);  // bits/s/Hz
  int silent_redraws = 3;
  ManifoldOptConfig<Scalar> manifold;

  void validate() const {
    if (max_outer_iterations <= 0 || !(secrecy_tolerance > Scalar(0)) ||
        silent_redraws < 0)
      throw std::invalid_argument("AoConfig: field out of range");
    manifold.validate();
  }
};

enum class SolveStatus { Converged, MaxIterations, SilentChannel };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max_iterations";
    default: return "silent_channel";
  }
}

template <typename Scalar = double>
struct OuterIterate {
  Scalar secrecy_rate{};         // bits/s/Hz, clamped
  Scalar p_s{};                  // mW
  Scalar interference_slack{};   // I_th - interference, mW
  int inner_iterations = 0;
  double wall_time = 0;          // seconds; in-memory only, not serialized
};

template <typename Scalar = double>
struct ConvergenceTrace {
  std::vector<OuterIterate<Scalar>> outer;
  int redraws = 0;
};

template <typename Scalar = double>
struct SolveResult {
  PhaseShiftMatrix<Scalar> phi;
  PowerDecision<Scalar> power;
  LinkMetrics<Scalar> metrics;
  ConvergenceTrace<Scalar> trace;
  SolveStatus status = SolveStatus::MaxIterations;
  bool phase_warning = false;  // a phase step ended in StepUnderflow
};

namespace detail {

// Alternating-optimization skeleton shared by the full-unitary solver and
// the diagonal-RIS baseline. phase_step(channels, phi, p_s, powers) returns
// a PhaseOptResult; redraw() supplies a fresh initialization when the power
// switch opens silent.
template <typename Scalar, typename PhaseStep, typename Redraw>
SolveResult<Scalar> run_ao(const ChannelSet<Scalar>& channels,
                           const PowerConfig<Scalar>& powers,
                           const AoConfig<Scalar>& cfg,
                           PhaseShiftMatrix<Scalar> phi, PhaseStep&& phase_step,
                           Redraw&& redraw) {
  cfg.validate();
  powers.validate();
  channels.validate();

  SolveResult<Scalar> result{std::move(phi), {}, {}, {}, SolveStatus::MaxIterations,
                             false};
  Scalar previous = std::numeric_limits<Scalar>::quiet_NaN();

  for (int outer = 0; outer < cfg.max_outer_iterations; ++outer) {
    const auto started = std::chrono::steady_clock::now();
    result.power = optimal_power(channels, result.phi, powers);

    if (result.power.branch == PowerBranch::Silent && outer == 0) {
      // The switch condition depends on Phi through the effective gains, so
      // a bad initialization gets a few fresh draws before zero is accepted.
      while (result.trace.redraws < cfg.silent_redraws &&
             result.power.branch == PowerBranch::Silent) {
        result.phi = redraw();
        ++result.trace.redraws;
        result.power = optimal_power(channels, result.phi, powers);
      }
    }

    int inner_used = 0;
    if (result.power.branch == PowerBranch::Transmit) {
      PhaseOptResult<Scalar> phase =
          phase_step(channels, result.phi, result.power.p_star, powers);
      result.phi = std::move(phase.phi);
      inner_used = phase.iterations;
      result.phase_warning |= phase.status == PhaseOptStatus::StepUnderflow;
    }

    result.metrics =
        link_metrics(channels, result.phi, result.power.p_star, powers);
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - started;
    result.trace.outer.push_back({result.metrics.secrecy_rate,
                                  result.power.p_star,
                                  powers.i_th - result.metrics.interference_at_pu,
                                  inner_used, elapsed.count()});

    if (result.power.branch == PowerBranch::Silent) {
      result.status = SolveStatus::SilentChannel;
      return result;
    }
    if (!std::isnan(previous) &&
        std::abs(result.metrics.secrecy_rate - previous) < cfg.secrecy_tolerance) {
      result.status = SolveStatus::Converged;
      return result;
    }
    previous = result.metrics.secrecy_rate;
  }
  result.status = SolveStatus::MaxIterations;
  return result;
}

}  // namespace detail

// Alternating optimization of problem (P): closed-form power switch, then
// Riemannian phase ascent, repeated until the secrecy rate stabilizes.
// Phi starts Haar-random from the caller's stream.
template <typename Scalar>
SolveResult<Scalar> solve(const ChannelSet<Scalar>& channels,
                          const PowerConfig<Scalar>& powers,
                          const AoConfig<Scalar>& cfg, RngStream& rng) {
  const Eigen::Index m = channels.size();
  return detail::run_ao(
      channels, powers, cfg, PhaseShiftMatrix<Scalar>::Random(m, rng),
      [&cfg](const ChannelSet<Scalar>& ch, const PhaseShiftMatrix<Scalar>& p,
             Scalar p_s, const PowerConfig<Scalar>& pw) {
        return optimize_phase(ch, p, p_s, pw, cfg.manifold);
      },
      [&rng, m] { return PhaseShiftMatrix<Scalar>::Random(m, rng); });
}

}  // namespace bdris
