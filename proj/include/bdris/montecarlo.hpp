#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bdris/alternating.hpp"

namespace bdris {

enum class Method { Optimized, RandomPhase, DiagonalRis };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Optimized: return "optimized";
    case Method::RandomPhase: return "random";
    default: return "diagonal";
  }
}

inline Method method_from_string(const std::string& name) {
  if (name == "optimized") return Method::Optimized;
  if (name == "random" || name == "random_phase") return Method::RandomPhase;
  if (name == "diagonal" || name == "diagonal_ris") return Method::DiagonalRis;
  throw std::invalid_argument("unknown method: " + name);
}

template <typename Scalar = double>
struct ScenarioConfig {
  ChannelConfig<Scalar> channel;
  PowerConfig<Scalar> powers;
  AoConfig<Scalar> ao;
  std::int64_t trials = 500;
  std::uint64_t base_seed = 1;
  Method method = Method::Optimized;

  void validate() const {
    channel.validate();
    powers.validate();
    ao.validate();
    if (trials < 1) throw std::invalid_argument("ScenarioConfig: trials must be >= 1");
  }
};

// Default scenario: M = 32 elements (8 x 4), 2 GHz carrier at
// half-wavelength spacing, sigma^2 = 1e-4 mW, I_th = 1e-5 mW, Q_p = 40 dBm,
// P_max = 20 dBm, distances 100/110/110 m for the UAV links with K = 10 and
// 1000/800 m for the primary links with K = 5, 500 desk-scale trials.
template <typename Scalar = double>
ScenarioConfig<Scalar> default_scenario() {
  ScenarioConfig<Scalar> cfg;
  cfg.channel.st_su.geometry = {Scalar(100), Scalar(10), Scalar(1), Scalar(0), Scalar(0)};
  cfg.channel.st_eve.geometry = {Scalar(110), Scalar(10), Scalar(1), Scalar(0), Scalar(0)};
  cfg.channel.st_pu.geometry = {Scalar(110), Scalar(10), Scalar(1), Scalar(0), Scalar(0)};
  cfg.channel.pt_su.geometry = {Scalar(1000), Scalar(5), Scalar(1), Scalar(0), Scalar(0)};
  cfg.channel.pt_eve.geometry = {Scalar(800), Scalar(5), Scalar(1), Scalar(0), Scalar(0)};
  return cfg;
}

// Near-square planar factorization with m_x >= m_y, used when a sweep varies
// the element count.
inline std::pair<int, int> factor_elements(int m) {
  if (m <= 0) throw std::invalid_argument("factor_elements: m must be positive");
  int m_y = static_cast<int>(std::sqrt(static_cast<double>(m)));
  while (m % m_y != 0) --m_y;
  return {m / m_y, m_y};
}

template <typename Scalar = double>
struct TrialResult {
  LinkMetrics<Scalar> metrics;
  PowerDecision<Scalar> power;
  ConvergenceTrace<Scalar> trace;
  SolveStatus status = SolveStatus::Converged;
  bool phase_warning = false;
};

// Projected-gradient ascent restricted to diagonal unit-modulus responses:
// the Euclidean gradient is masked to its diagonal and each entry is pulled
// back to the unit circle after the additive step. Shares the clamp, Armijo
// and feasibility machinery of the full optimizer.
template <typename Scalar>
PhaseOptResult<Scalar> optimize_diagonal(const ChannelSet<Scalar>& channels,
                                         const PhaseShiftMatrix<Scalar>& phi_init,
                                         Scalar p_s,
                                         const PowerConfig<Scalar>& powers,
                                         const ManifoldOptConfig<Scalar>& cfg) {
  cfg.validate();
  powers.validate();
  const Eigen::Index m = phi_init.size();
  PhaseOptResult<Scalar> result{
      phi_init, PhaseOptStatus::MaxIterations, cfg.lambda_init, 0, 0, {}};

  const auto step_to = [m](const ComplexMatrix<Scalar>& phi,
                           const ComplexVector<Scalar>& direction, Scalar eta) {
    ComplexMatrix<Scalar> next = ComplexMatrix<Scalar>::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const Complex<Scalar> moved = phi(i, i) + eta * direction(i);
      const Scalar mag = std::abs(moved);
      next(i, i) = mag > Scalar(0) ? moved / mag : phi(i, i);
    }
    return PhaseShiftMatrix<Scalar>(std::move(next));
  };

  for (int iter = 0; iter < cfg.max_inner_iterations; ++iter) {
    const ComplexMatrix<Scalar> grad =
        euclidean_gradient(channels, result.phi, p_s, powers, result.lambda);
    const ComplexVector<Scalar> direction = grad.diagonal();
    const Scalar grad_norm = direction.norm();
    const Scalar value = lagrangian(channels, result.phi, p_s, powers, result.lambda);
    const auto [gs, ge] = sinr_pair(channels, result.phi, p_s, powers);
    InnerIterate<Scalar> record{
        value,
        std::max(Scalar(0), std::log2(Scalar(1) + gs) - std::log2(Scalar(1) + ge)),
        grad_norm, Scalar(0), false};

    if (grad_norm < cfg.gradient_tolerance) {
      result.trace.push_back(record);
      result.status = PhaseOptStatus::Converged;
      return result;
    }

    Scalar eta = clamp_step(cfg.initial_step, channels, result.phi, p_s, powers);
    bool accepted = false;
    Scalar gain = 0;
    while (eta >= Scalar(kStepUnderflow)) {
      const PhaseShiftMatrix<Scalar> candidate =
          step_to(result.phi.matrix(), direction, eta);
      const Scalar moved = lagrangian(channels, candidate, p_s, powers, result.lambda);
      if (interference_feasible(channels, candidate, p_s, powers) &&
          moved >= value + cfg.armijo_coefficient * eta * grad_norm * grad_norm) {
        result.phi = candidate;
        record.step = eta;
        record.accepted = true;
        accepted = true;
        gain = moved - value;
        break;
      }
      eta *= cfg.backtrack_factor;
    }

    result.trace.push_back(record);
    ++result.iterations;
    if (!accepted) {
      result.status = PhaseOptStatus::StepUnderflow;
      return result;
    }
    ++result.accepted_steps;
    if (gain < Scalar(kProgressFloor)) {
      result.status = PhaseOptStatus::Converged;
      return result;
    }

    if (cfg.dual_step_rho > Scalar(0)) {
      const Scalar interference = effective_gain(channels.g, result.phi) * p_s;
      result.lambda = std::max(
          Scalar(0), result.lambda + cfg.dual_step_rho * (interference - powers.i_th));
    }
  }
  result.status = PhaseOptStatus::MaxIterations;
  return result;
}

// One seeded end-to-end realization: channels from base_seed + trial_index,
// then the method under test. Pure function of (config, trial_index).
template <typename Scalar>
TrialResult<Scalar> run_trial(const ScenarioConfig<Scalar>& config,
                              std::uint64_t trial_index) {
  config.validate();
  RngStream rng(config.base_seed + trial_index);
  const ChannelSet<Scalar> channels = draw_channel_set(config.channel, rng);
  const Eigen::Index m = channels.size();

  const auto from_solve = [](SolveResult<Scalar>&& s) {
    return TrialResult<Scalar>{s.metrics, s.power, std::move(s.trace), s.status,
                               s.phase_warning};
  };

  switch (config.method) {
    case Method::Optimized:
      return from_solve(solve(channels, config.powers, config.ao, rng));
    case Method::RandomPhase: {
      // Benchmark method: one Haar draw, optimal power switch, no
      // phase optimization.
      const PhaseShiftMatrix<Scalar> phi = PhaseShiftMatrix<Scalar>::Random(m, rng);
      TrialResult<Scalar> out;
      out.power = optimal_power(channels, phi, config.powers);
      out.metrics = link_metrics(channels, phi, out.power.p_star, config.powers);
      out.trace.outer.push_back({out.metrics.secrecy_rate, out.power.p_star,
                                 config.powers.i_th - out.metrics.interference_at_pu,
                                 0, 0.0});
      out.status = out.power.branch == PowerBranch::Silent
                       ? SolveStatus::SilentChannel
                       : SolveStatus::Converged;
      return out;
    }
    case Method::DiagonalRis:
    default: {
      auto& rng_ref = rng;
      return from_solve(detail::run_ao(
          channels, config.powers, config.ao,
          PhaseShiftMatrix<Scalar>::RandomDiagonal(m, rng),
          [&config](const ChannelSet<Scalar>& ch, const PhaseShiftMatrix<Scalar>& p,
                    Scalar p_s, const PowerConfig<Scalar>& pw) {
            return optimize_diagonal(ch, p, p_s, pw, config.ao.manifold);
          },
          [&rng_ref, m] { return PhaseShiftMatrix<Scalar>::RandomDiagonal(m, rng_ref); }));
    }
  }
}

enum class SweepAxis { PMax, ITh, Elements, Iterations };

inline const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::PMax: return "p_max";
    case SweepAxis::ITh: return "i_th";
    case SweepAxis::Elements: return "m";
    default: return "iterations";
  }
}

inline SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "p_max" || name == "P_MAX") return SweepAxis::PMax;
  if (name == "i_th" || name == "I_TH") return SweepAxis::ITh;
  if (name == "m" || name == "M") return SweepAxis::Elements;
  if (name == "iterations" || name == "ITERATIONS") return SweepAxis::Iterations;
  throw std::invalid_argument("unknown sweep axis: " + name);
}

template <typename Scalar = double>
struct SweepSeries {
  Method method = Method::Optimized;
  std::vector<Scalar> mean_secrecy;               // per axis point
  std::vector<Scalar> std_error;                  // sample stddev / sqrt(n)
  std::vector<std::vector<Scalar>> trial_secrecy; // [point][trial]
};

template <typename Scalar = double>
struct SweepResult {
  SweepAxis axis = SweepAxis::PMax;
  std::vector<Scalar> points;  // axis values as given (dBm for power axes)
  std::int64_t trials = 0;
  std::vector<SweepSeries<Scalar>> series;
};

namespace detail {

template <typename Scalar>
ScenarioConfig<Scalar> apply_axis_value(ScenarioConfig<Scalar> cfg, SweepAxis axis,
                                        Scalar value) {
  switch (axis) {
    case SweepAxis::PMax:
      cfg.powers.p_max = dbm_to_mw(value);
      break;
    case SweepAxis::ITh:
      cfg.powers.i_th = dbm_to_mw(value);
      break;
    case SweepAxis::Elements: {
      const auto [mx, my] = factor_elements(static_cast<int>(value));
      cfg.channel.array.m_x = mx;
      cfg.channel.array.m_y = my;
      break;
    }
    case SweepAxis::Iterations:
      cfg.ao.max_outer_iterations = static_cast<int>(value);
      break;
  }
  return cfg;
}

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs fn(t) for t in [0, count) across worker threads; per-trial outputs
// are indexed, so the reduction is independent of interleaving.
template <typename Fn>
void parallel_for_trials(std::int64_t count, unsigned threads, Fn&& fn) {
  const unsigned n = static_cast<unsigned>(std::min<std::uint64_t>(
      resolve_threads(threads), static_cast<std::uint64_t>(count)));
  if (n <= 1) {
    for (std::int64_t t = 0; t < count; ++t) fn(t);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (unsigned i = 0; i < n; ++i)
    pool.emplace_back([&] {
      for (std::int64_t t = next.fetch_add(1); t < count; t = next.fetch_add(1))
        fn(t);
    });
  for (auto& th : pool) th.join();
}

template <typename Scalar>
std::pair<Scalar, Scalar> mean_and_stderr(const std::vector<Scalar>& xs) {
  const auto n = static_cast<Scalar>(xs.size());
  const Scalar mean = std::accumulate(xs.begin(), xs.end(), Scalar(0)) / n;
  if (xs.size() < 2) return {mean, Scalar(0)};
  Scalar ss = 0;
  for (const Scalar x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - Scalar(1))) / std::sqrt(n)};
}

}  // namespace detail

// Campaign over one axis. Points must be non-empty and monotone increasing.
// Trial t runs with seed base_seed + t at every point and for every method
// (common random numbers), so per-seed comparisons across methods and
// points are paired, and changing the trial count at one point cannot
// perturb another. The Iterations axis reuses a single run per trial and
// reads the trace at each point.
template <typename Scalar>
SweepResult<Scalar> run_sweep(const ScenarioConfig<Scalar>& config, SweepAxis axis,
                              const std::vector<Scalar>& points,
                              const std::vector<Method>& methods,
                              unsigned threads = 0) {
  if (points.empty()) throw std::invalid_argument("run_sweep: points must be non-empty");
  if (!std::is_sorted(points.begin(), points.end()))
    throw std::invalid_argument("run_sweep: points must be monotone increasing");
  if (methods.empty()) throw std::invalid_argument("run_sweep: methods must be non-empty");
  config.validate();

  SweepResult<Scalar> result;
  result.axis = axis;
  result.points = points;
  result.trials = config.trials;

  for (const Method method : methods) {
    SweepSeries<Scalar> series;
    series.method = method;
    series.trial_secrecy.resize(points.size());

    if (axis == SweepAxis::Iterations) {
      ScenarioConfig<Scalar> cfg = detail::apply_axis_value(
          config, axis, *std::max_element(points.begin(), points.end()));
      cfg.method = method;
      std::vector<std::vector<Scalar>> traces(
          static_cast<std::size_t>(cfg.trials));
      detail::parallel_for_trials(cfg.trials, threads, [&](std::int64_t t) {
        const TrialResult<Scalar> trial = run_trial(cfg, static_cast<std::uint64_t>(t));
        auto& secrecy = traces[static_cast<std::size_t>(t)];
        secrecy.reserve(trial.trace.outer.size());
        for (const auto& it : trial.trace.outer) secrecy.push_back(it.secrecy_rate);
      });
      for (std::size_t j = 0; j < points.size(); ++j) {
        auto& bucket = series.trial_secrecy[j];
        bucket.reserve(traces.size());
        const auto want = std::max<std::size_t>(static_cast<std::size_t>(points[j]), 1);
        for (const auto& tr : traces) {
          // Converged traces carry their final value forward.
          const std::size_t idx = std::min(want, tr.size()) - 1;
          bucket.push_back(tr[idx]);
        }
      }
    } else {
      for (std::size_t j = 0; j < points.size(); ++j) {
        ScenarioConfig<Scalar> cfg = detail::apply_axis_value(config, axis, points[j]);
        cfg.method = method;
        auto& bucket = series.trial_secrecy[j];
        bucket.resize(static_cast<std::size_t>(cfg.trials));
        detail::parallel_for_trials(cfg.trials, threads, [&](std::int64_t t) {
          bucket[static_cast<std::size_t>(t)] =
              run_trial(cfg, static_cast<std::uint64_t>(t)).metrics.secrecy_rate;
        });
      }
    }

    for (const auto& bucket : series.trial_secrecy) {
      const auto [mean, se] = detail::mean_and_stderr(bucket);
      series.mean_secrecy.push_back(mean);
      series.std_error.push_back(se);
    }
    result.series.push_back(std::move(series));
  }
  return result;
}

template <typename Scalar>
SweepResult<Scalar> run_sweep(const ScenarioConfig<Scalar>& config, SweepAxis axis,
                              const std::vector<Scalar>& points,
                              unsigned threads = 0) {
  return run_sweep(config, axis, points, std::vector<Method>{config.method}, threads);
}

}  // namespace bdris
