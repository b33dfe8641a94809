#pragma once

#include <algorithm>

#include "bdris/metrics.hpp"

namespace bdris {

enum class PowerBranch { Transmit, Silent };

inline const char* to_string(PowerBranch b) {
  return b == PowerBranch::Transmit ? "transmit" : "silent";
}

template <typename Scalar = double>
struct PowerDecision {
  Scalar p_star{};                  // linear mW
  PowerBranch branch = PowerBranch::Silent;
  Scalar normalized_gain_su{};      // |h_s^T Phi w|^2 / (sigma_s^2 + |f_s|^2 Q_p)
  Scalar normalized_gain_eve{};
};

// Closed-form switch for the power subproblem at fixed Phi: transmit at the
// interference/power cap when the SU normalized gain strictly dominates,
// otherwise stay silent. Ties resolve to silent. A vanishing primary-channel
// gain makes the interference bound vacuous, so the cap is P_max alone.
template <typename Scalar>
PowerDecision<Scalar> optimal_power(const ChannelSet<Scalar>& channels,
                                    const PhaseShiftMatrix<Scalar>& phi,
                                    const PowerConfig<Scalar>& powers) {
  powers.validate();
  const ComplexVector<Scalar> w = combining_vector<Scalar>(phi.size());
  const Scalar den_s = powers.sigma_s_sq + std::norm(channels.f_s) * powers.q_p;
  const Scalar den_e = powers.sigma_e_sq + std::norm(channels.f_e) * powers.q_p;

  PowerDecision<Scalar> decision;
  decision.normalized_gain_su =
      effective_gain(channels.h_s, phi.matrix(), w) / den_s;
  decision.normalized_gain_eve =
      effective_gain(channels.h_e, phi.matrix(), w) / den_e;

  if (decision.normalized_gain_su > decision.normalized_gain_eve) {
    const Scalar g_gain = effective_gain(channels.g, phi.matrix(), w);
    decision.branch = PowerBranch::Transmit;
    decision.p_star = g_gain > Scalar(0)
                          ? std::min(powers.i_th / g_gain, powers.p_max)
                          : powers.p_max;
  } else {
    decision.branch = PowerBranch::Silent;
    decision.p_star = Scalar(0);
  }
  return decision;
}

}  // namespace bdris
