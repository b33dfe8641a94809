#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "bdris/metrics.hpp"

namespace bdris {

enum class TangentProjection {
  Canonical,     // Phi * skew(Phi^H G), exact tangent of the unitary group
  Doubled,       // difference form G - Phi G^H Phi, twice the canonical
};

template <typename Scalar = double>
struct ManifoldOptConfig {
  Scalar initial_step = Scalar(0.1);
  Scalar backtrack_factor = Scalar(0.5);
  Scalar armijo_coefficient = Scalar(1e-4);
  int max_inner_iterations = 100;
  Scalar gradient_tolerance = Scalar(1e-5);
  Scalar lambda_init = Scalar(0);
  Scalar dual_step_rho = Scalar(0);
  TangentProjection projection = TangentProjection::Canonical;

  void validate() const {
    if (!(initial_step > Scalar(0)) ||
        !(backtrack_factor > Scalar(0) && backtrack_factor < Scalar(1)) ||
        !(armijo_coefficient > Scalar(0) && armijo_coefficient < Scalar(1)) ||
        max_inner_iterations <= 0 || !(gradient_tolerance > Scalar(0)) ||
        !(lambda_init >= Scalar(0)) || !(dual_step_rho >= Scalar(0)))
      throw std::invalid_argument("ManifoldOptConfig: field out of range");
  }
};

// Augmented Lagrangian ascended over Phi. The rate difference is kept
// unclamped inside the optimizer; the [.]+ clamp is applied only when
// reporting the secrecy rate.
template <typename Scalar>
Scalar lagrangian(const ChannelSet<Scalar>& channels,
                  const PhaseShiftMatrix<Scalar>& phi, Scalar p_s,
                  const PowerConfig<Scalar>& powers, Scalar lambda) {
  const auto [gamma_s, gamma_e] = sinr_pair(channels, phi, p_s, powers);
  const Scalar rate_diff =
      std::log2(Scalar(1) + gamma_s) - std::log2(Scalar(1) + gamma_e);
  const Scalar interference = effective_gain(channels.g, phi) * p_s;
  return rate_diff - lambda * (interference - powers.i_th);
}

// Wirtinger gradient of the Lagrangian with respect to Phi, scaled so that
// its real and imaginary parts are the plain partial derivatives with
// respect to Re(Phi_ij) and Im(Phi_ij):
//
//   grad = (2 P_s / ln 2) * [ c_s A_s conj(h_s) - c_e A_e conj(h_e) ] w^H
//          - 2 lambda P_s A_g conj(g) w^H,
//
// where A_x = h_x^T Phi w and c_x = 1 / ((1 + gamma_x) D_x). Each term is
// rank one, so the whole gradient is u w^H for a combined vector u.
template <typename Scalar>
ComplexMatrix<Scalar> euclidean_gradient(const ChannelSet<Scalar>& channels,
                                         const PhaseShiftMatrix<Scalar>& phi,
                                         Scalar p_s,
                                         const PowerConfig<Scalar>& powers,
                                         Scalar lambda) {
  const ComplexVector<Scalar> w = combining_vector<Scalar>(phi.size());
  const Complex<Scalar> a_s = effective_amplitude(channels.h_s, phi.matrix(), w);
  const Complex<Scalar> a_e = effective_amplitude(channels.h_e, phi.matrix(), w);
  const Complex<Scalar> a_g = effective_amplitude(channels.g, phi.matrix(), w);

  const Scalar den_s = powers.sigma_s_sq + std::norm(channels.f_s) * powers.q_p;
  const Scalar den_e = powers.sigma_e_sq + std::norm(channels.f_e) * powers.q_p;
  const Scalar gamma_s = std::norm(a_s) * p_s / den_s;
  const Scalar gamma_e = std::norm(a_e) * p_s / den_e;

  const Scalar ln2 = std::log(Scalar(2));
  const Scalar c_s = (Scalar(2) * p_s / ln2) / ((Scalar(1) + gamma_s) * den_s);
  const Scalar c_e = (Scalar(2) * p_s / ln2) / ((Scalar(1) + gamma_e) * den_e);
  const Scalar c_g = Scalar(2) * lambda * p_s;

  const ComplexVector<Scalar> u = c_s * a_s * channels.h_s.conjugate() -
                                  c_e * a_e * channels.h_e.conjugate() -
                                  c_g * a_g * channels.g.conjugate();
  return u * w.adjoint();
}

template <typename Scalar = double>
struct GradientBundle {
  ComplexMatrix<Scalar> euclidean;
  ComplexMatrix<Scalar> riemannian;
  Scalar lagrangian_value{};
  Scalar secrecy_value{};  // clamped, for reporting
};

// Orthogonal projection onto the tangent space of the unitary group at phi.
// The doubled variant G - Phi G^H Phi equals twice the canonical projection
// for square unitary phi; both yield a skew-Hermitian Phi^H T.
template <typename DerivedP, typename DerivedG>
ComplexMatrix<typename Eigen::NumTraits<typename DerivedP::Scalar>::Real>
project_to_tangent(const Eigen::MatrixBase<DerivedP>& phi,
                   const Eigen::MatrixBase<DerivedG>& grad,
                   TangentProjection mode = TangentProjection::Canonical) {
  using Real = typename Eigen::NumTraits<typename DerivedP::Scalar>::Real;
  if (phi.rows() != phi.cols() || grad.rows() != phi.rows() ||
      grad.cols() != phi.cols())
    throw std::invalid_argument("project_to_tangent: dimension mismatch");
  if (!(unitarity_defect(phi) <= Real(kUnitarityTolerance)))
    throw std::invalid_argument("project_to_tangent: phi is not unitary");
  if (mode == TangentProjection::Doubled)
    return grad - phi * grad.adjoint() * phi;
  const ComplexMatrix<Real> s = phi.adjoint() * grad;
  return phi * (Real(0.5) * (s - s.adjoint()));
}

template <typename Scalar>
ComplexMatrix<Scalar> project_to_tangent(const PhaseShiftMatrix<Scalar>& phi,
                                         const ComplexMatrix<Scalar>& grad,
                                         TangentProjection mode =
                                             TangentProjection::Canonical) {
  return project_to_tangent(phi.matrix(), grad, mode);
}

template <typename Scalar>
GradientBundle<Scalar> gradient_bundle(const ChannelSet<Scalar>& channels,
                                       const PhaseShiftMatrix<Scalar>& phi,
                                       Scalar p_s,
                                       const PowerConfig<Scalar>& powers,
                                       Scalar lambda,
                                       TangentProjection mode) {
  GradientBundle<Scalar> b;
  b.euclidean = euclidean_gradient(channels, phi, p_s, powers, lambda);
  b.riemannian = project_to_tangent(phi, b.euclidean, mode);
  const auto [gamma_s, gamma_e] = sinr_pair(channels, phi, p_s, powers);
  const Scalar rate_diff =
      std::log2(Scalar(1) + gamma_s) - std::log2(Scalar(1) + gamma_e);
  const Scalar interference = effective_gain(channels.g, phi) * p_s;
  b.lagrangian_value = rate_diff - lambda * (interference - powers.i_th);
  b.secrecy_value = std::max(Scalar(0), rate_diff);
  return b;
}

// Geodesic step Phi' = Phi exp(eta Phi^H T). The exponential of the
// skew-Hermitian argument keeps Phi' unitary; a polar projection backstops
// accumulated drift beyond 1e-10.
template <typename Scalar>
PhaseShiftMatrix<Scalar> retract(const PhaseShiftMatrix<Scalar>& phi,
                                 const ComplexMatrix<Scalar>& tangent,
                                 Scalar eta) {
  if (tangent.rows() != phi.size() || tangent.cols() != phi.size())
    throw std::invalid_argument("retract: dimension mismatch");
  ComplexMatrix<Scalar> s = phi.matrix().adjoint() * tangent;
  const Scalar skew_defect = (s + s.adjoint()).norm();
  if (skew_defect > Scalar(1e-8) * std::max(tangent.norm(), Scalar(1e-300)))
    throw std::invalid_argument("retract: direction is not tangent at phi");
  s = (Scalar(0.5) * (s - s.adjoint())).eval();  // exact skew-Hermitian
  ComplexMatrix<Scalar> next = phi.matrix() * (eta * s).exp();
  if (unitarity_defect(next) > Scalar(1e-10)) {
    Eigen::JacobiSVD<ComplexMatrix<Scalar>> svd(
        next, Eigen::ComputeThinU | Eigen::ComputeThinV);
    next = svd.matrixU() * svd.matrixV().adjoint();
  }
  return PhaseShiftMatrix<Scalar>(std::move(next));
}

// Heuristic feasibility clamp on the step size; vacuous when p_s = 0 or the
// primary channel gain vanishes.
template <typename Scalar>
Scalar clamp_step(Scalar eta, const ChannelSet<Scalar>& channels,
                  const PhaseShiftMatrix<Scalar>& phi, Scalar p_s,
                  const PowerConfig<Scalar>& powers) {
  if (!(p_s >= Scalar(0))) throw std::invalid_argument("clamp_step: p_s < 0");
  if (p_s == Scalar(0)) return eta;
  const Scalar load = effective_gain(channels.g, phi) * p_s;
  if (load == Scalar(0)) return eta;
  return std::min(eta, powers.i_th / load);
}

enum class PhaseOptStatus { Converged, MaxIterations, StepUnderflow };

inline const char* to_string(PhaseOptStatus s) {
  switch (s) {
    case PhaseOptStatus::Converged: return "converged";
    case PhaseOptStatus::MaxIterations: return "max_iterations";
    default: return "step_underflow";
  }
}

template <typename Scalar = double>
struct InnerIterate {
  Scalar lagrangian{};
  Scalar secrecy{};
  Scalar gradient_norm{};
  Scalar step{};       // accepted step size, 0 if none
  bool accepted = false;
};

template <typename Scalar = double>
struct PhaseOptResult {
  PhaseShiftMatrix<Scalar> phi;
  PhaseOptStatus status = PhaseOptStatus::MaxIterations;
  Scalar lambda{};
  int iterations = 0;
  int accepted_steps = 0;
  std::vector<InnerIterate<Scalar>> trace;
};

inline constexpr double kStepUnderflow = 1e-12;
// An accepted step whose Lagrangian gain falls below this is stagnation;
// the search is then treated as converged rather than left to burn the
// iteration budget on roundoff-scale moves along the constraint boundary.
inline constexpr double kProgressFloor = 1e-12;

// Feasibility guard used by the line searches: candidates must respect the
// interference temperature up to roundoff slack, so the exit iterate stays
// usable by the exactly-feasible power switch.
template <typename Scalar>
bool interference_feasible(const ChannelSet<Scalar>& channels,
                           const PhaseShiftMatrix<Scalar>& phi, Scalar p_s,
                           const PowerConfig<Scalar>& powers) {
  return effective_gain(channels.g, phi) * p_s <=
         powers.i_th * (Scalar(1) + Scalar(1e-12));
}

// Projected-gradient ascent of the augmented Lagrangian over the unitary
// group: Euclidean gradient, tangent projection, clamped Armijo backtracking
// line search, exponential retraction. Steps are accepted only when they
// both satisfy the sufficient-increase condition and keep the interference
// constraint feasible; eta underflow surfaces as StepUnderflow with the last
// (feasible) iterate. The dual variable is updated after each accepted step
// when dual_step_rho > 0.
template <typename Scalar>
PhaseOptResult<Scalar> optimize_phase(const ChannelSet<Scalar>& channels,
                                      const PhaseShiftMatrix<Scalar>& phi_init,
                                      Scalar p_s,
                                      const PowerConfig<Scalar>& powers,
                                      const ManifoldOptConfig<Scalar>& cfg) {
  cfg.validate();
  powers.validate();
  PhaseOptResult<Scalar> result{
      phi_init, PhaseOptStatus::MaxIterations, cfg.lambda_init, 0, 0, {}};

  for (int iter = 0; iter < cfg.max_inner_iterations; ++iter) {
    const GradientBundle<Scalar> bundle = gradient_bundle(
        channels, result.phi, p_s, powers, result.lambda, cfg.projection);
    const Scalar grad_norm = bundle.riemannian.norm();
    InnerIterate<Scalar> record{bundle.lagrangian_value, bundle.secrecy_value,
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
          retract(result.phi, bundle.riemannian, eta);
      const bool feasible =
          interference_feasible(channels, candidate, p_s, powers);
      const Scalar value =
          lagrangian(channels, candidate, p_s, powers, result.lambda);
      if (feasible &&
          value >= bundle.lagrangian_value +
                       cfg.armijo_coefficient * eta * grad_norm * grad_norm) {
        result.phi = candidate;
        record.step = eta;
        record.accepted = true;
        accepted = true;
        gain = value - bundle.lagrangian_value;
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

}  // namespace bdris
