#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "bdris/channel.hpp"
#include "bdris/random.hpp"
#include "bdris/types.hpp"

namespace bdris {

inline constexpr double kUnitarityTolerance = 1e-8;

template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real unitarity_defect(
    const Eigen::MatrixBase<Derived>& phi) {
  using C = typename Derived::Scalar;
  const auto m = phi.rows();
  return (phi * phi.adjoint() -
          Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic>::Identity(m, m))
      .norm();
}

// M x M unitary BD-RIS response. The invariant ||Phi Phi^H - I||_F <= 1e-8
// is enforced at construction, so downstream code can rely on it.
template <typename Scalar = double>
class PhaseShiftMatrix {
 public:
  explicit PhaseShiftMatrix(ComplexMatrix<Scalar> phi) : phi_(std::move(phi)) {
    if (phi_.rows() != phi_.cols() || phi_.rows() == 0)
      throw std::invalid_argument("PhaseShiftMatrix: matrix must be square");
    if (!(unitarity_defect(phi_) <= Scalar(kUnitarityTolerance)))
      throw std::invalid_argument("PhaseShiftMatrix: matrix is not unitary");
  }

  static PhaseShiftMatrix Identity(Eigen::Index m) {
    return PhaseShiftMatrix(ComplexMatrix<Scalar>::Identity(m, m));
  }

  // Haar-distributed random unitary.
  static PhaseShiftMatrix Random(Eigen::Index m, RngStream& rng) {
    return PhaseShiftMatrix(random_unitary<Scalar>(m, rng));
  }

  // Diagonal unit-modulus response with phases uniform in [0, 2*pi).
  static PhaseShiftMatrix RandomDiagonal(Eigen::Index m, RngStream& rng) {
    ComplexMatrix<Scalar> phi = ComplexMatrix<Scalar>::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      phi(i, i) = std::polar(Scalar(1),
                             uniform_in<Scalar>(rng, Scalar(0),
                                                Scalar(2) * Scalar(kPi)));
    return PhaseShiftMatrix(std::move(phi));
  }

  const ComplexMatrix<Scalar>& matrix() const { return phi_; }
  Eigen::Index size() const { return phi_.rows(); }

 private:
  ComplexMatrix<Scalar> phi_;
};

// Transmit powers and noise levels, all linear mW.
template <typename Scalar = double>
struct PowerConfig {
  Scalar p_max = Scalar(100);      // 20 dBm
  Scalar q_p = Scalar(1e4);        // 40 dBm
  Scalar sigma_s_sq = Scalar(1e-4);
  Scalar sigma_e_sq = Scalar(1e-4);
  Scalar i_th = Scalar(1e-5);

  void validate() const {
    if (!(p_max > Scalar(0)) || !(q_p > Scalar(0)) || !(sigma_s_sq > Scalar(0)) ||
        !(sigma_e_sq > Scalar(0)) || !(i_th > Scalar(0)))
      throw std::invalid_argument("PowerConfig: all fields must be > 0");
  }
};

template <typename Scalar = double>
struct LinkMetrics {
  Scalar gamma_s{};
  Scalar gamma_e{};
  Scalar rate_s{};             // bits/s/Hz
  Scalar rate_e{};             // bits/s/Hz
  Scalar secrecy_rate{};       // max(0, rate_s - rate_e)
  Scalar interference_at_pu{}; // linear mW
};

// Receiver-side reference direction: the single-antenna receiver sums all
// transmissive elements, w = (1, ..., 1)/sqrt(M). The effective channel is
// the scalar h^T Phi w; a full-row-norm reading of |h Phi|^2 would be
// unitarily invariant and therefore independent of Phi.
template <typename Scalar = double>
ComplexVector<Scalar> combining_vector(Eigen::Index m) {
  if (m <= 0) throw std::invalid_argument("combining_vector: m must be positive");
  return ComplexVector<Scalar>::Constant(m, Complex<Scalar>(Scalar(1) / std::sqrt(Scalar(m)), 0));
}

// Scalar effective channel h^T Phi w.
template <typename DerivedH, typename DerivedPhi, typename DerivedW>
typename DerivedH::Scalar effective_amplitude(const Eigen::MatrixBase<DerivedH>& h,
                                              const Eigen::MatrixBase<DerivedPhi>& phi,
                                              const Eigen::MatrixBase<DerivedW>& w) {
  if (h.size() != phi.rows() || phi.cols() != w.size())
    throw std::invalid_argument("effective_amplitude: dimension mismatch");
  return (h.transpose() * phi * w).value();
}

// |h^T Phi w|^2.
template <typename DerivedH, typename DerivedPhi, typename DerivedW>
auto effective_gain(const Eigen::MatrixBase<DerivedH>& h,
                    const Eigen::MatrixBase<DerivedPhi>& phi,
                    const Eigen::MatrixBase<DerivedW>& w) {
  return std::norm(effective_amplitude(h, phi, w));
}

template <typename Scalar>
Scalar effective_gain(const ComplexVector<Scalar>& h,
                      const PhaseShiftMatrix<Scalar>& phi) {
  return effective_gain(h, phi.matrix(), combining_vector<Scalar>(phi.size()));
}

template <typename Scalar>
std::pair<Scalar, Scalar> sinr_pair(const ChannelSet<Scalar>& channels,
                                    const PhaseShiftMatrix<Scalar>& phi,
                                    Scalar p_s, const PowerConfig<Scalar>& powers) {
  if (!(p_s >= Scalar(0)))
    throw std::invalid_argument("sinr_pair: p_s must be >= 0");
  const ComplexVector<Scalar> w = combining_vector<Scalar>(phi.size());
  const Scalar gamma_s = effective_gain(channels.h_s, phi.matrix(), w) * p_s /
                         (powers.sigma_s_sq + std::norm(channels.f_s) * powers.q_p);
  const Scalar gamma_e = effective_gain(channels.h_e, phi.matrix(), w) * p_s /
                         (powers.sigma_e_sq + std::norm(channels.f_e) * powers.q_p);
  return {gamma_s, gamma_e};
}

template <typename Scalar>
LinkMetrics<Scalar> link_metrics(const ChannelSet<Scalar>& channels,
                                 const PhaseShiftMatrix<Scalar>& phi, Scalar p_s,
                                 const PowerConfig<Scalar>& powers) {
  const auto [gamma_s, gamma_e] = sinr_pair(channels, phi, p_s, powers);
  LinkMetrics<Scalar> m;
  m.gamma_s = gamma_s;
  m.gamma_e = gamma_e;
  m.rate_s = std::log2(Scalar(1) + gamma_s);
  m.rate_e = std::log2(Scalar(1) + gamma_e);
  m.secrecy_rate = std::max(Scalar(0), m.rate_s - m.rate_e);
  m.interference_at_pu = effective_gain(channels.g, phi) * p_s;
  return m;
}

}  // namespace bdris
