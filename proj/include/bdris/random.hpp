#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "bdris/types.hpp"

namespace bdris {

// Every stochastic operation takes an explicit stream; trial t of a campaign
// owns the stream seeded with base_seed + t (unsigned 64-bit wraparound).
using RngStream = std::mt19937_64;

// Uniform in [0, 1) built directly from the raw 64-bit output so that
// realizations are identical across standard library implementations.
template <typename Scalar = double>
Scalar uniform_unit(RngStream& rng) {
  return Scalar((rng() >> 11) * 0x1.0p-53);
}

template <typename Scalar = double>
Scalar uniform_in(RngStream& rng, Scalar lo, Scalar hi) {
  return lo + (hi - lo) * uniform_unit<Scalar>(rng);
}

// Circularly-symmetric complex Gaussian with E|z|^2 = 1 (variance 1/2 per
// real component), via the polar Box-Muller transform.
template <typename Scalar = double>
Complex<Scalar> complex_gaussian(RngStream& rng) {
  const Scalar u1 = Scalar(1) - uniform_unit<Scalar>(rng);  // (0, 1]
  const Scalar u2 = uniform_unit<Scalar>(rng);
  const Scalar radius = std::sqrt(-std::log(u1));
  const Scalar angle = Scalar(2) * Scalar(kPi) * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

template <typename Scalar = double>
ComplexVector<Scalar> complex_gaussian_vector(Eigen::Index n, RngStream& rng) {
  ComplexVector<Scalar> v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = complex_gaussian<Scalar>(rng);
  return v;
}

template <typename Scalar = double>
ComplexMatrix<Scalar> complex_gaussian_matrix(Eigen::Index rows,
                                              Eigen::Index cols,
                                              RngStream& rng) {
  ComplexMatrix<Scalar> a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = complex_gaussian<Scalar>(rng);
  return a;
}

// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
// of diag(R) folded into Q (Mezzadri's construction).
template <typename Scalar = double>
ComplexMatrix<Scalar> random_unitary(Eigen::Index m, RngStream& rng) {
  if (m <= 0) throw std::invalid_argument("random_unitary: m must be positive");
  const ComplexMatrix<Scalar> a = complex_gaussian_matrix<Scalar>(m, m, rng);
  Eigen::HouseholderQR<ComplexMatrix<Scalar>> qr(a);
  ComplexMatrix<Scalar> q = qr.householderQ();
  const ComplexMatrix<Scalar> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < m; ++j) {
    const Complex<Scalar> d = r(j, j);
    const Scalar mag = std::abs(d);
    q.col(j) *= mag > Scalar(0) ? d / mag : Complex<Scalar>(1, 0);
  }
  return q;
}

// Random skew-Hermitian matrix, (X - X^H)/2 of a Gaussian X.
template <typename Scalar = double>
ComplexMatrix<Scalar> random_skew_hermitian(Eigen::Index m, RngStream& rng) {
  const ComplexMatrix<Scalar> x = complex_gaussian_matrix<Scalar>(m, m, rng);
  return Scalar(0.5) * (x - x.adjoint()).eval();
}

}  // namespace bdris
