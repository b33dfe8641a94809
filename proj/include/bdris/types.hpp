#pragma once

#include <complex>

#include <Eigen/Dense>

namespace bdris {

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using ComplexVector = Eigen::Vector<std::complex<Scalar>, Eigen::Dynamic>;

template <typename Scalar>
using ComplexMatrix =
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RealVector = Eigen::Vector<Scalar, Eigen::Dynamic>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Power unit conventions: everything linear is in mW, dBm converts as
// mW = 10^(dBm/10).
template <typename Scalar>
Scalar dbm_to_mw(Scalar dbm) {
  return std::pow(Scalar(10), dbm / Scalar(10));
}

template <typename Scalar>
Scalar mw_to_dbm(Scalar mw) {
  return Scalar(10) * std::log10(mw);
}

}  // namespace bdris
