#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "bdris/random.hpp"
#include "bdris/types.hpp"

namespace bdris {

// Uniform planar array on the RIS: m_x elements per column, m_y per row,
// M = m_x * m_y in total.
template <typename Scalar = double>
struct ArrayGeometry {
  int m_x = 8;
  int m_y = 4;
  Scalar carrier_frequency = Scalar(2.0e9);                     // Hz
  Scalar element_spacing = Scalar(kSpeedOfLight / (2.0 * 2.0e9));  // m, lambda/2

  int size() const { return m_x * m_y; }

  // delta = 2*pi*f_c*q / c; equals pi at half-wavelength spacing.
  Scalar phase_delta() const {
    return Scalar(2) * Scalar(kPi) * carrier_frequency * element_spacing /
           Scalar(kSpeedOfLight);
  }

  void validate() const {
    if (m_x <= 0 || m_y <= 0)
      throw std::invalid_argument("ArrayGeometry: m_x and m_y must be positive");
    if (!(carrier_frequency > Scalar(0)))
      throw std::invalid_argument("ArrayGeometry: carrier_frequency must be > 0");
    if (!(element_spacing > Scalar(0)))
      throw std::invalid_argument("ArrayGeometry: element_spacing must be > 0");
  }
};

// One point-to-point link: Rician factor K, reference power gain h_hat
// (linear, at 1 m) and the LoS arrival direction.
template <typename Scalar = double>
struct LinkGeometry {
  Scalar distance = Scalar(100);  // m
  Scalar rician_k = Scalar(10);   // linear, >= 0
  Scalar power_gain = Scalar(1);  // linear h_hat
  Scalar elevation = Scalar(0);   // theta, [0, pi/2]
  Scalar azimuth = Scalar(0);     // phi, [0, 2*pi)

  void validate(const char* name = "LinkGeometry") const {
    const auto fail = [&](const std::string& what) {
      throw std::invalid_argument(std::string(name) + ": " + what);
    };
    if (!(distance > Scalar(0))) fail("distance must be > 0");
    if (!(power_gain > Scalar(0))) fail("power_gain must be > 0");
    if (!(rician_k >= Scalar(0))) fail("rician_k must be >= 0");
    if (!(elevation >= Scalar(0)) || !(elevation <= Scalar(kPi) / Scalar(2)))
      fail("elevation must lie in [0, pi/2]");
    if (!(azimuth >= Scalar(0)) || !(azimuth < Scalar(2) * Scalar(kPi)))
      fail("azimuth must lie in [0, 2*pi)");
  }
};

// Link entry of a scenario: when angles_pinned is false the LoS direction is
// redrawn uniformly per trial, otherwise the stored angles are used as-is.
// Pinning two links to the same angles reproduces the shared-angle reading.
template <typename Scalar = double>
struct LinkSpec {
  LinkGeometry<Scalar> geometry;
  bool angles_pinned = false;
};

// Channel synthesis inputs for one scenario: the RIS array plus the three
// vector links (through the RIS) and the two primary-interference scalars.
template <typename Scalar = double>
struct ChannelConfig {
  ArrayGeometry<Scalar> array;
  LinkSpec<Scalar> st_su;   // ST -> SU, vector h_s
  LinkSpec<Scalar> st_eve;  // ST -> Eve, vector h_e
  LinkSpec<Scalar> st_pu;   // ST -> PU, vector g
  LinkSpec<Scalar> pt_su;   // PT -> SU, scalar f_s
  LinkSpec<Scalar> pt_eve;  // PT -> Eve, scalar f_e

  void validate() const {
    array.validate();
    st_su.geometry.validate("links.st_su");
    st_eve.geometry.validate("links.st_eve");
    st_pu.geometry.validate("links.st_pu");
    pt_su.geometry.validate("links.pt_su");
    pt_eve.geometry.validate("links.pt_eve");
  }
};

// One realization of all five channels.
template <typename Scalar = double>
struct ChannelSet {
  ComplexVector<Scalar> h_s;  // ST -> SU
  ComplexVector<Scalar> h_e;  // ST -> Eve
  ComplexVector<Scalar> g;    // ST -> PU
  Complex<Scalar> f_s{};      // PT -> SU
  Complex<Scalar> f_e{};      // PT -> Eve

  Eigen::Index size() const { return h_s.size(); }

  void validate() const {
    if (h_s.size() != h_e.size() || h_s.size() != g.size())
      throw std::invalid_argument("ChannelSet: vector lengths differ");
    if (!h_s.allFinite() || !h_e.allFinite() || !g.allFinite() ||
        !std::isfinite(std::abs(f_s)) || !std::isfinite(std::abs(f_e)))
      throw std::invalid_argument("ChannelSet: non-finite entry");
  }
};

// Kronecker-structured LoS steering vector of the planar array. Entry
// (i*m_y + j) carries phase -delta*sin(theta)*(cos(phi)*i + sin(phi)*j);
// all entries have unit modulus and the first is exactly 1.
template <typename Scalar>
ComplexVector<Scalar> steering_vector(const ArrayGeometry<Scalar>& geom,
                                      Scalar elevation, Scalar azimuth) {
  geom.validate();
  const Scalar delta = geom.phase_delta();
  const Scalar ax = delta * std::sin(elevation) * std::cos(azimuth);
  const Scalar ay = delta * std::sin(elevation) * std::sin(azimuth);
  ComplexVector<Scalar> v(geom.size());
  for (int i = 0; i < geom.m_x; ++i) {
    const Complex<Scalar> xi = std::polar(Scalar(1), -ax * Scalar(i));
    for (int j = 0; j < geom.m_y; ++j)
      v(i * geom.m_y + j) = xi * std::polar(Scalar(1), -ay * Scalar(j));
  }
  return v;
}

// h = sqrt(h_hat/d^2) * ( sqrt(K/(K+1)) h_LoS + sqrt(1/(K+1)) h_NLoS ) with
// i.i.d. CN(0,1) NLoS entries, so E||h||^2 = M * h_hat / d^2 for any K.
template <typename Scalar>
ComplexVector<Scalar> draw_rician_vector(const LinkGeometry<Scalar>& link,
                                         const ArrayGeometry<Scalar>& geom,
                                         RngStream& rng) {
  link.validate();
  const Scalar amplitude = std::sqrt(link.power_gain) / link.distance;
  const Scalar los_w = std::sqrt(link.rician_k / (link.rician_k + Scalar(1)));
  const Scalar nlos_w = std::sqrt(Scalar(1) / (link.rician_k + Scalar(1)));
  const ComplexVector<Scalar> los =
      steering_vector(geom, link.elevation, link.azimuth);
  const ComplexVector<Scalar> nlos =
      complex_gaussian_vector<Scalar>(geom.size(), rng);
  return amplitude * (los_w * los + nlos_w * nlos);
}

// M = 1 specialization; the LoS component is the scalar 1.
template <typename Scalar>
Complex<Scalar> draw_rician_scalar(const LinkGeometry<Scalar>& link,
                                   RngStream& rng) {
  link.validate();
  const Scalar amplitude = std::sqrt(link.power_gain) / link.distance;
  const Scalar los_w = std::sqrt(link.rician_k / (link.rician_k + Scalar(1)));
  const Scalar nlos_w = std::sqrt(Scalar(1) / (link.rician_k + Scalar(1)));
  return amplitude * (los_w + nlos_w * complex_gaussian<Scalar>(rng));
}

namespace detail {

// Unpinned links get a fresh uniform direction each trial. The draw order
// (angles, then NLoS entries; links in h_s, h_e, g, f_s, f_e order) is part
// of the seeding contract.
template <typename Scalar>
LinkGeometry<Scalar> resolve_angles(const LinkSpec<Scalar>& spec,
                                    RngStream& rng) {
  LinkGeometry<Scalar> geom = spec.geometry;
  if (!spec.angles_pinned) {
    geom.elevation = uniform_in<Scalar>(rng, Scalar(0), Scalar(kPi) / Scalar(2));
    geom.azimuth = uniform_in<Scalar>(rng, Scalar(0), Scalar(2) * Scalar(kPi));
  }
  return geom;
}

}  // namespace detail

// One independent realization of all five channels.
template <typename Scalar>
ChannelSet<Scalar> draw_channel_set(const ChannelConfig<Scalar>& config,
                                    RngStream& rng) {
  config.validate();
  ChannelSet<Scalar> set;
  set.h_s = draw_rician_vector(detail::resolve_angles(config.st_su, rng),
                               config.array, rng);
  set.h_e = draw_rician_vector(detail::resolve_angles(config.st_eve, rng),
                               config.array, rng);
  set.g = draw_rician_vector(detail::resolve_angles(config.st_pu, rng),
                             config.array, rng);
  set.f_s = draw_rician_scalar(config.pt_su.geometry, rng);
  set.f_e = draw_rician_scalar(config.pt_eve.geometry, rng);
  return set;
}

}  // namespace bdris
