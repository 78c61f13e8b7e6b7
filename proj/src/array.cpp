// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#include "posync/array.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace posync {

namespace {
constexpr double kPi = std::numbers::pi;
}

void ArrayGeometry::validate() const {
  if (element_count() < 2 && pattern != Pattern::Isotropic) {
    throw std::invalid_argument("ArrayGeometry: need at least 2 elements");
  }
  if (positions.empty()) throw std::invalid_argument("ArrayGeometry: no elements");
  for (const auto& p : positions) {
    if (!p.allFinite()) throw std::invalid_argument("ArrayGeometry: non-finite element position");
  }
  if (!(wavelength > 0.0)) throw std::invalid_argument("ArrayGeometry: wavelength must be > 0");
  if (pattern == Pattern::CrossDipole &&
      (slant_azimuth.size() != positions.size() || slant_sign.size() != positions.size())) {
    throw std::invalid_argument("ArrayGeometry: slant data must match element count");
  }
}

ArrayGeometry ArrayGeometry::cylindrical(double wavelength, int per_ring) {
  if (per_ring < 1) throw std::invalid_argument("cylindrical: per_ring must be >= 1");
  ArrayGeometry g;
  g.wavelength = wavelength;
  g.pattern = Pattern::CrossDipole;
  const double radius = wavelength / 2.0;
  const std::array<double, 2> heights = {0.0, wavelength / 4.0};
  int index = 0;
  for (int ring = 0; ring < 2; ++ring) {
    for (int i = 0; i < per_ring; ++i) {
      const double az = 2.0 * kPi * (i + 0.5 * ring) / per_ring;
      g.positions.emplace_back(radius * std::cos(az), radius * std::sin(az), heights[ring]);
      g.slant_azimuth.push_back(az);
      g.slant_sign.push_back(index % 2 == 0 ? 1 : -1);
      ++index;
    }
  }
  return g;
}

ArrayGeometry ArrayGeometry::single_isotropic(double wavelength) {
  ArrayGeometry g;
  g.wavelength = wavelength;
  g.pattern = Pattern::Isotropic;
  g.positions.emplace_back(0.0, 0.0, 0.0);
  g.slant_azimuth.push_back(0.0);
  g.slant_sign.push_back(1);
  return g;
}

std::pair<std::complex<double>, std::complex<double>> element_response(
    const ArrayGeometry& geom, int element, double azimuth, double colatitude) {
  const double sa = std::sin(azimuth), ca = std::cos(azimuth);
  const double sc = std::sin(colatitude), cc = std::cos(colatitude);

  // Incoming-wave direction and the spherical polarization basis. These are
  // smooth 2pi-periodic expressions in both angles, which is what makes the
  // Fourier-mode (EADF) representation applicable.
  const Eigen::Vector3d u(sc * ca, sc * sa, cc);
  const Eigen::Vector3d e_theta(cc * ca, cc * sa, -sc);
  const Eigen::Vector3d e_phi(-sa, ca, 0.0);

  const double k = 2.0 * kPi / geom.wavelength;
  const double phase_arg = k * u.dot(geom.positions[static_cast<std::size_t>(element)]);
  const std::complex<double> phase(std::cos(phase_arg), std::sin(phase_arg));

  if (geom.pattern == ArrayGeometry::Pattern::Isotropic) {
    return {phase, phase};
  }

  const double psi = geom.slant_azimuth[static_cast<std::size_t>(element)];
  const double sign = static_cast<double>(geom.slant_sign[static_cast<std::size_t>(element)]);
  const Eigen::Vector3d tangent(-std::sin(psi), std::cos(psi), 0.0);
  const Eigen::Vector3d dipole = (tangent + sign * Eigen::Vector3d::UnitZ()).normalized();

  const double gain_h = dipole.dot(e_phi);
  const double gain_v = dipole.dot(e_theta);
  return {gain_h * phase, gain_v * phase};
}

}  // namespace posync
