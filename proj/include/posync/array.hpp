// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace posync {

/// Antenna array geometry with an ideal element model. Angles follow the
/// channel convention: azimuth phi in (-pi, pi], colatitude theta in [0, pi]
/// measured from the array z-axis (theta = pi/2 is the horizon).
struct ArrayGeometry {
  enum class Pattern {
    Isotropic,    ///< unit response to both polarizations (test element)
    CrossDipole,  ///< slanted crossed-dipole port, cos/sin projection gains
  };

  std::vector<Eigen::Vector3d> positions;  ///< element phase centers, meters
  std::vector<double> slant_azimuth;       ///< per-element tangent reference
  std::vector<int> slant_sign;             ///< +/-1 alternating slant
  double wavelength = 0.05;                ///< meters
  Pattern pattern = Pattern::CrossDipole;

  int element_count() const { return static_cast<int>(positions.size()); }

  /// Basic sanity: >= 2 elements, finite positions, positive wavelength.
  void validate() const;

  /// Default array: dual-polarized cross-dipoles on two circles of radius
  /// lambda/2 at heights 0 and lambda/4, ring 2 rotated half an element
  /// spacing. 10 elements total with the default 5 per ring.
  static ArrayGeometry cylindrical(double wavelength, int per_ring = 5);

  /// Single isotropic element at the origin (for tests).
  static ArrayGeometry single_isotropic(double wavelength);
};

/// Complex response of one element to a unit plane wave from direction
/// (azimuth, colatitude), including the plane-wave phase at the element
/// position. Returns (horizontal, vertical) polarization responses.
std::pair<std::complex<double>, std::complex<double>> element_response(
    const ArrayGeometry& geom, int element, double azimuth, double colatitude);

}  // namespace posync
