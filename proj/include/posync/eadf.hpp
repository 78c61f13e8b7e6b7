// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#pragma once

#include <complex>

#include <Eigen/Dense>
#include <json.hpp>

#include "posync/array.hpp"

namespace posync {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Fourier-mode representation of an array's angular response (effective
/// aperture distribution function) plus the transceiver frequency response.
/// Mode counts are odd so index sets are symmetric about zero.
struct Eadf {
  CMat gh;  ///< horizontal excitation, element_count x (modes_az * modes_el)
  CMat gv;  ///< vertical excitation, same shape
  CMat gf;  ///< transceiver frequency response, mf x mf (identity = ideal)
  int modes_azimuth = 0;
  int modes_elevation = 0;
  double subcarrier_spacing_hz = 240e3;
  int subcarrier_count = 19;

  int element_count() const { return static_cast<int>(gh.rows()); }
  int channel_dim() const { return element_count() * subcarrier_count; }
};

/// Frequency-domain delay steering vector. Entry for mode
/// m = -(mf-1)/2 ... +(mf-1)/2 is exp(j 2 pi m f0 tau); mf must be odd.
CVec delay_steering(double tau, int mf, double f0);

/// Angular steering vector d(theta) kron d(phi) with d(phi)_m = exp(j m phi),
/// modes symmetric about zero; ma and me must be odd.
CVec angle_steering(double azimuth, double colatitude, int ma, int me);

/// Build the EADF of an ideal array by sampling element responses on a
/// uniform (azimuth, colatitude) torus grid and taking the 2D DFT truncated
/// to the central ma x me modes. Grid sizes must be >= the mode counts
/// (aliasing rejected). gf defaults to identity.
Eadf synthesize_eadf(const ArrayGeometry& geom, int ma, int me, int grid_azimuth,
                     int grid_elevation, double f0, int mf);

/// Polarimetric array response: columns [Gh d(phi,theta) kron Gf d(tau),
/// Gv d(phi,theta) kron Gf d(tau)], (element_count * mf) x 2. Row index is
/// element-major (element * mf + subcarrier).
CMat polarimetric_response(const Eadf& eadf, double colatitude, double azimuth, double tau);

/// JSON schema for fixtures: complex numbers as [re, im] pairs.
nlohmann::json eadf_to_json(const Eadf& eadf);
Eadf eadf_from_json(const nlohmann::json& j);

}  // namespace posync
