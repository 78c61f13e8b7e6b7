// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#pragma once

#include <utility>

#include "posync/types.hpp"

namespace posync {

/// Scaled unscented-transform parameters. lambda is derived per state
/// dimension as alpha^2 (n + kappa) - n.
struct UtParams {
  double alpha = 1e-3;  ///< spread of the sigma points around the mean
  double beta = 2.0;    ///< prior-knowledge term (2 is optimal for Gaussians)
  double kappa = 0.0;   ///< secondary scaling, commonly 0 or 3-n

  double lambda(int n) const { return alpha * alpha * (n + kappa) - n; }

  /// Throws std::invalid_argument for n < 1, alpha <= 0, or n + lambda == 0.
  void validate(int n) const;
};

/// 2n+1 deterministic sample points with their mean/covariance weights.
struct SigmaPointSet {
  Mat points;        ///< n x (2n+1); column 0 is the mean
  Vec weights_mean;  ///< length 2n+1
  Vec weights_cov;   ///< length 2n+1
};

/// Sigma-point weights: W_m[0] = lambda/(n+lambda),
/// W_c[0] = lambda/(n+lambda) + (1 - alpha^2 + beta), all others
/// 1/(2(n+lambda)). Returns (weights_mean, weights_cov).
std::pair<Vec, Vec> ut_weights(int n, const UtParams& params);

/// Lower-triangular matrix square root of a PSD matrix. Exact zero input
/// returns zero. On Cholesky failure adds jitter 1e-12*trace*I, doubling up
/// to 6 attempts, then throws NumericalError.
Mat cholesky_with_jitter(const Mat& p);

/// Sigma points about (mean, cov): column 0 = mean, columns i / n+i offset by
/// +/- sqrt(n+lambda) times column i of the covariance square root.
/// Requires n + lambda > 0 for the square-root scaling.
SigmaPointSet sigma_points(const GaussianState& state, const UtParams& params);

/// Weighted moment reconstruction (mean, covariance) from a sigma-point set.
std::pair<Vec, Mat> ut_moments(const SigmaPointSet& sp);

}  // namespace posync
