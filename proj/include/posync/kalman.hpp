// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#pragma once

#include <functional>

#include "posync/types.hpp"
#include "posync/ut.hpp"

namespace posync {

/// Linear state model s[k] = F s[k-1] + u, u ~ N(0, Q).
struct LinearTransition {
  Mat F;
  Mat Q;
};

/// Linear prediction: mean <- F mean, cov <- F cov F^T + Q (re-symmetrized).
GaussianState predict_linear(const GaussianState& state, const LinearTransition& model);

using MeasurementFn = std::function<Vec(const Vec&)>;
using JacobianFn = std::function<Mat(const Vec&)>;
/// Optional canonicalization applied to the copy of each sigma point handed
/// to the measurement function (e.g. wrap azimuth, reflect colatitude). The
/// cross-covariance keeps the raw sigma offsets: for periodic measurement
/// maps the mapped and raw points are the same physical state, and raw
/// offsets avoid +/-2pi jumps near the wrap seam.
using SigmaMapFn = std::function<void(Vec&)>;

/// Diagnostics from a measurement update.
struct UpdateStats {
  double innovation_nees = 0.0;   ///< nu^T S^-1 nu / m
  double condition_estimate = 0.0;  ///< max|d|/min|d| from the LDLT of S
};

/// Unscented measurement update. Sigma points from the prior are propagated
/// through h; angle-tagged residual rows are unwrapped about the central
/// point before the measurement moments and the innovation is wrapped to
/// (-pi, pi]. Posterior: m = m- + K wrap(y - mu), P = P- - K S K^T.
/// Throws NumericalError when S is singular beyond tolerance.
GaussianState ukf_update(const GaussianState& prior, const Vec& y, const MeasurementFn& h,
                         const Mat& r, const UtParams& params, const Layout& residual_layout,
                         const SigmaMapFn& feasible_map = nullptr,
                         UpdateStats* stats = nullptr);

/// First-order (extended) measurement update with the same angular residual
/// wrapping as ukf_update.
GaussianState ekf_update(const GaussianState& prior, const Vec& y, const MeasurementFn& h,
                         const JacobianFn& jacobian, const Mat& r,
                         const Layout& residual_layout, UpdateStats* stats = nullptr);

}  // namespace posync
