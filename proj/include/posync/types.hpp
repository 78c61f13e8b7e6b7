// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace posync {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised when a linear-algebra step fails beyond repair: Cholesky after the
/// maximum jitter, an innovation covariance that is singular beyond tolerance,
/// or degenerate measurement geometry.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Geometry too degenerate to evaluate a measurement model (e.g. user node
/// coincident with an access node).
class SingularGeometryError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Per-index semantics of a state or residual vector.
enum class StateTag {
  Linear,
  Angle,        ///< radians, wrapped to (-pi, pi]
  ClockOffset,  ///< seconds
  ClockSkew,    ///< dimensionless (s/s)
  Position,     ///< meters
  Velocity,     ///< meters/second
};

using Layout = std::vector<StateTag>;

Layout uniform_layout(std::size_t n, StateTag tag = StateTag::Linear);

/// (P + P^T)/2
Mat symmetrize(const Mat& p);

/// Gaussian estimate: mean, covariance and a per-index layout describing which
/// entries are angles, clock terms, positions, and so on.
struct GaussianState {
  Vec mean;
  Mat cov;
  Layout layout;

  GaussianState() = default;
  GaussianState(Vec m, Mat c, Layout l);

  int dim() const { return static_cast<int>(mean.size()); }

  /// Contract check: square covariance, layout length n, symmetry within
  /// 1e-12 of the trace magnitude, minimum eigenvalue >= -1e-10 * trace.
  /// Throws std::invalid_argument on violation.
  void validate() const;
};

}  // namespace posync
