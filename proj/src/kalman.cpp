// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#include "posync/kalman.hpp"

#include <cmath>
#include <string>

#include "posync/angles.hpp"

namespace posync {

namespace {

void check_residual_layout(const Layout& layout, Eigen::Index m) {
  if (!layout.empty() && layout.size() != static_cast<std::size_t>(m)) {
    throw std::invalid_argument("residual layout length does not match measurement dimension");
  }
}

bool is_angle_row(const Layout& layout, Eigen::Index row) {
  return !layout.empty() && layout[static_cast<std::size_t>(row)] == StateTag::Angle;
}

void wrap_angle_rows(Vec& v, const Layout& layout) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (is_angle_row(layout, i)) v(i) = wrap_angle(v(i));
  }
}

/// LDLT of the innovation covariance with a singularity check. The condition
/// estimate is the |d| ratio of the pivoted diagonal.
Eigen::LDLT<Mat> factor_innovation(const Mat& s, double* condition_out) {
  Eigen::LDLT<Mat> ldlt(s);
  const Vec d = ldlt.vectorD().cwiseAbs();
  const double dmax = d.maxCoeff();
  const double dmin = d.minCoeff();
  const double cond = (dmin > 0.0) ? dmax / dmin : std::numeric_limits<double>::infinity();
  if (condition_out) *condition_out = cond;
  if (!(dmin > 0.0) || cond > 1e14) {
    throw NumericalError("innovation covariance singular beyond tolerance (condition estimate " +
                         std::to_string(cond) + ")");
  }
  return ldlt;
}

}  // namespace

GaussianState predict_linear(const GaussianState& state, const LinearTransition& model) {
  const int n = state.dim();
  if (model.F.rows() != n || model.F.cols() != n) {
    throw std::invalid_argument("predict_linear: F is " + std::to_string(model.F.rows()) + "x" +
                                std::to_string(model.F.cols()) + " for state dimension " +
                                std::to_string(n));
  }
  if (model.Q.rows() != n || model.Q.cols() != n) {
    throw std::invalid_argument("predict_linear: Q shape does not match state dimension");
  }
  GaussianState out = state;
  out.mean = model.F * state.mean;
  out.cov = symmetrize(model.F * state.cov * model.F.transpose() + model.Q);
  return out;
}

GaussianState ukf_update(const GaussianState& prior, const Vec& y, const MeasurementFn& h,
                         const Mat& r, const UtParams& params, const Layout& residual_layout,
                         const SigmaMapFn& feasible_map, UpdateStats* stats) {
  const int n = prior.dim();
  const Eigen::Index m = y.size();
  if (r.rows() != m || r.cols() != m) {
    throw std::invalid_argument("ukf_update: R shape does not match measurement dimension");
  }
  check_residual_layout(residual_layout, m);

  const SigmaPointSet sp = sigma_points(prior, params);
  const Eigen::Index count = sp.points.cols();

  Mat propagated(m, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    Vec point = sp.points.col(i);
    if (feasible_map) feasible_map(point);
    const Vec yi = h(point);
    if (yi.size() != m) {
      throw std::invalid_argument("ukf_update: measurement function output length mismatch");
    }
    propagated.col(i) = yi;
  }

  // Unwrap angle rows about the central point so that sigma predictions that
  // straddle +/-pi average correctly.
  for (Eigen::Index row = 0; row < m; ++row) {
    if (!is_angle_row(residual_layout, row)) continue;
    const double ref = propagated(row, 0);
    for (Eigen::Index i = 1; i < count; ++i) {
      propagated(row, i) = ref + wrap_angle(propagated(row, i) - ref);
    }
  }

  Vec mu = Vec::Zero(m);
  for (Eigen::Index i = 0; i < count; ++i) mu += sp.weights_mean(i) * propagated.col(i);

  Mat s = r;
  Mat c = Mat::Zero(n, m);
  for (Eigen::Index i = 0; i < count; ++i) {
    const Vec dy = propagated.col(i) - mu;
    const Vec dx = sp.points.col(i) - prior.mean;
    s += sp.weights_cov(i) * dy * dy.transpose();
    c += sp.weights_cov(i) * dx * dy.transpose();
  }
  s = symmetrize(s);

  double cond = 0.0;
  const auto ldlt = factor_innovation(s, &cond);
  const Mat gain = ldlt.solve(c.transpose()).transpose();  // K = C S^-1

  Vec innovation = y - mu;
  wrap_angle_rows(innovation, residual_layout);

  if (stats) {
    stats->condition_estimate = cond;
    stats->innovation_nees = innovation.dot(ldlt.solve(innovation)) / static_cast<double>(m);
  }

  GaussianState out = prior;
  out.mean = prior.mean + gain * innovation;
  out.cov = symmetrize(prior.cov - gain * c.transpose());  // K S K^T == K C^T
  return out;
}

GaussianState ekf_update(const GaussianState& prior, const Vec& y, const MeasurementFn& h,
                         const JacobianFn& jacobian, const Mat& r,
                         const Layout& residual_layout, UpdateStats* stats) {
  const int n = prior.dim();
  const Eigen::Index m = y.size();
  if (r.rows() != m || r.cols() != m) {
    throw std::invalid_argument("ekf_update: R shape does not match measurement dimension");
  }
  check_residual_layout(residual_layout, m);

  const Vec predicted = h(prior.mean);
  if (predicted.size() != m) {
    throw std::invalid_argument("ekf_update: measurement function output length mismatch");
  }
  const Mat hj = jacobian(prior.mean);
  if (hj.rows() != m || hj.cols() != n) {
    throw std::invalid_argument("ekf_update: jacobian shape mismatch");
  }

  const Mat hp = hj * prior.cov;  // m x n
  const Mat s = symmetrize(hp * hj.transpose() + r);

  double cond = 0.0;
  const auto ldlt = factor_innovation(s, &cond);
  const Mat gain = ldlt.solve(hp).transpose();  // K = P H^T S^-1

  Vec innovation = y - predicted;
  wrap_angle_rows(innovation, residual_layout);

  if (stats) {
    stats->condition_estimate = cond;
    stats->innovation_nees = innovation.dot(ldlt.solve(innovation)) / static_cast<double>(m);
  }

  GaussianState out = prior;
  out.mean = prior.mean + gain * innovation;
  out.cov = symmetrize(prior.cov - gain * hp);  // K S K^T == K (H P)
  return out;
}

}  // namespace posync
