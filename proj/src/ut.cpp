// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#include "posync/ut.hpp"

#include <cmath>
#include <string>

namespace posync {

namespace {

// n + lambda == alpha^2 (n + kappa); the direct form avoids the catastrophic
// cancellation of adding n back onto lambda when alpha is small.
double n_plus_lambda(int n, const UtParams& p) { return p.alpha * p.alpha * (n + p.kappa); }

}  // namespace

void UtParams::validate(int n) const {
  if (n < 1) {
    throw std::invalid_argument("UtParams: state dimension must be >= 1");
  }
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("UtParams: alpha must be positive");
  }
  if (n_plus_lambda(n, *this) == 0.0) {
    throw std::invalid_argument("UtParams: n + lambda == 0 (weights undefined)");
  }
}

std::pair<Vec, Vec> ut_weights(int n, const UtParams& params) {
  params.validate(n);
  const double denom = n_plus_lambda(n, params);
  const double lam = denom - n;
  Vec wm(2 * n + 1), wc(2 * n + 1);
  wm(0) = lam / denom;
  wc(0) = lam / denom + (1.0 - params.alpha * params.alpha + params.beta);
  const double wi = 1.0 / (2.0 * denom);
  for (int i = 1; i <= 2 * n; ++i) {
    wm(i) = wi;
    wc(i) = wi;
  }
  return {wm, wc};
}

Mat cholesky_with_jitter(const Mat& p) {
  const auto n = p.rows();
  if (p.isZero(0.0)) return Mat::Zero(n, n);

  Eigen::LLT<Mat> llt(p);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  const double tr = std::abs(p.trace());
  double jitter = 1e-12 * (tr > 0.0 ? tr : 1.0);
  for (int attempt = 0; attempt < 6; ++attempt) {
    Eigen::LLT<Mat> retry(p + jitter * Mat::Identity(n, n));
    if (retry.info() == Eigen::Success) return retry.matrixL();
    jitter *= 2.0;
  }
  throw NumericalError("cholesky_with_jitter: factorization failed after max jitter (trace=" +
                       std::to_string(tr) + ")");
}

SigmaPointSet sigma_points(const GaussianState& state, const UtParams& params) {
  const int n = state.dim();
  params.validate(n);
  const double denom = n_plus_lambda(n, params);
  if (!(denom > 0.0)) {
    throw std::invalid_argument("sigma_points: n + lambda must be positive for sqrt scaling");
  }
  if (state.cov.rows() != n || state.cov.cols() != n) {
    throw std::invalid_argument("sigma_points: covariance shape mismatch");
  }

  const Mat root = cholesky_with_jitter(symmetrize(state.cov));
  const double scale = std::sqrt(denom);

  SigmaPointSet sp;
  sp.points.resize(n, 2 * n + 1);
  sp.points.col(0) = state.mean;
  for (int i = 0; i < n; ++i) {
    const Vec offset = scale * root.col(i);
    sp.points.col(1 + i) = state.mean + offset;
    sp.points.col(1 + n + i) = state.mean - offset;
  }
  std::tie(sp.weights_mean, sp.weights_cov) = ut_weights(n, params);
  return sp;
}

std::pair<Vec, Mat> ut_moments(const SigmaPointSet& sp) {
  const auto n = sp.points.rows();
  const auto count = sp.points.cols();
  Vec mean = Vec::Zero(n);
  for (Eigen::Index i = 0; i < count; ++i) mean += sp.weights_mean(i) * sp.points.col(i);
  Mat cov = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < count; ++i) {
    const Vec d = sp.points.col(i) - mean;
    cov += sp.weights_cov(i) * d * d.transpose();
  }
  return {mean, symmetrize(cov)};
}

}  // namespace posync
