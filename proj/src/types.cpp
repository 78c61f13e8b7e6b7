// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#include "posync/types.hpp"

#include <cmath>

namespace posync {

Layout uniform_layout(std::size_t n, StateTag tag) { return Layout(n, tag); }

Mat symmetrize(const Mat& p) { return 0.5 * (p + p.transpose()); }

GaussianState::GaussianState(Vec m, Mat c, Layout l)
    : mean(std::move(m)), cov(std::move(c)), layout(std::move(l)) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
    throw std::invalid_argument("GaussianState: covariance shape " +
                                std::to_string(cov.rows()) + "x" +
                                std::to_string(cov.cols()) +
                                " does not match mean length " +
                                std::to_string(mean.size()));
  }
  if (!layout.empty() && layout.size() != static_cast<std::size_t>(mean.size())) {
    throw std::invalid_argument("GaussianState: layout length does not match state dimension");
  }
  if (layout.empty()) layout = uniform_layout(mean.size());
}

void GaussianState::validate() const {
  const int n = dim();
  if (cov.rows() != n || cov.cols() != n) {
    throw std::invalid_argument("GaussianState: covariance is not n x n");
  }
  if (layout.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("GaussianState: layout length != n");
  }
  if (!mean.allFinite() || !cov.allFinite()) {
    throw std::invalid_argument("GaussianState: non-finite entries");
  }
  const double tr = std::abs(cov.trace());
  const double scale = std::max(tr, 1e-300);
  const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw std::invalid_argument("GaussianState: covariance asymmetry " +
                                std::to_string(asym) + " exceeds 1e-12 of trace");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(cov), Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-10 * scale) {
    throw std::invalid_argument("GaussianState: covariance indefinite (min eigenvalue " +
                                std::to_string(min_eig) + ")");
  }
}

}  // namespace posync
