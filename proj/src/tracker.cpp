// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#include "posync/tracker.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "posync/angles.hpp"

namespace posync {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kTau = 0, kAz = 1, kColat = 2;

Layout tracker_layout() {
  return {StateTag::ClockOffset, StateTag::Angle, StateTag::Angle,
          StateTag::Linear,      StateTag::Linear, StateTag::Linear};
}

Vec stack_real(const CVec& g) {
  Vec out(2 * g.size());
  out.head(g.size()) = g.real();
  out.tail(g.size()) = g.imag();
  return out;
}

/// Conditional least-squares path weights for a candidate (theta, phi, tau).
Eigen::Vector2cd fit_path_weights(const CMat& b, const CVec& g) {
  return b.completeOrthogonalDecomposition().solve(g);
}

/// Canonicalize the tracker state after an update: reflect colatitude into
/// [0, pi] (flipping the colatitude rate and shifting azimuth by pi when a
/// reflection happens) and wrap azimuth.
void canonicalize(GaussianState& s) {
  double az = s.mean(kAz);
  double colat = wrap_angle(s.mean(kColat));
  if (colat < 0.0) {
    colat = -colat;
    az += kPi;
    s.mean(kColat + 3) = -s.mean(kColat + 3);
    // Jacobian of the reflection is diag(1,1,-1,1,1,-1).
    Vec flip = Vec::Ones(6);
    flip(kColat) = -1.0;
    flip(kColat + 3) = -1.0;
    s.cov = flip.asDiagonal() * s.cov * flip.asDiagonal();
  }
  s.mean(kAz) = wrap_angle(az);
  s.mean(kColat) = colat;
}

}  // namespace

LinearTransition tracker_transition(double dt, double sigma_tau_rate, double sigma_azimuth_rate,
                                    double sigma_colat_rate) {
  if (!(dt >= 0.0)) throw std::invalid_argument("tracker_transition: dt must be >= 0");
  const Eigen::Matrix3d i3 = Eigen::Matrix3d::Identity();
  Eigen::Vector3d d2(sigma_tau_rate * sigma_tau_rate, sigma_azimuth_rate * sigma_azimuth_rate,
                     sigma_colat_rate * sigma_colat_rate);
  const Eigen::Matrix3d d = d2.asDiagonal();

  LinearTransition model;
  model.F = Mat::Identity(6, 6);
  model.F.topRightCorner(3, 3) = dt * i3;
  model.Q = Mat::Zero(6, 6);
  model.Q.topLeftCorner(3, 3) = dt * dt * dt / 3.0 * d;
  model.Q.topRightCorner(3, 3) = dt * dt / 2.0 * d;
  model.Q.bottomLeftCorner(3, 3) = dt * dt / 2.0 * d;
  model.Q.bottomRightCorner(3, 3) = dt * d;
  return model;
}

TrackerInit init_tracker(const ChannelSnapshot& snapshot, const Eadf& eadf,
                         const TrackerConfig& cfg) {
  if (cfg.init_tau_grid < 1 || cfg.init_azimuth_grid < 1 || cfg.init_colat_grid < 1) {
    throw std::invalid_argument("init_tracker: empty grid");
  }
  const double g_norm2 = snapshot.g.squaredNorm();
  if (!(g_norm2 > 0.0)) throw std::invalid_argument("init_tracker: all-zero snapshot");
  if (snapshot.g.size() != eadf.channel_dim()) {
    throw std::invalid_argument("init_tracker: snapshot length does not match the EADF");
  }

  const int n_elem = eadf.element_count();
  const int mf = eadf.subcarrier_count;
  const double period = 1.0 / eadf.subcarrier_spacing_hz;

  const double cell_tau = period / cfg.init_tau_grid;
  const double cell_az = 2.0 * kPi / cfg.init_azimuth_grid;
  const double cell_colat = kPi / cfg.init_colat_grid;

  // Angle responses are tau-independent: precompute b_h, b_v per angle node.
  struct AngleNode {
    double az, colat;
    CVec bh, bv;
    Eigen::Matrix2cd gram;  // [bh bv]^H [bh bv] * mf
  };
  std::vector<AngleNode> nodes;
  nodes.reserve(static_cast<std::size_t>(cfg.init_azimuth_grid) * cfg.init_colat_grid);
  for (int ia = 0; ia < cfg.init_azimuth_grid; ++ia) {
    const double az = -kPi + (ia + 0.5) * cell_az;
    for (int ic = 0; ic < cfg.init_colat_grid; ++ic) {
      const double colat = (ic + 0.5) * cell_colat;
      AngleNode node;
      node.az = az;
      node.colat = colat;
      const CVec d_ang = angle_steering(az, colat, eadf.modes_azimuth, eadf.modes_elevation);
      node.bh = eadf.gh * d_ang;
      node.bv = eadf.gv * d_ang;
      const double mf_d = static_cast<double>(mf);
      node.gram(0, 0) = node.bh.squaredNorm() * mf_d;
      node.gram(1, 1) = node.bv.squaredNorm() * mf_d;
      node.gram(0, 1) = node.bh.dot(node.bv) * mf_d;  // bh^H bv
      node.gram(1, 0) = std::conj(node.gram(0, 1));
      nodes.push_back(std::move(node));
    }
  }

  double best_power = -1.0;
  double best_tau = 0.0, best_az = 0.0, best_colat = kPi / 2.0;
  CVec g_tau(n_elem);
  for (int it = 0; it < cfg.init_tau_grid; ++it) {
    const double tau = (it + 0.5) * cell_tau;
    const CVec d_f = eadf.gf * delay_steering(tau, mf, eadf.subcarrier_spacing_hz);
    // Collapse the subcarrier dimension: g_tau[e] = d_f^H g[e*mf .. e*mf+mf).
    for (int e = 0; e < n_elem; ++e) {
      g_tau(e) = d_f.dot(snapshot.g.segment(e * mf, mf));
    }
    for (const auto& node : nodes) {
      Eigen::Vector2cd z(node.bh.dot(g_tau), node.bv.dot(g_tau));
      // ||B gamma_hat||^2 = z^H G^-1 z; tiny ridge keeps rank-1 grams usable.
      Eigen::Matrix2cd gram = node.gram;
      const double ridge = 1e-12 * std::abs(gram.trace());
      gram(0, 0) += ridge;
      gram(1, 1) += ridge;
      const Eigen::Vector2cd w = gram.ldlt().solve(z);
      const double power = z.dot(w).real();
      if (power > best_power) {
        best_power = power;
        best_tau = tau;
        best_az = node.az;
        best_colat = node.colat;
      }
    }
  }

  TrackerInit init;
  init.matched_power_ratio = best_power / g_norm2;
  init.low_power = init.matched_power_ratio < cfg.matched_power_threshold;
  init.grid_cell = Eigen::Vector3d(cell_tau, cell_az, cell_colat);

  Vec mean = Vec::Zero(6);
  mean(kTau) = best_tau;
  mean(kAz) = best_az;
  mean(kColat) = best_colat;
  Vec diag(6);
  diag << cell_tau * cell_tau, cell_az * cell_az, cell_colat * cell_colat,
      cfg.init_rate_std_tau * cfg.init_rate_std_tau,
      cfg.init_rate_std_angle * cfg.init_rate_std_angle,
      cfg.init_rate_std_angle * cfg.init_rate_std_angle;
  init.state = GaussianState(mean, diag.asDiagonal(), tracker_layout());
  return init;
}

DoaToaTracker::DoaToaTracker(const Eadf& eadf, TrackerConfig cfg)
    : eadf_(&eadf), cfg_(std::move(cfg)) {}

TrackerInit DoaToaTracker::initialize(const ChannelSnapshot& snapshot) {
  TrackerInit init = init_tracker(snapshot, *eadf_, cfg_);
  state_ = init.state;
  initialized_ = true;
  needs_reinit_ = false;
  high_nees_streak_ = 0;
  return init;
}

TrackerEstimate DoaToaTracker::step(const ChannelSnapshot& snapshot, double dt) {
  if (!initialized_) throw std::logic_error("DoaToaTracker::step before initialize");
  if (snapshot.g.size() != eadf_->channel_dim()) {
    throw std::invalid_argument("DoaToaTracker::step: snapshot length mismatch");
  }

  state_ = predict_linear(state_, tracker_transition(dt, cfg_.sigma_tau_rate,
                                                     cfg_.sigma_azimuth_rate,
                                                     cfg_.sigma_colat_rate));

  const Vec y = stack_real(snapshot.g);
  const Eigen::Index m = y.size();
  const Mat r = (snapshot.noise_var / 2.0) * Mat::Identity(m, m);
  const CVec& g = snapshot.g;
  const Eadf& eadf = *eadf_;

  const MeasurementFn h = [&eadf, &g](const Vec& s) {
    const CMat b = polarimetric_response(eadf, s(kColat), s(kAz), s(kTau));
    return stack_real(b * fit_path_weights(b, g));
  };
  const SigmaMapFn feasible = [](Vec& s) { reflect_direction(s(kAz), s(kColat)); };
  const Layout residuals;  // all linear: stacked real/imag channel samples

  UpdateStats stats;
  const UtParams ut = cfg_.ut_params();
  for (int iter = 0; iter < cfg_.gn_iters; ++iter) {
    state_ = ukf_update(state_, y, h, r, ut, residuals, feasible, &stats);
    canonicalize(state_);
  }

  if (stats.innovation_nees > cfg_.divergence_nees_threshold) {
    if (++high_nees_streak_ >= cfg_.divergence_epochs) needs_reinit_ = true;
  } else {
    high_nees_streak_ = 0;
    needs_reinit_ = false;
  }

  TrackerEstimate est;
  est.azimuth = state_.mean(kAz);
  est.colatitude = state_.mean(kColat);
  est.toa = state_.mean(kTau);
  est.innovation_nees = stats.innovation_nees;
  const std::array<int, 3> order = {kColat, kAz, kTau};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) est.cov(i, j) = state_.cov(order[i], order[j]);
  }
  return est;
}

}  // namespace posync
