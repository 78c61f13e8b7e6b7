// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#include "posync/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "posync/angles.hpp"
#include "posync/clock.hpp"

namespace posync {

namespace {

constexpr int kBaseDim = 8;  // [p(3), v(3), rho_un, alpha]

Layout fusion_layout(int slot_count) {
  Layout layout;
  layout.insert(layout.end(), 3, StateTag::Position);
  layout.insert(layout.end(), 3, StateTag::Velocity);
  layout.push_back(StateTag::ClockOffset);
  layout.push_back(StateTag::ClockSkew);
  layout.insert(layout.end(), static_cast<std::size_t>(slot_count), StateTag::ClockOffset);
  return layout;
}

Layout per_an_residual_layout(MeasurementSet meas) {
  if (meas == MeasurementSet::DoaOnly) return {StateTag::Angle, StateTag::Angle};
  return {StateTag::Angle, StateTag::Angle, StateTag::Linear};
}

}  // namespace

std::string FusionMode::str() const {
  std::string s = (sync == SyncMode::PosClock) ? "posclock" : "possync";
  s += (kind == FilterKind::Ukf) ? "_ukf" : "_ekf";
  if (meas == MeasurementSet::DoaOnly) s += "_doaonly";
  return s;
}

FusionMode FusionMode::parse(const std::string& name) {
  FusionMode mode;
  std::string rest = name;
  auto take = [&rest](const std::string& prefix) {
    if (rest.rfind(prefix, 0) == 0) {
      rest = rest.substr(prefix.size());
      return true;
    }
    return false;
  };
  if (take("posclock")) {
    mode.sync = SyncMode::PosClock;
  } else if (take("possync")) {
    mode.sync = SyncMode::PosSync;
  } else {
    throw std::invalid_argument("unknown fusion mode '" + name + "'");
  }
  if (take("_ukf")) {
    mode.kind = FilterKind::Ukf;
  } else if (take("_ekf")) {
    mode.kind = FilterKind::Ekf;
  } else {
    throw std::invalid_argument("unknown fusion mode '" + name + "'");
  }
  if (rest == "_doaonly") {
    mode.meas = MeasurementSet::DoaOnly;
  } else if (!rest.empty()) {
    throw std::invalid_argument("unknown fusion mode '" + name + "'");
  }
  return mode;
}

Eigen::Vector3d observation_geometry(const Eigen::Vector3d& un_position,
                                     const Eigen::Vector3d& an_position, double rho_an,
                                     double rho_un) {
  const Eigen::Vector3d d = un_position - an_position;
  const double r3d = d.norm();
  if (!(r3d > kSingularPositionEps)) {
    throw SingularGeometryError("observation geometry singular: UN within " +
                                std::to_string(kSingularPositionEps) + " m of the AN");
  }
  const double r2d = std::hypot(d.x(), d.y());
  const double elevation = std::atan2(d.z(), r2d);
  const double azimuth = std::atan2(d.y(), d.x());
  const double toa = r3d / kSpeedOfLight + (rho_an - rho_un);
  return {elevation, azimuth, toa};
}

LinearTransition fusion_transition(SyncMode sync, double dt, double sigma_v, double sigma_eta,
                                   double sigma_rho, int slot_count) {
  if (!(dt > 0.0)) throw std::invalid_argument("fusion_transition: dt must be positive");
  if (sync == SyncMode::PosClock && slot_count != 0) {
    throw std::invalid_argument("fusion_transition: PosClock carries no AN offset slots");
  }
  const int n = kBaseDim + slot_count;

  LinearTransition model;
  model.F = Mat::Identity(n, n);
  model.F.block(0, 3, 3, 3) = dt * Eigen::Matrix3d::Identity();
  model.F(6, 7) = dt;  // rho_un += dt * alpha

  const auto [q_clock, q_rho] = clock_process_blocks(dt, sigma_eta, sigma_rho, slot_count);
  const double sv2 = sigma_v * sigma_v;
  const Eigen::Matrix3d i3 = Eigen::Matrix3d::Identity();
  model.Q = Mat::Zero(n, n);
  model.Q.block(0, 0, 3, 3) = sv2 * dt * dt * dt / 3.0 * i3;
  model.Q.block(0, 3, 3, 3) = sv2 * dt * dt / 2.0 * i3;
  model.Q.block(3, 0, 3, 3) = sv2 * dt * dt / 2.0 * i3;
  model.Q.block(3, 3, 3, 3) = sv2 * dt * i3;
  model.Q.block(6, 6, 2, 2) = q_clock;
  if (slot_count > 0) model.Q.block(8, 8, slot_count, slot_count) = q_rho;
  return model;
}

Eigen::Vector3d predict_measurement(const Vec& state, const Eigen::Vector3d& an_position,
                                    int an_slot) {
  const double rho_an = (an_slot >= 0) ? state(kBaseDim + an_slot) : 0.0;
  return observation_geometry(state.head<3>(), an_position, rho_an, state(6));
}

Mat measurement_jacobian(const Vec& state, int n, const Eigen::Vector3d& an_position,
                         int an_slot) {
  const Eigen::Vector3d d = state.head<3>() - an_position;
  const double r3d = d.norm();
  const double r2d = std::hypot(d.x(), d.y());
  if (!(r3d > kSingularPositionEps) || !(r2d > kSingularPositionEps)) {
    throw SingularGeometryError("measurement_jacobian: degenerate geometry (r3d=" +
                                std::to_string(r3d) + ", r2d=" + std::to_string(r2d) + ")");
  }
  const double r3d2 = r3d * r3d;
  const double r2d2 = r2d * r2d;

  Mat h = Mat::Zero(3, n);
  // elevation = atan2(dz, r2d)
  h(0, 0) = -d.x() * d.z() / (r2d * r3d2);
  h(0, 1) = -d.y() * d.z() / (r2d * r3d2);
  h(0, 2) = r2d / r3d2;
  // azimuth = atan2(dy, dx)
  h(1, 0) = -d.y() / r2d2;
  h(1, 1) = d.x() / r2d2;
  // toa = r3d / c + (rho_an - rho_un)
  h.block(2, 0, 1, 3) = d.transpose() / (kSpeedOfLight * r3d);
  h(2, 6) = -1.0;
  if (an_slot >= 0) h(2, kBaseDim + an_slot) = 1.0;
  return h;
}

std::pair<Eigen::Vector3d, double> init_position_cl(
    const std::vector<Eigen::Vector3d>& los_an_positions, double floor_std) {
  if (los_an_positions.empty()) {
    throw std::invalid_argument("init_position_cl: empty LoS-AN list");
  }
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : los_an_positions) centroid += p;
  centroid /= static_cast<double>(los_an_positions.size());

  double var = floor_std * floor_std;
  for (const auto& p : los_an_positions) {
    var = std::max(var, (centroid - p).squaredNorm());
  }
  return {centroid, var};
}

std::pair<GaussianState, std::vector<int>> manage_an_set(const GaussianState& state,
                                                         const std::vector<int>& slots,
                                                         const std::vector<int>& new_los_ids,
                                                         int reference_an,
                                                         double offset_prior_std) {
  if (state.dim() != kBaseDim + static_cast<int>(slots.size())) {
    throw std::invalid_argument("manage_an_set: state dimension does not match slot list");
  }
  const std::set<int> wanted(new_los_ids.begin(), new_los_ids.end());
  if (wanted.count(reference_an)) {
    throw std::invalid_argument("manage_an_set: the reference AN never carries a slot");
  }

  // Keep surviving indices (base block plus retained slots), in state order.
  std::vector<int> keep(kBaseDim);
  for (int i = 0; i < kBaseDim; ++i) keep[i] = i;
  std::vector<int> new_slots;
  for (std::size_t s = 0; s < slots.size(); ++s) {
    if (wanted.count(slots[s])) {
      keep.push_back(kBaseDim + static_cast<int>(s));
      new_slots.push_back(slots[s]);
    }
  }

  std::vector<int> arriving;
  for (int id : new_los_ids) {
    if (std::find(slots.begin(), slots.end(), id) == slots.end()) arriving.push_back(id);
  }

  const int kept = static_cast<int>(keep.size());
  const int n_new = kept + static_cast<int>(arriving.size());
  Vec mean = Vec::Zero(n_new);
  Mat cov = Mat::Zero(n_new, n_new);
  for (int i = 0; i < kept; ++i) {
    mean(i) = state.mean(keep[i]);
    for (int j = 0; j < kept; ++j) cov(i, j) = state.cov(keep[i], keep[j]);
  }
  for (std::size_t a = 0; a < arriving.size(); ++a) {
    const int idx = kept + static_cast<int>(a);
    cov(idx, idx) = offset_prior_std * offset_prior_std;
    new_slots.push_back(arriving[a]);
  }
  return {GaussianState(std::move(mean), std::move(cov),
                        fusion_layout(static_cast<int>(new_slots.size()))),
          new_slots};
}

FusionFilter::FusionFilter(FusionMode mode, FusionConfig cfg, int reference_an,
                           const std::vector<int>& los_ids,
                           const std::vector<Eigen::Vector3d>& los_positions)
    : mode_(mode), cfg_(cfg), reference_an_(reference_an) {
  if (los_ids.size() != los_positions.size() || los_ids.empty()) {
    throw std::invalid_argument("FusionFilter: LoS ids/positions mismatch or empty");
  }
  const auto [p0, pos_var] = init_position_cl(los_positions, cfg_.init_pos_floor_std);

  if (mode_.sync == SyncMode::PosSync) {
    for (int id : los_ids) {
      if (id != reference_an_) slots_.push_back(id);
    }
  }
  const int n = kBaseDim + static_cast<int>(slots_.size());

  Vec mean = Vec::Zero(n);
  mean.head<3>() = p0;
  mean(7) = cfg_.init_skew_mean;

  Vec diag(n);
  diag.head<3>().setConstant(pos_var);
  diag.segment<3>(3).setConstant(cfg_.init_vel_std * cfg_.init_vel_std);
  diag(6) = cfg_.init_offset_std * cfg_.init_offset_std;
  diag(7) = cfg_.init_skew_std * cfg_.init_skew_std;
  for (int s = 0; s < static_cast<int>(slots_.size()); ++s) {
    diag(kBaseDim + s) = cfg_.init_offset_std * cfg_.init_offset_std;
  }
  state_ = GaussianState(std::move(mean), diag.asDiagonal(),
                         fusion_layout(static_cast<int>(slots_.size())));
}

int FusionFilter::slot_of(int an_id) const {
  const auto it = std::find(slots_.begin(), slots_.end(), an_id);
  return it == slots_.end() ? -1 : static_cast<int>(it - slots_.begin());
}

std::optional<double> FusionFilter::an_offset(int an_id) const {
  const int slot = slot_of(an_id);
  if (slot < 0) return std::nullopt;
  return state_.mean(kBaseDim + slot);
}

void FusionFilter::sync_an_slots(const std::vector<int>& los_ids) {
  if (mode_.sync != SyncMode::PosSync) return;
  std::vector<int> wanted;
  for (int id : los_ids) {
    if (id != reference_an_) wanted.push_back(id);
  }
  if (wanted == slots_) return;
  std::tie(state_, slots_) =
      manage_an_set(state_, slots_, wanted, reference_an_, cfg_.init_offset_std);
}

void FusionFilter::fuse_epoch(const std::vector<EpochMeasurement>& measurements,
                              const std::function<Eigen::Vector3d(int)>& an_position,
                              double dt) {
  for (const auto& meas : measurements) {
    if (meas.timestamp < last_timestamp_) {
      throw std::invalid_argument("fuse_epoch: out-of-order epoch (timestamp " +
                                  std::to_string(meas.timestamp) + " precedes " +
                                  std::to_string(last_timestamp_) + ")");
    }
  }
  if (!measurements.empty()) last_timestamp_ = measurements.front().timestamp;

  state_ = predict_linear(
      state_, fusion_transition(mode_.sync, dt, cfg_.sigma_v, cfg_.sigma_eta, cfg_.sigma_rho,
                                static_cast<int>(slots_.size())));
  if (measurements.empty()) return;

  struct Entry {
    Eigen::Vector3d an_pos;
    int slot;
  };
  std::vector<Entry> entries;
  entries.reserve(measurements.size());
  for (const auto& meas : measurements) {
    int slot = -1;
    if (mode_.sync == SyncMode::PosSync && meas.an_id != reference_an_) {
      slot = slot_of(meas.an_id);
      if (slot < 0) {
        throw std::invalid_argument("fuse_epoch: AN " + std::to_string(meas.an_id) +
                                    " has no state slot; call sync_an_slots first");
      }
    }
    entries.push_back({an_position(meas.an_id), slot});
  }

  const int rows_per_an = (mode_.meas == MeasurementSet::DoaOnly) ? 2 : 3;
  const Eigen::Index m = static_cast<Eigen::Index>(rows_per_an * measurements.size());
  Vec y(m);
  Mat r = Mat::Zero(m, m);
  Layout residual_layout;
  residual_layout.reserve(static_cast<std::size_t>(m));
  const Layout per_an = per_an_residual_layout(mode_.meas);
  for (std::size_t i = 0; i < measurements.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(rows_per_an * i);
    y.segment(row, rows_per_an) = measurements[i].y.head(rows_per_an);
    r.block(row, row, rows_per_an, rows_per_an) =
        measurements[i].r.topLeftCorner(rows_per_an, rows_per_an);
    residual_layout.insert(residual_layout.end(), per_an.begin(), per_an.end());
  }

  const int n = state_.dim();
  const MeasurementFn h = [&entries, rows_per_an, m](const Vec& s) {
    Vec out(m);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const Eigen::Vector3d predicted = predict_measurement(s, entries[i].an_pos, entries[i].slot);
      out.segment(static_cast<Eigen::Index>(rows_per_an * i), rows_per_an) =
          predicted.head(rows_per_an);
    }
    return out;
  };

  if (mode_.kind == FilterKind::Ukf) {
    state_ = ukf_update(state_, y, h, r, cfg_.ut, residual_layout);
  } else {
    const JacobianFn jac = [&entries, rows_per_an, m, n](const Vec& s) {
      Mat out(m, n);
      for (std::size_t i = 0; i < entries.size(); ++i) {
        out.middleRows(static_cast<Eigen::Index>(rows_per_an * i), rows_per_an) =
            measurement_jacobian(s, n, entries[i].an_pos, entries[i].slot).topRows(rows_per_an);
      }
      return out;
    };
    state_ = ekf_update(state_, y, h, jac, r, residual_layout);
  }
}

}  // namespace posync
