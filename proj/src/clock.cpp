// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#include "posync/clock.hpp"

#include <cmath>
#include <stdexcept>

namespace posync {

ClockState step_clock(const ClockState& c, double dt, const ClockTruthParams& p,
                      std::mt19937_64& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_clock: dt must be positive");
  if (!std::isfinite(c.offset) || !std::isfinite(c.skew)) {
    throw std::invalid_argument("step_clock: non-finite clock state");
  }
  if (!(p.sigma_eta >= 0.0)) throw std::invalid_argument("step_clock: sigma_eta must be >= 0");

  std::normal_distribution<double> n01(0.0, 1.0);
  const double eta = p.sigma_eta * n01(rng);

  ClockState out;
  out.skew = p.beta * c.skew + eta;
  out.offset = c.offset + out.skew * dt;
  return out;
}

ClockState sample_initial_clock(const ClockTruthParams& p, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  ClockState out;
  out.offset = p.init_offset_std * n01(rng);
  out.skew = p.init_skew_mean + p.init_skew_std * n01(rng);
  return out;
}

std::pair<Eigen::Matrix2d, Mat> clock_process_blocks(double dt, double sigma_eta,
                                                     double sigma_rho, int slot_count) {
  if (!(sigma_eta >= 0.0) || !(sigma_rho >= 0.0)) {
    throw std::invalid_argument("clock_process_blocks: standard deviations must be >= 0");
  }
  if (slot_count < 0) throw std::invalid_argument("clock_process_blocks: negative slot count");

  const double s2 = sigma_eta * sigma_eta;
  Eigen::Matrix2d q;
  q << s2 * dt * dt * dt / 3.0, s2 * dt * dt / 2.0,  //
      s2 * dt * dt / 2.0, s2 * dt;
  Mat q_rho = sigma_rho * sigma_rho * Mat::Identity(slot_count, slot_count);
  return {q, q_rho};
}

}  // namespace posync
