// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#include "posync/angles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace posync {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

double wrap_angle(double x) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument("wrap_angle: non-finite input");
  }
  double w = std::fmod(x + kPi, kTwoPi);
  if (w <= 0.0) w += kTwoPi;
  return w - kPi;
}

double elevation_from_colatitude(double colatitude) { return kPi / 2.0 - colatitude; }

double colatitude_from_elevation(double elevation) { return kPi / 2.0 - elevation; }

void reflect_direction(double& azimuth, double& colatitude) {
  double c = wrap_angle(colatitude);  // (-pi, pi]
  if (c < 0.0) {
    c = -c;
    azimuth += kPi;
  }
  colatitude = c;
  azimuth = wrap_angle(azimuth);
}

}  // namespace posync
