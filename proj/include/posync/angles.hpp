// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#pragma once

namespace posync {

/// Wrap an angle into (-pi, pi]. Rejects non-finite input.
double wrap_angle(double x);

/// Elevation above the horizon from polar colatitude (and back). The antenna
/// response and the per-AN tracker work in colatitude theta in [0, pi]
/// measured from the array z-axis; the position/clock fusion stage and the
/// ground-truth observables use elevation atan2(dz, r2d).
double elevation_from_colatitude(double colatitude);
double colatitude_from_elevation(double elevation);

/// Canonicalize a direction on the sphere: colatitude into [0, pi] by
/// reflection (colat < 0 becomes -colat with azimuth shifted by pi, which is
/// the same physical direction), azimuth into (-pi, pi].
void reflect_direction(double& azimuth, double& colatitude);

}  // namespace posync
