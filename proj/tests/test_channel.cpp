// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "posync/angles.hpp"
#include "posync/fusion.hpp"
#include "posync/snapshot.hpp"

using namespace posync;

namespace {
constexpr double kPi = std::numbers::pi;

ArrayGeometry two_element_x_axis(double wavelength) {
  ArrayGeometry g;
  g.wavelength = wavelength;
  g.pattern = ArrayGeometry::Pattern::Isotropic;
  g.positions = {Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(wavelength / 2.0, 0, 0)};
  g.slant_azimuth = {0.0, 0.0};
  g.slant_sign = {1, 1};
  return g;
}
}  // namespace

TEST_CASE("delay steering vector") {
  SUBCASE("tau = 0 gives all ones") {
    const CVec d = delay_steering(0.0, 19, 240e3);
    for (int i = 0; i < d.size(); ++i) CHECK(std::abs(d(i) - 1.0) == 0.0);
  }
  SUBCASE("Mf=3, f0=240 kHz, tau=1us endpoints at exp(+/- j 0.48 pi)") {
    const CVec d = delay_steering(1e-6, 3, 240e3);
    const std::complex<double> expect = std::exp(std::complex<double>(0.0, 0.48 * kPi));
    CHECK(std::abs(d(2) - expect) < 1e-12);
    CHECK(std::abs(d(0) - std::conj(expect)) < 1e-12);
    CHECK(std::abs(d(1) - 1.0) < 1e-15);
  }
  SUBCASE("unit modulus entries for any input") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ut(-1e-5, 1e-5);
    for (int trial = 0; trial < 50; ++trial) {
      const CVec d = delay_steering(ut(rng), 21, 240e3);
      for (int i = 0; i < d.size(); ++i) CHECK(std::abs(d(i)) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  SUBCASE("even or non-positive counts rejected") {
    CHECK_THROWS_AS(delay_steering(0.0, 4, 240e3), std::invalid_argument);
    CHECK_THROWS_AS(delay_steering(0.0, 0, 240e3), std::invalid_argument);
  }
}

TEST_CASE("angle steering vector") {
  SUBCASE("zero angles give all ones") {
    const CVec d = angle_steering(0.0, 0.0, 5, 3);
    CHECK(d.size() == 15);
    for (int i = 0; i < d.size(); ++i) CHECK(std::abs(d(i) - 1.0) < 1e-15);
  }
  SUBCASE("Ma=3, phi=pi/2, Me=1 gives [-j, 1, j]") {
    const CVec d = angle_steering(kPi / 2.0, 0.0, 3, 1);
    CHECK(std::abs(d(0) - std::complex<double>(0, -1)) < 1e-12);
    CHECK(std::abs(d(1) - 1.0) < 1e-15);
    CHECK(std::abs(d(2) - std::complex<double>(0, 1)) < 1e-12);
  }
  SUBCASE("Kronecker length and unit modulus") {
    const CVec d = angle_steering(0.3, 1.2, 7, 5);
    CHECK(d.size() == 35);
    for (int i = 0; i < d.size(); ++i) CHECK(std::abs(d(i)) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("even mode counts rejected") {
    CHECK_THROWS_AS(angle_steering(0.0, 0.0, 4, 3), std::invalid_argument);
    CHECK_THROWS_AS(angle_steering(0.0, 0.0, 3, 2), std::invalid_argument);
  }
}

TEST_CASE("EADF synthesis") {
  const double wavelength = kSpeedOfLight / 6e9;

  SUBCASE("single isotropic element carries only the (0,0) mode") {
    const auto geom = ArrayGeometry::single_isotropic(wavelength);
    const Eadf eadf = synthesize_eadf(geom, 5, 5, 16, 16, 240e3, 3);
    const int center = 2 * 5 + 2;  // mode (0,0)
    CHECK(std::abs(eadf.gh(0, center) - 1.0) < 1e-12);
    for (int k = 0; k < eadf.gh.cols(); ++k) {
      if (k == center) continue;
      CHECK(std::abs(eadf.gh(0, k)) < 1e-12);
      CHECK(std::abs(eadf.gv(0, k)) < 1e-12);
    }
  }

  SUBCASE("DFT inversion: reconstruction at grid nodes when modes equal the grid") {
    const auto geom = ArrayGeometry::cylindrical(wavelength);
    const int modes = 9;
    const Eadf eadf = synthesize_eadf(geom, modes, modes, modes, modes, 240e3, 3);
    for (int p = 0; p < modes; ++p) {
      for (int q = 0; q < modes; ++q) {
        const double az = 2.0 * kPi * p / modes;
        const double colat = 2.0 * kPi * q / modes;
        const CVec d = angle_steering(az, colat, modes, modes);
        const CVec bh = eadf.gh * d;
        for (int e = 0; e < geom.element_count(); ++e) {
          const auto [h, v] = element_response(geom, e, az, colat);
          CHECK(std::abs(bh(e) - h) < 1e-6 * (1.0 + std::abs(h)));
        }
      }
    }
  }

  SUBCASE("two isotropic elements half a wavelength apart: pi phase difference at broadside") {
    const auto geom = two_element_x_axis(wavelength);
    const Eadf eadf = synthesize_eadf(geom, 11, 11, 32, 32, 240e3, 3);
    const CVec d = angle_steering(0.0, kPi / 2.0, 11, 11);  // direction +x
    const CVec bh = eadf.gh * d;
    const double phase_diff = std::arg(bh(1) / bh(0));
    CHECK(std::abs(std::abs(phase_diff) - kPi) < 1e-6);
    // and directly from the element model
    const auto [h0, v0] = element_response(geom, 0, 0.0, kPi / 2.0);
    const auto [h1, v1] = element_response(geom, 1, 0.0, kPi / 2.0);
    CHECK(std::abs(std::abs(std::arg(h1 / h0)) - kPi) < 1e-12);
  }

  SUBCASE("reconstruction error decreases monotonically with the mode count") {
    const auto geom = ArrayGeometry::cylindrical(wavelength);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uaz(-kPi, kPi), ucl(0.1, kPi - 0.1);
    std::vector<std::pair<double, double>> probes;
    for (int i = 0; i < 64; ++i) probes.emplace_back(uaz(rng), ucl(rng));

    double previous = std::numeric_limits<double>::infinity();
    for (int modes : {5, 9, 13}) {
      const Eadf eadf = synthesize_eadf(geom, modes, modes, 64, 64, 240e3, 3);
      double worst = 0.0;
      for (const auto& [az, colat] : probes) {
        const CVec d = angle_steering(az, colat, modes, modes);
        const CVec bh = eadf.gh * d;
        const CVec bv = eadf.gv * d;
        for (int e = 0; e < geom.element_count(); ++e) {
          const auto [h, v] = element_response(geom, e, az, colat);
          worst = std::max(worst, std::abs(bh(e) - h));
          worst = std::max(worst, std::abs(bv(e) - v));
        }
      }
      CHECK(worst < previous);
      previous = worst;
    }
    CHECK(previous < 1e-3);  // 13 modes reconstruct the smooth pattern well
  }

  SUBCASE("aliasing configuration rejected") {
    const auto geom = ArrayGeometry::cylindrical(wavelength);
    CHECK_THROWS_AS(synthesize_eadf(geom, 15, 15, 8, 32, 240e3, 3), std::invalid_argument);
  }
}

TEST_CASE("polarimetric response") {
  const double wavelength = kSpeedOfLight / 6e9;
  const auto geom = ArrayGeometry::cylindrical(wavelength);
  const Eadf eadf = synthesize_eadf(geom, 11, 11, 48, 48, 240e3, 19);

  SUBCASE("shape follows the array and subcarrier counts") {
    const CMat b = polarimetric_response(eadf, 1.0, 0.5, 100e-9);
    CHECK(b.rows() == 10 * 19);
    CHECK(b.cols() == 2);
  }

  SUBCASE("periodic in tau with period 1/f0") {
    const CMat a = polarimetric_response(eadf, 1.2, -0.7, 150e-9);
    const CMat b = polarimetric_response(eadf, 1.2, -0.7, 150e-9 + 1.0 / 240e3);
    CHECK((a - b).norm() < 1e-9 * a.norm());
  }

  SUBCASE("single-mode EADF is angle independent") {
    const auto iso = ArrayGeometry::single_isotropic(wavelength);
    const Eadf flat = synthesize_eadf(iso, 1, 1, 8, 8, 240e3, 5);
    const CMat a = polarimetric_response(flat, 0.3, 1.0, 80e-9);
    const CMat b = polarimetric_response(flat, 2.0, -2.5, 80e-9);
    CHECK((a - b).norm() < 1e-12 * a.norm());
  }

  SUBCASE("finite-difference derivatives are step-consistent (smoothness)") {
    const auto fd = [&](double colat, double az, double tau, int arg, double step) {
      double c1 = colat, a1 = az, t1 = tau, c2 = colat, a2 = az, t2 = tau;
      if (arg == 0) { c1 += step; c2 -= step; }
      if (arg == 1) { a1 += step; a2 -= step; }
      if (arg == 2) { t1 += step; t2 -= step; }
      return CMat(((polarimetric_response(eadf, c1, a1, t1) -
                    polarimetric_response(eadf, c2, a2, t2)) /
                   (2.0 * step)));
    };
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uaz(-2.5, 2.5), ucl(0.3, 2.8), ut(0.0, 2e-6);
    for (int trial = 0; trial < 5; ++trial) {
      const double colat = ucl(rng), az = uaz(rng), tau = ut(rng);
      for (int arg = 0; arg < 3; ++arg) {
        const double step = (arg == 2) ? 1e-12 : 1e-5;
        const CMat d1 = fd(colat, az, tau, arg, step);
        const CMat d2 = fd(colat, az, tau, arg, step / 2.0);
        CHECK((d1 - d2).norm() < 1e-4 * (1.0 + d2.norm()));
      }
    }
  }
}

TEST_CASE("snapshot generation") {
  const double wavelength = kSpeedOfLight / 6e9;
  const auto geom = ArrayGeometry::cylindrical(wavelength);
  const Eadf eadf = synthesize_eadf(geom, 11, 11, 48, 48, 240e3, 21);  // dim 210
  const Eigen::Vector2cd gamma(std::complex<double>(0.6, 0.2), std::complex<double>(-0.3, 0.5));

  SUBCASE("zero noise variance returns B gamma exactly") {
    std::mt19937_64 rng(3);
    const auto snap = generate_snapshot(eadf, 1.3, 0.4, 120e-9, gamma, 0.0, rng);
    const CVec expected = polarimetric_response(eadf, 1.3, 0.4, 120e-9) * gamma;
    CHECK((snap.g - expected).norm() == 0.0);
  }

  SUBCASE("pure noise sample variance approaches sigma_n^2") {
    std::mt19937_64 rng(17);
    const Eigen::Vector2cd zero = Eigen::Vector2cd::Zero();
    const double noise_var = 0.37;
    const auto snap = generate_snapshot(eadf, 1.0, 0.0, 0.0, zero, noise_var, rng);
    const double sample_var = snap.g.squaredNorm() / static_cast<double>(snap.g.size());
    CHECK(sample_var == doctest::Approx(noise_var).epsilon(0.05));
  }

  SUBCASE("noise energy calibration over ~1e5 draws within 1%") {
    std::mt19937_64 rng(23);
    const Eigen::Vector2cd zero = Eigen::Vector2cd::Zero();
    const double noise_var = 2.0;
    double total = 0.0;
    const int snapshots = 500;  // 500 * 210 = 105000 complex samples
    for (int i = 0; i < snapshots; ++i) {
      total += generate_snapshot(eadf, 1.0, 0.0, 0.0, zero, noise_var, rng).g.squaredNorm();
    }
    const double mean_energy = total / snapshots;
    CHECK(mean_energy == doctest::Approx(eadf.channel_dim() * noise_var).epsilon(0.01));
  }

  SUBCASE("negative noise variance rejected") {
    std::mt19937_64 rng(1);
    CHECK_THROWS_AS(generate_snapshot(eadf, 1.0, 0.0, 0.0, gamma, -1.0, rng),
                    std::invalid_argument);
  }
}

TEST_CASE("EADF JSON round trip") {
  const double wavelength = kSpeedOfLight / 6e9;
  const auto geom = ArrayGeometry::cylindrical(wavelength);
  const Eadf eadf = synthesize_eadf(geom, 7, 7, 24, 24, 240e3, 5);
  const Eadf back = eadf_from_json(eadf_to_json(eadf));
  CHECK(back.modes_azimuth == eadf.modes_azimuth);
  CHECK(back.subcarrier_count == eadf.subcarrier_count);
  CHECK((back.gh - eadf.gh).norm() == 0.0);
  CHECK((back.gv - eadf.gv).norm() == 0.0);
  CHECK((back.gf - eadf.gf).norm() == 0.0);

  // serialized text round-trips through a second parse identically
  const auto dumped = eadf_to_json(eadf).dump();
  const Eadf again = eadf_from_json(nlohmann::json::parse(dumped));
  CHECK((again.gh - eadf.gh).norm() == 0.0);
}
