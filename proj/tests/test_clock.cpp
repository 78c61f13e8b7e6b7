// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "posync/clock.hpp"

using namespace posync;

TEST_CASE("step_clock arithmetic") {
  std::mt19937_64 rng(1);
  ClockTruthParams p;
  p.beta = 1.0;
  p.sigma_eta = 0.0;

  SUBCASE("one deterministic step") {
    const ClockState out = step_clock({0.0, 25e-6}, 0.1, p, rng);
    CHECK(out.skew == 25e-6);
    CHECK(out.offset == doctest::Approx(2.5e-6).epsilon(1e-15));
  }
  SUBCASE("zero skew keeps the offset constant forever") {
    ClockState c{42e-6, 0.0};
    for (int k = 0; k < 1000; ++k) c = step_clock(c, 0.1, p, rng);
    CHECK(c.offset == 42e-6);
    CHECK(c.skew == 0.0);
  }
  SUBCASE("closed form after k steps (dyadic rate is exact in binary)") {
    const double skew = std::ldexp(1.0, -16);  // 2^-16
    const double dt = 0.125;                   // 2^-3
    ClockState c{0.0, skew};
    for (int k = 1; k <= 10000; ++k) {
      c = step_clock(c, dt, p, rng);
      // every partial sum k * skew * dt is exactly representable
    }
    CHECK(c.offset == 10000.0 * dt * skew);
    CHECK(c.skew == skew);
  }
  SUBCASE("closed form with non-dyadic values accumulates only rounding") {
    ClockState c{0.0, 25e-6};
    for (int k = 1; k <= 10000; ++k) c = step_clock(c, 0.1, p, rng);
    CHECK(c.offset == doctest::Approx(10000.0 * 0.1 * 25e-6).epsilon(1e-12));
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(step_clock({0.0, 0.0}, 0.0, p, rng), std::invalid_argument);
    CHECK_THROWS_AS(step_clock({std::nan(""), 0.0}, 0.1, p, rng), std::invalid_argument);
  }
}

TEST_CASE("clock random walk is seed-reproducible bit for bit") {
  ClockTruthParams p;  // defaults: beta just below 1, sigma_eta 6.3e-8
  const auto run = [&p](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ClockState c = sample_initial_clock(p, rng);
    std::vector<double> offsets;
    for (int k = 0; k < 500; ++k) {
      c = step_clock(c, 0.1, p, rng);
      offsets.push_back(c.offset);
    }
    return offsets;
  };
  const auto a = run(99), b = run(99), other = run(100);
  CHECK(a == b);
  CHECK(a != other);
}

TEST_CASE("clock_process_blocks") {
  SUBCASE("dt=1, sigma_eta=1") {
    const auto [q, q_rho] = clock_process_blocks(1.0, 1.0, 0.0, 0);
    CHECK(q(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(q(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(q(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(q(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(q_rho.size() == 0);
  }
  SUBCASE("sigma_eta=0 zeroes the clock block") {
    const auto [q, q_rho] = clock_process_blocks(0.5, 0.0, 0.0, 0);
    CHECK(q.norm() == 0.0);
  }
  SUBCASE("slot block is sigma_rho^2 I_L") {
    const auto [q, q_rho] = clock_process_blocks(1.0, 0.0, 3.0, 2);
    CHECK((q_rho - 9.0 * Mat::Identity(2, 2)).norm() == 0.0);
  }
  SUBCASE("PSD for positive dt: determinant sigma^4 dt^4 / 12") {
    for (double dt : {1e-3, 0.1, 1.0, 10.0}) {
      for (double s : {0.0, 1e-8, 1e-4, 1.0}) {
        const auto [q, q_rho] = clock_process_blocks(dt, s, 0.0, 0);
        const double det = q.determinant();
        const double expected = std::pow(s, 4) * std::pow(dt, 4) / 12.0;
        CHECK(det == doctest::Approx(expected).epsilon(1e-9));
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(q);
        CHECK(es.eigenvalues().minCoeff() >= -1e-18 * std::max(1.0, q.trace()));
      }
    }
  }
  SUBCASE("negative stds rejected") {
    CHECK_THROWS_AS(clock_process_blocks(1.0, -1.0, 0.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(clock_process_blocks(1.0, 0.0, -1.0, 1), std::invalid_argument);
  }
}
