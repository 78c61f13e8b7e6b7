// SPDX-License-Identifier: Apache-2.0
// Part of posync - joint positioning and network synchronization toolkit
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "posync/angles.hpp"
#include "posync/kalman.hpp"
#include "posync/ut.hpp"

using namespace posync;

namespace {

constexpr double kPi = std::numbers::pi;

Mat random_psd(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n01;
  Mat a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = n01(rng);
  }
  return scale * (a * a.transpose()) + 1e-6 * Mat::Identity(n, n);
}

Vec random_vec(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n01;
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * n01(rng);
  return v;
}

/// Closed-form Kalman update oracle for linear measurements y = H s + b + v.
std::pair<Vec, Mat> kf_update(const Vec& m, const Mat& p, const Mat& h, const Vec& b,
                              const Mat& r, const Vec& y) {
  const Mat s = h * p * h.transpose() + r;
  const Mat k = p * h.transpose() * s.inverse();
  return {m + k * (y - h * m - b), p - k * s * k.transpose()};
}

}  // namespace

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(3.0 * kPi) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(wrap_angle(-kPi - 0.1) == doctest::Approx(kPi - 0.1).epsilon(1e-12));
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));  // open at -pi
  CHECK(wrap_angle(2.0 * kPi) == doctest::Approx(0.0).epsilon(1e-15));
  for (double x : {-100.0, -7.3, 5.5, 123.456}) {
    const double w = wrap_angle(x);
    CHECK(w > -kPi);
    CHECK(w <= kPi);
    CHECK(std::remainder(w - x, 2.0 * kPi) == doctest::Approx(0.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(wrap_angle(std::numeric_limits<double>::infinity()), std::invalid_argument);
  CHECK_THROWS_AS(wrap_angle(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
}

TEST_CASE("ut_weights closed-form values") {
  SUBCASE("n=1, alpha=1, kappa=2 gives lambda=2") {
    const auto [wm, wc] = ut_weights(1, UtParams{1.0, 2.0, 2.0});
    CHECK(wm(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(wm(1) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(wm(2) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(wc(0) == doctest::Approx(2.0 / 3.0 + 2.0).epsilon(1e-15));
  }
  SUBCASE("n=8, alpha=1e-3, kappa=0: large negative central weight") {
    const auto [wm, wc] = ut_weights(8, UtParams{1e-3, 2.0, 0.0});
    // lambda = 8e-6 - 8, n + lambda = 8e-6, W_m0 = 1 - 1e6
    CHECK(wm(0) == doctest::Approx(-999999.0).epsilon(1e-9));
    CHECK(wm(1) == doctest::Approx(62500.0).epsilon(1e-12));
    CHECK(wm.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(wc(0) == doctest::Approx(-999999.0 + 3.0 - 1e-6).epsilon(1e-9));
  }
  SUBCASE("weights_mean sums to one (1e-12 absolute for moderate alpha)") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(0.05, 1.0), uk(-0.5, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 1 + static_cast<int>(rng() % 12);
      const UtParams p{ua(rng), 2.0, uk(rng)};
      const auto [wm, wc] = ut_weights(n, p);
      CHECK(std::abs(wm.sum() - 1.0) < 1e-12);
      CHECK(static_cast<int>(wm.size()) == 2 * n + 1);
    }
  }
  SUBCASE("normalization scales with ulp(|W0|) for extreme alpha") {
    // |W_m0| ~ 1e6 here, so the representable floor of the identity is
    // ~ulp(1e6); 1e-12 relative to the central weight magnitude.
    for (int n : {2, 8, 12}) {
      const auto [wm, wc] = ut_weights(n, UtParams{1e-3, 2.0, 0.0});
      CHECK(std::abs(wm.sum() - 1.0) < 1e-12 * std::max(1.0, std::abs(wm(0))));
    }
  }
  SUBCASE("rejects n + lambda == 0 and bad inputs") {
    CHECK_THROWS_AS(ut_weights(3, UtParams{1.0, 2.0, -3.0}), std::invalid_argument);
    CHECK_THROWS_AS(ut_weights(0, UtParams{}), std::invalid_argument);
    CHECK_THROWS_AS(ut_weights(3, UtParams{0.0, 2.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(ut_weights(3, UtParams{-1.0, 2.0, 0.0}), std::invalid_argument);
  }
}

TEST_CASE("sigma points: placement, symmetry and reconstruction") {
  SUBCASE("scalar unit case with lambda=2 gives {0, sqrt(3), -sqrt(3)}") {
    GaussianState s(Vec::Zero(1), Mat::Identity(1, 1), uniform_layout(1));
    const auto sp = sigma_points(s, UtParams{1.0, 2.0, 2.0});
    CHECK(sp.points(0, 0) == 0.0);
    CHECK(sp.points(0, 1) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
    CHECK(sp.points(0, 2) == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-15));
  }
  SUBCASE("zero covariance collapses all points onto the mean") {
    Vec mean(3);
    mean << 1.0, -2.0, 0.5;
    GaussianState s(mean, Mat::Zero(3, 3), uniform_layout(3));
    const auto sp = sigma_points(s, UtParams{1.0, 2.0, 0.0});
    for (int i = 0; i < sp.points.cols(); ++i) {
      CHECK((sp.points.col(i) - mean).norm() == 0.0);
    }
  }
  SUBCASE("points i and n+i are symmetric about the mean") {
    std::mt19937_64 rng(11);
    const int n = 5;
    GaussianState s(random_vec(n, rng), random_psd(n, rng), uniform_layout(n));
    const auto sp = sigma_points(s, UtParams{0.7, 2.0, 0.5});
    for (int i = 1; i <= n; ++i) {
      const Vec mid = 0.5 * (sp.points.col(i) + sp.points.col(n + i));
      CHECK((mid - s.mean).norm() < 1e-12 * (1.0 + s.mean.norm()));
    }
  }
  SUBCASE("moment reconstruction is the identity to 1e-10") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ua(0.3, 1.0), uk(0.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 1 + static_cast<int>(rng() % 6);
      GaussianState s(random_vec(n, rng, 3.0), random_psd(n, rng), uniform_layout(n));
      const auto sp = sigma_points(s, UtParams{ua(rng), 2.0, uk(rng)});
      const auto [mean, cov] = ut_moments(sp);
      CHECK((mean - s.mean).norm() < 1e-10 * (1.0 + s.mean.norm()));
      CHECK((cov - s.cov).norm() < 1e-10 * (1.0 + s.cov.norm()));
    }
  }
  SUBCASE("indefinite covariance fails after max jitter") {
    Mat bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3, -1
    GaussianState s(Vec::Zero(2), bad, uniform_layout(2));
    CHECK_THROWS_AS(sigma_points(s, UtParams{1.0, 2.0, 0.0}), NumericalError);
  }
  SUBCASE("PSD-singular covariance is repaired by jitter") {
    Mat semi(2, 2);
    semi << 1.0, 0.0, 0.0, 0.0;
    GaussianState s(Vec::Zero(2), semi, uniform_layout(2));
    const auto sp = sigma_points(s, UtParams{1.0, 2.0, 0.0});
    CHECK(sp.points.allFinite());
  }
}

TEST_CASE("predict_linear") {
  SUBCASE("identity transition with zero noise is a no-op") {
    std::mt19937_64 rng(3);
    GaussianState s(random_vec(4, rng), random_psd(4, rng), uniform_layout(4));
    const auto out = predict_linear(s, {Mat::Identity(4, 4), Mat::Zero(4, 4)});
    CHECK((out.mean - s.mean).norm() == 0.0);
    CHECK((out.cov - s.cov).norm() < 1e-14 * s.cov.norm());
  }
  SUBCASE("constant-velocity block moves the mean") {
    Mat f(2, 2);
    f << 1.0, 0.1, 0.0, 1.0;
    Vec m(2);
    m << 0.0, 1.0;
    const auto out = predict_linear(GaussianState(m, Mat::Identity(2, 2), uniform_layout(2)),
                                    {f, Mat::Zero(2, 2)});
    CHECK(out.mean(0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(out.mean(1) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("additive noise grows the covariance") {
    GaussianState s(Vec::Zero(3), Mat::Identity(3, 3), uniform_layout(3));
    const auto out = predict_linear(s, {Mat::Identity(3, 3), Mat::Identity(3, 3)});
    CHECK((out.cov - 2.0 * Mat::Identity(3, 3)).norm() == 0.0);
  }
  SUBCASE("dimension mismatch is rejected") {
    GaussianState s(Vec::Zero(3), Mat::Identity(3, 3), uniform_layout(3));
    CHECK_THROWS_AS(predict_linear(s, {Mat::Identity(2, 2), Mat::Zero(2, 2)}),
                    std::invalid_argument);
  }
}

TEST_CASE("ukf_update equals the closed-form Kalman update on linear models") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ua(0.3, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const int m = 1 + static_cast<int>(rng() % 4);
    GaussianState prior(random_vec(n, rng, 2.0), random_psd(n, rng), uniform_layout(n));
    Mat h(m, n);
    for (int i = 0; i < m; ++i) h.row(i) = random_vec(n, rng).transpose();
    const Vec b = random_vec(m, rng);
    const Mat r = random_psd(m, rng, 0.5);
    const Vec y = random_vec(m, rng, 2.0);

    const auto posterior = ukf_update(
        prior, y, [&](const Vec& s) { return Vec(h * s + b); }, r,
        UtParams{ua(rng), 2.0, 0.0}, uniform_layout(m));
    const auto [km, kp] = kf_update(prior.mean, prior.cov, h, b, r, y);
    CHECK((posterior.mean - km).norm() < 1e-9 * (1.0 + km.norm()));
    CHECK((posterior.cov - kp).norm() < 1e-9 * (1.0 + kp.norm()));
    // information monotonicity on linear models
    CHECK(posterior.cov.trace() <= prior.cov.trace() * (1.0 + 1e-9));
    // symmetric output
    CHECK((posterior.cov - posterior.cov.transpose()).cwiseAbs().maxCoeff() <
          1e-12 * std::abs(posterior.cov.trace()));
  }
}

TEST_CASE("ukf_update limits and errors") {
  SUBCASE("scalar conjugate case: prior N(0,1), y=1, R=1 gives N(0.5, 0.5)") {
    GaussianState prior(Vec::Zero(1), Mat::Identity(1, 1), uniform_layout(1));
    const auto post = ukf_update(
        prior, Vec::Ones(1), [](const Vec& s) { return s; }, Mat::Identity(1, 1),
        UtParams{1.0, 2.0, 2.0}, uniform_layout(1));
    CHECK(post.mean(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(post.cov(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("uninformative measurement leaves the prior untouched") {
    std::mt19937_64 rng(23);
    GaussianState prior(random_vec(3, rng), random_psd(3, rng), uniform_layout(3));
    const Mat r = 1e12 * Mat::Identity(2, 2);
    Mat h(2, 3);
    h << 1, 0, 0, 0, 1, 1;
    const auto post = ukf_update(
        prior, Vec::Ones(2), [&](const Vec& s) { return Vec(h * s); }, r,
        UtParams{1.0, 2.0, 0.0}, uniform_layout(2));
    CHECK((post.mean - prior.mean).norm() < 1e-6 * (1.0 + prior.mean.norm()));
    CHECK((post.cov - prior.cov).norm() < 1e-6 * prior.cov.norm());
  }
  SUBCASE("singular innovation covariance raises NumericalError with a condition estimate") {
    GaussianState prior(Vec::Zero(2), Mat::Identity(2, 2), uniform_layout(2));
    // duplicated rows with zero measurement noise make S rank-deficient
    const auto dup = [](const Vec& s) {
      Vec out(2);
      out << s(0), s(0);
      return out;
    };
    try {
      ukf_update(prior, Vec::Ones(2), dup, Mat::Zero(2, 2), UtParams{1.0, 2.0, 0.0},
                 uniform_layout(2));
      FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
      CHECK(std::string(e.what()).find("condition estimate") != std::string::npos);
    }
  }
  SUBCASE("angle-wrapped innovation crosses the seam the short way") {
    // prior azimuth near +pi, measurement just past -pi (equivalent to +pi+0.02)
    GaussianState prior(Vec::Constant(1, kPi - 0.01), Mat::Identity(1, 1) * 0.01,
                        {StateTag::Angle});
    const Vec y = Vec::Constant(1, -kPi + 0.01);
    const auto post = ukf_update(
        prior, y, [](const Vec& s) { return s; }, Mat::Identity(1, 1) * 0.01,
        UtParams{1.0, 2.0, 2.0}, {StateTag::Angle});
    // innovation is +0.02 wrapped, not -2pi+0.02
    CHECK(post.mean(0) == doctest::Approx(kPi - 0.01 + 0.01).epsilon(1e-9));
  }
}

TEST_CASE("ekf_update agrees with oracles") {
  SUBCASE("linear model matches the closed-form update to 1e-12") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 40; ++trial) {
      const int n = 2 + static_cast<int>(rng() % 4);
      const int m = 1 + static_cast<int>(rng() % 3);
      GaussianState prior(random_vec(n, rng, 2.0), random_psd(n, rng), uniform_layout(n));
      Mat h(m, n);
      for (int i = 0; i < m; ++i) h.row(i) = random_vec(n, rng).transpose();
      const Mat r = random_psd(m, rng, 0.5);
      const Vec y = random_vec(m, rng, 2.0);
      const auto post = ekf_update(
          prior, y, [&](const Vec& s) { return Vec(h * s); },
          [&](const Vec&) { return h; }, r, uniform_layout(m));
      const auto [km, kp] = kf_update(prior.mean, prior.cov, h, Vec::Zero(m), r, y);
      CHECK((post.mean - km).norm() < 1e-12 * (1.0 + km.norm()));
      CHECK((post.cov - kp).norm() < 1e-12 * (1.0 + kp.norm()));
    }
  }
  SUBCASE("scalar conjugate case") {
    GaussianState prior(Vec::Zero(1), Mat::Identity(1, 1), uniform_layout(1));
    const auto post = ekf_update(
        prior, Vec::Ones(1), [](const Vec& s) { return s; },
        [](const Vec&) { return Mat::Identity(1, 1); }, Mat::Identity(1, 1),
        uniform_layout(1));
    CHECK(post.mean(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(post.cov(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("finite-difference Jacobian reproduces the analytic posterior to 1e-6") {
    std::mt19937_64 rng(31);
    const int n = 3;
    const auto h = [](const Vec& s) {
      Vec out(2);
      out << std::sin(s(0)) + s(1) * s(1), std::atan2(s(2), 1.0 + s(0) * s(0));
      return out;
    };
    const auto analytic_jac = [](const Vec& s) {
      Mat j(2, 3);
      const double d = 1.0 + s(0) * s(0);
      j << std::cos(s(0)), 2.0 * s(1), 0.0,  //
          -s(2) * 2.0 * s(0) / (d * d + s(2) * s(2)), 0.0, d / (d * d + s(2) * s(2));
      return j;
    };
    const auto fd_jac = [&h](const Vec& s) {
      const double step = 1e-6;
      Mat j(2, 3);
      for (int c = 0; c < 3; ++c) {
        Vec hi = s, lo = s;
        hi(c) += step;
        lo(c) -= step;
        j.col(c) = (h(hi) - h(lo)) / (2.0 * step);
      }
      return j;
    };
    for (int trial = 0; trial < 20; ++trial) {
      GaussianState prior(random_vec(n, rng, 0.5), random_psd(n, rng, 0.2), uniform_layout(n));
      const Vec y = random_vec(2, rng, 0.5);
      const Mat r = 0.1 * Mat::Identity(2, 2);
      const auto a = ekf_update(prior, y, h, analytic_jac, r, uniform_layout(2));
      const auto b = ekf_update(prior, y, h, fd_jac, r, uniform_layout(2));
      CHECK((a.mean - b.mean).norm() < 1e-6 * (1.0 + a.mean.norm()));
      CHECK((a.cov - b.cov).norm() < 1e-6 * (1.0 + a.cov.norm()));
    }
  }
}

TEST_CASE("ekf and ukf agree on linear measurement maps") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const int m = 1 + static_cast<int>(rng() % 3);
    GaussianState prior(random_vec(n, rng, 2.0), random_psd(n, rng), uniform_layout(n));
    Mat h(m, n);
    for (int i = 0; i < m; ++i) h.row(i) = random_vec(n, rng).transpose();
    const Mat r = random_psd(m, rng, 0.5);
    const Vec y = random_vec(m, rng, 2.0);
    const auto hfn = [&](const Vec& s) { return Vec(h * s); };
    const auto u = ukf_update(prior, y, hfn, r, UtParams{0.8, 2.0, 1.0}, uniform_layout(m));
    const auto e = ekf_update(prior, y, hfn, [&](const Vec&) { return h; }, r,
                              uniform_layout(m));
    CHECK((u.mean - e.mean).norm() < 1e-6 * (1.0 + e.mean.norm()));
    CHECK((u.cov - e.cov).norm() < 1e-6 * (1.0 + e.cov.norm()));
  }
}

TEST_CASE("GaussianState validation") {
  GaussianState ok(Vec::Zero(2), Mat::Identity(2, 2), uniform_layout(2));
  CHECK_NOTHROW(ok.validate());

  Mat asym(2, 2);
  asym << 1.0, 0.5, 0.2, 1.0;
  GaussianState bad(Vec::Zero(2), asym, uniform_layout(2));
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  Mat indef(2, 2);
  indef << 1.0, 2.0, 2.0, 1.0;
  GaussianState bad2(Vec::Zero(2), indef, uniform_layout(2));
  CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);

  CHECK_THROWS_AS(GaussianState(Vec::Zero(2), Mat::Identity(3, 3), uniform_layout(2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(GaussianState(Vec::Zero(2), Mat::Identity(2, 2), uniform_layout(5)),
                  std::invalid_argument);
}
