#include <doctest.h>

#include <random>

#include "msi/error.hpp"
#include "msi/models.hpp"
#include "msi/msf.hpp"

using namespace msi;

namespace {

MasterStability rossler_msf() {
  const auto fp = select_fixed_point(build_system("rossler"));
  return MasterStability(fp.jacobian_at_state, Eigen::MatrixXd::Identity(3, 3));
}

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

}  // namespace

TEST_CASE("scalar_root examples") {
  for (double tau : {0.1, 1.0, 7.0})
    for (double lambda : {-1.0, 0.0, 1.0}) CHECK(std::abs(scalar_root(2.0, 1.0, tau, 0.0, lambda) - 2.0) < 1e-15);
  CHECK(std::abs(scalar_root(-1.0, 1.0, 1.0, 1.0, 0.0) + 2.0) < 1e-15);

  const Complex mu_df(0.0740, 0.9972);
  const Complex mu = scalar_root(mu_df, 1.0, 1.0, 1.0, 1.0);
  CHECK(scalar_residual(mu, mu_df, 1.0, 1.0, 1.0, 1.0) < 1e-10);
  const auto spectral = spectral_rightmost_root(
      (Eigen::MatrixXd(2, 2) << mu_df.real(), mu_df.imag(), -mu_df.imag(), mu_df.real()).finished(),
      Eigen::MatrixXd::Identity(2, 2), 1.0, 1.0, 1.0);
  CHECK(std::abs(spectral.omega - mu.real()) < 1e-6);
  CHECK_THROWS_AS(scalar_root(1.0, 1.0, 0.0, 1.0, 1.0), ValidationError);
}

TEST_CASE("Rossler values") {
  const auto msf = rossler_msf();
  REQUIRE(msf.decoupled());
  const auto v = msf.eval({3.0, 0.0, 1.0});
  CHECK(std::abs(v.omega - 0.0740) < 1e-3);
  CHECK(v.method == MsfMethod::lambert);
  CHECK(v.omega == v.dominant_root.real());
  REQUIRE(v.mode_index);

  for (double sigma : {0.0, 0.5, 3.0, 19.0}) {
    const auto z = msf.eval({0.0, sigma, 1.0});
    CHECK(z.method == MsfMethod::closed_form);
    CHECK(std::abs(z.omega - msf.uncoupled_growth()) < 1e-12);
    CHECK(std::abs(z.omega - 0.0740) < 1e-3);
  }
  const auto in = msf.eval({2.0, 1.0, 1.0});
  CHECK(in.omega < 0);
  CHECK(in.residual < 1e-10);
}

TEST_CASE("query validation") {
  const auto msf = rossler_msf();
  CHECK_THROWS_AS(msf.eval({-1.0, 1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(msf.eval({1.0, -0.1, 1.0}), ValidationError);
  CHECK_THROWS_AS(msf.eval({1.0, 1.0, 1.5}), ValidationError);
  CHECK_THROWS_AS(msf.eval({std::nan(""), 1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(msf.eval({INFINITY, 1.0, 1.0}), ValidationError);
}

TEST_CASE("spectral path on a scalar problem") {
  const auto v = spectral_rightmost_root(scalar(-1.0), scalar(1.0), 1.0, 1.0, 0.0);
  CHECK(std::abs(v.omega + 2.0) < 1e-10);
  CHECK(v.method == MsfMethod::spectral);
  CHECK_FALSE(v.mode_index);
}

TEST_CASE("non-commuting regression anchor") {
  Eigen::MatrixXd df(2, 2), h(2, 2);
  df << 0, 1, -1, 0;
  h << 0, 0, 1, 0;
  const MasterStability msf(df, h);
  CHECK_FALSE(msf.decoupled());
  const auto v = msf.eval({1.0, 0.5, 1.0});
  CHECK(v.method == MsfMethod::spectral);
  // Rightmost zero of mu^2 + 1.5 - 0.5 exp(-mu), from a 30-digit root search.
  CHECK(std::abs(v.omega + 0.258160710384) < 1e-10);
  CHECK(std::abs(std::abs(v.dominant_root.imag()) - 1.138076637558) < 1e-10);
  CHECK(determinant_residual(df, h, 1.0, 0.5, 1.0, v.dominant_root) < 1e-8);
  CHECK_THROWS_AS(msf.eval_lambert({1.0, 0.5, 1.0}), ValidationError);
}

TEST_CASE("sigma = 0 identity") {
  const auto msf = rossler_msf();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> t(0.0, 30.0), l(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) CHECK(std::abs(msf.omega(t(rng), 0.0, l(rng)) - msf.uncoupled_growth()) < 1e-12);
}

TEST_CASE("tau = 0 closed form") {
  Eigen::MatrixXd df(2, 2);
  df << -1, 0, 0, 0.5;
  Eigen::MatrixXd h(2, 2);
  h << 2, 0, 0, 1;
  const MasterStability msf(df, h);
  // max(-1 + 2 s (l - 1), 0.5 + s (l - 1))
  const auto v = msf.eval({0.0, 1.0, 0.0});
  CHECK(std::abs(v.omega - std::max(-3.0, -0.5)) < 1e-15);
}

TEST_CASE("mode ties go to the smallest index") {
  const MasterStability msf(0.3 * Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2));
  const auto v = msf.eval({1.0, 0.7, 0.2});
  REQUIRE(v.mode_index);
  CHECK(*v.mode_index == 0);
}

TEST_CASE("Lambert and spectral paths agree") {
  const auto msf = rossler_msf();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> t(0.05, 15.0), s(0.0, 15.0), l(-1.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const MsfQuery q{t(rng), s(rng), l(rng)};
    CAPTURE(q.tau);
    CAPTURE(q.sigma);
    CAPTURE(q.lambda);
    const auto a = msf.eval_lambert(q), b = msf.eval_spectral(q);
    CHECK(std::abs(a.omega - b.omega) < 1e-6);
    CHECK(b.residual < 1e-8);
  }
}

TEST_CASE("continuity in lambda") {
  const auto msf = rossler_msf();
  const double d = 1e-6;
  for (double lambda = -0.99; lambda < 0.99; lambda += 0.07) {
    const double a = msf.omega(2.0, 1.0, lambda), b = msf.omega(2.0, 1.0, lambda + d);
    CHECK(std::abs(a - b) < 10 * d * 10.0);
  }
}

TEST_CASE("long delays") {
  const auto msf = rossler_msf();
  for (double tau : {100.0, 1e3, 1e4}) {
    CAPTURE(tau);
    const auto v = msf.eval({tau, 50.0, 0.9});
    CHECK(std::isfinite(v.omega));
    CHECK(v.residual < 1e-10);
  }
}

TEST_CASE("vanishing lambda with a strongly damped mode") {
  // -a tau exceeds the exp range; the delayed term must not turn 0 * inf into NaN.
  const auto fp = select_fixed_point(build_system("chen"));
  const MasterStability msf(fp.jacobian_at_state, Eigen::MatrixXd::Identity(3, 3));
  for (double lambda : {0.0, 1e-320, -1e-320, 1e-17}) {
    CAPTURE(lambda);
    const double w = msf.omega(15.0, 29.547738693467338, lambda);
    CHECK(std::isfinite(w));
  }
  CHECK(msf.omega(15.0, 29.5, 0.0) == doctest::Approx(msf.uncoupled_growth() - 29.5));
}
