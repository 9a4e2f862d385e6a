#include <doctest.h>

#include <random>

#include "msi/error.hpp"
#include "msi/models.hpp"

using namespace msi;

namespace {

void check_point(const FixedPoint& fp, const Eigen::Vector3d& want) {
  for (int k = 0; k < 3; ++k) CHECK(std::abs(fp.state(k) - want(k)) < 1e-3);
}

bool close(Complex a, Complex b, double tol) { return std::abs(a - b) < tol; }

}  // namespace

TEST_CASE("default parameters") {
  const auto r = build_system("rossler");
  CHECK(r.dimension == 3);
  CHECK(r.params.get("a") == 0.15);
  CHECK(r.params.get("b") == 0.2);
  CHECK(r.params.get("c") == 10.0);

  const auto c = build_system("chen");
  CHECK(c.params.get("a") == 35.0);
  CHECK(c.params.get("c") == 28.0);
  CHECK(c.params.get("beta") == doctest::Approx(8.0 / 3.0));

  const auto l = build_system("lorenz");
  CHECK(l.params.get("r") == 28.0);
  CHECK(l.params.get("b") == doctest::Approx(8.0 / 3.0));
}

TEST_CASE("build_system errors") {
  CHECK_THROWS_AS(build_system("duffing"), ValidationError);
  CHECK_THROWS_AS(build_system("rossler", ParamSet{{"q", 1.0}}), ValidationError);
  CHECK_THROWS_AS(build_system("custom"), ValidationError);
  ParamSet p{{"a", 1.0}};
  CHECK_THROWS_AS(p.get("b"), ValidationError);
  CHECK_FALSE(p.contains("b"));
  p.set("b", 2.0);
  CHECK(p.get("b") == 2.0);
}

TEST_CASE("custom scalar linearization") {
  const auto m = build_system("custom", {}, CustomLinearization{Eigen::MatrixXd::Constant(1, 1, 2.0), {}});
  CHECK(m.dimension == 1);
  const auto fp = select_fixed_point(m);
  REQUIRE(fp.eigenvalues.size() == 1);
  CHECK(close(fp.eigenvalues[0], 2.0, 1e-14));
  CHECK(fp.state(0) == 0.0);

  Eigen::MatrixXd df(2, 2);
  df << 0, 1, -1, 0;
  Eigen::VectorXd s(2);
  s << 1, 2;
  const auto m2 = build_system("custom", {}, CustomLinearization{df, s});
  const auto fp2 = select_fixed_point(m2);
  CHECK(m2.eval(s).cwiseAbs().maxCoeff() == 0.0);
  CHECK((fp2.jacobian_at_state - df).norm() == 0.0);

  CHECK_THROWS_AS(build_system("custom", {}, CustomLinearization{Eigen::MatrixXd::Zero(2, 3), {}}),
                  ValidationError);
}

TEST_CASE("Rossler fixed point and spectrum") {
  const auto m = build_system("rossler");
  const auto set = find_fixed_points(m);
  REQUIRE(set.points.size() == 2);
  const auto& fp = select_fixed_point(m);
  check_point(fp, {0.003, -0.02, 0.02});
  const auto ev = jacobian_spectrum(fp);
  CHECK(close(ev[0], {0.0740, 0.9972}, 1e-3));
  CHECK(close(ev[1], {0.0740, -0.9972}, 1e-3));
  CHECK(close(ev[2], -9.9950, 1e-3));
}

TEST_CASE("Lorenz fixed points") {
  const auto m = build_system("lorenz");
  const auto set = find_fixed_points(m);
  REQUIRE(set.points.size() == 3);
  check_point(set.points[0], {8.485, 8.485, 27});
  check_point(set.points[1], {-8.485, -8.485, 27});
  CHECK(set.points[2].state.norm() == 0.0);
  const auto ev = jacobian_spectrum(select_fixed_point(m));
  CHECK(close(ev[0], {0.0939, 10.1945}, 1e-3));
  CHECK(close(ev[1], {0.0939, -10.1945}, 1e-3));
  CHECK(close(ev[2], -13.8546, 1e-3));

  const auto below = find_fixed_points(build_system("lorenz", ParamSet{{"r", 0.5}}));
  REQUIRE(below.points.size() == 1);
  CHECK(below.points[0].state.norm() == 0.0);
  CHECK_FALSE(below.diagnostic.empty());
}

TEST_CASE("Chen fixed point") {
  const auto fp = select_fixed_point(build_system("chen"));
  check_point(fp, {7.483, 7.483, 21});
  const auto ev = jacobian_spectrum(fp);
  CHECK(close(ev[0], {4.0769, 14.2601}, 1e-3));
  CHECK(close(ev[2], -17.8205, 1e-3));
}

TEST_CASE("Rossler discriminant failure gives an empty list") {
  const auto m = build_system("rossler", ParamSet{{"c", 0.1}});
  const auto set = find_fixed_points(m);
  CHECK(set.points.empty());
  CHECK(set.diagnostic.find("c^2 > 4ab") != std::string::npos);
  CHECK_THROWS_AS(select_fixed_point(m), ValidationError);
}

TEST_CASE("fixed point index selection") {
  const auto m = build_system("rossler");
  CHECK(default_fixed_point_index(m) == 1);
  CHECK(default_fixed_point_index(build_system("chen")) == 0);
  const auto far = select_fixed_point(m, 0);
  CHECK(far.state(0) > 9.0);
  CHECK_THROWS_AS(select_fixed_point(m, 5), ValidationError);
  CHECK_THROWS_AS(select_fixed_point(m, -1), ValidationError);
}

TEST_CASE("fixed points are roots and unstable") {
  for (const char* name : {"rossler", "lorenz", "chen"}) {
    CAPTURE(name);
    const auto m = build_system(name);
    for (const auto& fp : find_fixed_points(m).points) {
      CHECK(m.eval(fp.state).cwiseAbs().maxCoeff() < 1e-10);
      for (const auto& mu : fp.eigenvalues) {
        Eigen::MatrixXcd a = fp.jacobian_at_state.cast<Complex>();
        a.diagonal().array() -= mu;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
        CHECK(svd.singularValues().minCoeff() < 1e-8);
      }
    }
    const auto fp = select_fixed_point(m);
    CHECK(fp.eigenvalues.front().real() > 0);
    for (std::size_t k = 1; k < fp.eigenvalues.size(); ++k)
      CHECK(fp.eigenvalues[k - 1].real() >= fp.eigenvalues[k].real());
  }
}

TEST_CASE("Jacobian matches central differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (const char* name : {"rossler", "lorenz", "chen"}) {
    CAPTURE(name);
    const auto m = build_system(name);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd x(3);
      for (int k = 0; k < 3; ++k) x(k) = u(rng);
      const Eigen::MatrixXd j = m.jacobian(x);
      Eigen::MatrixXd fd(3, 3);
      for (int k = 0; k < 3; ++k) {
        const double h = 1e-6 * std::max(1.0, std::abs(x(k)));
        Eigen::VectorXd xp = x, xm = x;
        xp(k) += h;
        xm(k) -= h;
        fd.col(k) = (m.eval(xp) - m.eval(xm)) / (2 * h);
      }
      worst = std::max(worst, (fd - j).norm() / std::max(1.0, j.norm()));
    }
    CHECK(worst < 1e-5);
  }
}
