#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "locopt/fisher.hpp"

using namespace locopt;
using std::numbers::pi;

namespace {

bool close(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol) {
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

TEST_CASE("direction_matrix") {
  Eigen::Matrix2d e;
  e << 1, 0, 0, 0;
  CHECK(close(direction_matrix(0), e, 1e-15));
  e << 0, 0, 0, 1;
  CHECK(close(direction_matrix(pi / 2), e, 1e-15));
  e << 0.5, 0.5, 0.5, 0.5;
  CHECK(close(direction_matrix(pi / 4), e, 1e-15));
}

TEST_CASE("efim of simple anchor sets") {
  const SpebScene orth = SpebScene::direct(Eigen::Vector2d(0, pi / 2), Eigen::Vector2d(1, 1));
  CHECK(close(efim(orth, Eigen::Vector2d(1, 1)), Eigen::Matrix2d::Identity(), 1e-15));

  const double t = 0.7;
  const SpebScene tri = SpebScene::direct(Eigen::Vector3d(0, 2 * pi / 3, 4 * pi / 3), Eigen::Vector3d::Ones());
  const Eigen::Matrix2d J = efim(tri, Eigen::Vector3d::Constant(t));
  CHECK(close(J, 1.5 * t * Eigen::Matrix2d::Identity(), 1e-14));
  CHECK(speb(J) == doctest::Approx(4.0 / (3.0 * t)));
}

TEST_CASE("speb") {
  CHECK(speb(Eigen::Matrix2d::Identity()) == doctest::Approx(2.0));
  CHECK(std::isinf(speb(direction_matrix(0.3))));
  CHECK(std::isinf(speb(Eigen::Matrix2d::Zero())));
  Eigen::Matrix2d bad;
  bad << 1, 0, 0, -1;
  CHECK_THROWS_AS(speb(bad), std::domain_error);
  bad << 1, 0.5, 0, 1;
  CHECK_THROWS_AS(speb(bad), std::domain_error);
}

TEST_CASE("topology matrix") {
  Eigen::Matrix2d e;
  e << 0, 2, 2, 0;
  CHECK(close(topology_matrix(Eigen::Vector2d(0, pi / 2)), e, 1e-15));
  CHECK(topology_matrix(Eigen::Vector3d(0.4, 0.4, 0.4)).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::MatrixXd L = topology_matrix(Eigen::Vector3d(0, 2 * pi / 3, 4 * pi / 3));
  CHECK(L(0, 1) == doctest::Approx(1.5));
  CHECK(L(1, 2) == doctest::Approx(1.5));
  CHECK(L(0, 2) == doctest::Approx(1.5));
}

TEST_CASE("fractional form agrees with the trace form") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ang(0.0, 2 * pi), pos(0.1, 2.0);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 6;
    Eigen::VectorXd a(n), r(n), x(n);
    for (int i = 0; i < n; ++i) {
      a[i] = ang(rng);
      r[i] = pos(rng);
      x[i] = pos(rng);
    }
    const SpebScene s = SpebScene::direct(a, r);
    const double p1 = speb(efim(s, x));
    const double p2 = speb_fractional(s, x);
    CHECK(std::abs(p1 - p2) <= 1e-9 * p1);
  }
  const SpebScene col = SpebScene::direct(Eigen::Vector2d(0.2, 0.2 + pi), Eigen::Vector2d(1, 1));
  CHECK(std::isinf(speb_fractional(col, Eigen::Vector2d(1, 1))));
}

TEST_CASE("radar efim two ways") {
  const RadarNetwork net({{3, 1}, {-2, 4}}, {{-1, -3}, {5, 0}, {0, 6}}, {0.5, 0.5},
                         (Eigen::MatrixXd(3, 2) << 1, 2, 0.5, 1.5, 3, 0.2).finished(), 1.0, 1.0);
  const Eigen::Vector2d x(0.4, 1.3);
  const Eigen::Matrix2d a = efim_rnl(net, x);
  const Eigen::Matrix2d b = efim_rnl_bistatic(net, x);
  CHECK(close(a, b, 1e-12 * a.cwiseAbs().maxCoeff()));
  CHECK(std::abs(a(0, 1) - a(1, 0)) <= 1e-15 * a.norm());
}

TEST_CASE("speb is homogeneous of degree -1 in power") {
  const SpebScene s = SpebScene::direct(Eigen::Vector3d(0.1, 1.9, 4.0), Eigen::Vector3d(1, 2, 0.5));
  const Eigen::Vector3d x(0.3, 0.9, 1.2);
  for (double c : {1e-3, 0.5, 7.0, 1e3}) {
    CHECK(speb(efim(s, c * x)) == doctest::Approx(speb(efim(s, x)) / c).epsilon(1e-12));
  }
}
