#include "locopt/fisher.hpp"

#include <cmath>
#include <limits>

namespace locopt {

namespace {

Eigen::VectorXd weighted(const SpebScene& scene, const Eigen::VectorXd& x) {
  check_allocation(x, scene.num_columns);
  Eigen::VectorXd y(scene.size());
  for (int i = 0; i < scene.size(); ++i) y[i] = scene.ercs[i] * x[scene.columns[i]];
  return y;
}

}  // namespace

Eigen::Matrix2d direction_matrix(double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Eigen::Matrix2d m;
  m << c * c, c * s, c * s, s * s;
  return m;
}

SpebScene SpebScene::direct(Eigen::VectorXd angles, Eigen::VectorXd ercs) {
  if (angles.size() != ercs.size()) throw DimensionMismatch("scene: angles and ercs differ in length");
  SpebScene s;
  s.num_columns = static_cast<int>(angles.size());
  s.columns.resize(angles.size());
  for (int i = 0; i < s.num_columns; ++i) s.columns[i] = i;
  s.angles = std::move(angles);
  s.ercs = std::move(ercs);
  return s;
}

SpebScene scene_wnl(const WirelessNetwork& net, int k) {
  if (k < 0 || k >= net.num_agents()) throw std::out_of_range("scene_wnl: agent index");
  const int nb = net.num_anchors();
  Eigen::VectorXd angles(nb), ercs(nb);
  for (int j = 0; j < nb; ++j) {
    angles[j] = net.link(k, j).angle;
    ercs[j] = net.erc(k, j);
  }
  return SpebScene::direct(std::move(angles), std::move(ercs));
}

SpebScene scene_rnl(const RadarNetwork& net) {
  const int nr = net.num_rx();
  const int nt = net.num_tx();
  SpebScene s;
  s.num_columns = nt;
  s.angles.resize(nr * nt);
  s.ercs.resize(nr * nt);
  s.columns.resize(nr * nt);
  for (int k = 0; k < nr; ++k) {
    for (int j = 0; j < nt; ++j) {
      const int i = k * nt + j;
      s.angles[i] = net.link_angle(k, j);
      s.ercs[i] = net.erc(k, j);
      s.columns[i] = j;
    }
  }
  return s;
}

Eigen::Matrix2d efim(const SpebScene& scene, const Eigen::VectorXd& x) {
  const Eigen::VectorXd y = weighted(scene, x);
  Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
  for (int i = 0; i < scene.size(); ++i) J += y[i] * direction_matrix(scene.angles[i]);
  return J;
}

Eigen::Matrix2d efim_wnl(const WirelessNetwork& net, int k, const Eigen::VectorXd& x) {
  return efim(scene_wnl(net, k), x);
}

Eigen::Matrix2d efim_rnl(const RadarNetwork& net, const Eigen::VectorXd& x) {
  return efim(scene_rnl(net), x);
}

Eigen::Matrix2d efim_rnl_bistatic(const RadarNetwork& net, const Eigen::VectorXd& x) {
  check_allocation(x, net.num_tx());
  const double two_beta = 2.0 * net.beta();
  Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
  for (int j = 0; j < net.num_tx(); ++j) {
    const Bearing t = net.tx_bearing(j);
    Eigen::Matrix2d inner = Eigen::Matrix2d::Zero();
    for (int k = 0; k < net.num_rx(); ++k) {
      const Bearing r = net.rx_bearing(k);
      const Eigen::Vector2d u(std::cos(r.angle) + std::cos(t.angle), std::sin(r.angle) + std::sin(t.angle));
      inner += net.rc()(k, j) / std::pow(r.distance, two_beta) * (u * u.transpose());
    }
    J += x[j] / std::pow(t.distance, two_beta) * inner;
  }
  return J;
}

double speb(const Eigen::Matrix2d& J) {
  if (!J.allFinite()) throw std::domain_error("speb: non-finite matrix");
  const double a = J(0, 0);
  const double d = J(1, 1);
  const double b = 0.5 * (J(0, 1) + J(1, 0));
  const double scale = std::max({std::abs(a), std::abs(d), std::abs(b), std::numeric_limits<double>::min()});
  if (std::abs(J(0, 1) - J(1, 0)) > 1e-12 * scale) throw std::domain_error("speb: matrix is not symmetric");
  const double tr = a + d;
  const double det = a * d - b * b;
  // eigenvalues of a symmetric 2x2 are tr/2 +- sqrt((a-d)^2/4 + b^2)
  const double lmin = 0.5 * tr - std::hypot(0.5 * (a - d), b);
  if (lmin < -1e-12 * std::max(tr, 0.0) || tr < 0.0) throw std::domain_error("speb: matrix is not PSD");
  if (tr <= 0.0 || det <= 1e-12 * 0.25 * tr * tr) return std::numeric_limits<double>::infinity();
  return tr / det;
}

Eigen::MatrixXd topology_matrix(const Eigen::VectorXd& angles) {
  const auto n = angles.size();
  Eigen::MatrixXd L(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    L(i, i) = 0.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double s = std::sin(angles[i] - angles[j]);
      L(i, j) = L(j, i) = 2.0 * s * s;
    }
  }
  return L;
}

double speb_fractional(const SpebScene& scene, const Eigen::VectorXd& x) {
  const Eigen::VectorXd y = weighted(scene, x);
  const double num = 4.0 * y.sum();
  const double den = y.dot(topology_matrix(scene.angles) * y);
  const double total = y.sum();
  if (!(total > 0.0) || den <= 1e-12 * total * total) return std::numeric_limits<double>::infinity();
  return num / den;
}

}  // namespace locopt
