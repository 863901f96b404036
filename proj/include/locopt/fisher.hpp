#pragma once

#include <vector>

#include <Eigen/Dense>

#include "locopt/netmodel.hpp"

namespace locopt {

// u(phi) u(phi)^T with u(phi) = [cos phi, sin phi]^T.
Eigen::Matrix2d direction_matrix(double phi);

// Information terms of one position estimate. Entry i contributes
// ercs[i] * x[columns[i]] * direction_matrix(angles[i]).
struct SpebScene {
  Eigen::VectorXd angles;
  Eigen::VectorXd ercs;
  std::vector<int> columns;
  int num_columns = 0;

  // One term per column, in order.
  static SpebScene direct(Eigen::VectorXd angles, Eigen::VectorXd ercs);
  int size() const { return static_cast<int>(angles.size()); }
};

SpebScene scene_wnl(const WirelessNetwork& net, int k);
// Flattened over (rx k, tx j) pairs, k-major; columns index transmitters.
SpebScene scene_rnl(const RadarNetwork& net);

// Equivalent Fisher information matrix of the scene under allocation x.
Eigen::Matrix2d efim(const SpebScene& scene, const Eigen::VectorXd& x);

Eigen::Matrix2d efim_wnl(const WirelessNetwork& net, int k, const Eigen::VectorXd& x);
// Sum over pairs of x_j xi_kj J_r(phi_kj).
Eigen::Matrix2d efim_rnl(const RadarNetwork& net, const Eigen::VectorXd& x);
// Same matrix assembled from the per-pair bistatic vectors u(psi_k) + u(varphi_j).
Eigen::Matrix2d efim_rnl_bistatic(const RadarNetwork& net, const Eigen::VectorXd& x);

// Squared position error bound tr(J^{-1}). Returns +inf when J is numerically
// singular. Throws std::domain_error for matrices that are not symmetric PSD.
double speb(const Eigen::Matrix2d& J);

// Lambda_ij = 2 sin^2(phi_i - phi_j).
Eigen::MatrixXd topology_matrix(const Eigen::VectorXd& angles);

// SPEB written as 4 1^T R x / (x^T R^T Lambda R x), with R the diagonal of ercs
// acting on the columns of x.
double speb_fractional(const SpebScene& scene, const Eigen::VectorXd& x);

}  // namespace locopt
