#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "locopt/errors.hpp"

namespace locopt {

using Point = Eigen::Vector2d;

// Direction and length of the segment between two nodes.
struct Bearing {
  double angle = 0.0;  // in [0, 2*pi), counter-clockwise from +x
  double distance = 0.0;
};

// Wraps an angle into [0, 2*pi).
double wrap_angle(double a);

// Bearing from `from` towards `to`. Throws DegenerateGeometry for coincident points.
Bearing geometry(const Point& from, const Point& to);

// Effective ranging coefficient of an active link.
double erc_wnl(double zeta, double distance, double beta);

// Effective ranging coefficient of a passive (bistatic) link between
// receiver k and transmitter j, given their bearings from the target.
double erc_rnl(double zeta, double d_rx, double d_tx, double psi, double varphi, double beta);

// Anchors transmit ranging signals to agents. rc(k, j) is the ranging
// channel coefficient between agent k and anchor j.
class WirelessNetwork {
 public:
  WirelessNetwork(std::vector<Point> anchors, std::vector<Point> agents, Eigen::MatrixXd rc,
                  double beta, Eigen::VectorXd requirements,
                  std::optional<Eigen::VectorXd> caps = std::nullopt);

  int num_anchors() const { return static_cast<int>(anchors_.size()); }
  int num_agents() const { return static_cast<int>(agents_.size()); }
  const std::vector<Point>& anchors() const { return anchors_; }
  const std::vector<Point>& agents() const { return agents_; }
  const Eigen::MatrixXd& rc() const { return rc_; }
  double beta() const { return beta_; }
  const Eigen::VectorXd& requirements() const { return requirements_; }
  const std::optional<Eigen::VectorXd>& caps() const { return caps_; }

  // Bearing from agent k to anchor j.
  Bearing link(int k, int j) const { return geometry(agents_[k], anchors_[j]); }
  double erc(int k, int j) const;

  WirelessNetwork with_requirements(Eigen::VectorXd rho) const;
  WirelessNetwork with_caps(std::optional<Eigen::VectorXd> caps) const;

 private:
  std::vector<Point> anchors_;
  std::vector<Point> agents_;
  Eigen::MatrixXd rc_;
  double beta_;
  Eigen::VectorXd requirements_;
  std::optional<Eigen::VectorXd> caps_;
};

// Transmitters illuminate a single target, receivers pick up the echoes.
// rc(k, j) is the channel coefficient of the path tx j -> target -> rx k.
class RadarNetwork {
 public:
  RadarNetwork(std::vector<Point> tx, std::vector<Point> rx, Point target, Eigen::MatrixXd rc,
               double beta, double requirement, std::optional<Eigen::VectorXd> caps = std::nullopt);

  int num_tx() const { return static_cast<int>(tx_.size()); }
  int num_rx() const { return static_cast<int>(rx_.size()); }
  const std::vector<Point>& tx() const { return tx_; }
  const std::vector<Point>& rx() const { return rx_; }
  const Point& target() const { return target_; }
  const Eigen::MatrixXd& rc() const { return rc_; }
  double beta() const { return beta_; }
  double requirement() const { return requirement_; }
  const std::optional<Eigen::VectorXd>& caps() const { return caps_; }

  Bearing tx_bearing(int j) const { return geometry(target_, tx_[j]); }
  Bearing rx_bearing(int k) const { return geometry(target_, rx_[k]); }
  double erc(int k, int j) const;
  // Direction of the bistatic information ellipse for the pair (rx k, tx j).
  double link_angle(int k, int j) const;

  RadarNetwork with_requirement(double rho) const;
  RadarNetwork with_caps(std::optional<Eigen::VectorXd> caps) const;

 private:
  std::vector<Point> tx_;
  std::vector<Point> rx_;
  Point target_;
  Eigen::MatrixXd rc_;
  double beta_;
  double requirement_;
  std::optional<Eigen::VectorXd> caps_;
};

// Throws std::domain_error unless x has length n and is entrywise nonnegative.
void check_allocation(const Eigen::VectorXd& x, int n);

}  // namespace locopt
