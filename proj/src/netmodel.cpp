#include "locopt/netmodel.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace locopt {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void check_points(const std::vector<Point>& pts, const char* what) {
  for (const auto& p : pts) {
    if (!p.allFinite()) throw std::domain_error(std::string(what) + ": non-finite coordinate");
  }
}

void check_caps(const std::optional<Eigen::VectorXd>& caps, int n) {
  if (!caps) return;
  if (caps->size() != n) throw DimensionMismatch("power caps: expected " + std::to_string(n) + " entries");
  for (double c : *caps) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::domain_error("power caps must be positive and finite");
  }
}

void check_rc(const Eigen::MatrixXd& rc, int rows, int cols) {
  if (rc.rows() != rows || rc.cols() != cols) {
    throw DimensionMismatch("channel coefficients: expected " + std::to_string(rows) + "x" +
                            std::to_string(cols));
  }
  if (!rc.allFinite() || (rc.array() < 0.0).any()) {
    throw std::domain_error("channel coefficients must be nonnegative and finite");
  }
}

void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::domain_error("path-loss exponent must be positive");
}

}  // namespace

double wrap_angle(double a) {
  double r = std::fmod(a, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

Bearing geometry(const Point& from, const Point& to) {
  const Point d = to - from;
  const double dist = d.norm();
  if (!(dist > 0.0)) throw DegenerateGeometry("coincident points have no bearing");
  return {wrap_angle(std::atan2(d.y(), d.x())), dist};
}

double erc_wnl(double zeta, double distance, double beta) {
  if (!(distance > 0.0)) throw std::domain_error("erc_wnl: distance must be positive");
  if (zeta < 0.0) throw std::domain_error("erc_wnl: channel coefficient must be nonnegative");
  check_beta(beta);
  return zeta / std::pow(distance, 2.0 * beta);
}

double erc_rnl(double zeta, double d_rx, double d_tx, double psi, double varphi, double beta) {
  if (!(d_rx > 0.0) || !(d_tx > 0.0)) throw std::domain_error("erc_rnl: distances must be positive");
  if (zeta < 0.0) throw std::domain_error("erc_rnl: channel coefficient must be nonnegative");
  check_beta(beta);
  const double c = std::cos(0.5 * (psi - varphi));
  return 4.0 * zeta / (std::pow(d_rx, 2.0 * beta) * std::pow(d_tx, 2.0 * beta)) * c * c;
}

WirelessNetwork::WirelessNetwork(std::vector<Point> anchors, std::vector<Point> agents,
                                 Eigen::MatrixXd rc, double beta, Eigen::VectorXd requirements,
                                 std::optional<Eigen::VectorXd> caps)
    : anchors_(std::move(anchors)),
      agents_(std::move(agents)),
      rc_(std::move(rc)),
      beta_(beta),
      requirements_(std::move(requirements)),
      caps_(std::move(caps)) {
  if (anchors_.empty() || agents_.empty()) throw std::domain_error("network needs anchors and agents");
  check_points(anchors_, "anchors");
  check_points(agents_, "agents");
  check_rc(rc_, num_agents(), num_anchors());
  check_beta(beta_);
  if (requirements_.size() != num_agents()) throw DimensionMismatch("one requirement per agent expected");
  for (double r : requirements_) {
    if (!(r > 0.0) || !std::isfinite(r)) throw std::domain_error("requirements must be positive");
  }
  check_caps(caps_, num_anchors());
  for (int k = 0; k < num_agents(); ++k) {
    for (int j = 0; j < num_anchors(); ++j) {
      if (!((agents_[k] - anchors_[j]).norm() > 0.0)) {
        throw DegenerateGeometry("agent " + std::to_string(k) + " coincides with anchor " + std::to_string(j));
      }
    }
  }
}

double WirelessNetwork::erc(int k, int j) const {
  return erc_wnl(rc_(k, j), link(k, j).distance, beta_);
}

WirelessNetwork WirelessNetwork::with_requirements(Eigen::VectorXd rho) const {
  return WirelessNetwork(anchors_, agents_, rc_, beta_, std::move(rho), caps_);
}

WirelessNetwork WirelessNetwork::with_caps(std::optional<Eigen::VectorXd> caps) const {
  return WirelessNetwork(anchors_, agents_, rc_, beta_, requirements_, std::move(caps));
}

RadarNetwork::RadarNetwork(std::vector<Point> tx, std::vector<Point> rx, Point target,
                           Eigen::MatrixXd rc, double beta, double requirement,
                           std::optional<Eigen::VectorXd> caps)
    : tx_(std::move(tx)),
      rx_(std::move(rx)),
      target_(std::move(target)),
      rc_(std::move(rc)),
      beta_(beta),
      requirement_(requirement),
      caps_(std::move(caps)) {
  if (tx_.empty() || rx_.empty()) throw std::domain_error("radar network needs transmitters and receivers");
  check_points(tx_, "transmitters");
  check_points(rx_, "receivers");
  if (!target_.allFinite()) throw std::domain_error("target: non-finite coordinate");
  check_rc(rc_, num_rx(), num_tx());
  check_beta(beta_);
  if (!(requirement_ > 0.0) || !std::isfinite(requirement_)) {
    throw std::domain_error("requirement must be positive");
  }
  check_caps(caps_, num_tx());
  for (const auto& p : tx_) {
    if (!((p - target_).norm() > 0.0)) throw DegenerateGeometry("transmitter coincides with target");
  }
  for (const auto& p : rx_) {
    if (!((p - target_).norm() > 0.0)) throw DegenerateGeometry("receiver coincides with target");
  }
}

double RadarNetwork::erc(int k, int j) const {
  const Bearing r = rx_bearing(k);
  const Bearing t = tx_bearing(j);
  return erc_rnl(rc_(k, j), r.distance, t.distance, r.angle, t.angle, beta_);
}

double RadarNetwork::link_angle(int k, int j) const {
  return wrap_angle(0.5 * (rx_bearing(k).angle + tx_bearing(j).angle));
}

RadarNetwork RadarNetwork::with_requirement(double rho) const {
  return RadarNetwork(tx_, rx_, target_, rc_, beta_, rho, caps_);
}

RadarNetwork RadarNetwork::with_caps(std::optional<Eigen::VectorXd> caps) const {
  return RadarNetwork(tx_, rx_, target_, rc_, beta_, requirement_, std::move(caps));
}

void check_allocation(const Eigen::VectorXd& x, int n) {
  if (x.size() != n) throw DimensionMismatch("allocation: expected " + std::to_string(n) + " entries");
  for (double v : x) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::domain_error("allocation must be nonnegative and finite");
  }
}

}  // namespace locopt
