#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "locopt/conic.hpp"
#include "locopt/netmodel.hpp"

namespace locopt {

struct Circle {
  Point center;
  double radius = 0.0;
};

// A link whose direction angle lies within angle +- half_width and whose
// effective ranging coefficient lies in [xi_lo, xi_hi]. Its power is x[column].
struct UncertainLink {
  int column = 0;
  double angle = 0.0;
  double half_width = 0.0;
  double xi_lo = 0.0;
  double xi_hi = 0.0;
};

// All links seen from one circle of the cover.
struct CoverCircle {
  Circle circle;
  std::vector<UncertainLink> links;
};

enum class NetworkKind { wnl, rnl };

struct UncertaintyCover {
  NetworkKind kind = NetworkKind::wnl;
  int num_columns = 0;
  std::vector<std::vector<CoverCircle>> agents;  // [agent or target][circle]
  Eigen::VectorXd requirements;
  std::optional<Eigen::VectorXd> caps;
};

// Interval bounds on the channel coefficients; defaults to the nominal values.
struct ChannelBounds {
  Eigen::MatrixXd lo, hi;
};

// One circle of radius delta around each nominal agent position.
std::vector<std::vector<Circle>> single_circle_cover(const WirelessNetwork& net, double delta);

// Circles of the given radius on a hexagonal lattice whose union contains the
// rectangle [lo, hi].
std::vector<Circle> hex_cover(const Point& lo, const Point& hi, double radius);

UncertaintyCover derive_intervals_wnl(const WirelessNetwork& net, const std::vector<std::vector<Circle>>& circles,
                                      const std::optional<ChannelBounds>& zeta = std::nullopt);
UncertaintyCover derive_intervals_rnl(const RadarNetwork& net, const std::vector<Circle>& circles,
                                      const std::optional<ChannelBounds>& zeta = std::nullopt);

struct Cos2Range {
  double min = 0.0;
  double max = 0.0;
};
// Range of cos^2 over [lo, hi].
Cos2Range cos2_range(double lo, double hi);

// Worst-case SPEB over a circle, evaluated on a dense grid of projection
// angles and refined by golden-section search around the best grid point.
double worst_case_speb_oracle(const CoverCircle& cc, const Eigen::VectorXd& x, int theta_grid_size = 100000);
// S(y) of the same search, with y = xi_lo * x per link.
double worst_projection(const CoverCircle& cc, const Eigen::VectorXd& x, int theta_grid_size = 100000);

// Largest oracle value over the circles of each agent.
std::vector<double> worst_case_spebs(const UncertaintyCover& cover, const Eigen::VectorXd& x,
                                     int theta_grid_size = 100000);

struct BoundVectors {
  Eigen::VectorXd theta;  // (2m + 1) pi / M
  Eigen::MatrixXd h;      // M x links
  Eigen::MatrixXd g;      // h / cos(pi / M)
};

BoundVectors bound_vectors(const CoverCircle& cc, int M);

struct SpebBounds {
  double lower = 0.0;
  double upper = 0.0;
  double B = 1.0;
  bool valid = false;  // M >= pi sqrt(B)
};

SpebBounds speb_bounds_eval(const CoverCircle& cc, const Eigen::VectorXd& x, int M, int theta_grid_size = 100000);

// Throws std::domain_error unless M > pi sqrt(B).
double gap_constant(double B, int M);

// Smallest M satisfying M >= pi sqrt(B).
int min_valid_M(double B);

enum class BoundVariant { upper, lower };

ConeProgram build_robust_socp_asymptotic(const UncertaintyCover& cover, int M, BoundVariant variant);

struct TildeVectors {
  Eigen::VectorXd c_hat, s_hat, c_tilde, s_tilde;  // per link
};

TildeVectors tilde_vectors(const CoverCircle& cc);

ConeProgram build_robust_socp_efficient_wnl(const UncertaintyCover& cover);
ConeProgram build_robust_socp_efficient_rnl(const UncertaintyCover& cover);

// Transmitters whose lower coefficients vanish for every receiver.
std::vector<int> degenerate_columns(const UncertaintyCover& cover);

enum class RobustMethod { asymptotic_upper, asymptotic_lower, efficient };

struct RobustResult {
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::VectorXd x;
  double total_power = 0.0;
  std::vector<double> worst_speb;  // oracle, per agent
  bool bounds_valid = true;        // asymptotic builds: M >= pi sqrt(B) at the solution
  int recommended_M = 0;
  std::vector<std::string> warnings;
  Solution solution;
};

RobustResult solve_robust(const UncertaintyCover& cover, RobustMethod method, int M = 64,
                          const SolverSettings& settings = {}, int theta_grid_size = 100000);

}  // namespace locopt
