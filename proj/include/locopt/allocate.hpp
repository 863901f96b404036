#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "locopt/conic.hpp"
#include "locopt/fisher.hpp"
#include "locopt/netmodel.hpp"

namespace locopt {

// weight * J_r(angle), scaled by x[column]; a negative column marks a term
// that does not depend on the allocation.
struct InfoTerm {
  int column = -1;
  double angle = 0.0;
  double weight = 0.0;
};

// Linear pieces of an EFIM in the (trace, cos 2phi, sin 2phi) coordinates:
// 1^T y, c^T y, s^T y as rows over the decision vector plus constant parts.
struct InfoRows {
  Eigen::VectorXd total, cos2, sin2;
  double total0 = 0.0, cos0 = 0.0, sin0 = 0.0;
};

InfoRows info_rows(const std::vector<InfoTerm>& terms, int num_vars);
std::vector<InfoTerm> scene_terms(const SpebScene& scene);

// ||(rows v + consts, 2/rho)|| <= total^T v + total0 - 2/rho, i.e. SPEB <= rho
// when rows hold the cos/sin functionals.
void add_requirement_cone(ConeProgram& prog, const Eigen::MatrixXd& rows, const Eigen::VectorXd& consts,
                          const Eigen::VectorXd& total, double total0, double rho);

// Splits a 2x2 PSD matrix into mu1 J_r(theta) + mu2 J_r(theta + pi/2).
// Throws std::domain_error when J is not symmetric PSD.
std::array<InfoTerm, 2> decompose_efim(const Eigen::Matrix2d& J, int column);

// minimize 1^T x  s.t.  SPEB_k(x) <= rho_k for every agent, 0 <= x <= caps.
ConeProgram build_min_power_wnl(const WirelessNetwork& net);
ConeProgram build_min_power_rnl(const RadarNetwork& net);

// Variables [x; q]: maximize q  s.t.  SPEB_k(x) <= 1/q,  1^T x <= p_total.
// The best common requirement is 1/q*.
ConeProgram build_minmax_wnl(const WirelessNetwork& net, double p_total);

// Prior information J0 per agent and arbitrary per-link information matrices
// links[k][j] (per unit power). The prior enters as an affine offset.
struct PriorKnowledge {
  std::vector<Eigen::Matrix2d> prior;
  std::vector<std::vector<Eigen::Matrix2d>> links;
};

// Link matrices xi_kj J_r(phi_kj) of the network, with zero priors.
PriorKnowledge nominal_knowledge(const WirelessNetwork& net);
ConeProgram build_min_power_wnl_prior(const WirelessNetwork& net, const PriorKnowledge& know);

// Smallest t with SPEB_k(t 1) <= rho_k for all k. Throws InfeasibleRequirement
// when the all-ones allocation leaves some agent without a finite bound.
double uniform_min_power(const WirelessNetwork& net);
double uniform_min_power(const RadarNetwork& net);

struct AllocationResult {
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::VectorXd x;
  double total_power = 0.0;
  std::vector<double> speb;  // per agent, under x
  Solution solution;
};

AllocationResult solve_min_power(const WirelessNetwork& net, const SolverSettings& settings = {});
AllocationResult solve_min_power(const RadarNetwork& net, const SolverSettings& settings = {});

struct MinmaxResult {
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::VectorXd x;
  double inverse_speb = 0.0;  // q*
  std::vector<double> speb;
  Solution solution;
};

MinmaxResult solve_minmax(const WirelessNetwork& net, double p_total, const SolverSettings& settings = {});

// Per-agent SPEB of an allocation.
std::vector<double> agent_spebs(const WirelessNetwork& net, const Eigen::VectorXd& x);

}  // namespace locopt
