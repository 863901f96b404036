#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace locopt {

// ||A v + b|| <= g^T v + h
struct SocConstraint {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd g;
  double h = 0.0;
};

// f^T v <= e
struct LinearConstraint {
  Eigen::VectorXd f;
  double e = 0.0;
};

// minimize c^T v subject to second-order cone, linear and sign constraints.
//
// Constraint order used for slacks and multipliers everywhere: the masked
// nonnegativity rows (in variable order), then linear rows, then one block of
// 1 + rows(A) entries per cone (head first).
class ConeProgram {
 public:
  explicit ConeProgram(Eigen::VectorXd objective);

  void add_soc(SocConstraint con);
  void add_linear(LinearConstraint con);
  void set_nonneg(Eigen::Index i, bool on = true);
  void set_all_nonneg();

  Eigen::Index num_variables() const { return c_.size(); }
  const Eigen::VectorXd& objective() const { return c_; }
  const std::vector<SocConstraint>& socs() const { return socs_; }
  const std::vector<LinearConstraint>& linear() const { return linear_; }
  const std::vector<bool>& nonneg() const { return nonneg_; }
  Eigen::Index num_nonneg() const;
  // Total length of the slack / multiplier vectors.
  Eigen::Index num_rows() const;

  // Throws std::invalid_argument on inconsistent sizes or non-finite data.
  void validate() const;

 private:
  Eigen::VectorXd c_;
  std::vector<SocConstraint> socs_;
  std::vector<LinearConstraint> linear_;
  std::vector<bool> nonneg_;
};

enum class SolveStatus { optimal, primal_infeasible, dual_infeasible, max_iterations, numerical_failure };

std::string_view to_string(SolveStatus s);

struct SolverSettings {
  double tol = 1e-8;
  int max_iter = 200;
  double step_backoff = 0.99;
  bool verbose = false;
};

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

struct Solution {
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::VectorXd v;      // primal point, or an improving ray when dual_infeasible
  Eigen::VectorXd slack;  // constraint slacks s, in constraint order
  Eigen::VectorXd dual;   // multipliers z, or the Farkas vector when primal_infeasible
  double objective_value = 0.0;
  int iterations = 0;
  Residuals residuals;
};

Solution solve(const ConeProgram& prog, const SolverSettings& settings = {});

// Optimality and certificate checks recomputed from the program data.
struct KktReport {
  double primal = 0.0;        // ||G v + s - h|| relative to the size of its terms
  double primal_abs = 0.0;    // same, unnormalized (max norm)
  double dual = 0.0;          // ||c + G^T z|| relative
  double complementarity = 0.0;  // s^T z relative to the objective scale
  double gap = 0.0;           // |c^T v + h^T z| relative to the objective scale
  double cone_violation = 0.0;   // distance of s and z outside their cones
  double max_violation = 0.0;    // largest constraint violation of v alone
  Eigen::VectorXd constraint_slack;  // per constraint: rhs - lhs (negative when violated)
  bool certificate_valid = false;
  double certificate_residual = 0.0;

  double worst() const;
};

KktReport check_kkt(const ConeProgram& prog, const Solution& sol);

// Plain-text dump: header line, objective, then one "i j value" triplet per
// nonzero of G followed by h, in constraint order.
void write_triplets(const ConeProgram& prog, std::ostream& os);

}  // namespace locopt
