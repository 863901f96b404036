#include "locopt/allocate.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace locopt {

InfoRows info_rows(const std::vector<InfoTerm>& terms, int num_vars) {
  InfoRows r;
  r.total = Eigen::VectorXd::Zero(num_vars);
  r.cos2 = Eigen::VectorXd::Zero(num_vars);
  r.sin2 = Eigen::VectorXd::Zero(num_vars);
  for (const auto& t : terms) {
    const double c = t.weight * std::cos(2.0 * t.angle);
    const double s = t.weight * std::sin(2.0 * t.angle);
    if (t.column < 0) {
      r.total0 += t.weight;
      r.cos0 += c;
      r.sin0 += s;
    } else {
      if (t.column >= num_vars) throw std::out_of_range("info_rows: column index");
      r.total[t.column] += t.weight;
      r.cos2[t.column] += c;
      r.sin2[t.column] += s;
    }
  }
  return r;
}

std::vector<InfoTerm> scene_terms(const SpebScene& scene) {
  std::vector<InfoTerm> terms;
  terms.reserve(static_cast<std::size_t>(scene.size()));
  for (int i = 0; i < scene.size(); ++i) terms.push_back({scene.columns[i], scene.angles[i], scene.ercs[i]});
  return terms;
}

void add_requirement_cone(ConeProgram& prog, const Eigen::MatrixXd& rows, const Eigen::VectorXd& consts,
                          const Eigen::VectorXd& total, double total0, double rho) {
  if (!(rho > 0.0)) throw std::domain_error("requirement must be positive");
  const Eigen::Index n = prog.num_variables();
  SocConstraint con;
  con.A = Eigen::MatrixXd::Zero(rows.rows() + 1, n);
  con.A.topRows(rows.rows()) = rows;
  con.b = Eigen::VectorXd::Zero(rows.rows() + 1);
  con.b.head(rows.rows()) = consts;
  con.b[rows.rows()] = 2.0 / rho;
  con.g = total;
  con.h = total0 - 2.0 / rho;
  prog.add_soc(std::move(con));
}

std::array<InfoTerm, 2> decompose_efim(const Eigen::Matrix2d& J, int column) {
  if (!J.allFinite()) throw std::domain_error("decompose_efim: non-finite matrix");
  const double a = J(0, 0);
  const double d = J(1, 1);
  const double b = J(0, 1);
  const double scale = std::max({std::abs(a), std::abs(d), std::abs(b)});
  if (std::abs(J(0, 1) - J(1, 0)) > 1e-12 * scale) throw std::domain_error("decompose_efim: not symmetric");
  const double mid = 0.5 * (a + d);
  const double rad = std::hypot(0.5 * (a - d), b);
  double mu1 = mid + rad;
  double mu2 = mid - rad;
  if (mu2 < -1e-12 * std::max(scale, std::numeric_limits<double>::min())) {
    throw std::domain_error("decompose_efim: matrix is not PSD");
  }
  mu2 = std::max(mu2, 0.0);
  mu1 = std::max(mu1, 0.0);
  const double theta = 0.5 * std::atan2(2.0 * b, a - d);
  return {InfoTerm{column, wrap_angle(theta), mu1},
          InfoTerm{column, wrap_angle(theta + 0.5 * std::numbers::pi), mu2}};
}

namespace {

void add_caps(ConeProgram& prog, const std::optional<Eigen::VectorXd>& caps) {
  if (!caps) return;
  const Eigen::Index n = caps->size();
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(prog.num_variables());
    f[j] = 1.0;
    prog.add_linear({std::move(f), (*caps)[j]});
  }
}

void add_terms_cone(ConeProgram& prog, const std::vector<InfoTerm>& terms, double rho) {
  const InfoRows r = info_rows(terms, static_cast<int>(prog.num_variables()));
  Eigen::MatrixXd rows(2, prog.num_variables());
  rows.row(0) = r.cos2.transpose();
  rows.row(1) = r.sin2.transpose();
  add_requirement_cone(prog, rows, Eigen::Vector2d(r.cos0, r.sin0), r.total, r.total0, rho);
}

AllocationResult finish(const Solution& sol, int n) {
  AllocationResult out;
  out.status = sol.status;
  out.solution = sol;
  if (sol.status == SolveStatus::optimal) {
    out.x = sol.v.head(n).cwiseMax(0.0);
    out.total_power = out.x.sum();
  }
  return out;
}

}  // namespace

ConeProgram build_min_power_wnl(const WirelessNetwork& net) {
  const int nb = net.num_anchors();
  ConeProgram prog(Eigen::VectorXd::Ones(nb));
  prog.set_all_nonneg();
  add_caps(prog, net.caps());
  for (int k = 0; k < net.num_agents(); ++k) {
    add_terms_cone(prog, scene_terms(scene_wnl(net, k)), net.requirements()[k]);
  }
  return prog;
}

ConeProgram build_min_power_rnl(const RadarNetwork& net) {
  const int nt = net.num_tx();
  ConeProgram prog(Eigen::VectorXd::Ones(nt));
  prog.set_all_nonneg();
  add_caps(prog, net.caps());
  add_terms_cone(prog, scene_terms(scene_rnl(net)), net.requirement());
  return prog;
}

ConeProgram build_minmax_wnl(const WirelessNetwork& net, double p_total) {
  if (!(p_total > 0.0) || !std::isfinite(p_total)) throw std::domain_error("total power must be positive");
  const int nb = net.num_anchors();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nb + 1);
  c[nb] = -1.0;
  ConeProgram prog(c);
  prog.set_all_nonneg();
  add_caps(prog, net.caps());
  Eigen::VectorXd f = Eigen::VectorXd::Ones(nb + 1);
  f[nb] = 0.0;
  prog.add_linear({f, p_total});
  for (int k = 0; k < net.num_agents(); ++k) {
    const InfoRows r = info_rows(scene_terms(scene_wnl(net, k)), nb + 1);
    // ||(c^T y, s^T y, 2q)|| <= 1^T y - 2q
    SocConstraint con;
    con.A = Eigen::MatrixXd::Zero(3, nb + 1);
    con.A.row(0) = r.cos2.transpose();
    con.A.row(1) = r.sin2.transpose();
    con.A(2, nb) = 2.0;
    con.b = Eigen::Vector3d::Zero();
    con.g = r.total;
    con.g[nb] = -2.0;
    con.h = 0.0;
    prog.add_soc(std::move(con));
  }
  return prog;
}

PriorKnowledge nominal_knowledge(const WirelessNetwork& net) {
  PriorKnowledge know;
  know.prior.assign(static_cast<std::size_t>(net.num_agents()), Eigen::Matrix2d::Zero());
  know.links.resize(static_cast<std::size_t>(net.num_agents()));
  for (int k = 0; k < net.num_agents(); ++k) {
    for (int j = 0; j < net.num_anchors(); ++j) {
      know.links[k].push_back(net.erc(k, j) * direction_matrix(net.link(k, j).angle));
    }
  }
  return know;
}

ConeProgram build_min_power_wnl_prior(const WirelessNetwork& net, const PriorKnowledge& know) {
  const int nb = net.num_anchors();
  const auto na = static_cast<std::size_t>(net.num_agents());
  if (know.prior.size() != na || know.links.size() != na) {
    throw DimensionMismatch("prior knowledge: one entry per agent expected");
  }
  ConeProgram prog(Eigen::VectorXd::Ones(nb));
  prog.set_all_nonneg();
  add_caps(prog, net.caps());
  for (std::size_t k = 0; k < na; ++k) {
    if (know.links[k].size() != static_cast<std::size_t>(nb)) {
      throw DimensionMismatch("prior knowledge: one link matrix per anchor expected");
    }
    std::vector<InfoTerm> terms;
    for (int j = 0; j < nb; ++j) {
      for (const auto& t : decompose_efim(know.links[k][j], j)) terms.push_back(t);
    }
    for (const auto& t : decompose_efim(know.prior[k], -1)) terms.push_back(t);
    add_terms_cone(prog, terms, net.requirements()[k]);
  }
  return prog;
}

std::vector<double> agent_spebs(const WirelessNetwork& net, const Eigen::VectorXd& x) {
  std::vector<double> out;
  for (int k = 0; k < net.num_agents(); ++k) out.push_back(speb(efim_wnl(net, k, x)));
  return out;
}

double uniform_min_power(const WirelessNetwork& net) {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(net.num_anchors());
  double t = 0.0;
  for (int k = 0; k < net.num_agents(); ++k) {
    const double p = speb(efim_wnl(net, k, ones));
    if (!std::isfinite(p)) {
      throw InfeasibleRequirement("agent " + std::to_string(k) + " has no finite bound under uniform power");
    }
    t = std::max(t, p / net.requirements()[k]);
  }
  return t;
}

double uniform_min_power(const RadarNetwork& net) {
  const double p = speb(efim_rnl(net, Eigen::VectorXd::Ones(net.num_tx())));
  if (!std::isfinite(p)) throw InfeasibleRequirement("target has no finite bound under uniform power");
  return p / net.requirement();
}

AllocationResult solve_min_power(const WirelessNetwork& net, const SolverSettings& settings) {
  AllocationResult out = finish(solve(build_min_power_wnl(net), settings), net.num_anchors());
  if (out.status == SolveStatus::optimal) out.speb = agent_spebs(net, out.x);
  return out;
}

AllocationResult solve_min_power(const RadarNetwork& net, const SolverSettings& settings) {
  AllocationResult out = finish(solve(build_min_power_rnl(net), settings), net.num_tx());
  if (out.status == SolveStatus::optimal) out.speb = {speb(efim_rnl(net, out.x))};
  return out;
}

MinmaxResult solve_minmax(const WirelessNetwork& net, double p_total, const SolverSettings& settings) {
  const Solution sol = solve(build_minmax_wnl(net, p_total), settings);
  MinmaxResult out;
  out.status = sol.status;
  out.solution = sol;
  if (sol.status == SolveStatus::optimal) {
    const int nb = net.num_anchors();
    out.x = sol.v.head(nb).cwiseMax(0.0);
    out.inverse_speb = sol.v[nb];
    out.speb = agent_spebs(net, out.x);
  }
  return out;
}

}  // namespace locopt
