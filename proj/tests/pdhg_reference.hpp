#pragma once

#include <cmath>
#include <vector>

#include "locopt/conic.hpp"

namespace locopt::testing {

// Diagonally preconditioned primal-dual projection iteration on
//   min c^T v  s.t.  h - G v in K,
// used as an independent reference for the interior-point solver.
struct ReferenceResult {
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

inline void project_soc(Eigen::Ref<Eigen::VectorXd> v) {
  const double t = v[0];
  const double r = v.tail(v.size() - 1).norm();
  if (r <= t) return;
  if (r <= -t) {
    v.setZero();
    return;
  }
  const double a = 0.5 * (t + r);
  v[0] = a;
  v.tail(v.size() - 1) *= a / r;
}

inline ReferenceResult pdhg_reference(const ConeProgram& p, int max_iter, double tol) {
  const Eigen::Index n = p.num_variables();
  const Eigen::Index m = p.num_rows();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(m);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (p.nonneg()[static_cast<std::size_t>(i)]) {
      G(r, i) = -1.0;
      blocks.push_back({r++, 1});
    }
  }
  for (const auto& l : p.linear()) {
    G.row(r) = l.f.transpose();
    h[r] = l.e;
    blocks.push_back({r++, 1});
  }
  const Eigen::Index first_soc = static_cast<Eigen::Index>(blocks.size());
  for (const auto& s : p.socs()) {
    G.row(r) = -s.g.transpose();
    h[r] = s.h;
    G.middleRows(r + 1, s.A.rows()) = -s.A;
    h.segment(r + 1, s.A.rows()) = s.b;
    blocks.push_back({r, 1 + s.A.rows()});
    r += 1 + s.A.rows();
  }
  const Eigen::VectorXd& c = p.objective();

  Eigen::VectorXd tau(n), sigma(m);
  for (Eigen::Index j = 0; j < n; ++j) tau[j] = 1.0 / std::max(G.col(j).cwiseAbs().sum(), 1e-12);
  for (const auto& [st, len] : blocks) {
    double s = 0.0;
    for (Eigen::Index i = st; i < st + len; ++i) s = std::max(s, G.row(i).cwiseAbs().sum());
    sigma.segment(st, len).setConstant(1.0 / std::max(s, 1e-12));
  }

  auto project = [&](Eigen::VectorXd& z) {
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto [st, len] = blocks[b];
      if (static_cast<Eigen::Index>(b) < first_soc) {
        z[st] = std::max(z[st], 0.0);
      } else {
        project_soc(z.segment(st, len));
      }
    }
  };
  auto cone_dist = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd pv = v;
    project(pv);
    return (pv - v).norm();
  };

  Eigen::VectorXd v = Eigen::VectorXd::Zero(n), z = Eigen::VectorXd::Zero(m);
  ReferenceResult out;
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd vn = v - tau.cwiseProduct(c + G.transpose() * z);
    Eigen::VectorXd zn = z + sigma.cwiseProduct(G * (2.0 * vn - v) - h);
    project(zn);
    v = vn;
    z = zn;
    if (it % 200 == 0) {
      const double pobj = c.dot(v);
      const double dobj = -h.dot(z);
      const double pres = cone_dist(h - G * v) / (1.0 + h.norm());
      const double dres = (c + G.transpose() * z).norm() / (1.0 + c.norm());
      const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
      out.objective = pobj;
      out.iterations = it;
      if (pres < tol && dres < tol && gap < tol) {
        out.converged = true;
        break;
      }
    }
  }
  return out;
}

}  // namespace locopt::testing
