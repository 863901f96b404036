#include "locopt/conic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace locopt {

ConeProgram::ConeProgram(Eigen::VectorXd objective)
    : c_(std::move(objective)), nonneg_(static_cast<std::size_t>(c_.size()), false) {}

void ConeProgram::add_soc(SocConstraint con) {
  if (con.A.cols() != num_variables() || con.g.size() != num_variables() || con.b.size() != con.A.rows()) {
    throw std::invalid_argument("add_soc: dimension mismatch");
  }
  socs_.push_back(std::move(con));
}

void ConeProgram::add_linear(LinearConstraint con) {
  if (con.f.size() != num_variables()) throw std::invalid_argument("add_linear: dimension mismatch");
  linear_.push_back(std::move(con));
}

void ConeProgram::set_nonneg(Eigen::Index i, bool on) {
  if (i < 0 || i >= num_variables()) throw std::out_of_range("set_nonneg: variable index");
  nonneg_[static_cast<std::size_t>(i)] = on;
}

void ConeProgram::set_all_nonneg() { std::fill(nonneg_.begin(), nonneg_.end(), true); }

Eigen::Index ConeProgram::num_nonneg() const {
  return std::count(nonneg_.begin(), nonneg_.end(), true);
}

Eigen::Index ConeProgram::num_rows() const {
  Eigen::Index m = num_nonneg() + static_cast<Eigen::Index>(linear_.size());
  for (const auto& s : socs_) m += 1 + s.A.rows();
  return m;
}

void ConeProgram::validate() const {
  if (!c_.allFinite()) throw std::invalid_argument("cone program: non-finite objective");
  if (num_rows() == 0) throw std::invalid_argument("cone program: no constraints");
  for (const auto& s : socs_) {
    if (s.A.cols() != num_variables() || s.g.size() != num_variables() || s.b.size() != s.A.rows()) {
      throw std::invalid_argument("cone program: cone dimension mismatch");
    }
    if (!s.A.allFinite() || !s.b.allFinite() || !s.g.allFinite() || !std::isfinite(s.h)) {
      throw std::invalid_argument("cone program: non-finite cone data");
    }
  }
  for (const auto& l : linear_) {
    if (l.f.size() != num_variables()) throw std::invalid_argument("cone program: linear row dimension mismatch");
    if (!l.f.allFinite() || !std::isfinite(l.e)) throw std::invalid_argument("cone program: non-finite linear row");
  }
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::primal_infeasible: return "primal_infeasible";
    case SolveStatus::dual_infeasible: return "dual_infeasible";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

double KktReport::worst() const {
  return std::max({primal, dual, complementarity, gap, cone_violation});
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/* Product of a nonnegative orthant of dimension l and second-order cones. */
struct Layout {
  int l = 0;
  std::vector<int> start;
  std::vector<int> dim;
  int m = 0;

  int degree() const { return l + static_cast<int>(dim.size()); }
};

struct Standard {
  MatrixXd G;
  VectorXd h;
  VectorXd c;
  Layout cones;
};

Standard standard_form(const ConeProgram& p) {
  const Eigen::Index n = p.num_variables();
  Standard sf;
  sf.c = p.objective();
  const Eigen::Index m = p.num_rows();
  sf.G = MatrixXd::Zero(m, n);
  sf.h = VectorXd::Zero(m);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (p.nonneg()[static_cast<std::size_t>(i)]) sf.G(r++, i) = -1.0;
  }
  for (const auto& l : p.linear()) {
    sf.G.row(r) = l.f.transpose();
    sf.h[r++] = l.e;
  }
  sf.cones.l = static_cast<int>(r);
  for (const auto& s : p.socs()) {
    sf.cones.start.push_back(static_cast<int>(r));
    sf.cones.dim.push_back(static_cast<int>(1 + s.A.rows()));
    sf.G.row(r) = -s.g.transpose();
    sf.h[r++] = s.h;
    sf.G.middleRows(r, s.A.rows()) = -s.A;
    sf.h.segment(r, s.A.rows()) = s.b;
    r += s.A.rows();
  }
  sf.cones.m = static_cast<int>(m);
  return sf;
}

VectorXd identity(const Layout& K) {
  VectorXd e = VectorXd::Zero(K.m);
  e.head(K.l).setOnes();
  for (int start : K.start) e[start] = 1.0;
  return e;
}

/* Largest amount by which v sits outside the cone (0 when inside). */
double cone_violation(const Layout& K, const VectorXd& v) {
  double worst = 0.0;
  for (int i = 0; i < K.l; ++i) worst = std::max(worst, -v[i]);
  for (std::size_t b = 0; b < K.dim.size(); ++b) {
    const int s = K.start[b];
    const int d = K.dim[b];
    worst = std::max(worst, v.segment(s + 1, d - 1).norm() - v[s]);
  }
  return worst;
}

/* Nesterov-Todd scaling W (symmetric), with W z = W^{-1} s = lambda. */
struct Scaling {
  VectorXd lp;                 // diagonal for the orthant
  std::vector<double> eta, a;  // per cone
  VectorXd q;                  // per cone tail vectors, stored in place
};

bool compute_scaling(const Layout& K, const VectorXd& s, const VectorXd& z, Scaling& W) {
  W.lp.resize(K.l);
  for (int i = 0; i < K.l; ++i) {
    if (!(s[i] > 0.0) || !(z[i] > 0.0)) return false;
    W.lp[i] = std::sqrt(s[i] / z[i]);
  }
  const std::size_t nc = K.dim.size();
  W.eta.resize(nc);
  W.a.resize(nc);
  W.q = VectorXd::Zero(K.m);
  for (std::size_t b = 0; b < nc; ++b) {
    const int st = K.start[b];
    const int d = K.dim[b] - 1;
    const double s0 = s[st];
    const double z0 = z[st];
    const auto s1 = s.segment(st + 1, d);
    const auto z1 = z.segment(st + 1, d);
    const double sres = (s0 - s1.norm()) * (s0 + s1.norm());
    const double zres = (z0 - z1.norm()) * (z0 + z1.norm());
    if (!(sres > 0.0) || !(zres > 0.0) || !(s0 > 0.0) || !(z0 > 0.0)) return false;
    const double sn = std::sqrt(sres);
    const double zn = std::sqrt(zres);
    const double dot = (s0 * z0 + s1.dot(z1)) / (sn * zn);
    const double gamma = std::sqrt(0.5 * (1.0 + dot));
    W.a[b] = (s0 / sn + z0 / zn) / (2.0 * gamma);
    W.q.segment(st + 1, d) = (s1 / sn - z1 / zn) / (2.0 * gamma);
    W.eta[b] = std::sqrt(sn / zn);
  }
  return true;
}

void apply_w(const Layout& K, const Scaling& W, const VectorXd& v, VectorXd& out, bool inverse) {
  out.resize(K.m);
  for (int i = 0; i < K.l; ++i) out[i] = inverse ? v[i] / W.lp[i] : v[i] * W.lp[i];
  for (std::size_t b = 0; b < K.dim.size(); ++b) {
    const int st = K.start[b];
    const int d = K.dim[b] - 1;
    const auto q = W.q.segment(st + 1, d);
    const double a = W.a[b];
    const double v0 = v[st];
    const double zeta = q.dot(v.segment(st + 1, d));
    if (!inverse) {
      out[st] = W.eta[b] * (a * v0 + zeta);
      out.segment(st + 1, d) = W.eta[b] * (v.segment(st + 1, d) + (v0 + zeta / (1.0 + a)) * q);
    } else {
      out[st] = (a * v0 - zeta) / W.eta[b];
      out.segment(st + 1, d) = (v.segment(st + 1, d) + (-v0 + zeta / (1.0 + a)) * q) / W.eta[b];
    }
  }
}

/* Jordan product u o v. */
VectorXd circ(const Layout& K, const VectorXd& u, const VectorXd& v) {
  VectorXd w(K.m);
  w.head(K.l) = u.head(K.l).cwiseProduct(v.head(K.l));
  for (std::size_t b = 0; b < K.dim.size(); ++b) {
    const int st = K.start[b];
    const int d = K.dim[b] - 1;
    w[st] = u.segment(st, d + 1).dot(v.segment(st, d + 1));
    w.segment(st + 1, d) = u[st] * v.segment(st + 1, d) + v[st] * u.segment(st + 1, d);
  }
  return w;
}

/* Solves lambda o v = w for v. */
VectorXd circ_div(const Layout& K, const VectorXd& lambda, const VectorXd& w) {
  VectorXd v(K.m);
  v.head(K.l) = w.head(K.l).cwiseQuotient(lambda.head(K.l));
  for (std::size_t b = 0; b < K.dim.size(); ++b) {
    const int st = K.start[b];
    const int d = K.dim[b] - 1;
    const auto l1 = lambda.segment(st + 1, d);
    const auto w1 = w.segment(st + 1, d);
    const double l0 = lambda[st];
    const double rho = (l0 - l1.norm()) * (l0 + l1.norm());
    const double zeta = l1.dot(w1);
    v[st] = (l0 * w[st] - zeta) / rho;
    v.segment(st + 1, d) = (w1 - v[st] * l1) / l0;
  }
  return v;
}

/* Largest alpha with lambda + alpha d in the cone (lambda interior). */
double max_step(const Layout& K, const VectorXd& lambda, const VectorXd& d) {
  double alpha = std::numeric_limits<double>::infinity();
  for (int i = 0; i < K.l; ++i) {
    if (d[i] < 0.0) alpha = std::min(alpha, -lambda[i] / d[i]);
  }
  for (std::size_t b = 0; b < K.dim.size(); ++b) {
    const int st = K.start[b];
    const int n1 = K.dim[b] - 1;
    const auto l1 = lambda.segment(st + 1, n1);
    const auto d1 = d.segment(st + 1, n1);
    const double l0 = lambda[st];
    const double lk = std::sqrt(std::max((l0 - l1.norm()) * (l0 + l1.norm()), 0.0));
    if (!(lk > 0.0)) return 0.0;
    const double lb0 = l0 / lk;
    const VectorXd lb1 = l1 / lk;
    const double rho0 = (lb0 * d[st] - lb1.dot(d1)) / lk;
    const double factor = (d[st] / lk + rho0) / (lb0 + 1.0);
    const double rho1 = (d1 / lk - factor * lb1).norm();
    const double denom = rho1 - rho0;
    if (denom > 0.0) alpha = std::min(alpha, 1.0 / denom);
  }
  return alpha;
}

/* Reduced Newton system  [0 G^T; G -W^2] [dx; dz] = [bx; bz]  solved through
   the normal matrix (W^{-1}G)^T (W^{-1}G) with a dense Cholesky factor. */
class NewtonSystem {
 public:
  NewtonSystem(const MatrixXd& G, const Layout& K) : G_(G), K_(K) {}

  bool factor(const Scaling& W) {
    W_ = &W;
    Gh_.resize(G_.rows(), G_.cols());
    VectorXd col;
    for (Eigen::Index j = 0; j < G_.cols(); ++j) {
      apply_w(K_, W, G_.col(j), col, true);
      Gh_.col(j) = col;
    }
    MatrixXd H = Gh_.transpose() * Gh_;
    const double diag = std::max(1.0, H.diagonal().maxCoeff());
    for (double reg = 1e-13; reg < 1e-5; reg *= 100.0) {
      MatrixXd Hr = H;
      Hr.diagonal().array() += reg * diag;
      llt_.compute(Hr);
      if (llt_.info() == Eigen::Success) return true;
    }
    return false;
  }

  void solve(const VectorXd& bx, const VectorXd& bz, VectorXd& dx, VectorXd& dz) const {
    solve_once(bx, bz, dx, dz);
    const double bnorm = std::max(bx.norm() + bz.norm(), 1e-300);
    VectorXd wdz, wwdz, ex, ez;
    for (int it = 0; it < 3; ++it) {
      apply_w(K_, *W_, dz, wdz, false);
      apply_w(K_, *W_, wdz, wwdz, false);
      const VectorXd r1 = bx - G_.transpose() * dz;
      const VectorXd r2 = bz - G_ * dx + wwdz;
      if (r1.norm() + r2.norm() <= 1e-15 * bnorm) break;
      solve_once(r1, r2, ex, ez);
      dx += ex;
      dz += ez;
    }
  }

 private:
  void solve_once(const VectorXd& bx, const VectorXd& bz, VectorXd& dx, VectorXd& dz) const {
    VectorXd bzh;
    apply_w(K_, *W_, bz, bzh, true);
    dx = llt_.solve(bx + Gh_.transpose() * bzh);
    const VectorXd wdz = Gh_ * dx - bzh;
    apply_w(K_, *W_, wdz, dz, true);
  }

  const MatrixXd& G_;
  const Layout& K_;
  const Scaling* W_ = nullptr;
  MatrixXd Gh_;
  Eigen::LLT<MatrixXd> llt_;
};

/* Ruiz equilibration with one row factor per cone block, so the scaled
   constraints live in the same cones. */
void equilibrate(const MatrixXd& G, const Layout& K, VectorXd& D, VectorXd& E) {
  const Eigen::Index m = G.rows();
  const Eigen::Index n = G.cols();
  D = VectorXd::Ones(n);
  E = VectorXd::Ones(m);
  MatrixXd Gs = G;
  for (int pass = 0; pass < 12; ++pass) {
    VectorXd dc(n), er(m);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double cm = m > 0 ? Gs.col(j).cwiseAbs().maxCoeff() : 0.0;
      dc[j] = cm > 0.0 ? 1.0 / std::sqrt(cm) : 1.0;
    }
    for (int i = 0; i < K.l; ++i) {
      const double rm = Gs.row(i).cwiseAbs().maxCoeff();
      er[i] = rm > 0.0 ? 1.0 / std::sqrt(rm) : 1.0;
    }
    for (std::size_t b = 0; b < K.dim.size(); ++b) {
      const double rm = Gs.middleRows(K.start[b], K.dim[b]).cwiseAbs().maxCoeff();
      er.segment(K.start[b], K.dim[b]).setConstant(rm > 0.0 ? 1.0 / std::sqrt(rm) : 1.0);
    }
    D = (D.array() * dc.array()).cwiseMax(1e-10).cwiseMin(1e10).matrix();
    E = (E.array() * er.array()).cwiseMax(1e-10).cwiseMin(1e10).matrix();
    Gs = E.asDiagonal() * G * D.asDiagonal();
  }
}

struct Measures {
  Residuals res;
  double pcost = 0.0;
  double dcost = 0.0;
};

Measures measure(const Standard& sf, const VectorXd& x, const VectorXd& s, const VectorXd& z) {
  Measures out;
  const VectorXd Gx = sf.G * x;
  const VectorXd Gtz = sf.G.transpose() * z;
  out.res.primal = (Gx + s - sf.h).norm() / std::max({1.0, sf.h.norm(), Gx.norm(), s.norm()});
  out.res.dual = (Gtz + sf.c).norm() / std::max({1.0, sf.c.norm(), Gtz.norm()});
  out.pcost = sf.c.dot(x);
  out.dcost = -sf.h.dot(z);
  const double g = std::max(std::abs(s.dot(z)), std::abs(out.pcost - out.dcost));
  out.res.gap = g / std::max(1.0, std::abs(out.pcost));
  return out;
}

double certificate_residual(const MatrixXd& G, const VectorXd& zhat) {
  return (G.transpose() * zhat).norm() / std::max(1.0, zhat.norm());
}

}  // namespace

Solution solve(const ConeProgram& prog, const SolverSettings& settings) {
  prog.validate();
  if (!(settings.tol > 0.0) || settings.max_iter <= 0) throw std::invalid_argument("solve: bad settings");
  const Standard sf = standard_form(prog);
  const Layout& K = sf.cones;
  const Eigen::Index n = sf.c.size();
  const double tol = settings.tol;

  Solution sol;
  VectorXd D, E;
  equilibrate(sf.G, K, D, E);
  const MatrixXd G = E.asDiagonal() * sf.G * D.asDiagonal();
  VectorXd h = E.cwiseProduct(sf.h);
  VectorXd c = D.cwiseProduct(sf.c);
  const double hs = std::clamp(h.lpNorm<Eigen::Infinity>() > 0.0 ? h.lpNorm<Eigen::Infinity>() : 1.0, 1e-8, 1e8);
  const double cs = std::clamp(c.lpNorm<Eigen::Infinity>() > 0.0 ? c.lpNorm<Eigen::Infinity>() : 1.0, 1e-8, 1e8);
  h /= hs;
  c /= cs;

  auto unscale_x = [&](const VectorXd& x) -> VectorXd { return D.cwiseProduct(x) * hs; };
  auto unscale_s = [&](const VectorXd& s) -> VectorXd { return s.cwiseQuotient(E) * hs; };
  auto unscale_z = [&](const VectorXd& z) -> VectorXd { return E.cwiseProduct(z) * cs; };

  VectorXd x = VectorXd::Zero(n);
  VectorXd s = identity(K);
  VectorXd z = identity(K);
  double tau = 1.0;
  double kappa = 1.0;
  const VectorXd e = identity(K);
  const double nu = K.degree() + 1.0;

  NewtonSystem kkt(G, K);
  Scaling W;

  struct Best {
    bool set = false;
    double merit = std::numeric_limits<double>::infinity();
    VectorXd x, s, z;
    Residuals res;
    double pcost = 0.0;
  } best;

  auto finish_optimal = [&](const VectorXd& xu, const VectorXd& su, const VectorXd& zu, const Measures& ms,
                            SolveStatus st) {
    sol.status = st;
    sol.v = xu;
    sol.slack = su;
    sol.dual = zu;
    sol.objective_value = ms.pcost;
    sol.residuals = ms.res;
  };

  int iter = 0;
  int stalls = 0;
  for (;; ++iter) {
    const VectorXd xu = unscale_x(x) / tau;
    const VectorXd su = unscale_s(s) / tau;
    const VectorXd zu = unscale_z(z) / tau;
    const Measures ms = measure(sf, xu, su, zu);
    sol.iterations = iter;
    if (settings.verbose) {
      std::fprintf(stderr, "%3d  pcost %+.9e  dcost %+.9e  pres %.2e  dres %.2e  gap %.2e  tau %.2e  kap %.2e\n",
                   iter, ms.pcost, ms.dcost, ms.res.primal, ms.res.dual, ms.res.gap, tau, kappa);
    }
    if (ms.res.primal <= tol && ms.res.dual <= tol && ms.res.gap <= tol) {
      finish_optimal(xu, su, zu, ms, SolveStatus::optimal);
      return sol;
    }
    const double merit = std::max({ms.res.primal, ms.res.dual, ms.res.gap});
    if (merit < best.merit && std::isfinite(merit)) {
      best = {true, merit, xu, su, zu, ms.res, ms.pcost};
    }

    // Infeasibility certificates, tested on the equilibrated data where every
    // column of G has comparable size, then mapped back.
    {
      const double hz = h.dot(z);
      if (hz < -tol * std::max(1.0, z.norm()) && tau < kappa) {
        const VectorXd zhat = z / (-hz);
        if (certificate_residual(G, zhat) <= tol && cone_violation(K, zhat) <= tol * std::max(1.0, zhat.norm())) {
          const VectorXd zr = unscale_z(z);
          sol.status = SolveStatus::primal_infeasible;
          sol.dual = zr / (-sf.h.dot(zr));
          sol.v = VectorXd::Zero(n);
          sol.slack = VectorXd::Zero(K.m);
          sol.residuals = ms.res;
          return sol;
        }
      }
      const double cx = c.dot(x);
      if (cx < -tol * std::max(1.0, x.norm()) && tau < kappa) {
        const VectorXd d = x / (-cx);
        const VectorXd shat = s / (-cx);
        if ((G * d + shat).norm() / std::max(1.0, d.norm()) <= tol) {
          const VectorXd xr = unscale_x(x);
          const double cxr = -sf.c.dot(xr);
          sol.status = SolveStatus::dual_infeasible;
          sol.v = xr / cxr;
          sol.slack = unscale_s(s) / cxr;
          sol.dual = VectorXd::Zero(K.m);
          sol.residuals = ms.res;
          return sol;
        }
      }
    }

    if (iter >= settings.max_iter) {
      sol.status = SolveStatus::max_iterations;
      break;
    }

    if (!compute_scaling(K, s, z, W) || !kkt.factor(W)) {
      sol.status = SolveStatus::numerical_failure;
      break;
    }
    VectorXd lambda;
    apply_w(K, W, z, lambda, false);
    const double mu = (s.dot(z) + tau * kappa) / nu;

    const VectorXd rx = G.transpose() * z + c * tau;
    const VectorXd rz = s + G * x - h * tau;
    const double rt = kappa + c.dot(x) + h.dot(z);

    VectorXd x1, z1;
    kkt.solve(-c, h, x1, z1);
    const double denom = kappa / tau - c.dot(x1) - h.dot(z1);

    // predictor
    VectorXd x2, z2, wd;
    kkt.solve(-rx, -rz + s, x2, z2);
    double dtau_a = (-kappa + rt + c.dot(x2) + h.dot(z2)) / denom;
    VectorXd dz_a = z2 + dtau_a * z1;
    VectorXd dzs_a;
    apply_w(K, W, dz_a, dzs_a, false);
    VectorXd dss_a = -lambda - dzs_a;
    const double dkap_a = -kappa - kappa * dtau_a / tau;
    double alpha_a = std::min(max_step(K, lambda, dss_a), max_step(K, lambda, dzs_a));
    if (dtau_a < 0.0) alpha_a = std::min(alpha_a, -tau / dtau_a);
    if (dkap_a < 0.0) alpha_a = std::min(alpha_a, -kappa / dkap_a);
    alpha_a = std::min(alpha_a, 1.0);
    const double sigma = std::clamp(std::pow(1.0 - alpha_a, 3.0), 1e-8, 1.0);

    // corrector
    const VectorXd rc = -circ(K, lambda, lambda) - circ(K, dss_a, dzs_a) + sigma * mu * e;
    const VectorXd ls = circ_div(K, lambda, rc);
    apply_w(K, W, ls, wd, false);
    kkt.solve(-(1.0 - sigma) * rx, -(1.0 - sigma) * rz - wd, x2, z2);
    const double rk = -tau * kappa - dtau_a * dkap_a + sigma * mu;
    const double dtau = (rk / tau + (1.0 - sigma) * rt + c.dot(x2) + h.dot(z2)) / denom;
    const VectorXd dx = x2 + dtau * x1;
    const VectorXd dz = z2 + dtau * z1;
    VectorXd dzs, ds;
    apply_w(K, W, dz, dzs, false);
    const VectorXd dss = ls - dzs;
    apply_w(K, W, dss, ds, false);
    const double dkap = (rk - kappa * dtau) / tau;

    double amax = std::min(max_step(K, lambda, dss), max_step(K, lambda, dzs));
    if (dtau < 0.0) amax = std::min(amax, -tau / dtau);
    if (dkap < 0.0) amax = std::min(amax, -kappa / dkap);
    const double alpha = std::min(1.0, settings.step_backoff * amax);
    if (!std::isfinite(alpha) || !dx.allFinite() || !dz.allFinite() || !std::isfinite(dtau)) {
      sol.status = SolveStatus::numerical_failure;
      break;
    }
    stalls = alpha < 1e-10 ? stalls + 1 : 0;
    if (stalls >= 3) {
      sol.status = SolveStatus::numerical_failure;
      break;
    }

    x += alpha * dx;
    s += alpha * ds;
    z += alpha * dz;
    tau += alpha * dtau;
    kappa += alpha * dkap;
  }

  // not converged: hand back the best iterate seen
  if (best.set) {
    sol.v = best.x;
    sol.slack = best.s;
    sol.dual = best.z;
    sol.residuals = best.res;
    sol.objective_value = best.pcost;
  } else {
    sol.v = VectorXd::Zero(n);
    sol.slack = VectorXd::Zero(K.m);
    sol.dual = VectorXd::Zero(K.m);
  }
  return sol;
}

KktReport check_kkt(const ConeProgram& prog, const Solution& sol) {
  prog.validate();
  const Eigen::Index n = prog.num_variables();
  const Eigen::Index m = prog.num_rows();
  KktReport rep;
  rep.constraint_slack = VectorXd::Zero(m);

  const bool have_primal = sol.v.size() == n;
  const bool have_slack = sol.slack.size() == m;
  const bool have_dual = sol.dual.size() == m;

  // Walk the constraints directly: g_i(v) is the affine map whose cone
  // membership is required, s_i the reported slack and z_i the multiplier.
  VectorXd Gv_minus_h = VectorXd::Zero(m);  // -(h - G v)
  VectorXd Gtz = VectorXd::Zero(n);
  VectorXd colsq = VectorXd::Zero(n);  // squared column norms of G
  double hz = 0.0;
  double sz = 0.0;
  double viol = 0.0;
  double cone_bad = 0.0;
  Eigen::Index r = 0;

  auto take_z = [&](Eigen::Index row) { return have_dual ? sol.dual[row] : 0.0; };
  auto take_s = [&](Eigen::Index row) { return have_slack ? sol.slack[row] : 0.0; };

  for (Eigen::Index i = 0; i < n; ++i) {
    if (!prog.nonneg()[static_cast<std::size_t>(i)]) continue;
    const double v = have_primal ? sol.v[i] : 0.0;
    rep.constraint_slack[r] = v;
    viol = std::max(viol, -v);
    Gv_minus_h[r] = -v;
    Gtz[i] -= take_z(r);
    colsq[i] += 1.0;
    cone_bad = std::max({cone_bad, -take_s(r), -take_z(r)});
    sz += take_s(r) * take_z(r);
    ++r;
  }
  for (const auto& l : prog.linear()) {
    const double lhs = have_primal ? l.f.dot(sol.v) : 0.0;
    rep.constraint_slack[r] = l.e - lhs;
    viol = std::max(viol, lhs - l.e);
    Gv_minus_h[r] = lhs - l.e;
    Gtz += take_z(r) * l.f;
    colsq += l.f.cwiseAbs2();
    hz += l.e * take_z(r);
    cone_bad = std::max({cone_bad, -take_s(r), -take_z(r)});
    sz += take_s(r) * take_z(r);
    ++r;
  }
  for (const auto& c : prog.socs()) {
    const Eigen::Index d = c.A.rows();
    const double t = have_primal ? c.g.dot(sol.v) + c.h : c.h;
    const VectorXd u = have_primal ? VectorXd(c.A * sol.v + c.b) : c.b;
    rep.constraint_slack[r] = t - u.norm();
    viol = std::max(viol, u.norm() - t);
    Gv_minus_h[r] = -t;
    Gv_minus_h.segment(r + 1, d) = -u;
    colsq += c.g.cwiseAbs2() + c.A.cwiseAbs2().colwise().sum().transpose();
    if (have_dual) {
      const double z0 = sol.dual[r];
      const VectorXd z1 = sol.dual.segment(r + 1, d);
      Gtz -= z0 * c.g + c.A.transpose() * z1;
      hz += c.h * z0 + c.b.dot(z1);
      cone_bad = std::max(cone_bad, z1.norm() - z0);
      if (have_slack) sz += sol.slack.segment(r, d + 1).dot(sol.dual.segment(r, d + 1));
    }
    if (have_slack) cone_bad = std::max(cone_bad, sol.slack.segment(r + 1, d).norm() - sol.slack[r]);
    rep.constraint_slack.segment(r + 1, d).setZero();
    r += 1 + d;
  }
  rep.max_violation = viol;

  // constant part of each row, so G v can be separated from h
  VectorXd hvec = VectorXd::Zero(m);
  {
    Eigen::Index rr = prog.num_nonneg();
    for (const auto& l : prog.linear()) hvec[rr++] = l.e;
    for (const auto& c : prog.socs()) {
      hvec[rr] = c.h;
      hvec.segment(rr + 1, c.A.rows()) = c.b;
      rr += 1 + c.A.rows();
    }
  }
  const VectorXd Gv = Gv_minus_h + hvec;

  if (sol.status == SolveStatus::primal_infeasible) {
    // z in K, G^T z = 0, h^T z < 0. Each column of G^T z is measured against
    // |G_j| |z| so that badly scaled columns cannot hide a nonzero product.
    const double zn = have_dual ? sol.dual.norm() : 0.0;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double denom = std::sqrt(colsq[j]) * zn;
      if (Gtz[j] != 0.0) worst = std::max(worst, denom > 0.0 ? std::abs(Gtz[j]) / denom : 1.0);
    }
    rep.certificate_residual = worst;
    rep.cone_violation = cone_bad / std::max(zn, std::numeric_limits<double>::min());
    rep.certificate_valid = have_dual && hz < 0.0 && rep.certificate_residual <= 1e-6 &&
                            rep.cone_violation <= 1e-6;
    return rep;
  }
  if (sol.status == SolveStatus::dual_infeasible) {
    // G d + s = 0 with s in K and c^T d < 0
    const VectorXd ray_res = Gv + (have_slack ? sol.slack : VectorXd::Zero(m));
    const double dn = have_primal ? sol.v.norm() : 0.0;
    const double sn = have_slack ? sol.slack.norm() : 0.0;
    const double denom = std::sqrt(colsq.sum()) * dn + sn;
    rep.certificate_residual = denom > 0.0 ? ray_res.norm() / denom : 1.0;
    rep.cone_violation = cone_bad / std::max(sn, std::numeric_limits<double>::min());
    rep.certificate_valid = have_primal && prog.objective().dot(sol.v) < 0.0 &&
                            rep.certificate_residual <= 1e-6 && rep.cone_violation <= 1e-6;
    return rep;
  }

  const VectorXd s = have_slack ? sol.slack : VectorXd::Zero(m);
  const VectorXd presid = Gv_minus_h + s;
  rep.primal_abs = presid.lpNorm<Eigen::Infinity>();
  rep.primal = presid.norm() / std::max({1.0, hvec.norm(), Gv.norm(), s.norm()});
  const VectorXd dres = Gtz + prog.objective();
  rep.dual = dres.norm() / std::max({1.0, prog.objective().norm(), Gtz.norm()});
  const double pcost = have_primal ? prog.objective().dot(sol.v) : 0.0;
  const double dcost = -hz;
  const double scale = std::max(1.0, std::abs(pcost));
  rep.complementarity = std::abs(sz) / scale;
  rep.gap = std::abs(pcost - dcost) / scale;
  rep.cone_violation = cone_bad / std::max({1.0, s.norm(), have_dual ? sol.dual.norm() : 0.0});
  return rep;
}

void write_triplets(const ConeProgram& prog, std::ostream& os) {
  prog.validate();
  const Standard sf = standard_form(prog);
  const auto old_prec = os.precision(17);
  os << "cone_program n " << sf.c.size() << " m " << sf.cones.m << " l " << sf.cones.l << " q";
  for (int d : sf.cones.dim) os << ' ' << d;
  os << '\n';
  os << "c";
  for (Eigen::Index i = 0; i < sf.c.size(); ++i) os << ' ' << sf.c[i];
  os << "\nG\n";
  for (Eigen::Index i = 0; i < sf.G.rows(); ++i) {
    for (Eigen::Index j = 0; j < sf.G.cols(); ++j) {
      if (sf.G(i, j) != 0.0) os << i << ' ' << j << ' ' << sf.G(i, j) << '\n';
    }
  }
  os << "h";
  for (Eigen::Index i = 0; i < sf.h.size(); ++i) os << ' ' << sf.h[i];
  os << '\n';
  os.precision(old_prec);
}

}  // namespace locopt
