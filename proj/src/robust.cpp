#include "locopt/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "locopt/allocate.hpp"

namespace locopt {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();
const double golden = (std::sqrt(5.0) - 1.0) / 2.0;

/* Golden-section maximization of a function assumed unimodal on [a, b]. */
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b, int iters = 80) {
  double c = b - golden * (b - a);
  double d = a + golden * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < iters && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - golden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + golden * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? std::make_pair(c, fc) : std::make_pair(d, fd);
}

/* Arc of phases [a - w, a + w] on the circle, in the doubled-angle domain. */
struct Arc {
  double a = 0.0;
  double w = 0.0;
  double cos_hi = 0.0, sin_hi = 0.0;  // at a + w
  double cos_lo = 0.0, sin_lo = 0.0;  // at a - w
};

Arc make_arc(const UncertainLink& l) {
  Arc arc;
  arc.a = wrap_angle(2.0 * l.angle);
  arc.w = 2.0 * l.half_width;
  arc.cos_hi = std::cos(arc.a + arc.w);
  arc.sin_hi = std::sin(arc.a + arc.w);
  arc.cos_lo = std::cos(arc.a - arc.w);
  arc.sin_lo = std::sin(arc.a - arc.w);
  return arc;
}

/* max over the arc of cos(phase - theta), given cos/sin of theta. */
inline double arc_max(const Arc& arc, double theta, double ct, double st) {
  if (arc.w >= pi) return 1.0;
  double d = theta - arc.a;
  if (d > pi) d -= two_pi;
  if (d <= -pi) d += two_pi;
  if (std::abs(d) <= arc.w) return 1.0;
  if (d > 0.0) return ct * arc.cos_hi + st * arc.sin_hi;
  return ct * arc.cos_lo + st * arc.sin_lo;
}

struct GridTable {
  int n = 0;
  std::vector<double> theta, c, s;
};

GridTable make_grid(int n) {
  GridTable g;
  g.n = n;
  g.theta.resize(n);
  g.c.resize(n);
  g.s.resize(n);
  for (int i = 0; i < n; ++i) {
    g.theta[i] = two_pi * i / n;
    g.c[i] = std::cos(g.theta[i]);
    g.s[i] = std::sin(g.theta[i]);
  }
  return g;
}

const GridTable& grid_for(int n, GridTable& scratch) {
  static const GridTable standard = make_grid(100000);
  if (n == standard.n) return standard;
  scratch = make_grid(n);
  return scratch;
}

Eigen::VectorXd link_weights(const CoverCircle& cc, const Eigen::VectorXd& x) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(cc.links.size()));
  for (std::size_t l = 0; l < cc.links.size(); ++l) {
    const int col = cc.links[l].column;
    if (col < 0 || col >= x.size()) throw DimensionMismatch("allocation shorter than the cover's columns");
    y[static_cast<Eigen::Index>(l)] = cc.links[l].xi_lo * x[col];
  }
  return y;
}

double speb_from_projection(double total, double proj) {
  if (!(total > 0.0)) return inf;
  const double den = (total - proj) * (total + proj);
  if (!(den > 1e-12 * total * total)) return inf;
  return 4.0 * total / den;
}

/* max over |eps| <= w of |f(eps)| by sampling plus golden-section refinement. */
template <class F>
double sampled_abs_max(F&& f, double w, int samples = 10000) {
  if (!(w > 0.0)) return std::abs(f(0.0));
  const double step = 2.0 * w / samples;
  int best_i = 0;
  double best = -1.0;
  for (int i = 0; i <= samples; ++i) {
    const double v = std::abs(f(-w + step * i));
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  const double lo = -w + step * std::max(best_i - 1, 0);
  const double hi = -w + step * std::min(best_i + 1, samples);
  const auto r = golden_max([&](double e) { return std::abs(f(e)); }, lo, hi);
  return std::max({best, r.second, std::abs(f(-w)), std::abs(f(w))});
}

void add_caps(ConeProgram& prog, const std::optional<Eigen::VectorXd>& caps) {
  if (!caps) return;
  for (Eigen::Index j = 0; j < caps->size(); ++j) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(prog.num_variables());
    f[j] = 1.0;
    prog.add_linear({std::move(f), (*caps)[j]});
  }
}

ConeProgram base_program(const UncertaintyCover& cover) {
  ConeProgram prog(Eigen::VectorXd::Ones(cover.num_columns));
  prog.set_all_nonneg();
  add_caps(prog, cover.caps);
  return prog;
}

Eigen::VectorXd lower_totals(const CoverCircle& cc, int n) {
  Eigen::VectorXd t = Eigen::VectorXd::Zero(n);
  for (const auto& l : cc.links) t[l.column] += l.xi_lo;
  return t;
}

ConeProgram build_efficient(const UncertaintyCover& cover) {
  const int n = cover.num_columns;
  ConeProgram prog = base_program(cover);
  for (std::size_t k = 0; k < cover.agents.size(); ++k) {
    const double rho = cover.requirements[static_cast<Eigen::Index>(k)];
    for (const auto& cc : cover.agents[k]) {
      const TildeVectors tv = tilde_vectors(cc);
      const Eigen::VectorXd total = lower_totals(cc, n);
      for (int e1 : {1, -1}) {
        for (int e2 : {1, -1}) {
          Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(2, n);
          for (std::size_t l = 0; l < cc.links.size(); ++l) {
            const auto li = static_cast<Eigen::Index>(l);
            const auto& link = cc.links[l];
            rows(0, link.column) += (tv.c_hat[li] + e1 * tv.s_tilde[li]) * link.xi_lo;
            rows(1, link.column) += (tv.s_hat[li] + e2 * tv.c_tilde[li]) * link.xi_lo;
          }
          add_requirement_cone(prog, rows, Eigen::Vector2d::Zero(), total, 0.0, rho);
        }
      }
    }
  }
  return prog;
}

void check_radius(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw std::domain_error("circle radius must be nonnegative");
}

ChannelBounds default_bounds(const Eigen::MatrixXd& rc, const std::optional<ChannelBounds>& zeta) {
  if (!zeta) return {rc, rc};
  if (zeta->lo.rows() != rc.rows() || zeta->lo.cols() != rc.cols() || zeta->hi.rows() != rc.rows() ||
      zeta->hi.cols() != rc.cols()) {
    throw DimensionMismatch("channel bounds must match the channel matrix");
  }
  if ((zeta->lo.array() < 0.0).any() || (zeta->lo.array() > zeta->hi.array()).any()) {
    throw std::domain_error("channel bounds need 0 <= lo <= hi");
  }
  return *zeta;
}

}  // namespace

std::vector<std::vector<Circle>> single_circle_cover(const WirelessNetwork& net, double delta) {
  check_radius(delta);
  std::vector<std::vector<Circle>> out;
  for (const auto& p : net.agents()) out.push_back({Circle{p, delta}});
  return out;
}

std::vector<Circle> hex_cover(const Point& lo, const Point& hi, double radius) {
  if (!(radius > 0.0)) throw std::domain_error("hex_cover: radius must be positive");
  if (!(hi.x() >= lo.x()) || !(hi.y() >= lo.y())) throw std::domain_error("hex_cover: empty region");
  // centers on a triangular lattice with spacing sqrt(3) r cover the plane
  const double dx = std::sqrt(3.0) * radius;
  const double dy = 1.5 * radius;
  std::vector<Circle> out;
  const int rows = static_cast<int>(std::ceil((hi.y() - lo.y()) / dy)) + 1;
  const int cols = static_cast<int>(std::ceil((hi.x() - lo.x()) / dx)) + 1;
  for (int r = 0; r <= rows; ++r) {
    const double off = (r % 2) ? 0.5 * dx : 0.0;
    for (int c = -1; c <= cols; ++c) {
      out.push_back({Point(lo.x() + off + c * dx, lo.y() + r * dy), radius});
    }
  }
  return out;
}

UncertaintyCover derive_intervals_wnl(const WirelessNetwork& net, const std::vector<std::vector<Circle>>& circles,
                                      const std::optional<ChannelBounds>& zeta) {
  if (circles.size() != static_cast<std::size_t>(net.num_agents())) {
    throw DimensionMismatch("one circle list per agent expected");
  }
  const ChannelBounds zb = default_bounds(net.rc(), zeta);
  const double tb = 2.0 * net.beta();
  UncertaintyCover cover;
  cover.kind = NetworkKind::wnl;
  cover.num_columns = net.num_anchors();
  cover.requirements = net.requirements();
  cover.caps = net.caps();
  for (int k = 0; k < net.num_agents(); ++k) {
    if (circles[k].empty()) throw std::domain_error("every agent needs at least one circle");
    std::vector<CoverCircle> list;
    for (const auto& c : circles[k]) {
      check_radius(c.radius);
      CoverCircle cc{c, {}};
      for (int j = 0; j < net.num_anchors(); ++j) {
        const Bearing b = geometry(c.center, net.anchors()[j]);
        if (!(c.radius < b.distance)) throw std::domain_error("circle radius reaches an anchor");
        cc.links.push_back({j, b.angle, std::asin(c.radius / b.distance),
                            zb.lo(k, j) / std::pow(b.distance + c.radius, tb),
                            zb.hi(k, j) / std::pow(b.distance - c.radius, tb)});
      }
      list.push_back(std::move(cc));
    }
    cover.agents.push_back(std::move(list));
  }
  return cover;
}

Cos2Range cos2_range(double lo, double hi) {
  if (!(hi >= lo)) throw std::domain_error("cos2_range: empty interval");
  if (hi - lo >= pi) return {0.0, 1.0};
  const double clo = std::cos(lo) * std::cos(lo);
  const double chi = std::cos(hi) * std::cos(hi);
  Cos2Range r{std::min(clo, chi), std::max(clo, chi)};
  if (std::ceil(lo / pi) * pi <= hi) r.max = 1.0;
  if (std::ceil((lo - 0.5 * pi) / pi) * pi + 0.5 * pi <= hi) r.min = 0.0;
  return r;
}

UncertaintyCover derive_intervals_rnl(const RadarNetwork& net, const std::vector<Circle>& circles,
                                      const std::optional<ChannelBounds>& zeta) {
  if (circles.empty()) throw std::domain_error("the target needs at least one circle");
  const ChannelBounds zb = default_bounds(net.rc(), zeta);
  const double tb = 2.0 * net.beta();
  UncertaintyCover cover;
  cover.kind = NetworkKind::rnl;
  cover.num_columns = net.num_tx();
  cover.requirements = Eigen::VectorXd::Constant(1, net.requirement());
  cover.caps = net.caps();
  std::vector<CoverCircle> list;
  for (const auto& c : circles) {
    check_radius(c.radius);
    CoverCircle cc{c, {}};
    std::vector<Bearing> rb, tbr;
    for (const auto& p : net.rx()) rb.push_back(geometry(c.center, p));
    for (const auto& p : net.tx()) tbr.push_back(geometry(c.center, p));
    for (const auto& b : rb) {
      if (!(c.radius < b.distance)) throw std::domain_error("circle radius reaches a receiver");
    }
    for (const auto& b : tbr) {
      if (!(c.radius < b.distance)) throw std::domain_error("circle radius reaches a transmitter");
    }
    for (int k = 0; k < net.num_rx(); ++k) {
      const double psi_w = std::asin(c.radius / rb[k].distance);
      for (int j = 0; j < net.num_tx(); ++j) {
        const double phi_w = std::asin(c.radius / tbr[j].distance);
        const double half = 0.5 * (psi_w + phi_w);
        const double mid = 0.5 * (rb[k].angle - tbr[j].angle);
        const Cos2Range cr = cos2_range(mid - half, mid + half);
        const double far = std::pow(rb[k].distance + c.radius, tb) * std::pow(tbr[j].distance + c.radius, tb);
        const double near = std::pow(rb[k].distance - c.radius, tb) * std::pow(tbr[j].distance - c.radius, tb);
        cc.links.push_back({j, wrap_angle(0.5 * (rb[k].angle + tbr[j].angle)), half,
                            4.0 * zb.lo(k, j) * cr.min / far, 4.0 * zb.hi(k, j) * cr.max / near});
      }
    }
    list.push_back(std::move(cc));
  }
  cover.agents.push_back(std::move(list));
  return cover;
}

double worst_projection(const CoverCircle& cc, const Eigen::VectorXd& x, int theta_grid_size) {
  if (theta_grid_size < 8) throw std::invalid_argument("oracle grid too small");
  check_allocation(x, static_cast<int>(x.size()));
  const Eigen::VectorXd y = link_weights(cc, x);
  std::vector<Arc> arcs;
  for (const auto& l : cc.links) arcs.push_back(make_arc(l));

  GridTable scratch;
  const GridTable& grid = grid_for(theta_grid_size, scratch);
  std::vector<double> acc(static_cast<std::size_t>(grid.n), 0.0);
  for (std::size_t l = 0; l < arcs.size(); ++l) {
    const double yl = y[static_cast<Eigen::Index>(l)];
    if (yl == 0.0) continue;
    for (int i = 0; i < grid.n; ++i) acc[i] += yl * arc_max(arcs[l], grid.theta[i], grid.c[i], grid.s[i]);
  }
  const auto it = std::max_element(acc.begin(), acc.end());
  const int best = static_cast<int>(it - acc.begin());

  auto S = [&](double th) {
    const double ct = std::cos(th);
    const double st = std::sin(th);
    double v = 0.0;
    for (std::size_t l = 0; l < arcs.size(); ++l) {
      const double yl = y[static_cast<Eigen::Index>(l)];
      if (yl != 0.0) v += yl * arc_max(arcs[l], wrap_angle(th), ct, st);
    }
    return v;
  };
  const double step = two_pi / grid.n;
  const auto refined = golden_max(S, grid.theta[best] - step, grid.theta[best] + step);
  return std::max({*it, refined.second, 0.0});
}

double worst_case_speb_oracle(const CoverCircle& cc, const Eigen::VectorXd& x, int theta_grid_size) {
  const Eigen::VectorXd y = link_weights(cc, x);
  return speb_from_projection(y.sum(), worst_projection(cc, x, theta_grid_size));
}

std::vector<double> worst_case_spebs(const UncertaintyCover& cover, const Eigen::VectorXd& x, int theta_grid_size) {
  check_allocation(x, cover.num_columns);
  std::vector<double> out;
  for (const auto& circles : cover.agents) {
    double w = 0.0;
    for (const auto& cc : circles) w = std::max(w, worst_case_speb_oracle(cc, x, theta_grid_size));
    out.push_back(w);
  }
  return out;
}

BoundVectors bound_vectors(const CoverCircle& cc, int M) {
  if (M < 2) throw std::domain_error("bound_vectors: M must be at least 2");
  const auto L = static_cast<Eigen::Index>(cc.links.size());
  BoundVectors bv;
  bv.theta.resize(M);
  bv.h.resize(M, L);
  std::vector<Arc> arcs;
  for (const auto& l : cc.links) arcs.push_back(make_arc(l));
  for (int m = 0; m < M; ++m) {
    const double th = (2.0 * m + 1.0) * pi / M;
    bv.theta[m] = th;
    const double ct = std::cos(th);
    const double st = std::sin(th);
    for (Eigen::Index l = 0; l < L; ++l) bv.h(m, l) = arc_max(arcs[static_cast<std::size_t>(l)], th, ct, st);
  }
  bv.g = bv.h / std::cos(pi / M);
  return bv;
}

SpebBounds speb_bounds_eval(const CoverCircle& cc, const Eigen::VectorXd& x, int M, int theta_grid_size) {
  const BoundVectors bv = bound_vectors(cc, M);
  const Eigen::VectorXd y = link_weights(cc, x);
  const double total = y.sum();
  const Eigen::VectorXd hy = bv.h * y;
  const Eigen::VectorXd gy = bv.g * y;
  SpebBounds out;
  out.lower = speb_from_projection(total, hy.cwiseAbs().maxCoeff());
  out.upper = speb_from_projection(total, gy.cwiseAbs().maxCoeff());
  const double oracle = speb_from_projection(total, worst_projection(cc, x, theta_grid_size));
  out.B = std::isfinite(oracle) ? 0.25 * oracle * total : inf;
  out.valid = std::isfinite(out.B) && M >= pi * std::sqrt(out.B);
  return out;
}

double gap_constant(double B, int M) {
  if (!(B >= 1.0 - 1e-12)) throw std::domain_error("gap_constant: B must be at least 1");
  if (!(M > pi * std::sqrt(B))) throw std::domain_error("gap_constant: M must exceed pi*sqrt(B)");
  const double s = std::sin(pi / M);
  const double s2 = s * s;
  return std::max(0.0, s2 * (B - 1.0) / (1.0 - s2 * B));
}

int min_valid_M(double B) {
  if (!std::isfinite(B)) return std::numeric_limits<int>::max();
  return std::max(2, static_cast<int>(std::ceil(pi * std::sqrt(std::max(B, 1.0)))));
}

ConeProgram build_robust_socp_asymptotic(const UncertaintyCover& cover, int M, BoundVariant variant) {
  if (M < 2) throw std::domain_error("asymptotic build: M must be at least 2");
  const int n = cover.num_columns;
  ConeProgram prog = base_program(cover);
  for (std::size_t k = 0; k < cover.agents.size(); ++k) {
    const double rho = cover.requirements[static_cast<Eigen::Index>(k)];
    for (const auto& cc : cover.agents[k]) {
      const BoundVectors bv = bound_vectors(cc, M);
      const Eigen::MatrixXd& V = variant == BoundVariant::upper ? bv.g : bv.h;
      const Eigen::VectorXd total = lower_totals(cc, n);
      for (int m = 0; m < M; ++m) {
        Eigen::MatrixXd row = Eigen::MatrixXd::Zero(1, n);
        for (std::size_t l = 0; l < cc.links.size(); ++l) {
          row(0, cc.links[l].column) += V(m, static_cast<Eigen::Index>(l)) * cc.links[l].xi_lo;
        }
        add_requirement_cone(prog, row, Eigen::VectorXd::Zero(1), total, 0.0, rho);
      }
    }
  }
  return prog;
}

TildeVectors tilde_vectors(const CoverCircle& cc) {
  const auto L = static_cast<Eigen::Index>(cc.links.size());
  TildeVectors tv;
  tv.c_hat.resize(L);
  tv.s_hat.resize(L);
  tv.c_tilde.resize(L);
  tv.s_tilde.resize(L);
  for (Eigen::Index l = 0; l < L; ++l) {
    const auto& link = cc.links[static_cast<std::size_t>(l)];
    if (link.half_width < 0.0 || link.half_width > 0.5 * pi + 1e-12) {
      throw std::domain_error("tilde_vectors: half-width outside [0, pi/2]");
    }
    const double a = 2.0 * link.angle;
    tv.c_hat[l] = std::cos(a);
    tv.s_hat[l] = std::sin(a);
    tv.s_tilde[l] = sampled_abs_max([a](double e) { return 2.0 * std::sin(a + e) * std::sin(e); }, link.half_width);
    tv.c_tilde[l] = sampled_abs_max([a](double e) { return 2.0 * std::cos(a + e) * std::sin(e); }, link.half_width);
  }
  return tv;
}

ConeProgram build_robust_socp_efficient_wnl(const UncertaintyCover& cover) {
  if (cover.kind != NetworkKind::wnl) throw std::invalid_argument("efficient WNL build needs a WNL cover");
  return build_efficient(cover);
}

ConeProgram build_robust_socp_efficient_rnl(const UncertaintyCover& cover) {
  if (cover.kind != NetworkKind::rnl) throw std::invalid_argument("efficient RNL build needs an RNL cover");
  // Summing the per-receiver rows column by column is the same as weighting
  // the per-receiver direction vectors by R_sum^{-1} and scaling back by R_sum.
  return build_efficient(cover);
}

std::vector<int> degenerate_columns(const UncertaintyCover& cover) {
  std::vector<int> out;
  for (int j = 0; j < cover.num_columns; ++j) {
    double s = 0.0;
    for (const auto& circles : cover.agents) {
      for (const auto& cc : circles) {
        for (const auto& l : cc.links) {
          if (l.column == j) s += l.xi_lo;
        }
      }
    }
    if (!(s > 0.0)) out.push_back(j);
  }
  return out;
}

RobustResult solve_robust(const UncertaintyCover& cover, RobustMethod method, int M, const SolverSettings& settings,
                          int theta_grid_size) {
  RobustResult out;
  for (int j : degenerate_columns(cover)) {
    out.warnings.push_back("column " + std::to_string(j) + " has zero lower coefficients and contributes nothing");
  }
  ConeProgram prog = [&] {
    switch (method) {
      case RobustMethod::asymptotic_upper: return build_robust_socp_asymptotic(cover, M, BoundVariant::upper);
      case RobustMethod::asymptotic_lower: return build_robust_socp_asymptotic(cover, M, BoundVariant::lower);
      case RobustMethod::efficient: break;
    }
    return build_efficient(cover);
  }();
  out.solution = solve(prog, settings);
  out.status = out.solution.status;
  if (out.status != SolveStatus::optimal) return out;
  out.x = out.solution.v.head(cover.num_columns).cwiseMax(0.0);
  out.total_power = out.x.sum();
  out.worst_speb = worst_case_spebs(cover, out.x, theta_grid_size);
  if (method != RobustMethod::efficient) {
    for (const auto& circles : cover.agents) {
      for (const auto& cc : circles) {
        const SpebBounds sb = speb_bounds_eval(cc, out.x, M, theta_grid_size);
        out.recommended_M = std::max(out.recommended_M, min_valid_M(sb.B));
        out.bounds_valid = out.bounds_valid && sb.valid;
      }
    }
    if (!out.bounds_valid) {
      out.warnings.push_back("M = " + std::to_string(M) + " is below pi*sqrt(B) at the solution; use M >= " +
                             std::to_string(out.recommended_M));
    }
  }
  return out;
}

}  // namespace locopt
