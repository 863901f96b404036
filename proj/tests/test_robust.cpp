#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "locopt/allocate.hpp"
#include "locopt/robust.hpp"
#include "nets.hpp"

using namespace locopt;
using std::numbers::pi;

namespace {

CoverCircle two_links(double width) {
  CoverCircle cc;
  cc.links = {{0, 0.0, width, 1.0, 1.0}, {1, pi / 2, width, 1.0, 1.0}};
  return cc;
}

CoverCircle random_circle(std::mt19937_64& rng, int links, double max_width) {
  std::uniform_real_distribution<double> ang(0, 2 * pi), wid(0, max_width), xi(0.2, 2.0);
  CoverCircle cc;
  for (int l = 0; l < links; ++l) cc.links.push_back({l, ang(rng), wid(rng), xi(rng), 3.0});
  return cc;
}

Eigen::VectorXd random_x(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.1, 2.0);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = u(rng);
  return x;
}

// |cos a - cos(a + t)| over |t| <= 2w, in closed form from the range of cos on an arc
double closed_s_tilde(double a, double w) {
  double lo = 1.0, hi = -1.0;
  for (double t : {-2 * w, 2 * w}) {
    lo = std::min(lo, std::cos(a + t));
    hi = std::max(hi, std::cos(a + t));
  }
  const double start = a - 2 * w, stop = a + 2 * w;
  if (std::ceil(start / (2 * pi)) * 2 * pi <= stop) hi = 1.0;
  if (std::ceil((start - pi) / (2 * pi)) * 2 * pi + pi <= stop) lo = -1.0;
  return std::max(std::cos(a) - lo, hi - std::cos(a));
}

}  // namespace

TEST_CASE("interval derivation, active network") {
  const WirelessNetwork net({{10, 0}}, {{0, 0}}, Eigen::MatrixXd::Ones(1, 1), 1.0, Eigen::VectorXd::Ones(1));
  UncertaintyCover cv = derive_intervals_wnl(net, single_circle_cover(net, 1.0));
  const UncertainLink& l = cv.agents[0][0].links[0];
  CHECK(l.half_width == doctest::Approx(0.100167).epsilon(1e-5));
  CHECK(l.xi_lo == doctest::Approx(1.0 / 121));
  CHECK(l.xi_hi == doctest::Approx(1.0 / 81));

  cv = derive_intervals_wnl(net, single_circle_cover(net, 0.0));
  CHECK(cv.agents[0][0].links[0].half_width == 0.0);
  CHECK(cv.agents[0][0].links[0].xi_lo == doctest::Approx(0.01));
  CHECK(cv.agents[0][0].links[0].xi_hi == doctest::Approx(0.01));

  const WirelessNetwork half({{4, 0}}, {{0, 0}}, Eigen::MatrixXd::Ones(1, 1), 0.5, Eigen::VectorXd::Ones(1));
  ChannelBounds zb{Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::MatrixXd::Constant(1, 1, 2.0)};
  cv = derive_intervals_wnl(half, single_circle_cover(half, 2.0), zb);
  CHECK(cv.agents[0][0].links[0].xi_lo == doctest::Approx(1.0 / 6));
  CHECK(cv.agents[0][0].links[0].xi_hi == doctest::Approx(1.0));

  CHECK_THROWS_AS(derive_intervals_wnl(net, single_circle_cover(net, 10.0)), std::domain_error);
}

TEST_CASE("cos^2 ranges") {
  Cos2Range r = cos2_range(-pi / 4, pi / 4);
  CHECK(r.max == doctest::Approx(1.0));
  CHECK(r.min == doctest::Approx(0.5));
  r = cos2_range(pi / 4, 3 * pi / 4);
  CHECK(r.max == doctest::Approx(0.5));
  CHECK(r.min == doctest::Approx(0.0));
  r = cos2_range(2.9, 3.5);
  CHECK(r.max == doctest::Approx(1.0));
  r = cos2_range(0.2, 0.3);
  CHECK(r.min == doctest::Approx(std::cos(0.3) * std::cos(0.3)));
}

TEST_CASE("interval derivation, passive network") {
  const RadarNetwork net({{1, 0}}, {{1, 0}, {0, 1}}, {0, 0}, Eigen::MatrixXd::Ones(2, 1), 1.0, 1.0);
  const UncertaintyCover cv = derive_intervals_rnl(net, {Circle{{0, 0}, 0.0}});
  REQUIRE(cv.agents[0][0].links.size() == 2);
  CHECK(cv.agents[0][0].links[0].xi_lo == doctest::Approx(4.0));
  CHECK(cv.agents[0][0].links[0].xi_hi == doctest::Approx(4.0));
  CHECK(cv.agents[0][0].links[1].angle == doctest::Approx(pi / 4));
  CHECK_THROWS_AS(derive_intervals_rnl(net, {Circle{{0, 0}, 1.0}}), std::domain_error);

  const UncertaintyCover wide = derive_intervals_rnl(net, {Circle{{0, 0}, 0.5}});
  for (const auto& l : wide.agents[0][0].links) CHECK(l.xi_lo <= l.xi_hi);
}

TEST_CASE("oracle") {
  const Eigen::Vector2d x(1, 1);
  CHECK(worst_projection(two_links(0.0), x) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(worst_case_speb_oracle(two_links(0.0), x) == doctest::Approx(2.0));
  // S = 2 sin 0.2, reached at theta = pi / 2
  CHECK(worst_projection(two_links(0.1), x) == doctest::Approx(0.3973).epsilon(1e-4));
  CHECK(worst_projection(two_links(0.1), x) == doctest::Approx(2 * std::sin(0.2)).epsilon(1e-12));
  CHECK(worst_case_speb_oracle(two_links(0.1), x) == doctest::Approx(2.082).epsilon(1e-3));

  CoverCircle one;
  one.links = {{0, 0.3, 0.0, 1.0, 1.0}};
  CHECK(std::isinf(worst_case_speb_oracle(one, Eigen::VectorXd::Ones(1))));
}

TEST_CASE("bound vectors") {
  CoverCircle cc;
  cc.links = {{0, 0.0, 0.0, 1.0, 1.0}};
  const BoundVectors bv = bound_vectors(cc, 4);
  const double r = std::sqrt(2.0) / 2;
  const double h[4] = {r, -r, -r, r};
  const double g[4] = {1, -1, -1, 1};
  for (int m = 0; m < 4; ++m) {
    CHECK(bv.h(m, 0) == doctest::Approx(h[m]));
    CHECK(bv.g(m, 0) == doctest::Approx(g[m]));
  }
  cc.links[0].half_width = pi / 2;
  CHECK(bound_vectors(cc, 16).h.minCoeff() == 1.0);
  CHECK_THROWS_AS(bound_vectors(cc, 1), std::domain_error);

  std::mt19937_64 rng(5);
  const CoverCircle rc = random_circle(rng, 6, 0.3);
  const Eigen::VectorXd x = random_x(rng, 6);
  const double S = worst_projection(rc, x);
  Eigen::VectorXd y(6);
  for (int l = 0; l < 6; ++l) y[l] = rc.links[l].xi_lo * x[l];
  CHECK(std::abs((bound_vectors(rc, 4096).h * y).maxCoeff() - S) <= 1e-5 * S);
}

TEST_CASE("Lemma limbs and bounds sandwich the oracle") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 40; ++t) {
    const int n = 3 + t % 5;
    const CoverCircle cc = random_circle(rng, n, 0.25);
    const Eigen::VectorXd x = random_x(rng, n);
    Eigen::VectorXd y(n);
    for (int l = 0; l < n; ++l) y[l] = cc.links[l].xi_lo * x[l];
    const double S = worst_projection(cc, x);
    for (int M : {2, 5, 16, 64}) {
      const BoundVectors bv = bound_vectors(cc, M);
      const double hmax = (bv.h * y).maxCoeff();
      CHECK(hmax >= -1e-12);
      CHECK(hmax <= S * (1 + 1e-9));
      CHECK(S <= (bv.g * y).maxCoeff() * (1 + 1e-9));
    }
    const double P = worst_case_speb_oracle(cc, x);
    if (!std::isfinite(P)) continue;
    const SpebBounds sb = speb_bounds_eval(cc, x, 64);
    CHECK(sb.lower <= P * (1 + 1e-9));
    CHECK(P <= sb.upper * (1 + 1e-9));
  }
}

TEST_CASE("bounds at an isotropic point") {
  const SpebBounds sb = speb_bounds_eval(two_links(0.0), Eigen::Vector2d(1, 1), 4);
  CHECK(sb.lower == doctest::Approx(2.0));
  CHECK(sb.upper == doctest::Approx(2.0));
  CHECK(sb.B == doctest::Approx(1.0));
  CHECK(sb.valid);
}

TEST_CASE("gap constant") {
  CHECK(gap_constant(1.0, 4) == 0.0);
  CHECK(gap_constant(2.0, 8) == doctest::Approx(0.207107).epsilon(1e-5));
  CHECK(std::abs(1024.0 * 1024.0 * gap_constant(2.0, 1024) - pi * pi) <= 0.01 * pi * pi);
  CHECK(gap_constant(3.0, 16) < gap_constant(3.0, 8));
  CHECK_THROWS_AS(gap_constant(2.0, 4), std::domain_error);
  CHECK(min_valid_M(2.0) == 5);
}

TEST_CASE("tilde vectors") {
  CoverCircle cc;
  cc.links = {{0, pi / 4, pi / 12, 1.0, 1.0}, {1, 1.0, 0.0, 1.0, 1.0}};
  const TildeVectors tv = tilde_vectors(cc);
  CHECK(tv.s_tilde[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(tv.c_tilde[0] == doctest::Approx(2 * std::sin(pi / 12) * std::sin(pi / 12)).epsilon(1e-9));
  CHECK(tv.c_tilde[0] == doctest::Approx(0.133975).epsilon(1e-5));
  CHECK(tv.s_tilde[1] == 0.0);
  CHECK(tv.c_tilde[1] == 0.0);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ang(0, 2 * pi), wid(0, pi / 2);
  for (int t = 0; t < 200; ++t) {
    CoverCircle r;
    r.links = {{0, ang(rng), wid(rng), 1.0, 1.0}};
    const TildeVectors v = tilde_vectors(r);
    CHECK(v.s_tilde[0] <= 2.0);
    CHECK(v.s_tilde[0] == doctest::Approx(closed_s_tilde(2 * r.links[0].angle, r.links[0].half_width)).epsilon(1e-9));
  }
}

TEST_CASE("robust builds reduce to the nominal program without uncertainty") {
  const WirelessNetwork net({{30, 5}, {-20, 25}, {5, -30}, {40, 40}, {-35, -10}}, {{2, 3}},
                            (Eigen::MatrixXd(1, 5) << 1.0, 0.6, 1.4, 0.9, 1.1).finished(), 1.0,
                            Eigen::VectorXd::Constant(1, 100.0));
  const SolverSettings tight{1e-10, 200};
  const double nominal = solve_min_power(net, tight).total_power;
  const UncertaintyCover zero = derive_intervals_wnl(net, single_circle_cover(net, 0.0));
  const RobustResult eff = solve_robust(zero, RobustMethod::efficient, 0, tight);
  REQUIRE(eff.status == SolveStatus::optimal);
  CHECK(std::abs(eff.total_power - nominal) <= 1e-7 * nominal);
  const RobustResult asym = solve_robust(zero, RobustMethod::asymptotic_upper, 64, tight);
  CHECK(std::abs(asym.total_power - nominal) <= 2e-3 * nominal);
  const RobustResult low = solve_robust(zero, RobustMethod::asymptotic_lower, 64, tight);
  CHECK(low.total_power <= asym.total_power);
}

TEST_CASE("robust ordering, soundness and monotone conservatism") {
  const WirelessNetwork net({{30, 5}, {-20, 25}, {5, -30}, {40, 40}, {-35, -10}, {0, 45}}, {{2, 3}},
                            (Eigen::MatrixXd(1, 6) << 1.0, 0.6, 1.4, 0.9, 1.1, 0.8).finished(), 1.0,
                            Eigen::VectorXd::Constant(1, 100.0));
  double prev_eff = 0.0, prev_up = 0.0;
  for (double delta : {1.0, 3.0, 6.0}) {
    const UncertaintyCover cv = derive_intervals_wnl(net, single_circle_cover(net, delta));
    const RobustResult up = solve_robust(cv, RobustMethod::asymptotic_upper, 64);
    const RobustResult lo = solve_robust(cv, RobustMethod::asymptotic_lower, 64);
    const RobustResult eff = solve_robust(cv, RobustMethod::efficient);
    REQUIRE(up.status == SolveStatus::optimal);
    REQUIRE(lo.status == SolveStatus::optimal);
    REQUIRE(eff.status == SolveStatus::optimal);
    CHECK(lo.total_power <= up.total_power * (1 + 1e-8));
    CHECK(eff.worst_speb[0] <= 100.0 * (1 + 1e-6));
    CHECK(up.worst_speb[0] <= 100.0 * (1 + 1e-6));
    const RobustResult ref = solve_robust(cv, RobustMethod::asymptotic_upper, 512);
    CHECK(eff.total_power >= ref.total_power * (1 - 1e-8));
    CHECK(eff.total_power >= prev_eff);
    CHECK(up.total_power >= prev_up);
    prev_eff = eff.total_power;
    prev_up = up.total_power;
  }
}

TEST_CASE("hexagonal cover and multi-circle robust build") {
  const std::vector<Circle> hex = hex_cover({-2, -2}, {2, 2}, 1.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 500; ++t) {
    const Point p(u(rng), u(rng));
    double best = 1e9;
    for (const auto& c : hex) best = std::min(best, (c.center - p).norm());
    CHECK(best <= 1.0 + 1e-12);
  }
  const WirelessNetwork net({{30, 5}, {-20, 25}, {5, -30}, {-35, -10}}, {{0, 0}}, Eigen::MatrixXd::Ones(1, 4),
                            1.0, Eigen::VectorXd::Constant(1, 200.0));
  const UncertaintyCover cv = derive_intervals_wnl(net, {hex_cover({-1, -1}, {1, 1}, 1.0)});
  const RobustResult eff = solve_robust(cv, RobustMethod::efficient);
  REQUIRE(eff.status == SolveStatus::optimal);
  for (const auto& cc : cv.agents[0]) CHECK(worst_case_speb_oracle(cc, eff.x) <= 200.0 * (1 + 1e-6));
}

TEST_CASE("passive robust builds") {
  const RadarNetwork net({{30, 5}, {-20, 25}, {5, -30}}, {{40, 40}, {-35, -10}}, {2, 3},
                         (Eigen::MatrixXd(2, 3) << 1.0, 0.6, 1.4, 0.9, 1.1, 0.8).finished(), 1.0, 1e4);
  const SolverSettings tight{1e-10, 200};
  const double nominal = solve_min_power(net, tight).total_power;
  const UncertaintyCover zero = derive_intervals_rnl(net, {Circle{net.target(), 0.0}});
  const RobustResult z = solve_robust(zero, RobustMethod::efficient, 0, tight);
  REQUIRE(z.status == SolveStatus::optimal);
  CHECK(std::abs(z.total_power - nominal) <= 1e-7 * nominal);

  const UncertaintyCover cv = derive_intervals_rnl(net, {Circle{net.target(), 4.0}});
  const RobustResult eff = solve_robust(cv, RobustMethod::efficient);
  REQUIRE(eff.status == SolveStatus::optimal);
  CHECK(eff.worst_speb[0] <= 1e4 * (1 + 1e-6));
  CHECK(degenerate_columns(cv).empty());
  CHECK_THROWS_AS(build_robust_socp_efficient_wnl(cv), std::invalid_argument);

  // one receiver: the passive build is a single block like the active one
  const RadarNetwork one({{30, 5}, {-20, 25}, {5, -30}}, {{40, 40}}, {2, 3}, Eigen::MatrixXd::Ones(1, 3), 1.0, 1e4);
  const UncertaintyCover c1 = derive_intervals_rnl(one, {Circle{one.target(), 2.0}});
  CHECK(c1.agents[0][0].links.size() == 3);
  CHECK(build_robust_socp_efficient_rnl(c1).socs().size() == 4);
}
