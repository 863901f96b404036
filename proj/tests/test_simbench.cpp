#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "locopt/allocate.hpp"
#include "locopt/fisher.hpp"
#include "locopt/simbench.hpp"

using namespace locopt;

namespace {

ScenarioSpec wnl_spec(int nb, int na, double nuss, std::uint64_t seed = 42) {
  ScenarioSpec s;
  s.num_anchors = nb;
  s.num_agents = na;
  s.nuss = nuss;
  s.seed = seed;
  return s;
}

ScenarioSpec rnl_spec(int nt, int nr, double nuss, std::uint64_t seed = 42) {
  ScenarioSpec s = wnl_spec(nt, nr, nuss, seed);
  s.kind = NetworkKind::rnl;
  return s;
}

}  // namespace

TEST_CASE("spec validation") {
  ScenarioSpec s;
  CHECK_NOTHROW(s.validate());
  s.nuss = 1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = ScenarioSpec{};
  s.num_anchors = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = ScenarioSpec{};
  s.zeta_mean = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  CHECK_THROWS_AS(generate_rnl(ScenarioSpec{}, 0), std::invalid_argument);
}

TEST_CASE("generation is deterministic per seed and trial") {
  const ScenarioSpec s = wnl_spec(6, 3, 0.1);
  const WirelessNetwork a = generate_wnl(s, 5);
  const WirelessNetwork b = generate_wnl(s, 5);
  const WirelessNetwork c = generate_wnl(s, 6);
  for (int j = 0; j < 6; ++j) CHECK(a.anchors()[j] == b.anchors()[j]);
  CHECK(a.rc() == b.rc());
  CHECK(a.rc() != c.rc());
  const RadarNetwork r1 = generate_rnl(rnl_spec(3, 2, 0.1), 1);
  const RadarNetwork r2 = generate_rnl(rnl_spec(3, 2, 0.1), 1);
  CHECK(r1.target() == r2.target());
  CHECK(r1.rc() == r2.rc());
}

TEST_CASE("generated networks respect the exclusion distance") {
  const ScenarioSpec s = wnl_spec(8, 4, 0.3);
  const double min_dist = s.delta() + 0.01 * s.region;
  for (int t = 0; t < 50; ++t) {
    const WirelessNetwork net = generate_wnl(s, t);
    for (int k = 0; k < net.num_agents(); ++k) {
      for (int j = 0; j < net.num_anchors(); ++j) CHECK(net.link(k, j).distance >= min_dist);
      CHECK(net.agents()[k].minCoeff() >= 0.0);
      CHECK(net.agents()[k].maxCoeff() <= s.region);
    }
  }
}

TEST_CASE("rayleigh draws have the requested mean") {
  std::mt19937_64 rng(123);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += sample_rayleigh(rng, 2.5);
  CHECK(std::abs(sum / n - 2.5) <= 0.01 * 2.5);
}

TEST_CASE("algorithm ids") {
  CHECK(Algorithm::parse("nominal-socp").kind == AlgorithmKind::nominal_socp);
  const Algorithm a = Algorithm::parse("robust-asym-upper(128)");
  CHECK(a.kind == AlgorithmKind::robust_asym_upper);
  CHECK(a.M == 128);
  CHECK(a.name() == "robust-asym-upper(128)");
  CHECK(Algorithm::parse("robust-efficient").name() == "robust-efficient");
  CHECK_THROWS_AS(Algorithm::parse("robust-asym-lower(1)"), std::invalid_argument);
  CHECK_THROWS_AS(Algorithm::parse("uniform(4)"), std::invalid_argument);
  CHECK_THROWS_AS(Algorithm::parse("simplex"), std::invalid_argument);
  CHECK_THROWS_AS(Algorithm::parse("robust-asym-upper(x)"), std::invalid_argument);
}

TEST_CASE("zero uncertainty leaves nominal allocations unviolated") {
  const ScenarioSpec s = wnl_spec(6, 2, 0.0);
  for (int t = 0; t < 10; ++t) {
    const WirelessNetwork net = generate_wnl(s, t);
    const AllocationResult r = solve_min_power(net);
    REQUIRE(r.status == SolveStatus::optimal);
    const Violation v = evaluate_violation(scenario_cover(net, 0.0), r.x);
    CHECK_FALSE(v.any());
  }
}

TEST_CASE("worst case scales inversely with power") {
  const ScenarioSpec s = wnl_spec(6, 1, 0.15);
  const WirelessNetwork net = generate_wnl(s, 3);
  const UncertaintyCover cover = scenario_cover(net, s.delta());
  const AllocationResult r = solve_min_power(net);
  REQUIRE(r.status == SolveStatus::optimal);
  const Violation a = evaluate_violation(cover, r.x);
  const Violation b = evaluate_violation(cover, 10.0 * r.x);
  CHECK(b.worst_speb[0] == doctest::Approx(a.worst_speb[0] / 10.0).epsilon(1e-12));
}

TEST_CASE("sweep rows and invariants") {
  SweepConfig cfg;
  cfg.grid = {wnl_spec(6, 1, 0.1, 7)};
  for (const char* id : {"nominal-socp", "uniform", "robust-asym-upper(32)", "robust-asym-lower(32)",
                         "robust-efficient", "nonrobust-under-uncertainty"}) {
    cfg.algorithms.push_back(Algorithm::parse(id));
  }
  cfg.trials = 4;
  const SweepReport rep = run_sweep(cfg);
  REQUIRE(rep.rows.size() == 24);
  for (int t = 0; t < 4; ++t) {
    const auto* row = &rep.rows[static_cast<std::size_t>(6 * t)];
    CHECK(row[0].trial == t);
    for (int a = 0; a < 6; ++a) REQUIRE(row[a].status == "optimal");
    CHECK(row[1].total_power >= row[0].total_power * (1 - 1e-7));
    CHECK(row[0].total_power >= 0.0);
    CHECK(row[4].total_power >= row[2].total_power * (1 - 1e-7));
    CHECK(row[2].total_power >= row[3].total_power * (1 - 1e-7));
    CHECK(row[5].total_power == row[0].total_power);
    CHECK(row[5].speb[0] >= row[0].speb[0] * (1 - 1e-9));
    CHECK_FALSE(row[4].violated);
    CHECK(row[0].normalized_power == doctest::Approx(row[0].total_power / (100.0 * 100.0)));
    CHECK(row[0].wall_time == 0.0);
  }
}

TEST_CASE("zero uncertainty robust power equals nominal power") {
  SweepConfig cfg;
  cfg.grid = {wnl_spec(5, 2, 0.0, 9), rnl_spec(3, 3, 0.0, 9)};
  cfg.algorithms = {Algorithm::parse("nominal-socp"), Algorithm::parse("robust-efficient")};
  cfg.trials = 5;
  const SweepReport rep = run_sweep(cfg);
  REQUIRE(rep.rows.size() == 20);
  for (std::size_t i = 0; i < rep.rows.size(); i += 2) {
    REQUIRE(rep.rows[i].status == "optimal");
    REQUIRE(rep.rows[i + 1].status == "optimal");
    CHECK(rep.rows[i + 1].total_power == doctest::Approx(rep.rows[i].total_power).epsilon(1e-7));
  }
}

TEST_CASE("single transmitter radar gains nothing over uniform") {
  SweepConfig cfg;
  cfg.grid = {rnl_spec(1, 4, 0.0, 11)};
  cfg.algorithms = {Algorithm::parse("nominal-socp"), Algorithm::parse("uniform")};
  cfg.trials = 10;
  SolverSettings tight;
  tight.tol = 1e-11;
  cfg.solver = tight;
  const SweepReport rep = run_sweep(cfg);
  for (std::size_t i = 0; i < rep.rows.size(); i += 2) {
    REQUIRE(rep.rows[i].status == "optimal");
    CHECK(rep.rows[i].total_power == doctest::Approx(rep.rows[i + 1].total_power).epsilon(1e-9));
    CHECK(rep.rows[i].normalized_power == doctest::Approx(rep.rows[i].total_power / std::pow(100.0, 4)));
  }
}

TEST_CASE("reports are reproducible and thread-count independent") {
  SweepConfig cfg;
  cfg.grid = {wnl_spec(5, 2, 0.1, 3), rnl_spec(2, 3, 0.1, 3)};
  cfg.algorithms = {Algorithm::parse("nominal-socp"), Algorithm::parse("uniform"),
                    Algorithm::parse("nonrobust-under-uncertainty")};
  cfg.trials = 6;
  std::ostringstream a, b, c;
  write_csv(run_sweep(cfg), a);
  write_csv(run_sweep(cfg), b);
  cfg.threads = 3;
  write_csv(run_sweep(cfg), c);
  CHECK(a.str() == b.str());
  CHECK(a.str() == c.str());
  CHECK(a.str().rfind("kind,region,anchors,agents,beta,zeta_mean,requirement,nuss,seed,algorithm,trial,", 0) == 0);
}

TEST_CASE("summary statistics") {
  SweepReport rep;
  for (int t = 0; t < 4; ++t) {
    SweepRow r;
    r.algorithm = "uniform";
    r.trial = t;
    r.status = t == 3 ? "primal_infeasible" : "optimal";
    r.total_power = t == 3 ? std::nan("") : 1.0 + t * t;
    r.normalized_power = r.total_power;
    rep.rows.push_back(r);
  }
  const auto s = summarize(rep);
  REQUIRE(s.size() == 1);
  CHECK(s[0].solved == 3);
  CHECK(s[0].failed == 1);
  CHECK(s[0].mean_power == doctest::Approx(8.0 / 3.0));
  CHECK(s[0].median_power == doctest::Approx(2.0));
}
