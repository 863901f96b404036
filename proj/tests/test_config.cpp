#include <string>

#include "doctest.h"
#include "locopt/allocate.hpp"
#include "locopt/config.hpp"

using namespace locopt;

namespace {

const std::string kFixtures = LOCOPT_FIXTURES;

const char* kTwoAgents = R"(
[anchors]
positions = [[0, 0], [4, 0], [0, 4]]   # three anchors
caps = [10, 10, 10]

[agents]
positions = [[1, 1],
             [2, 1]]

[channel]
beta = 1
zeta = [[1, 1, 1],
        [2, 2, 2]]

[requirements]
rho = [1, 2]

[region]
size = 4

[uncertainty]
circles = [[[1, 1, 0.1]], [[2, 1, 0.1], [2.1, 1, 0.1]]]
)";

std::string with_line(const std::string& base, const std::string& from, const std::string& to) {
  std::string s = base;
  const auto p = s.find(from);
  REQUIRE(p != std::string::npos);
  s.replace(p, from.size(), to);
  return s;
}

}  // namespace

TEST_CASE("active network config") {
  const ScenarioConfig cfg = parse_scenario(kTwoAgents);
  REQUIRE(cfg.wnl);
  CHECK(cfg.kind == NetworkKind::wnl);
  CHECK(cfg.wnl->num_anchors() == 3);
  CHECK(cfg.wnl->num_agents() == 2);
  CHECK(cfg.wnl->rc()(1, 2) == 2.0);
  CHECK(cfg.wnl->requirements()[1] == 2.0);
  REQUIRE(cfg.caps());
  CHECK((*cfg.caps())[0] == 10.0);
  CHECK(*cfg.region == 4.0);
  REQUIRE(cfg.circles);
  CHECK((*cfg.circles)[1].size() == 2);
  const UncertaintyCover cover = scenario_uncertainty(cfg);
  CHECK(cover.agents[1].size() == 2);
  CHECK(scenario_uncertainty(cfg, 0.1).agents[1].size() == 1);
}

TEST_CASE("symmetric fixture") {
  const ScenarioConfig cfg = load_scenario(kFixtures + "/sym3.toml");
  REQUIRE(cfg.wnl);
  const AllocationResult r = solve_min_power(*cfg.wnl);
  REQUIRE(r.status == SolveStatus::optimal);
  CHECK(r.total_power == doctest::Approx(4.0).epsilon(1e-7));
}

TEST_CASE("radar config") {
  const ScenarioConfig cfg = load_scenario(kFixtures + "/radar.toml");
  REQUIRE(cfg.rnl);
  CHECK(cfg.kind == NetworkKind::rnl);
  CHECK(cfg.rnl->num_tx() == 2);
  CHECK(cfg.rnl->num_rx() == 3);
  REQUIRE(cfg.zeta_bounds);
  CHECK(cfg.zeta_bounds->hi(0, 1) == 2.2);
  const UncertaintyCover cover = scenario_uncertainty(cfg);
  CHECK(cover.kind == NetworkKind::rnl);
  CHECK(cover.agents.size() == 1);
  CHECK_THROWS_AS(scenario_uncertainty(cfg, 0.1), ConfigError);  // no region
}

TEST_CASE("malformed configs are rejected") {
  CHECK_THROWS_AS(load_scenario(kFixtures + "/missing.toml"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(with_line(kTwoAgents, "[region]", "[regoin]")), ConfigError);
  CHECK_THROWS_AS(parse_scenario(with_line(kTwoAgents, "size = 4", "sise = 4")), ConfigError);
  CHECK_THROWS_AS(parse_scenario(with_line(kTwoAgents, "rho = [1, 2]", "rho = [1, 2, 3]")), ConfigError);
  CHECK_THROWS_AS(parse_scenario(with_line(kTwoAgents, "[2, 2, 2]]", "[2, 2]]")), ConfigError);
  CHECK_THROWS_AS(parse_scenario(with_line(kTwoAgents, "size = 4", "size = four")), ConfigError);
  CHECK_THROWS_AS(parse_scenario(with_line(kTwoAgents, "[agents]\npositions = [[1, 1],", "[agents]\npositions = [[0, 0],")),
                  ConfigError);
  CHECK_THROWS_AS(parse_scenario("[anchors]\npositions = [[0, 0]\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("positions = [[0, 0]]\n"), ConfigError);
  try {
    parse_scenario(with_line(kTwoAgents, "size = 4", "size = -4"), "net.toml");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    INFO(e.what());
    CHECK(std::string(e.what()).rfind("net.toml:19:", 0) == 0);
  }
}
