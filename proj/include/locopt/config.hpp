#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "locopt/netmodel.hpp"
#include "locopt/robust.hpp"

namespace locopt {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scenario file: a TOML subset of [section] headers and `key = value` lines
// whose values are JSON numbers or (possibly multi-line) arrays. `#` starts a
// comment.
//
//   active:  [anchors] positions, caps   [agents] positions
//   radar:   [tx] positions, caps   [rx] positions   [target] position
//   both:    [channel] beta, zeta, zeta_lo, zeta_hi
//            [requirements] rho        (scalar or one per agent)
//            [region] size
//            [uncertainty] nuss | delta | circles
//
// circles lists [cx, cy, r] triples, per agent for active networks.
struct ScenarioConfig {
  NetworkKind kind = NetworkKind::wnl;
  std::optional<WirelessNetwork> wnl;
  std::optional<RadarNetwork> rnl;
  std::optional<double> region;
  std::optional<double> nuss;
  std::optional<double> delta;
  std::optional<std::vector<std::vector<Circle>>> circles;
  std::optional<ChannelBounds> zeta_bounds;

  std::optional<Eigen::VectorXd> caps() const;
  int num_columns() const;
};

// Throws ConfigError naming the line for malformed input; `source` prefixes
// the messages.
ScenarioConfig parse_scenario(const std::string& text, const std::string& source = "<config>");
// Throws ConfigError when the file cannot be read.
ScenarioConfig load_scenario(const std::string& path);

// Cover from explicit circles, else delta, else nuss (times region / 2).
// `nuss` overrides whatever the file says. Throws ConfigError when nothing
// determines the uncertainty.
UncertaintyCover scenario_uncertainty(const ScenarioConfig& cfg, std::optional<double> nuss = std::nullopt);

}  // namespace locopt
