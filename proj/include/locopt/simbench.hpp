#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "locopt/conic.hpp"
#include "locopt/netmodel.hpp"
#include "locopt/robust.hpp"

namespace locopt {

// Random scenario in a D x D square. For radar scenarios num_anchors counts
// transmitters and num_agents counts receivers; there is a single target.
struct ScenarioSpec {
  NetworkKind kind = NetworkKind::wnl;
  double region = 100.0;
  int num_anchors = 8;
  int num_agents = 1;
  double beta = 1.0;
  double zeta_mean = 1.0;
  double requirement = 1.0;
  double nuss = 0.0;  // 2 delta / D
  std::uint64_t seed = 1;

  // Throws std::invalid_argument when a field is out of range.
  void validate() const;
  double delta() const { return 0.5 * nuss * region; }
  // mu / D^(2 beta) for active networks, mu / D^(4 beta) for radar.
  double power_normalization() const;
};

// Engine for one trial of a scenario; independent of every other trial.
std::mt19937_64 trial_engine(const ScenarioSpec& spec, int trial);

// Rayleigh draw parameterized by its mean.
double sample_rayleigh(std::mt19937_64& rng, double mean);

WirelessNetwork generate_wnl(const ScenarioSpec& spec, int trial);
RadarNetwork generate_rnl(const ScenarioSpec& spec, int trial);

// One circle of radius delta around each agent (or the target).
UncertaintyCover scenario_cover(const WirelessNetwork& net, double delta);
UncertaintyCover scenario_cover(const RadarNetwork& net, double delta);

enum class AlgorithmKind {
  nominal_socp,
  uniform,
  robust_asym_upper,
  robust_asym_lower,
  robust_efficient,
  nonrobust_under_uncertainty
};

struct Algorithm {
  AlgorithmKind kind = AlgorithmKind::nominal_socp;
  int M = 64;  // asymptotic variants only

  // "nominal-socp", "robust-asym-upper(128)", ... Throws std::invalid_argument.
  static Algorithm parse(const std::string& id);
  std::string name() const;
};

struct Violation {
  std::vector<double> worst_speb;
  std::vector<bool> violated;  // worst_speb > requirement * (1 + 1e-6)
  bool any() const;
};

// Oracle worst case of an allocation over the cover.
Violation evaluate_violation(const UncertaintyCover& cover, const Eigen::VectorXd& x,
                             int theta_grid_size = 100000);

struct SweepConfig {
  std::vector<ScenarioSpec> grid;
  std::vector<Algorithm> algorithms;
  int trials = 200;
  int threads = 1;
  bool timing = false;  // wall_time stays 0 otherwise so reports are reproducible
  SolverSettings solver;
  int theta_grid_size = 100000;
};

struct SweepRow {
  int grid_index = 0;
  ScenarioSpec spec;
  std::string algorithm;
  int trial = 0;
  std::string status;
  double total_power = 0.0;       // NaN unless status is optimal
  double normalized_power = 0.0;
  std::vector<double> speb;       // nominal SPEB, or oracle worst case for uncertainty-aware rows
  bool violated = false;
  double wall_time = 0.0;         // seconds
};

struct SweepReport {
  std::vector<SweepRow> rows;  // grid point, then trial, then algorithm
};

// Solver failures are recorded in the rows and never abort the sweep.
SweepReport run_sweep(const SweepConfig& cfg);

void write_csv(const SweepReport& report, std::ostream& os);

struct SweepSummary {
  int grid_index = 0;
  std::string algorithm;
  int solved = 0;
  int failed = 0;
  int violations = 0;
  double mean_power = 0.0;
  double median_power = 0.0;
  double mean_normalized = 0.0;
  double median_normalized = 0.0;
};

std::vector<SweepSummary> summarize(const SweepReport& report);
void write_summary_csv(const std::vector<SweepSummary>& summary, std::ostream& os);

}  // namespace locopt
