#include "locopt/simbench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "locopt/allocate.hpp"
#include "locopt/fisher.hpp"

namespace locopt {

namespace {

constexpr int kMaxRedraws = 100000;
constexpr double kViolationTol = 1e-6;

std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); }
std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

Point uniform_point(std::mt19937_64& rng, double D) {
  std::uniform_real_distribution<double> u(0.0, D);
  const double x = u(rng);
  return {x, u(rng)};
}

std::vector<Point> uniform_points(std::mt19937_64& rng, int n, double D) {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(uniform_point(rng, D));
  return out;
}

Eigen::MatrixXd rayleigh_matrix(std::mt19937_64& rng, int rows, int cols, double mean) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = sample_rayleigh(rng, mean);
  }
  return m;
}

bool far_enough(const std::vector<Point>& a, const Point& b, double min_dist) {
  return std::all_of(a.begin(), a.end(), [&](const Point& p) { return (p - b).norm() >= min_dist; });
}

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double d : v) s += d;
  return s / static_cast<double>(v.size());
}

}  // namespace

void ScenarioSpec::validate() const {
  if (!(region > 0.0) || !std::isfinite(region)) throw std::invalid_argument("scenario: region size must be positive");
  if (!(zeta_mean > 0.0) || !std::isfinite(zeta_mean)) throw std::invalid_argument("scenario: zeta mean must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("scenario: beta must be positive");
  if (!(requirement > 0.0) || !std::isfinite(requirement)) throw std::invalid_argument("scenario: requirement must be positive");
  if (!(nuss >= 0.0 && nuss < 1.0)) throw std::invalid_argument("scenario: nuss must lie in [0, 1)");
  if (num_anchors < 1 || num_agents < 1) throw std::invalid_argument("scenario: node counts must be at least 1");
}

double ScenarioSpec::power_normalization() const {
  const double e = kind == NetworkKind::wnl ? 2.0 * beta : 4.0 * beta;
  return zeta_mean / std::pow(region, e);
}

std::mt19937_64 trial_engine(const ScenarioSpec& spec, int trial) {
  std::seed_seq seq{lo32(spec.seed), hi32(spec.seed), static_cast<std::uint32_t>(trial),
                    static_cast<std::uint32_t>(spec.kind == NetworkKind::wnl ? 0x574e4cu : 0x524e4cu)};
  return std::mt19937_64(seq);
}

double sample_rayleigh(std::mt19937_64& rng, double mean) {
  // Rayleigh(sigma) is Weibull with shape 2 and scale sigma sqrt(2).
  const double sigma = mean * std::sqrt(2.0 / std::numbers::pi);
  std::weibull_distribution<double> w(2.0, sigma * std::numbers::sqrt2);
  return w(rng);
}

WirelessNetwork generate_wnl(const ScenarioSpec& spec, int trial) {
  spec.validate();
  if (spec.kind != NetworkKind::wnl) throw std::invalid_argument("generate_wnl: radar scenario");
  std::mt19937_64 rng = trial_engine(spec, trial);
  const double min_dist = spec.delta() + 0.01 * spec.region;
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    std::vector<Point> anchors = uniform_points(rng, spec.num_anchors, spec.region);
    std::vector<Point> agents = uniform_points(rng, spec.num_agents, spec.region);
    Eigen::MatrixXd rc = rayleigh_matrix(rng, spec.num_agents, spec.num_anchors, spec.zeta_mean);
    const bool ok = std::all_of(agents.begin(), agents.end(),
                                [&](const Point& a) { return far_enough(anchors, a, min_dist); });
    if (!ok) continue;
    return WirelessNetwork(std::move(anchors), std::move(agents), std::move(rc), spec.beta,
                           Eigen::VectorXd::Constant(spec.num_agents, spec.requirement));
  }
  throw std::runtime_error("generate_wnl: no admissible configuration found");
}

RadarNetwork generate_rnl(const ScenarioSpec& spec, int trial) {
  spec.validate();
  if (spec.kind != NetworkKind::rnl) throw std::invalid_argument("generate_rnl: active scenario");
  std::mt19937_64 rng = trial_engine(spec, trial);
  const double min_dist = spec.delta() + 0.01 * spec.region;
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    std::vector<Point> tx = uniform_points(rng, spec.num_anchors, spec.region);
    std::vector<Point> rx = uniform_points(rng, spec.num_agents, spec.region);
    const Point target = uniform_point(rng, spec.region);
    Eigen::MatrixXd rc = rayleigh_matrix(rng, spec.num_agents, spec.num_anchors, spec.zeta_mean);
    if (!far_enough(tx, target, min_dist) || !far_enough(rx, target, min_dist)) continue;
    return RadarNetwork(std::move(tx), std::move(rx), target, std::move(rc), spec.beta, spec.requirement);
  }
  throw std::runtime_error("generate_rnl: no admissible configuration found");
}

UncertaintyCover scenario_cover(const WirelessNetwork& net, double delta) {
  return derive_intervals_wnl(net, single_circle_cover(net, delta));
}

UncertaintyCover scenario_cover(const RadarNetwork& net, double delta) {
  return derive_intervals_rnl(net, {Circle{net.target(), delta}});
}

namespace {

const std::map<std::string, AlgorithmKind>& algorithm_names() {
  static const std::map<std::string, AlgorithmKind> names{
      {"nominal-socp", AlgorithmKind::nominal_socp},
      {"uniform", AlgorithmKind::uniform},
      {"robust-asym-upper", AlgorithmKind::robust_asym_upper},
      {"robust-asym-lower", AlgorithmKind::robust_asym_lower},
      {"robust-efficient", AlgorithmKind::robust_efficient},
      {"nonrobust-under-uncertainty", AlgorithmKind::nonrobust_under_uncertainty},
  };
  return names;
}

bool asymptotic(AlgorithmKind k) {
  return k == AlgorithmKind::robust_asym_upper || k == AlgorithmKind::robust_asym_lower;
}

}  // namespace

Algorithm Algorithm::parse(const std::string& id) {
  std::string base = id;
  std::optional<int> M;
  const auto open = id.find('(');
  if (open != std::string::npos) {
    if (id.back() != ')') throw std::invalid_argument("unknown algorithm: " + id);
    base = id.substr(0, open);
    const std::string arg = id.substr(open + 1, id.size() - open - 2);
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(arg, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad M in algorithm id: " + id);
    }
    if (used != arg.size()) throw std::invalid_argument("bad M in algorithm id: " + id);
    M = value;
  }
  const auto it = algorithm_names().find(base);
  if (it == algorithm_names().end()) throw std::invalid_argument("unknown algorithm: " + id);
  Algorithm a;
  a.kind = it->second;
  if (M) {
    if (!asymptotic(a.kind)) throw std::invalid_argument("only asymptotic variants take M: " + id);
    a.M = *M;
  }
  if (asymptotic(a.kind) && a.M < 2) throw std::invalid_argument("M must be at least 2: " + id);
  return a;
}

std::string Algorithm::name() const {
  for (const auto& [n, k] : algorithm_names()) {
    if (k == kind) return asymptotic(kind) ? n + "(" + std::to_string(M) + ")" : n;
  }
  return "unknown";
}

bool Violation::any() const { return std::any_of(violated.begin(), violated.end(), [](bool b) { return b; }); }

Violation evaluate_violation(const UncertaintyCover& cover, const Eigen::VectorXd& x, int theta_grid_size) {
  Violation v;
  v.worst_speb = worst_case_spebs(cover, x, theta_grid_size);
  for (std::size_t k = 0; k < v.worst_speb.size(); ++k) {
    const double rho = cover.requirements[static_cast<Eigen::Index>(k)];
    v.violated.push_back(v.worst_speb[k] > rho * (1.0 + kViolationTol));
  }
  return v;
}

namespace {

struct Outcome {
  std::string status;
  Eigen::VectorXd x;
  std::vector<double> speb;
  bool violated = false;
};

// Everything one trial needs, built lazily so unused pieces cost nothing.
class Trial {
 public:
  Trial(const ScenarioSpec& spec, int trial, const SweepConfig& cfg) : spec_(spec), cfg_(cfg) {
    if (spec.kind == NetworkKind::wnl) {
      wnl_.emplace(generate_wnl(spec, trial));
    } else {
      rnl_.emplace(generate_rnl(spec, trial));
    }
  }

  Outcome run(const Algorithm& alg) {
    switch (alg.kind) {
      case AlgorithmKind::nominal_socp: return nominal();
      case AlgorithmKind::uniform: return uniform();
      case AlgorithmKind::robust_asym_upper: return robust(RobustMethod::asymptotic_upper, alg.M);
      case AlgorithmKind::robust_asym_lower: return robust(RobustMethod::asymptotic_lower, alg.M);
      case AlgorithmKind::robust_efficient: return robust(RobustMethod::efficient, 0);
      case AlgorithmKind::nonrobust_under_uncertainty: return nonrobust();
    }
    throw std::logic_error("unhandled algorithm");
  }

 private:
  std::vector<double> nominal_spebs(const Eigen::VectorXd& x) const {
    if (wnl_) return agent_spebs(*wnl_, x);
    return {speb(efim_rnl(*rnl_, x))};
  }

  const UncertaintyCover& cover() {
    if (!cover_) cover_ = wnl_ ? scenario_cover(*wnl_, spec_.delta()) : scenario_cover(*rnl_, spec_.delta());
    return *cover_;
  }

  Outcome nominal() {
    if (!nominal_) {
      const AllocationResult r = wnl_ ? solve_min_power(*wnl_, cfg_.solver) : solve_min_power(*rnl_, cfg_.solver);
      Outcome o;
      o.status = std::string(to_string(r.status));
      if (r.status == SolveStatus::optimal) {
        o.x = r.x;
        o.speb = r.speb;
      }
      nominal_ = o;
    }
    return *nominal_;
  }

  Outcome uniform() {
    Outcome o;
    try {
      const double t = wnl_ ? uniform_min_power(*wnl_) : uniform_min_power(*rnl_);
      o.x = Eigen::VectorXd::Constant(spec_.num_anchors, t);
      o.status = "optimal";
      o.speb = nominal_spebs(o.x);
    } catch (const InfeasibleRequirement&) {
      o.status = std::string(to_string(SolveStatus::primal_infeasible));
    }
    return o;
  }

  Outcome robust(RobustMethod method, int M) {
    const RobustResult r = solve_robust(cover(), method, M, cfg_.solver, cfg_.theta_grid_size);
    Outcome o;
    o.status = std::string(to_string(r.status));
    if (r.status == SolveStatus::optimal) {
      o.x = r.x;
      o.speb = r.worst_speb;
      for (std::size_t k = 0; k < o.speb.size(); ++k) {
        o.violated = o.violated || o.speb[k] > cover().requirements[static_cast<Eigen::Index>(k)] * (1.0 + kViolationTol);
      }
    }
    return o;
  }

  Outcome nonrobust() {
    Outcome o = nominal();
    if (o.x.size() == 0) return o;
    const Violation v = evaluate_violation(cover(), o.x, cfg_.theta_grid_size);
    o.speb = v.worst_speb;
    o.violated = v.any();
    return o;
  }

  const ScenarioSpec& spec_;
  const SweepConfig& cfg_;
  std::optional<WirelessNetwork> wnl_;
  std::optional<RadarNetwork> rnl_;
  std::optional<UncertaintyCover> cover_;
  std::optional<Outcome> nominal_;
};

std::vector<SweepRow> run_trial(const SweepConfig& cfg, int g, int trial) {
  const ScenarioSpec& spec = cfg.grid[static_cast<std::size_t>(g)];
  std::vector<SweepRow> rows;
  auto blank = [&](const Algorithm& alg) {
    SweepRow row;
    row.grid_index = g;
    row.spec = spec;
    row.algorithm = alg.name();
    row.trial = trial;
    row.total_power = std::numeric_limits<double>::quiet_NaN();
    row.normalized_power = std::numeric_limits<double>::quiet_NaN();
    return row;
  };
  std::optional<Trial> t;
  try {
    t.emplace(spec, trial, cfg);
  } catch (const std::exception&) {
    for (const auto& alg : cfg.algorithms) {
      SweepRow row = blank(alg);
      row.status = "generation_failure";
      rows.push_back(row);
    }
    return rows;
  }
  for (const auto& alg : cfg.algorithms) {
    SweepRow row = blank(alg);
    const auto start = std::chrono::steady_clock::now();
    try {
      const Outcome o = t->run(alg);
      row.status = o.status;
      row.speb = o.speb;
      row.violated = o.violated;
      if (o.x.size() > 0) {
        row.total_power = o.x.sum();
        row.normalized_power = spec.power_normalization() * row.total_power;
      }
    } catch (const std::exception&) {
      row.status = "error";
    }
    if (cfg.timing) {
      row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

SweepReport run_sweep(const SweepConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("sweep: trials must be at least 1");
  if (cfg.algorithms.empty()) throw std::invalid_argument("sweep: no algorithms");
  for (const auto& s : cfg.grid) s.validate();
  for (const auto& a : cfg.algorithms) {
    if (asymptotic(a.kind) && a.M < 2) throw std::invalid_argument("sweep: M must be at least 2");
  }

  const int jobs = static_cast<int>(cfg.grid.size()) * cfg.trials;
  std::vector<std::vector<SweepRow>> slots(static_cast<std::size_t>(jobs));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int j = next++; j < jobs; j = next++) {
      slots[static_cast<std::size_t>(j)] = run_trial(cfg, j / cfg.trials, j % cfg.trials);
    }
  };
  const int nthreads = std::clamp(cfg.threads, 1, std::max(jobs, 1));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SweepReport report;
  report.rows.reserve(static_cast<std::size_t>(jobs) * cfg.algorithms.size());
  for (auto& s : slots) {
    for (auto& r : s) report.rows.push_back(std::move(r));
  }
  return report;
}

void write_csv(const SweepReport& report, std::ostream& os) {
  os << "kind,region,anchors,agents,beta,zeta_mean,requirement,nuss,seed,"
        "algorithm,trial,status,total_power,normalized_power,max_speb,speb,violated,wall_time\n";
  for (const auto& r : report.rows) {
    const ScenarioSpec& s = r.spec;
    double worst = r.speb.empty() ? std::numeric_limits<double>::quiet_NaN() : -std::numeric_limits<double>::infinity();
    std::string list;
    for (double v : r.speb) {
      worst = std::max(worst, v);
      if (!list.empty()) list += ';';
      list += fmt17(v);
    }
    os << (s.kind == NetworkKind::wnl ? "wnl" : "rnl") << ',' << fmt17(s.region) << ',' << s.num_anchors << ','
       << s.num_agents << ',' << fmt17(s.beta) << ',' << fmt17(s.zeta_mean) << ',' << fmt17(s.requirement) << ','
       << fmt17(s.nuss) << ',' << s.seed << ',' << r.algorithm << ',' << r.trial << ',' << r.status << ','
       << fmt17(r.total_power) << ',' << fmt17(r.normalized_power) << ',' << fmt17(worst) << ',' << list << ','
       << (r.violated ? 1 : 0) << ',' << fmt17(r.wall_time) << '\n';
  }
}

std::vector<SweepSummary> summarize(const SweepReport& report) {
  std::map<std::pair<int, std::string>, std::vector<const SweepRow*>> groups;
  std::vector<std::pair<int, std::string>> order;
  for (const auto& r : report.rows) {
    const auto key = std::make_pair(r.grid_index, r.algorithm);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }
  std::vector<SweepSummary> out;
  for (const auto& key : order) {
    SweepSummary s;
    s.grid_index = key.first;
    s.algorithm = key.second;
    std::vector<double> power, normalized;
    for (const SweepRow* r : groups[key]) {
      if (r->status == "optimal") {
        ++s.solved;
        power.push_back(r->total_power);
        normalized.push_back(r->normalized_power);
      } else {
        ++s.failed;
      }
      if (r->violated) ++s.violations;
    }
    s.mean_power = mean(power);
    s.median_power = median(power);
    s.mean_normalized = mean(normalized);
    s.median_normalized = median(normalized);
    out.push_back(s);
  }
  return out;
}

void write_summary_csv(const std::vector<SweepSummary>& summary, std::ostream& os) {
  os << "grid_index,algorithm,solved,failed,violations,mean_power,median_power,mean_normalized,median_normalized\n";
  for (const auto& s : summary) {
    os << s.grid_index << ',' << s.algorithm << ',' << s.solved << ',' << s.failed << ',' << s.violations << ','
       << fmt17(s.mean_power) << ',' << fmt17(s.median_power) << ',' << fmt17(s.mean_normalized) << ','
       << fmt17(s.median_normalized) << '\n';
  }
}

}  // namespace locopt
