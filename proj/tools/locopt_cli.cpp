#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "locopt/allocate.hpp"
#include "locopt/config.hpp"
#include "locopt/fisher.hpp"
#include "locopt/robust.hpp"
#include "locopt/simbench.hpp"

using json = nlohmann::json;
using namespace locopt;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInfeasible = 2, kSolverFailure = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string mode;
  std::string net;
  std::vector<double> nuss;
  int M = 64;
  std::string variant = "efficient";
  double tol = 1e-8;
  std::uint64_t seed = 1;
  int trials = 200;
  std::string out;
  std::string format;  // text, or csv for sweep
  std::string x;
  std::optional<double> requirement;
  std::string caps;
  std::optional<double> ptot;
  int threads = 1;
  bool timing = false;
  // sweep
  std::string kind = "wnl";
  std::vector<int> anchors{8};
  std::vector<int> agents{1};
  double region = 100.0;
  double beta = 1.0;
  double zeta_mean = 1.0;
  std::vector<std::string> algorithms{"nominal-socp", "uniform", "robust-efficient", "nonrobust-under-uncertainty"};
  std::string summary;
};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const std::vector<double>& v) {
  json a = json::array();
  for (double d : v) a.push_back(d);
  return a;
}

json kkt_json(const KktReport& r) {
  return json{{"primal", r.primal},
              {"primal_abs", r.primal_abs},
              {"dual", r.dual},
              {"complementarity", r.complementarity},
              {"gap", r.gap},
              {"cone_violation", r.cone_violation},
              {"max_violation", r.max_violation},
              {"constraint_slack", to_json(r.constraint_slack)},
              {"certificate_valid", r.certificate_valid},
              {"certificate_residual", r.certificate_residual}};
}

int exit_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return kOk;
    case SolveStatus::primal_infeasible: return kInfeasible;
    default: return kSolverFailure;
  }
}

bool looks_numeric(const std::string& s) {
  try {
    std::size_t used = 0;
    std::stod(s, &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

// Loads the network and applies --requirement and --caps.
ScenarioConfig load_network(const Options& o) {
  std::string path = o.net;
  if (path.empty()) {
    if (!o.caps.empty() && !looks_numeric(o.caps)) {
      path = o.caps;
    } else {
      throw UsageError("--net is required for mode " + o.mode);
    }
  }
  ScenarioConfig cfg = load_scenario(path);
  if (o.requirement) {
    if (!(*o.requirement > 0.0)) throw UsageError("--requirement must be positive");
    if (cfg.wnl) {
      cfg.wnl = cfg.wnl->with_requirements(Eigen::VectorXd::Constant(cfg.wnl->num_agents(), *o.requirement));
    } else {
      cfg.rnl = cfg.rnl->with_requirement(*o.requirement);
    }
  }
  if (!o.caps.empty()) {
    const int n = cfg.num_columns();
    Eigen::VectorXd caps;
    if (looks_numeric(o.caps)) {
      caps = Eigen::VectorXd::Constant(n, std::stod(o.caps));
    } else {
      const ScenarioConfig other = path == o.caps ? cfg : load_scenario(o.caps);
      if (!other.caps()) throw ConfigError(o.caps + ": no caps given");
      caps = *other.caps();
    }
    if (caps.size() != n) throw ConfigError("caps: expected " + std::to_string(n) + " entries");
    if ((caps.array() < 0.0).any()) throw ConfigError("caps must be nonnegative");
    if (cfg.wnl) {
      cfg.wnl = cfg.wnl->with_caps(caps);
    } else {
      cfg.rnl = cfg.rnl->with_caps(caps);
    }
  }
  return cfg;
}

std::optional<double> single_nuss(const Options& o) {
  if (o.nuss.empty()) return std::nullopt;
  if (o.nuss.size() > 1) throw UsageError("--nuss takes a single value outside sweep mode");
  return o.nuss.front();
}

Eigen::VectorXd parse_x(const Options& o, const ScenarioConfig& cfg) {
  const int n = cfg.num_columns();
  if (o.x.empty()) throw UsageError("--x is required for mode " + o.mode);
  if (o.x == "uniform") {
    const double t = cfg.wnl ? uniform_min_power(*cfg.wnl) : uniform_min_power(*cfg.rnl);
    return Eigen::VectorXd::Constant(n, t);
  }
  std::vector<double> vals;
  std::stringstream ss(o.x);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!looks_numeric(item)) throw UsageError("--x: not a number: '" + item + "'");
    vals.push_back(std::stod(item));
  }
  if (static_cast<int>(vals.size()) != n) {
    throw UsageError("--x: expected " + std::to_string(n) + " values, got " + std::to_string(vals.size()));
  }
  Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(vals.data(), n);
  if ((x.array() < 0.0).any()) throw UsageError("--x: powers must be nonnegative");
  return x;
}

std::vector<double> requirements_of(const ScenarioConfig& cfg) {
  if (cfg.wnl) {
    const auto& r = cfg.wnl->requirements();
    return std::vector<double>(r.data(), r.data() + r.size());
  }
  return {cfg.rnl->requirement()};
}

std::string kind_name(NetworkKind k) { return k == NetworkKind::wnl ? "wnl" : "rnl"; }

// Writes one result in the requested format.
class Report {
 public:
  Report(const Options& o, json body) : o_(o), body_(std::move(body)) {}

  void text(const std::string& line) { text_ += line + '\n'; }
  void csv(const std::string& line) { csv_ += line + '\n'; }

  void emit(std::ostream& os) const {
    if (o_.format == "json") {
      os << body_.dump(2) << '\n';
    } else if (o_.format == "csv") {
      os << csv_;
    } else {
      os << text_;
    }
  }

 private:
  const Options& o_;
  json body_;
  std::string text_, csv_;
};

void allocation_lines(Report& rep, const Eigen::VectorXd& x, const std::vector<double>& speb,
                      const std::vector<double>& rho, const std::string& speb_label) {
  for (Eigen::Index j = 0; j < x.size(); ++j) rep.text("x[" + std::to_string(j) + "] " + num(x[j]));
  for (std::size_t k = 0; k < speb.size(); ++k) {
    rep.text(speb_label + "[" + std::to_string(k) + "] " + num(speb[k]) + " rho " + num(rho[k]));
  }
  rep.csv("kind,index,value");
  for (Eigen::Index j = 0; j < x.size(); ++j) rep.csv("x," + std::to_string(j) + "," + num(x[j]));
  for (std::size_t k = 0; k < speb.size(); ++k) rep.csv(speb_label + "," + std::to_string(k) + "," + num(speb[k]));
}

void kkt_lines(Report& rep, const KktReport& r, SolveStatus status) {
  if (status == SolveStatus::primal_infeasible || status == SolveStatus::dual_infeasible) {
    rep.text(std::string("certificate ") + (r.certificate_valid ? "valid" : "invalid") + " residual " +
             num(r.certificate_residual));
    return;
  }
  rep.text("kkt primal " + num(r.primal) + " dual " + num(r.dual) + " gap " + num(r.gap) + " cone " +
           num(r.cone_violation));
}

int run_solve(const Options& o, std::ostream& os) {
  const ScenarioConfig cfg = load_network(o);
  SolverSettings s;
  s.tol = o.tol;
  const ConeProgram prog = cfg.wnl ? build_min_power_wnl(*cfg.wnl) : build_min_power_rnl(*cfg.rnl);
  const AllocationResult r = cfg.wnl ? solve_min_power(*cfg.wnl, s) : solve_min_power(*cfg.rnl, s);
  const KktReport kkt = check_kkt(prog, r.solution);
  const std::vector<double> rho = requirements_of(cfg);
  json body{{"mode", "solve"},
            {"network", kind_name(cfg.kind)},
            {"status", std::string(to_string(r.status))},
            {"iterations", r.solution.iterations},
            {"requirements", to_json(rho)},
            {"kkt", kkt_json(kkt)}};
  if (r.status == SolveStatus::optimal) {
    body["total_power"] = r.total_power;
    body["x"] = to_json(r.x);
    body["speb"] = to_json(r.speb);
  }
  Report rep(o, body);
  rep.text("status " + std::string(to_string(r.status)));
  if (r.status == SolveStatus::optimal) {
    rep.text("total power " + fixed6(r.total_power));
    rep.text("total power exact " + num(r.total_power));
    allocation_lines(rep, r.x, r.speb, rho, "speb");
  } else {
    rep.csv("kind,index,value");
  }
  kkt_lines(rep, kkt, r.status);
  rep.emit(os);
  return exit_for(r.status);
}

RobustMethod parse_variant(const std::string& v) {
  if (v == "upper") return RobustMethod::asymptotic_upper;
  if (v == "lower") return RobustMethod::asymptotic_lower;
  if (v == "efficient") return RobustMethod::efficient;
  throw UsageError("--variant must be upper, lower or efficient");
}

int run_robust(const Options& o, std::ostream& os) {
  const RobustMethod method = parse_variant(o.variant);
  if (method != RobustMethod::efficient && o.M < 2) throw UsageError("--M must be at least 2");
  const ScenarioConfig cfg = load_network(o);
  UncertaintyCover cover = scenario_uncertainty(cfg, single_nuss(o));
  cover.caps = cfg.caps();
  SolverSettings s;
  s.tol = o.tol;
  const RobustResult r = solve_robust(cover, method, o.M, s);
  ConeProgram prog = [&] {
    if (method == RobustMethod::asymptotic_upper) return build_robust_socp_asymptotic(cover, o.M, BoundVariant::upper);
    if (method == RobustMethod::asymptotic_lower) return build_robust_socp_asymptotic(cover, o.M, BoundVariant::lower);
    return cover.kind == NetworkKind::wnl ? build_robust_socp_efficient_wnl(cover) : build_robust_socp_efficient_rnl(cover);
  }();
  const KktReport kkt = check_kkt(prog, r.solution);
  const std::vector<double> rho = requirements_of(cfg);
  json body{{"mode", "robust-solve"},
            {"network", kind_name(cfg.kind)},
            {"variant", o.variant},
            {"status", std::string(to_string(r.status))},
            {"iterations", r.solution.iterations},
            {"requirements", to_json(rho)},
            {"warnings", r.warnings},
            {"kkt", kkt_json(kkt)}};
  if (method != RobustMethod::efficient) body["M"] = o.M;
  if (r.status == SolveStatus::optimal) {
    body["total_power"] = r.total_power;
    body["x"] = to_json(r.x);
    body["worst_speb"] = to_json(r.worst_speb);
    if (method != RobustMethod::efficient) {
      body["bounds_valid"] = r.bounds_valid;
      body["recommended_M"] = r.recommended_M;
    }
  }
  Report rep(o, body);
  rep.text("status " + std::string(to_string(r.status)));
  if (r.status == SolveStatus::optimal) {
    rep.text("total power " + fixed6(r.total_power));
    rep.text("total power exact " + num(r.total_power));
    allocation_lines(rep, r.x, r.worst_speb, rho, "worst_speb");
  } else {
    rep.csv("kind,index,value");
  }
  for (const auto& w : r.warnings) rep.text("warning " + w);
  kkt_lines(rep, kkt, r.status);
  rep.emit(os);
  return exit_for(r.status);
}

int run_minmax(const Options& o, std::ostream& os) {
  if (!o.ptot) throw UsageError("--ptot is required for mode minmax");
  const ScenarioConfig cfg = load_network(o);
  if (!cfg.wnl) throw UsageError("minmax needs an active network ([anchors]/[agents])");
  SolverSettings s;
  s.tol = o.tol;
  const ConeProgram prog = build_minmax_wnl(*cfg.wnl, *o.ptot);
  const MinmaxResult r = solve_minmax(*cfg.wnl, *o.ptot, s);
  const KktReport kkt = check_kkt(prog, r.solution);
  json body{{"mode", "minmax"},
            {"status", std::string(to_string(r.status))},
            {"iterations", r.solution.iterations},
            {"total_power_budget", *o.ptot},
            {"kkt", kkt_json(kkt)}};
  if (r.status == SolveStatus::optimal) {
    body["inverse_speb"] = r.inverse_speb;
    body["best_requirement"] = 1.0 / r.inverse_speb;
    body["x"] = to_json(r.x);
    body["speb"] = to_json(r.speb);
  }
  Report rep(o, body);
  rep.text("status " + std::string(to_string(r.status)));
  if (r.status == SolveStatus::optimal) {
    rep.text("best requirement " + num(1.0 / r.inverse_speb));
    allocation_lines(rep, r.x, r.speb, std::vector<double>(r.speb.size(), 1.0 / r.inverse_speb), "speb");
  } else {
    rep.csv("kind,index,value");
  }
  kkt_lines(rep, kkt, r.status);
  rep.emit(os);
  return exit_for(r.status);
}

int run_oracle(const Options& o, std::ostream& os) {
  if (o.M < 2) throw UsageError("--M must be at least 2");
  const ScenarioConfig cfg = load_network(o);
  const UncertaintyCover cover = scenario_uncertainty(cfg, single_nuss(o));
  const Eigen::VectorXd x = parse_x(o, cfg);
  json agents = json::array();
  std::vector<double> worst;
  std::string csv = "agent,circle,oracle,lower,upper,bounds_valid\n";
  std::string text;
  for (std::size_t k = 0; k < cover.agents.size(); ++k) {
    json circles = json::array();
    double w = 0.0;
    for (std::size_t i = 0; i < cover.agents[k].size(); ++i) {
      const CoverCircle& cc = cover.agents[k][i];
      const double orc = worst_case_speb_oracle(cc, x);
      const SpebBounds b = speb_bounds_eval(cc, x, o.M);
      w = std::max(w, orc);
      circles.push_back(json{{"oracle", orc}, {"lower", b.lower}, {"upper", b.upper}, {"B", b.B}, {"bounds_valid", b.valid}});
      csv += std::to_string(k) + "," + std::to_string(i) + "," + num(orc) + "," + num(b.lower) + "," + num(b.upper) +
             "," + (b.valid ? "1" : "0") + "\n";
      text += "agent " + std::to_string(k) + " circle " + std::to_string(i) + " oracle " + num(orc) + " lower " +
              num(b.lower) + " upper " + num(b.upper) + (b.valid ? "" : " (M below pi sqrt(B))") + "\n";
    }
    worst.push_back(w);
    agents.push_back(json{{"worst_speb", w}, {"circles", circles}});
  }
  json body{{"mode", "oracle"}, {"M", o.M}, {"x", to_json(x)}, {"agents", agents}};
  if (o.format == "json") {
    os << body.dump(2) << '\n';
  } else if (o.format == "csv") {
    os << csv;
  } else {
    os << text;
    for (std::size_t k = 0; k < worst.size(); ++k) os << "worst_speb[" << k << "] " << num(worst[k]) << '\n';
  }
  return kOk;
}

int run_validate(const Options& o, std::ostream& os) {
  const ScenarioConfig cfg = load_network(o);
  const Eigen::VectorXd x = parse_x(o, cfg);
  const std::vector<double> speb = cfg.wnl ? agent_spebs(*cfg.wnl, x) : std::vector<double>{locopt::speb(efim_rnl(*cfg.rnl, x))};
  const std::vector<double> rho = requirements_of(cfg);
  json agents = json::array();
  std::string text, csv = "agent,speb,rho,ok\n";
  bool all_ok = true;
  for (std::size_t k = 0; k < speb.size(); ++k) {
    // Allocations on the boundary come back from the solver within rounding of rho.
    const bool ok = speb[k] <= rho[k] * (1.0 + 1e-9);
    all_ok = all_ok && ok;
    agents.push_back(json{{"speb", speb[k]}, {"rho", rho[k]}, {"ok", ok}});
    text += "agent " + std::to_string(k) + " speb " + num(speb[k]) + " rho " + num(rho[k]) + (ok ? " ok" : " violated") + "\n";
    csv += std::to_string(k) + "," + num(speb[k]) + "," + num(rho[k]) + "," + (ok ? "1" : "0") + "\n";
  }
  if (o.format == "json") {
    os << json{{"mode", "validate"}, {"x", to_json(x)}, {"total_power", x.sum()}, {"agents", agents}, {"all_ok", all_ok}}.dump(2)
       << '\n';
  } else if (o.format == "csv") {
    os << csv;
  } else {
    os << "total power " << fixed6(x.sum()) << '\n' << text << (all_ok ? "all requirements met\n" : "requirements violated\n");
  }
  return kOk;
}

int run_sweep_mode(const Options& o, std::ostream& os) {
  SweepConfig cfg;
  if (o.kind != "wnl" && o.kind != "rnl") throw UsageError("--kind must be wnl or rnl");
  const std::vector<double> nuss = o.nuss.empty() ? std::vector<double>{0.0} : o.nuss;
  for (int nb : o.anchors) {
    for (int na : o.agents) {
      for (double e : nuss) {
        ScenarioSpec s;
        s.kind = o.kind == "wnl" ? NetworkKind::wnl : NetworkKind::rnl;
        s.region = o.region;
        s.num_anchors = nb;
        s.num_agents = na;
        s.beta = o.beta;
        s.zeta_mean = o.zeta_mean;
        s.requirement = o.requirement.value_or(1.0);
        s.nuss = e;
        s.seed = o.seed;
        try {
          s.validate();
        } catch (const std::invalid_argument& err) {
          throw UsageError(err.what());
        }
        cfg.grid.push_back(s);
      }
    }
  }
  try {
    for (const auto& a : o.algorithms) cfg.algorithms.push_back(Algorithm::parse(a));
  } catch (const std::invalid_argument& err) {
    throw UsageError(err.what());
  }
  cfg.trials = o.trials;
  cfg.threads = o.threads;
  cfg.timing = o.timing;
  cfg.solver.tol = o.tol;
  if (cfg.trials < 1) throw UsageError("--trials must be at least 1");
  const SweepReport rep = run_sweep(cfg);
  const auto summary = summarize(rep);
  if (!o.summary.empty()) {
    std::ofstream sf(o.summary);
    if (!sf) throw UsageError("cannot write file: " + o.summary);
    write_summary_csv(summary, sf);
  }
  if (o.format == "json") {
    json rows = json::array();
    for (const auto& r : rep.rows) {
      rows.push_back(json{{"grid_index", r.grid_index},
                          {"nuss", r.spec.nuss},
                          {"anchors", r.spec.num_anchors},
                          {"agents", r.spec.num_agents},
                          {"algorithm", r.algorithm},
                          {"trial", r.trial},
                          {"status", r.status},
                          {"total_power", r.total_power},
                          {"normalized_power", r.normalized_power},
                          {"speb", to_json(r.speb)},
                          {"violated", r.violated},
                          {"wall_time", r.wall_time}});
    }
    os << json{{"mode", "sweep"}, {"rows", rows}}.dump(2) << '\n';
  } else if (o.format == "text") {
    write_summary_csv(summary, os);
  } else {
    write_csv(rep, os);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Transmit power allocation for network localization"};
  const std::vector<std::string> modes{"solve", "robust-solve", "minmax", "oracle", "sweep", "validate"};
  std::string positional;
  app.add_option("mode_arg", positional, "solve | robust-solve | minmax | oracle | sweep | validate")
      ->check(CLI::IsMember(modes));
  app.add_option("--mode", o.mode, "Same as the positional mode")->check(CLI::IsMember(modes));
  app.add_option("--net", o.net, "Scenario file");
  app.add_option("--nuss", o.nuss, "Normalized uncertainty size 2*delta/D (several values in sweep mode)")
      ->delimiter(',');
  app.add_option("--M", o.M, "Number of bound vectors for the asymptotic variants");
  app.add_option("--variant", o.variant, "upper | lower | efficient")
      ->check(CLI::IsMember({"upper", "lower", "efficient"}));
  app.add_option("--tol", o.tol, "Solver tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Sweep seed");
  app.add_option("--trials", o.trials, "Sweep trials per grid point");
  app.add_option("--out", o.out, "Output file (default stdout)");
  app.add_option("--format", o.format, "text | json | csv")->check(CLI::IsMember({"text", "json", "csv"}));
  app.add_option("--x", o.x, "Allocation: 'uniform' or comma-separated powers");
  app.add_option("--requirement", o.requirement, "Override every requirement");
  app.add_option("--caps", o.caps, "Per-anchor cap value, or a scenario file whose caps to use");
  app.add_option("--ptot", o.ptot, "Total power budget for minmax");
  app.add_option("--threads", o.threads, "Sweep worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--timing", o.timing, "Record wall time in sweep rows");
  app.add_option("--kind", o.kind, "Sweep network kind: wnl | rnl");
  app.add_option("--anchors", o.anchors, "Sweep anchor (or transmitter) counts")->delimiter(',');
  app.add_option("--agents", o.agents, "Sweep agent (or receiver) counts")->delimiter(',');
  app.add_option("--region", o.region, "Sweep region size D");
  app.add_option("--beta", o.beta, "Sweep path-loss exponent");
  app.add_option("--zeta-mean", o.zeta_mean, "Sweep mean channel coefficient");
  app.add_option("--algorithms", o.algorithms, "Sweep algorithm ids")->delimiter(',');
  app.add_option("--summary", o.summary, "Sweep summary CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  if (!positional.empty() && !o.mode.empty() && positional != o.mode) {
    std::cerr << "usage error: conflicting modes '" << positional << "' and '" << o.mode << "'\n";
    return kUsage;
  }
  if (o.mode.empty()) o.mode = positional;
  if (o.mode.empty()) {
    std::cerr << "usage error: no mode given\n" << app.help();
    return kUsage;
  }
  if (o.format.empty()) o.format = o.mode == "sweep" ? "csv" : "text";

  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) {
      std::cerr << "error: cannot write file: " << o.out << "\n";
      return kUsage;
    }
    os = &file;
  }
  os->precision(17);

  try {
    if (o.mode == "solve") return run_solve(o, *os);
    if (o.mode == "robust-solve") return run_robust(o, *os);
    if (o.mode == "minmax") return run_minmax(o, *os);
    if (o.mode == "oracle") return run_oracle(o, *os);
    if (o.mode == "validate") return run_validate(o, *os);
    return run_sweep_mode(o, *os);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const InfeasibleRequirement& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
