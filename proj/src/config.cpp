#include "locopt/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace locopt {

namespace {

using json = nlohmann::json;

struct Entry {
  json value;
  int line = 0;
};

using Table = std::map<std::string, std::map<std::string, Entry>>;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"anchors", {"positions", "caps"}},
      {"agents", {"positions"}},
      {"tx", {"positions", "caps"}},
      {"rx", {"positions"}},
      {"target", {"position"}},
      {"channel", {"beta", "zeta", "zeta_lo", "zeta_hi"}},
      {"requirements", {"rho"}},
      {"region", {"size"}},
      {"uncertainty", {"nuss", "delta", "circles"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int bracket_depth(const std::string& s) {
  int d = 0;
  for (char ch : s) {
    if (ch == '[') ++d;
    if (ch == ']') --d;
  }
  return d;
}

Table tokenize(const std::string& text, const std::string& source) {
  Table table;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::string key, pending;
  int key_line = 0;
  int lineno = 0;
  auto fail = [&](int line, const std::string& msg) -> ConfigError {
    return ConfigError(source + ":" + std::to_string(line) + ": " + msg);
  };
  auto finish = [&] {
    json v;
    try {
      v = json::parse(pending);
    } catch (const json::parse_error&) {
      throw fail(key_line, "malformed value for '" + key + "'");
    }
    auto& sec = table[section];
    if (sec.count(key)) throw fail(key_line, "duplicate key '" + key + "' in [" + section + "]");
    sec[key] = Entry{std::move(v), key_line};
    key.clear();
    pending.clear();
  };
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (!key.empty()) {
      pending += ' ' + line;
      if (bracket_depth(pending) <= 0) finish();
      continue;
    }
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw fail(lineno, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_keys().count(section)) throw fail(lineno, "unknown section [" + section + "]");
      if (table.count(section)) throw fail(lineno, "duplicate section [" + section + "]");
      table[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw fail(lineno, "expected 'key = value'");
    if (section.empty()) throw fail(lineno, "key outside of any section");
    key = trim(line.substr(0, eq));
    if (!known_keys().at(section).count(key)) {
      throw fail(lineno, "unknown key '" + key + "' in [" + section + "]");
    }
    pending = trim(line.substr(eq + 1));
    if (pending.empty()) throw fail(lineno, "missing value for '" + key + "'");
    key_line = lineno;
    if (bracket_depth(pending) <= 0) finish();
  }
  if (!key.empty()) throw fail(key_line, "unterminated value for '" + key + "'");
  return table;
}

class Reader {
 public:
  Reader(Table t, std::string source) : t_(std::move(t)), source_(std::move(source)) {}

  bool has_section(const std::string& s) const { return t_.count(s) > 0; }
  bool has(const std::string& s, const std::string& k) const { return has_section(s) && t_.at(s).count(k); }

  ConfigError error(const std::string& s, const std::string& k, const std::string& msg) const {
    if (has(s, k)) return ConfigError(source_ + ":" + std::to_string(t_.at(s).at(k).line) + ": " + msg);
    return ConfigError(source_ + ": " + msg);
  }

  const json& get(const std::string& s, const std::string& k) const {
    if (!has(s, k)) throw ConfigError(source_ + ": missing '" + k + "' in [" + s + "]");
    return t_.at(s).at(k).value;
  }

  double number(const std::string& s, const std::string& k) const {
    const json& v = get(s, k);
    if (!v.is_number()) throw error(s, k, "'" + k + "' must be a number");
    return v.get<double>();
  }

  Eigen::VectorXd vector(const std::string& s, const std::string& k) const {
    const json& v = get(s, k);
    if (!v.is_array()) throw error(s, k, "'" + k + "' must be an array of numbers");
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw error(s, k, "'" + k + "' must be an array of numbers");
      out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
  }

  Eigen::MatrixXd matrix(const std::string& s, const std::string& k) const {
    const json& v = get(s, k);
    auto bad = [&] { return error(s, k, "'" + k + "' must be a matrix (array of equal-length rows)"); };
    if (!v.is_array() || v.empty() || !v[0].is_array()) throw bad();
    const std::size_t cols = v[0].size();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_array() || v[i].size() != cols) throw bad();
      for (std::size_t j = 0; j < cols; ++j) {
        if (!v[i][j].is_number()) throw bad();
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i][j].get<double>();
      }
    }
    return out;
  }

  Point point(const json& v, const std::string& s, const std::string& k) const {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw error(s, k, "'" + k + "' entries must be [x, y] pairs");
    }
    return {v[0].get<double>(), v[1].get<double>()};
  }

  std::vector<Point> points(const std::string& s, const std::string& k) const {
    const json& v = get(s, k);
    if (!v.is_array()) throw error(s, k, "'" + k + "' must be a list of [x, y] pairs");
    std::vector<Point> out;
    for (const auto& p : v) out.push_back(point(p, s, k));
    return out;
  }

  std::vector<Circle> circles(const json& v) const {
    const std::string s = "uncertainty", k = "circles";
    if (!v.is_array()) throw error(s, k, "'circles' must list [cx, cy, r] triples");
    std::vector<Circle> out;
    for (const auto& c : v) {
      if (!c.is_array() || c.size() != 3 || !c[0].is_number() || !c[1].is_number() || !c[2].is_number()) {
        throw error(s, k, "'circles' must list [cx, cy, r] triples");
      }
      out.push_back({Point(c[0].get<double>(), c[1].get<double>()), c[2].get<double>()});
    }
    return out;
  }

 private:
  Table t_;
  std::string source_;
};

Eigen::VectorXd requirements(const Reader& r, int n) {
  const json& v = r.get("requirements", "rho");
  if (v.is_number()) return Eigen::VectorXd::Constant(n, v.get<double>());
  Eigen::VectorXd rho = r.vector("requirements", "rho");
  if (rho.size() != n) throw r.error("requirements", "rho", "'rho' needs one entry per agent");
  return rho;
}

}  // namespace

std::optional<Eigen::VectorXd> ScenarioConfig::caps() const { return wnl ? wnl->caps() : rnl->caps(); }

int ScenarioConfig::num_columns() const { return wnl ? wnl->num_anchors() : rnl->num_tx(); }

ScenarioConfig parse_scenario(const std::string& text, const std::string& source) {
  const Reader r(tokenize(text, source), source);
  const bool active = r.has_section("anchors") || r.has_section("agents");
  const bool radar = r.has_section("tx") || r.has_section("rx") || r.has_section("target");
  if (active == radar) {
    throw ConfigError(source + ": need either [anchors]/[agents] or [tx]/[rx]/[target], not both");
  }
  ScenarioConfig cfg;
  cfg.kind = active ? NetworkKind::wnl : NetworkKind::rnl;
  const double beta = r.has("channel", "beta") ? r.number("channel", "beta") : 1.0;
  const Eigen::MatrixXd zeta = r.matrix("channel", "zeta");
  const std::string node = active ? "anchors" : "tx";
  std::optional<Eigen::VectorXd> caps;
  if (r.has(node, "caps")) caps = r.vector(node, "caps");

  try {
    if (active) {
      std::vector<Point> anchors = r.points("anchors", "positions");
      std::vector<Point> agents = r.points("agents", "positions");
      const int na = static_cast<int>(agents.size());
      cfg.wnl.emplace(std::move(anchors), std::move(agents), zeta, beta, requirements(r, na), caps);
    } else {
      const json& rho = r.get("requirements", "rho");
      if (!rho.is_number()) throw r.error("requirements", "rho", "'rho' must be a number for radar networks");
      cfg.rnl.emplace(r.points("tx", "positions"), r.points("rx", "positions"),
                      r.point(r.get("target", "position"), "target", "position"), zeta, beta, rho.get<double>(),
                      caps);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(source + ": invalid network: " + e.what());
  }

  if (r.has("channel", "zeta_lo") != r.has("channel", "zeta_hi")) {
    throw ConfigError(source + ": zeta_lo and zeta_hi must be given together");
  }
  if (r.has("channel", "zeta_lo")) {
    ChannelBounds b{r.matrix("channel", "zeta_lo"), r.matrix("channel", "zeta_hi")};
    if (b.lo.rows() != zeta.rows() || b.lo.cols() != zeta.cols() || b.hi.rows() != zeta.rows() ||
        b.hi.cols() != zeta.cols()) {
      throw ConfigError(source + ": zeta_lo / zeta_hi must match the shape of zeta");
    }
    if ((b.lo.array() < 0.0).any() || (b.lo.array() > b.hi.array()).any()) {
      throw ConfigError(source + ": need 0 <= zeta_lo <= zeta_hi");
    }
    cfg.zeta_bounds = std::move(b);
  }
  if (r.has("region", "size")) {
    cfg.region = r.number("region", "size");
    if (!(*cfg.region > 0.0)) throw r.error("region", "size", "region size must be positive");
  }
  if (r.has("uncertainty", "nuss")) {
    cfg.nuss = r.number("uncertainty", "nuss");
    if (!(*cfg.nuss >= 0.0 && *cfg.nuss < 1.0)) throw r.error("uncertainty", "nuss", "nuss must lie in [0, 1)");
  }
  if (r.has("uncertainty", "delta")) {
    cfg.delta = r.number("uncertainty", "delta");
    if (!(*cfg.delta >= 0.0)) throw r.error("uncertainty", "delta", "delta must be nonnegative");
  }
  if (r.has("uncertainty", "circles")) {
    const json& v = r.get("uncertainty", "circles");
    std::vector<std::vector<Circle>> circles;
    if (active) {
      if (!v.is_array() || v.size() != static_cast<std::size_t>(cfg.wnl->num_agents())) {
        throw r.error("uncertainty", "circles", "'circles' needs one list per agent");
      }
      for (const auto& per_agent : v) circles.push_back(r.circles(per_agent));
    } else {
      circles.push_back(r.circles(v));
    }
    cfg.circles = std::move(circles);
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

UncertaintyCover scenario_uncertainty(const ScenarioConfig& cfg, std::optional<double> nuss) {
  std::optional<double> delta;
  std::optional<std::vector<std::vector<Circle>>> circles;
  if (nuss) {
    if (!(*nuss >= 0.0 && *nuss < 1.0)) throw ConfigError("nuss must lie in [0, 1)");
    if (!cfg.region) throw ConfigError("nuss needs [region] size");
    delta = 0.5 * *nuss * *cfg.region;
  } else if (cfg.circles) {
    circles = cfg.circles;
  } else if (cfg.delta) {
    delta = cfg.delta;
  } else if (cfg.nuss) {
    if (!cfg.region) throw ConfigError("nuss needs [region] size");
    delta = 0.5 * *cfg.nuss * *cfg.region;
  } else {
    throw ConfigError("no uncertainty given: set [uncertainty] nuss, delta or circles, or pass --nuss");
  }
  try {
    if (cfg.wnl) {
      return derive_intervals_wnl(*cfg.wnl, circles ? *circles : single_circle_cover(*cfg.wnl, *delta),
                                  cfg.zeta_bounds);
    }
    return derive_intervals_rnl(*cfg.rnl, circles ? circles->front() : std::vector<Circle>{{cfg.rnl->target(), *delta}},
                                cfg.zeta_bounds);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid uncertainty: ") + e.what());
  }
}

}  // namespace locopt
