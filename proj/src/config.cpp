#include "parfem/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "parfem/errors.hpp"

namespace parfem {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  int out = 0;
  try {
    out = std::stoi(value, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
  if (used != value.size()) throw ConfigError(key + ": expected an integer, got '" + value + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  if (used != value.size()) throw ConfigError(key + ": expected a number, got '" + value + "'");
  return out;
}

}  // namespace

int AppConfig::time_steps() const {
  const int n = static_cast<int>(std::llround(end_time / dt));
  return n < 1 ? 1 : n;
}

FEFamily AppConfig::fe_family() const {
  if (family == "q1") return FEFamily::ContinuousQ1;
  if (family == "rotated_q1") return FEFamily::NonconformingRotatedQ1;
  if (family == "q0") return FEFamily::DiscontinuousQ0;
  throw ConfigError("family: unknown value '" + family + "'");
}

PartitionStrategy AppConfig::partition_strategy() const {
  if (strategy == "bisection") return PartitionStrategy::CoordinateBisection;
  if (strategy == "greedy") return PartitionStrategy::Greedy;
  throw ConfigError("strategy: unknown value '" + strategy + "'");
}

SmootherConfig AppConfig::smoother_config() const {
  SmootherConfig out;
  if (smoother == "gauss_seidel") {
    out.kind = SmootherKind::GaussSeidel;
  } else if (smoother == "jacobi") {
    out.kind = SmootherKind::Jacobi;
  } else {
    throw ConfigError("smoother: unknown value '" + smoother + "'");
  }
  out.local_sweeps = local_sweeps;
  out.damping = damping;
  return out;
}

void AppConfig::validate() const {
  if (dimension != 2 && dimension != 3) throw ConfigError("dimension must be 2 or 3");
  if (n_coarse < 1) throw ConfigError("n_coarse must be positive");
  if (ranks < 1) throw ConfigError("ranks must be positive");
  if (levels < 1) throw ConfigError("levels must be positive");
  if (pre_smooth < 0 || post_smooth < 0) throw ConfigError("smoothing counts must be non-negative");
  if (local_sweeps < 1) throw ConfigError("local_sweeps must be positive");
  if (dt <= 0) throw ConfigError("dt must be positive");
  if (end_time < 0) throw ConfigError("end_time must be non-negative");
  if (outer_tol <= 0) throw ConfigError("outer_tol must be positive");
  if (damping <= 0 || damping > 1) throw ConfigError("damping must be in (0, 1]");
  if (outer_max_cycles < 1) throw ConfigError("outer_max_cycles must be positive");
  fe_family();
  partition_strategy();
  smoother_config();
}

void apply_config_entry(AppConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "dimension") {
    cfg.dimension = parse_int(key, value);
  } else if (key == "n_coarse") {
    cfg.n_coarse = parse_int(key, value);
  } else if (key == "ranks") {
    cfg.ranks = parse_int(key, value);
  } else if (key == "levels") {
    cfg.levels = parse_int(key, value);
  } else if (key == "pre_smooth") {
    cfg.pre_smooth = parse_int(key, value);
  } else if (key == "post_smooth") {
    cfg.post_smooth = parse_int(key, value);
  } else if (key == "local_sweeps") {
    cfg.local_sweeps = parse_int(key, value);
  } else if (key == "dt") {
    cfg.dt = parse_double(key, value);
  } else if (key == "end_time") {
    cfg.end_time = parse_double(key, value);
  } else if (key == "outer_tol") {
    cfg.outer_tol = parse_double(key, value);
  } else if (key == "smoother") {
    cfg.smoother = value;
  } else if (key == "damping") {
    cfg.damping = parse_double(key, value);
  } else if (key == "strategy") {
    cfg.strategy = value;
  } else if (key == "family") {
    cfg.family = value;
  } else if (key == "outer_max_cycles") {
    cfg.outer_max_cycles = parse_int(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

AppConfig parse_config(const std::string& text) {
  AppConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value, got '" + line + "'");
    }
    apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

AppConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace parfem
