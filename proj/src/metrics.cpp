#include "parfem/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "parfem/errors.hpp"

namespace parfem {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void apply_reference(RunMetrics& m, const RunMetrics& reference) {
  if (reference.phases.total <= 0 || m.phases.total <= 0) {
    throw ConfigError("reference and current runs need positive total times");
  }
  m.speedup = reference.phases.total / m.phases.total;
  m.ideal_speedup = static_cast<double>(m.ranks) / static_cast<double>(reference.ranks);
  m.parallel_efficiency = m.speedup / m.ideal_speedup;
  m.has_reference = true;
}

std::string metrics_to_csv(const RunMetrics& m) {
  std::ostringstream out;
  out << "metric,value\n";
  out << "ranks," << m.ranks << "\n";
  out << "initialization_seconds," << fmt(m.phases.initialization) << "\n";
  out << "assembling_seconds," << fmt(m.phases.assembling) << "\n";
  out << "solving_seconds," << fmt(m.phases.solving) << "\n";
  out << "communication_seconds," << fmt(m.phases.communication) << "\n";
  out << "total_seconds," << fmt(m.phases.total) << "\n";
  if (m.has_reference) {
    out << "speedup," << fmt(m.speedup) << "\n";
    out << "ideal_speedup," << fmt(m.ideal_speedup) << "\n";
    out << "parallel_efficiency," << fmt(m.parallel_efficiency) << "\n";
  }
  return out.str();
}

RunMetrics metrics_from_csv(const std::string& text) {
  RunMetrics m;
  std::istringstream in(text);
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != "metric,value") throw IoError("metrics CSV: bad header '" + line + "'");
      saw_header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw IoError("metrics CSV: bad row '" + line + "'");
    const std::string key = line.substr(0, comma);
    const double value = std::stod(line.substr(comma + 1));
    if (key == "ranks") {
      m.ranks = static_cast<int>(value);
    } else if (key == "initialization_seconds") {
      m.phases.initialization = value;
    } else if (key == "assembling_seconds") {
      m.phases.assembling = value;
    } else if (key == "solving_seconds") {
      m.phases.solving = value;
    } else if (key == "communication_seconds") {
      m.phases.communication = value;
    } else if (key == "total_seconds") {
      m.phases.total = value;
    } else if (key == "speedup") {
      m.speedup = value;
      m.has_reference = true;
    } else if (key == "ideal_speedup") {
      m.ideal_speedup = value;
      m.has_reference = true;
    } else if (key == "parallel_efficiency") {
      m.parallel_efficiency = value;
      m.has_reference = true;
    }
  }
  if (!saw_header) throw IoError("metrics CSV: empty input");
  return m;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace parfem
