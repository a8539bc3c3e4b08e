#pragma once

#include <string>

namespace parfem {

/// Wall-clock seconds per run phase; communication overlaps the other
/// phases and is measured inside the transport endpoints.
struct PhaseTimes {
  double initialization = 0;
  double assembling = 0;
  double solving = 0;
  double communication = 0;
  double total = 0;
};

struct RunMetrics {
  PhaseTimes phases;
  int ranks = 1;
  // Filled by bench runs relative to a reference run; NaN otherwise.
  double speedup = 0;
  double ideal_speedup = 0;
  double parallel_efficiency = 0;  // speedup / ideal_speedup
  bool has_reference = false;
};

/// Fill speedup fields of `m` relative to `reference`:
/// speedup = reference total / own total, ideal = rank ratio,
/// efficiency = speedup / ideal.
void apply_reference(RunMetrics& m, const RunMetrics& reference);

/// metric,value rows; speedup rows appear only when has_reference is set.
std::string metrics_to_csv(const RunMetrics& m);

/// Parses the format written by metrics_to_csv. Unknown metrics are
/// ignored so the format can grow.
RunMetrics metrics_from_csv(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace parfem
