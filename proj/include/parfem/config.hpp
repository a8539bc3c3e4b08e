#pragma once

#include <string>

#include "parfem/fe_family.hpp"
#include "parfem/partition.hpp"
#include "parfem/solvers.hpp"

namespace parfem {

/// Run configuration shared by every CLI subcommand. Each field maps to one
/// `key=value` line in a config file and to one `--key` CLI flag; CLI values
/// override file values.
struct AppConfig {
  int dimension = 2;
  int n_coarse = 4;  // coarse cells per axis
  int ranks = 2;
  int levels = 2;  // refinement levels including the coarse one
  int pre_smooth = 3;
  int post_smooth = 3;
  int local_sweeps = 1;
  double dt = 0.01;
  double end_time = 5.0;
  double outer_tol = 1e-9;
  std::string smoother = "gauss_seidel";  // or "jacobi"
  double damping = 0.8;                   // Jacobi only
  std::string strategy = "bisection";     // or "greedy"
  std::string family = "q1";              // q1 | rotated_q1 | q0
  int outer_max_cycles = 100;

  int time_steps() const;  // round(end_time / dt), at least 1
  FEFamily fe_family() const;
  PartitionStrategy partition_strategy() const;
  SmootherConfig smoother_config() const;
  void validate() const;  // throws ConfigError
};

/// Applies one key=value pair. Unknown keys and unparsable values throw
/// ConfigError.
void apply_config_entry(AppConfig& cfg, const std::string& key, const std::string& value);

/// Parses flat key=value text; '#' starts a comment, blank lines ignored.
AppConfig parse_config(const std::string& text);

AppConfig load_config_file(const std::string& path);

}  // namespace parfem
