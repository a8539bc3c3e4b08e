#pragma once

#include <map>
#include <string>

#include "parfem/config.hpp"
#include "parfem/metrics.hpp"
#include "parfem/model.hpp"
#include "parfem/multigrid.hpp"

namespace parfem {

/// Solution field gathered over all ranks, keyed by (entity kind, per-axis
/// carrier key). The key is rank-independent, so fields from runs with
/// different rank counts compare entry for entry.
using KeyedField = std::map<std::array<std::int64_t, 4>, double>;

struct SolveReport {
  double l2_error = 0;    // continuous L2 via quadrature at the final time
  double linf_error = 0;  // max nodal error
  RunMetrics metrics;
  std::vector<double> cycle_residuals;  // outer residual history of the last solve
  std::vector<double> global_solution;  // indexed by global dof number
  KeyedField solution_by_key;
  std::int64_t n_global_dofs = 0;
};

/// Crank-Nicolson heat run over cfg.time_steps() steps, one multigrid
/// outer solve each. NoConvergenceError is rethrown with the step index.
SolveReport run_heat(const AppConfig& cfg);

/// Steady diffusion solve of the same manufactured profile; the residual
/// history exposes the per-cycle contraction factor.
SolveReport run_poisson(const AppConfig& cfg);

/// run_heat plus speedup/ideal_speedup/efficiency against a reference
/// metrics CSV from a previous run.
SolveReport run_bench(const AppConfig& cfg, const std::string& reference_path);

struct ClassifyReport {
  // counts[level][rank][class value]
  std::vector<std::vector<std::array<std::int64_t, kNumDofClasses>>> counts;
  std::string csv;

  std::int64_t total(int level, DofClass c) const;
};

/// Builds the hierarchy (no matrices) and reports per-level, per-rank dof
/// class counts as CSV rows `level,rank,class,count`, followed by one
/// `level,total,class,count` row per class and level.
ClassifyReport run_classify(const AppConfig& cfg);

/// Assembles the steady diffusion system on the finest level and writes
/// <prefix>.mtx plus <prefix>_rhs.mtx through the MatrixMarket writer.
void export_system(const AppConfig& cfg, const std::string& prefix);

}  // namespace parfem
