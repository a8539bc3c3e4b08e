#pragma once

#include <span>
#include <vector>

#include "parfem/fecomm.hpp"

namespace parfem {

/// Compressed sparse rows, rank-local indexing. Column indices are sorted
/// ascending within each row with no duplicates.
struct CsrSparseMatrix {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<int> row_offsets;  // size n_rows + 1
  std::vector<int> col_indices;
  std::vector<double> values;

  /// Reference to an existing entry; throws if the pattern lacks (r, c).
  double& at(int r, int c);
  double get(int r, int c) const;  // 0 for entries outside the pattern
};

/// Build a CSR pattern (values zeroed) from per-row sorted unique columns.
CsrSparseMatrix csr_from_columns(int n_cols, const std::vector<std::vector<int>>& rows);

/// y = A x on all local rows. The caller guarantees x is consistent on every
/// column its owned rows reference (update_master_slave/update_halo1 done);
/// owned rows of y then equal the global matvec.
void spmv(const CsrSparseMatrix& a, std::span<const double> x, std::span<double> y);

/// Global Euclidean norm of b - A x over owned non-Dirichlet rows (exactly
/// the consecutive range [0, n_own_dofs)), reduced in ascending rank order.
double residual_norm(const CsrSparseMatrix& a, const DistributedVector& x,
                     const DistributedVector& b, const ParFEMapper& mapper, Transport& tp);

struct SolveStats {
  int iterations = 0;
  double initial_residual = 0;
  double final_residual = 0;
  bool converged = true;
  std::vector<double> residuals;  // one entry per iteration/cycle
  double solve_seconds = 0;
  double comm_seconds = 0;
};

}  // namespace parfem
