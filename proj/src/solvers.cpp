#include "parfem/solvers.hpp"

#include <stdexcept>
#include <string>

namespace parfem {

namespace {

void check_diagonal(const CsrSparseMatrix& a, const ParFEMapper& mapper) {
  for (int r = 0; r < mapper.n_own_dofs; ++r) {
    if (a.get(r, r) == 0.0)
      throw SingularDiagonalError("zero diagonal at own dof " + std::to_string(r));
  }
}

void one_local_sweep(const CsrSparseMatrix& a, DistributedVector& x, const DistributedVector& b,
                     const SmootherConfig& cfg, const ParFEMapper& mapper,
                     std::vector<double>& scratch) {
  const int n_own = mapper.n_own_dofs;
  if (cfg.kind == SmootherKind::GaussSeidel) {
    for (int r = 0; r < n_own; ++r) {
      double acc = b[static_cast<std::size_t>(r)];
      double diag = 0.0;
      for (int k = a.row_offsets[static_cast<std::size_t>(r)];
           k < a.row_offsets[static_cast<std::size_t>(r) + 1]; ++k) {
        const int c = a.col_indices[static_cast<std::size_t>(k)];
        if (c == r)
          diag = a.values[static_cast<std::size_t>(k)];
        else
          acc -= a.values[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(c)];
      }
      x[static_cast<std::size_t>(r)] = acc / diag;
    }
  } else {
    scratch.assign(x.values.begin(), x.values.end());
    for (int r = 0; r < n_own; ++r) {
      double acc = b[static_cast<std::size_t>(r)];
      double diag = 0.0;
      for (int k = a.row_offsets[static_cast<std::size_t>(r)];
           k < a.row_offsets[static_cast<std::size_t>(r) + 1]; ++k) {
        const int c = a.col_indices[static_cast<std::size_t>(k)];
        if (c == r)
          diag = a.values[static_cast<std::size_t>(k)];
        else
          acc -= a.values[static_cast<std::size_t>(k)] * scratch[static_cast<std::size_t>(c)];
      }
      x[static_cast<std::size_t>(r)] =
          (1.0 - cfg.damping) * scratch[static_cast<std::size_t>(r)] + cfg.damping * acc / diag;
    }
  }
}

}  // namespace

void smooth(const CsrSparseMatrix& a, DistributedVector& x, const DistributedVector& b,
            const SmootherConfig& cfg, const ParFEMapper& mapper, const ParFECommunicator& comm) {
  if (x.size() != static_cast<std::size_t>(mapper.n_dofs) || b.size() != x.size())
    throw std::invalid_argument("smooth: vector sizes do not match the mapper");
  check_diagonal(a, mapper);
  std::vector<double> scratch;
  for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
    for (int local = 0; local < cfg.local_sweeps; ++local)
      one_local_sweep(a, x, b, cfg, mapper, scratch);
    comm.update_master_slave(x, UpdateMode::Scatter);
    comm.update_halo1(x);
  }
}

SolveStats coarse_solve(const CsrSparseMatrix& a, DistributedVector& x,
                        const DistributedVector& b, double tol, int max_iter,
                        const ParFEMapper& mapper, const ParFECommunicator& comm) {
  SolveStats stats;
  Transport& tp = comm.transport();
  stats.initial_residual = residual_norm(a, x, b, mapper, tp);
  stats.final_residual = stats.initial_residual;
  if (stats.initial_residual == 0.0) return stats;

  SmootherConfig gs;
  gs.kind = SmootherKind::GaussSeidel;
  gs.sweeps = 1;
  gs.local_sweeps = 1;
  const double target = tol * stats.initial_residual;
  while (stats.iterations < max_iter) {
    smooth(a, x, b, gs, mapper, comm);
    ++stats.iterations;
    stats.final_residual = residual_norm(a, x, b, mapper, tp);
    if (stats.final_residual <= target) return stats;
  }
  stats.converged = false;
  return stats;
}

}  // namespace parfem
