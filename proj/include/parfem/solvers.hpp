#pragma once

#include "parfem/linalg.hpp"

namespace parfem {

enum class SmootherKind { Jacobi, GaussSeidel };

struct SmootherConfig {
  SmootherKind kind = SmootherKind::GaussSeidel;
  int sweeps = 3;        // outer iterations, each followed by communication
  int local_sweeps = 1;  // rank-local sweeps per outer iteration
  double damping = 0.8;  // Jacobi only
};

/// Run cfg.sweeps outer smoothing iterations on the own-dof rows [0, n_own):
/// each does cfg.local_sweeps rank-local sweeps in consecutive-index order
/// (Gauss-Seidel in place, Jacobi from the previous iterate with damping),
/// then refreshes copies via update_master_slave(Scatter) + update_halo1.
/// Dirichlet, Slave and Halo entries are never written by the sweep itself.
void smooth(const CsrSparseMatrix& a, DistributedVector& x, const DistributedVector& b,
            const SmootherConfig& cfg, const ParFEMapper& mapper, const ParFECommunicator& comm);

/// Gauss-Seidel with per-iteration interface communication, iterated until
/// the global relative residual drops to tol or max_iter is hit. Running out
/// of iterations is reported in the stats, not thrown: an inexact coarse
/// solve still leaves the cycle usable.
SolveStats coarse_solve(const CsrSparseMatrix& a, DistributedVector& x,
                        const DistributedVector& b, double tol, int max_iter,
                        const ParFEMapper& mapper, const ParFECommunicator& comm);

}  // namespace parfem
