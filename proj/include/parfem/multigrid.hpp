#pragma once

#include <memory>
#include <utility>

#include "parfem/assembly.hpp"
#include "parfem/solvers.hpp"

namespace parfem {

/// Which operator the hierarchy assembles per level. None builds meshes,
/// spaces, mappers and communicators only (classification studies).
enum class SystemKind { None, PoissonStiffness, HeatCrankNicolson };

struct MultigridLevel {
  std::shared_ptr<const SubdomainMesh> sub;
  std::shared_ptr<const FESpace> space;
  std::shared_ptr<const ParFEMapper> mapper;
  std::unique_ptr<ParFECommunicator> comm;

  CsrSparseMatrix mass;
  CsrSparseMatrix stiffness;          // same pattern as mass
  CsrSparseMatrix system;             // level operator, Dirichlet rows applied
  DistributedVector load;             // source load at build time

  /// Per fine dof: (coarse dof, weight) pairs of the multilinear embedding
  /// into the parent cell. Weights per dof sum to 1. Empty on level 0.
  std::vector<std::vector<std::pair<int, double>>> prolong_map;

  DistributedVector x, b, r;  // cycle scratch
};

struct HierarchyOptions {
  int n_levels = 2;
  FEFamily family = FEFamily::ContinuousQ1;
  SystemKind kind = SystemKind::None;
  double dt = 0.01;     // HeatCrankNicolson only
  double time0 = 0.0;   // assembly time for the load vector
  ScalarField source;
  ScalarField dirichlet;
};

struct MultigridHierarchy {
  std::vector<MultigridLevel> levels;  // 0 = coarsest
  Transport* tp = nullptr;
  HierarchyOptions options;
  double assembly_seconds = 0;  // share of construction spent assembling

  MultigridLevel& finest() { return levels.back(); }
  const MultigridLevel& finest() const { return levels.back(); }
};

struct MultigridConfig {
  int cycles = 1;  // V-cycles per outer fixed-point iteration
  SmootherConfig smoother;
  int pre_smooth = 3;
  int post_smooth = 3;
  double coarse_tol = 1e-12;
  int coarse_max_iter = 20000;
  double outer_tol = 1e-9;
  int outer_max_cycles = 100;
};

/// Level 0 partitions `coarse`; each further level refines the subdomain in
/// place (halo pruning included). Every level gets its space, mapper (full
/// handshake), communicator, and, unless kind is None, assembled matrices
/// with Dirichlet rows applied plus the prolongation map from its parent.
MultigridHierarchy build_hierarchy(const MeshLevel& coarse, const PartitionMap& pmap,
                                   const HierarchyOptions& options, Transport& tp);

/// Multilinear interpolation of coarse values to every local fine dof.
/// Requires coarse_values fully consistent (update_halo2 done).
std::vector<double> prolongate(const MultigridLevel& fine,
                               const std::vector<double>& coarse_values);

/// Transpose of prolongate over this rank's authoritative fine dofs,
/// followed by AccumulateThenScatter on the coarse level, so owned coarse
/// entries hold the complete global sums.
std::vector<double> restrict_residual(const MultigridLevel& fine, const MultigridLevel& coarse,
                                      const std::vector<double>& fine_residual);

/// One V-cycle on the finest x, b: descend (pre-smooth, halo2 refresh,
/// restrict), solve level 0 with the communicating Gauss-Seidel, ascend
/// (prolongate + additive correction, post-smooth, halo2 refresh). One
/// extra halo2 refresh runs at cycle entry. Returns the coarse-solve stats.
SolveStats v_cycle(MultigridHierarchy& h, DistributedVector& x, const DistributedVector& b,
                   const MultigridConfig& cfg);

/// Repeat blocks of cfg.cycles V-cycles until the finest relative residual
/// drops to cfg.outer_tol; per-block residuals land in stats.residuals.
/// Throws NoConvergenceError when outer_max_cycles is exhausted.
SolveStats solve_outer(MultigridHierarchy& h, DistributedVector& x, const DistributedVector& b,
                       const MultigridConfig& cfg);

}  // namespace parfem
