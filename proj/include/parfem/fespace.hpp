#pragma once

#include <array>
#include <memory>
#include <vector>

#include "parfem/fe_family.hpp"
#include "parfem/partition.hpp"

namespace parfem {

/// One degree of freedom, identified by its geometric carrier. `key` is the
/// per-axis sum of the carrier's corner lattice coordinates; within one
/// (family, level) it identifies the carrier exactly, independent of rank
/// and of local numbering, which makes it the join key for cross-rank
/// handshakes and cross-configuration comparisons.
struct DofInfo {
  EntityKind kind = EntityKind::Vertex;
  LatticeCoord key{0, 0, 0};
  std::array<double, 3> coords{0.0, 0.0, 0.0};  // carrier barycenter
  bool on_boundary = false;
};

struct FESpace {
  std::shared_ptr<const SubdomainMesh> sub;
  FEFamily family = FEFamily::ContinuousQ1;
  int n_dofs = 0;
  std::vector<std::vector<int>> cell_dofs;  // per cell, slots in reference order
  std::vector<DofInfo> dofs;
  std::vector<int> dirichlet;  // sorted dof ids whose carrier lies on the domain boundary
};

/// Enumerate dofs over a subdomain by first touch in (cell gcn, slot) order,
/// deduplicating shared carriers through exact lattice keys.
FESpace build_fespace(std::shared_ptr<const SubdomainMesh> sub, FEFamily family);

struct BasisEval {
  double value = 0;
  std::array<double, 3> gradient{0.0, 0.0, 0.0};  // w.r.t. reference coordinates
};

/// Value and reference-gradient of shape function `local_dof` at a point of
/// the reference cell [0,1]^d. Slot order matches FESpace::cell_dofs.
BasisEval local_basis_eval(FEFamily family, int dimension, int local_dof,
                           const std::array<double, 3>& ref_point);

}  // namespace parfem
