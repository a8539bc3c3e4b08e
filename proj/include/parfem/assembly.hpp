#pragma once

#include <array>
#include <functional>

#include "parfem/fecomm.hpp"
#include "parfem/linalg.hpp"

namespace parfem {

/// Scalar field of time and position, used for sources and boundary data.
using ScalarField = std::function<double(double t, const std::array<double, 3>& x)>;

struct QuadratureRule {
  std::vector<std::array<double, 3>> points;  // reference cell [0,1]^d
  std::vector<double> weights;                // sum to 1 (reference volume)
};

/// Tensor-product Gauss rule, exact through degree 2*points_per_axis - 1.
QuadratureRule gauss_tensor_rule(int dimension, int points_per_axis);

struct ElementMatrices {
  int n = 0;  // dofs per cell
  std::array<double, 64> mass{};
  std::array<double, 64> stiffness{};
  std::array<double, 8> load{};

  double& m(int i, int j) { return mass[static_cast<std::size_t>(i * n + j)]; }
  double& k(int i, int j) { return stiffness[static_cast<std::size_t>(i * n + j)]; }
  double m(int i, int j) const { return mass[static_cast<std::size_t>(i * n + j)]; }
  double k(int i, int j) const { return stiffness[static_cast<std::size_t>(i * n + j)]; }
};

/// Element mass/stiffness/load on an axis-aligned box [lo, hi], multilinear
/// basis (ring vertex order), 2-point Gauss per axis. Throws on zero-volume
/// boxes and on families other than ContinuousQ1.
ElementMatrices element_matrices(const std::array<double, 3>& lo, const std::array<double, 3>& hi,
                                 int dimension, FEFamily family, const ScalarField& f, double t);

/// Convenience overload reading the box off a subdomain cell.
ElementMatrices element_matrices(const Cell& cell, const SubdomainMesh& sub, FEFamily family,
                                 const ScalarField& f, double t);

struct AssembledSystem {
  CsrSparseMatrix mass;
  CsrSparseMatrix stiffness;  // same sparsity pattern as mass
  DistributedVector load;
};

/// Distributed assembly: the cell loop covers own and halo cells so every
/// owned matrix row is complete without matrix communication; the load
/// vector sums own-cell contributions only and is then made consistent with
/// one AccumulateThenScatter.
AssembledSystem assemble_system(const ParFEMapper& mapper, const ParFECommunicator& comm,
                                const ScalarField& f, double t);

/// Load vector only, same own-cells-plus-accumulate scheme; used once per
/// time step when the matrices are reused.
DistributedVector assemble_load(const ParFEMapper& mapper, const ParFECommunicator& comm,
                                const ScalarField& f, double t);

/// Replace Dirichlet rows by identity rows and set their rhs entries to the
/// boundary value. Columns are left untouched (no symmetric elimination).
void apply_dirichlet(CsrSparseMatrix& a, DistributedVector& rhs, const ScalarField& g, double t,
                     const ParFEMapper& mapper);

/// Rows-only variant for matrices reused across right-hand sides.
void apply_dirichlet_rows(CsrSparseMatrix& a, const ParFEMapper& mapper);
void apply_dirichlet_rhs(DistributedVector& rhs, const ScalarField& g, double t,
                         const ParFEMapper& mapper);

}  // namespace parfem
