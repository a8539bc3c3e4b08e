#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "parfem/app.hpp"
#include "parfem/matrix_market.hpp"

// Oracles and cross-rank gathering helpers for the test suites. The element
// integrals and the dense solver are written from closed forms, independent
// of the library kernels they check.
namespace testsup {

// (entity kind, per-axis carrier key): rank-independent dof identity.
using Key4 = std::array<std::int64_t, 4>;

Key4 dof_key(const parfem::DofInfo& d);

// Deterministic value in [-1, 1), a pure function of key and salt.
double key_noise(const Key4& k, std::uint64_t salt);

// Dense solve via LU with partial pivoting; a is row-major n*n.
std::vector<double> lu_solve(std::vector<double> a, std::vector<double> b);

// Multilinear element integrals on an axis-aligned box from the closed
// tensor-product form (exact 1d integrals), ring vertex order.
struct ElementOracle {
  int n = 0;
  std::vector<double> mass;       // n*n row-major
  std::vector<double> stiffness;  // n*n row-major
};
ElementOracle q1_element_oracle(const std::array<double, 3>& lo, const std::array<double, 3>& hi,
                                int dimension);

// Element load via 3-point Gauss per axis (not the library's rule).
std::vector<double> q1_load_oracle(const std::array<double, 3>& lo, const std::array<double, 3>& hi,
                                   int dimension, const parfem::ScalarField& f, double t);

// Authoritative rows of a distributed matrix keyed by (row key, col key).
using KeyMatrix = std::map<std::pair<Key4, Key4>, double>;
KeyMatrix gather_matrix(const parfem::CsrSparseMatrix& a, const parfem::ParFEMapper& m,
                        parfem::Transport& tp);

// Authoritative entries of a distributed vector, keyed.
std::map<Key4, double> gather_vector(const std::vector<double>& v, const parfem::ParFEMapper& m,
                                     parfem::Transport& tp);

// Global dot product over authoritative rows, ascending-rank reduction.
double global_dot(const std::vector<double>& x, const std::vector<double>& y,
                  const parfem::ParFEMapper& m, parfem::Transport& tp);

// Order-independent structural signature of a subdomain.
struct SubdomainSignature {
  std::vector<std::array<std::int64_t, 3>> cells;  // (gcn, owner, class)
  std::vector<std::array<std::int64_t, 3>> vertex_lattice;
  std::array<int, 4> counts{};  // own, dependent, independent, halo

  bool operator==(const SubdomainSignature&) const = default;
};
SubdomainSignature subdomain_signature(const parfem::SubdomainMesh& sub);

// Single-rank mapper over n free dofs, no channels, keys (i, 0, 0).
// Exercises solver and export kernels without a mesh behind them.
std::shared_ptr<const parfem::ParFEMapper> serial_mapper(int n);

// Builds the mapper for one configuration on k logical ranks and checks the
// full invariant suite: class layout, count identities, one authority per
// carrier, valid replica class patterns, global-numbering bijection, and
// channel symmetry. Returns violation messages; empty means pass.
std::vector<std::string> check_mapper_invariants(int dimension, std::int64_t n_coarse, int k,
                                                 parfem::FEFamily family, int levels,
                                                 parfem::PartitionStrategy strategy);

}  // namespace testsup
