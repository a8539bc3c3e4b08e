#pragma once

#include <string>
#include <vector>

#include "parfem/femapper.hpp"
#include "parfem/linalg.hpp"

namespace parfem {

/// Writes the distributed system in MatrixMarket form using the global
/// numbering, 1-based. Each rank appends its authoritative rows in turn
/// (token-ordered), rank 0 writes the headers, so the finished files read
/// as plain sequential MatrixMarket:
///   matrix: `coordinate real general`, one (row, col, value) triple per
///           stored entry of an owned row;
///   rhs:    `array real general`, values in ascending global index order.
void export_matrixmarket(const CsrSparseMatrix& a, const std::vector<double>& rhs,
                         const ParFEMapper& mapper, Transport& tp,
                         const std::string& matrix_path, const std::string& rhs_path);

/// Dense image of an exported system, for reference solves in tests.
struct DenseSystem {
  int n = 0;
  std::vector<double> a;  // row-major n*n
  std::vector<double> b;
};

DenseSystem read_matrixmarket(const std::string& matrix_path, const std::string& rhs_path);

}  // namespace parfem
