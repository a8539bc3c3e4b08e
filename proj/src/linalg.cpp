#include "parfem/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace parfem {

double& CsrSparseMatrix::at(int r, int c) {
  const auto begin = col_indices.begin() + row_offsets[static_cast<std::size_t>(r)];
  const auto end = col_indices.begin() + row_offsets[static_cast<std::size_t>(r) + 1];
  const auto it = std::lower_bound(begin, end, c);
  if (it == end || *it != c)
    throw std::invalid_argument("matrix pattern has no entry (" + std::to_string(r) + ", " +
                                std::to_string(c) + ")");
  return values[static_cast<std::size_t>(it - col_indices.begin())];
}

double CsrSparseMatrix::get(int r, int c) const {
  const auto begin = col_indices.begin() + row_offsets[static_cast<std::size_t>(r)];
  const auto end = col_indices.begin() + row_offsets[static_cast<std::size_t>(r) + 1];
  const auto it = std::lower_bound(begin, end, c);
  if (it == end || *it != c) return 0.0;
  return values[static_cast<std::size_t>(it - col_indices.begin())];
}

CsrSparseMatrix csr_from_columns(int n_cols, const std::vector<std::vector<int>>& rows) {
  CsrSparseMatrix a;
  a.n_rows = static_cast<int>(rows.size());
  a.n_cols = n_cols;
  a.row_offsets.reserve(rows.size() + 1);
  a.row_offsets.push_back(0);
  for (const auto& cols : rows) {
    for (std::size_t i = 1; i < cols.size(); ++i)
      if (cols[i] <= cols[i - 1])
        throw std::invalid_argument("row columns must be sorted ascending and unique");
    a.col_indices.insert(a.col_indices.end(), cols.begin(), cols.end());
    a.row_offsets.push_back(static_cast<int>(a.col_indices.size()));
  }
  a.values.assign(a.col_indices.size(), 0.0);
  return a;
}

void spmv(const CsrSparseMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != static_cast<std::size_t>(a.n_cols) ||
      y.size() != static_cast<std::size_t>(a.n_rows))
    throw std::invalid_argument("spmv dimension mismatch");
  for (int r = 0; r < a.n_rows; ++r) {
    double acc = 0.0;
    for (int k = a.row_offsets[static_cast<std::size_t>(r)];
         k < a.row_offsets[static_cast<std::size_t>(r) + 1]; ++k)
      acc += a.values[static_cast<std::size_t>(k)] *
             x[static_cast<std::size_t>(a.col_indices[static_cast<std::size_t>(k)])];
    y[static_cast<std::size_t>(r)] = acc;
  }
}

double residual_norm(const CsrSparseMatrix& a, const DistributedVector& x,
                     const DistributedVector& b, const ParFEMapper& mapper, Transport& tp) {
  if (a.n_rows != mapper.n_dofs || x.size() != b.size() ||
      x.size() != static_cast<std::size_t>(a.n_rows))
    throw std::invalid_argument("residual_norm dimension mismatch");
  double local = 0.0;
  for (int r = 0; r < mapper.n_own_dofs; ++r) {
    double acc = b[static_cast<std::size_t>(r)];
    for (int k = a.row_offsets[static_cast<std::size_t>(r)];
         k < a.row_offsets[static_cast<std::size_t>(r) + 1]; ++k)
      acc -= a.values[static_cast<std::size_t>(k)] *
             x[static_cast<std::size_t>(a.col_indices[static_cast<std::size_t>(k)])];
    local += acc * acc;
  }
  return std::sqrt(allreduce_sum(tp, local));
}

}  // namespace parfem
