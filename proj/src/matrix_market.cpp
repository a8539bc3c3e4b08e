#include "parfem/matrix_market.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace parfem {

namespace {

constexpr int kTokenMatrix = 900;
constexpr int kTokenRhsOwn = 901;
constexpr int kTokenRhsDirichlet = 902;
constexpr int kTokenChainDone = 903;

void await_turn(Transport& tp, int tag) {
  if (tp.rank() > 0) tp.recv(tp.rank() - 1, tag);
}

void pass_turn(Transport& tp, int tag) {
  if (tp.rank() + 1 < tp.size()) tp.send(tp.rank() + 1, tag, {});
}

/// Rank 0 blocks until the last writer in the previous chain finished.
void chain_done(Transport& tp, int tag) {
  if (tp.size() == 1) return;
  if (tp.rank() == tp.size() - 1) tp.send(0, tag, {});
  if (tp.rank() == 0) tp.recv(tp.size() - 1, tag);
}

std::ofstream open_for_part(const std::string& path, bool first) {
  std::ofstream out;
  out.open(path, first ? std::ios::out | std::ios::trunc : std::ios::out | std::ios::app);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void skip_comments(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') return;
  }
  throw IoError("MatrixMarket file ended before the size line");
}

}  // namespace

void export_matrixmarket(const CsrSparseMatrix& a, const std::vector<double>& rhs,
                         const ParFEMapper& mapper, Transport& tp,
                         const std::string& matrix_path, const std::string& rhs_path) {
  if (a.n_rows != mapper.n_dofs || rhs.size() != static_cast<std::size_t>(mapper.n_dofs)) {
    throw Error("export size mismatch");
  }

  std::int64_t my_nnz = 0;
  for (int i = 0; i < mapper.n_dofs; ++i) {
    if (!mapper.owns_row[static_cast<std::size_t>(i)]) continue;
    my_nnz += a.row_offsets[static_cast<std::size_t>(i) + 1] - a.row_offsets[static_cast<std::size_t>(i)];
  }
  const std::int64_t total_nnz = allreduce_sum(tp, my_nnz);
  const std::int64_t n = mapper.n_global;

  char buf[128];
  {
    await_turn(tp, kTokenMatrix);
    std::ofstream out = open_for_part(matrix_path, tp.rank() == 0);
    if (tp.rank() == 0) {
      out << "%%MatrixMarket matrix coordinate real general\n";
      out << n << " " << n << " " << total_nnz << "\n";
    }
    for (int i = 0; i < mapper.n_dofs; ++i) {
      if (!mapper.owns_row[static_cast<std::size_t>(i)]) continue;
      const std::int64_t grow = mapper.global_of[static_cast<std::size_t>(i)] + 1;
      for (std::int64_t k = a.row_offsets[static_cast<std::size_t>(i)];
           k < a.row_offsets[static_cast<std::size_t>(i) + 1]; ++k) {
        const std::int64_t gcol = mapper.global_of[static_cast<std::size_t>(a.col_indices[static_cast<std::size_t>(k)])] + 1;
        std::snprintf(buf, sizeof(buf), "%lld %lld %.17g\n", static_cast<long long>(grow),
                      static_cast<long long>(gcol), a.values[static_cast<std::size_t>(k)]);
        out << buf;
      }
    }
    if (!out) throw IoError("write failed for '" + matrix_path + "'");
    out.close();
    pass_turn(tp, kTokenMatrix);
  }

  // Array format is positional, and each rank's global numbers form two
  // contiguous blocks: own dofs first (all ranks), then Dirichlet rows.
  {
    await_turn(tp, kTokenRhsOwn);
    std::ofstream out = open_for_part(rhs_path, tp.rank() == 0);
    if (tp.rank() == 0) {
      out << "%%MatrixMarket matrix array real general\n";
      out << n << " 1\n";
    }
    for (int i = 0; i < mapper.n_own_dofs; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g\n", rhs[static_cast<std::size_t>(i)]);
      out << buf;
    }
    if (!out) throw IoError("write failed for '" + rhs_path + "'");
    out.close();
    pass_turn(tp, kTokenRhsOwn);
  }
  chain_done(tp, kTokenChainDone);
  {
    await_turn(tp, kTokenRhsDirichlet);
    std::ofstream out = open_for_part(rhs_path, false);
    for (int i = mapper.n_own_dofs; i < mapper.n_dofs; ++i) {
      if (!mapper.owns_row[static_cast<std::size_t>(i)]) continue;
      std::snprintf(buf, sizeof(buf), "%.17g\n", rhs[static_cast<std::size_t>(i)]);
      out << buf;
    }
    if (!out) throw IoError("write failed for '" + rhs_path + "'");
    out.close();
    pass_turn(tp, kTokenRhsDirichlet);
  }
  barrier(tp);
}

DenseSystem read_matrixmarket(const std::string& matrix_path, const std::string& rhs_path) {
  DenseSystem sys;
  {
    std::ifstream in(matrix_path);
    if (!in) throw IoError("cannot open '" + matrix_path + "'");
    std::string line;
    if (!std::getline(in, line) || line.rfind("%%MatrixMarket matrix coordinate real general", 0) != 0) {
      throw IoError("'" + matrix_path + "' is not a coordinate real general file");
    }
    skip_comments(in, line);
    std::istringstream sz(line);
    std::int64_t rows = 0, cols = 0, nnz = 0;
    sz >> rows >> cols >> nnz;
    if (!sz || rows != cols || rows <= 0) throw IoError("bad size line in '" + matrix_path + "'");
    sys.n = static_cast<int>(rows);
    sys.a.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(rows), 0.0);
    for (std::int64_t k = 0; k < nnz; ++k) {
      std::int64_t r = 0, c = 0;
      double v = 0;
      in >> r >> c >> v;
      if (!in) throw IoError("'" + matrix_path + "' ended after " + std::to_string(k) + " entries");
      if (r < 1 || r > rows || c < 1 || c > cols) throw IoError("entry out of range in '" + matrix_path + "'");
      sys.a[static_cast<std::size_t>(r - 1) * static_cast<std::size_t>(rows) + static_cast<std::size_t>(c - 1)] += v;
    }
  }
  {
    std::ifstream in(rhs_path);
    if (!in) throw IoError("cannot open '" + rhs_path + "'");
    std::string line;
    if (!std::getline(in, line) || line.rfind("%%MatrixMarket matrix array real general", 0) != 0) {
      throw IoError("'" + rhs_path + "' is not an array real general file");
    }
    skip_comments(in, line);
    std::istringstream sz(line);
    std::int64_t rows = 0, cols = 0;
    sz >> rows >> cols;
    if (!sz || rows != sys.n || cols != 1) throw IoError("bad size line in '" + rhs_path + "'");
    sys.b.assign(static_cast<std::size_t>(rows), 0.0);
    for (std::int64_t i = 0; i < rows; ++i) {
      in >> sys.b[static_cast<std::size_t>(i)];
      if (!in) throw IoError("'" + rhs_path + "' ended after " + std::to_string(i) + " values");
    }
  }
  return sys;
}

}  // namespace parfem
