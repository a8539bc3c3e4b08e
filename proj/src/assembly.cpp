#include "parfem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parfem/fespace.hpp"

namespace parfem {

QuadratureRule gauss_tensor_rule(int dimension, int points_per_axis) {
  if (dimension != 2 && dimension != 3) throw std::invalid_argument("dimension must be 2 or 3");
  std::vector<double> pts, wts;
  switch (points_per_axis) {
    case 1:
      pts = {0.5};
      wts = {1.0};
      break;
    case 2: {
      const double off = 0.5 / std::sqrt(3.0);
      pts = {0.5 - off, 0.5 + off};
      wts = {0.5, 0.5};
      break;
    }
    case 3: {
      const double off = 0.5 * std::sqrt(0.6);
      pts = {0.5 - off, 0.5, 0.5 + off};
      wts = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
      break;
    }
    default:
      throw std::invalid_argument("points_per_axis must be 1, 2, or 3");
  }
  QuadratureRule rule;
  const int nz = dimension == 3 ? points_per_axis : 1;
  for (int ix = 0; ix < points_per_axis; ++ix)
    for (int iy = 0; iy < points_per_axis; ++iy)
      for (int iz = 0; iz < nz; ++iz) {
        rule.points.push_back({pts[static_cast<std::size_t>(ix)], pts[static_cast<std::size_t>(iy)],
                               dimension == 3 ? pts[static_cast<std::size_t>(iz)] : 0.0});
        double w = wts[static_cast<std::size_t>(ix)] * wts[static_cast<std::size_t>(iy)];
        if (dimension == 3) w *= wts[static_cast<std::size_t>(iz)];
        rule.weights.push_back(w);
      }
  return rule;
}

ElementMatrices element_matrices(const std::array<double, 3>& lo, const std::array<double, 3>& hi,
                                 int dimension, FEFamily family, const ScalarField& f, double t) {
  if (family != FEFamily::ContinuousQ1)
    throw std::invalid_argument("assembly supports the multilinear family only");
  std::array<double, 3> h{1.0, 1.0, 1.0};
  double volume = 1.0;
  for (int a = 0; a < dimension; ++a) {
    h[static_cast<std::size_t>(a)] = hi[static_cast<std::size_t>(a)] - lo[static_cast<std::size_t>(a)];
    volume *= h[static_cast<std::size_t>(a)];
    if (!(h[static_cast<std::size_t>(a)] > 0.0))
      throw std::invalid_argument("degenerate cell: non-positive extent");
  }

  ElementMatrices out;
  out.n = dofs_per_cell(family, dimension);
  const QuadratureRule rule = gauss_tensor_rule(dimension, 2);

  std::vector<BasisEval> basis(static_cast<std::size_t>(out.n));
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const std::array<double, 3>& p = rule.points[q];
    const double w = rule.weights[q] * volume;
    for (int i = 0; i < out.n; ++i) basis[static_cast<std::size_t>(i)] = local_basis_eval(family, dimension, i, p);

    std::array<double, 3> xq{0.0, 0.0, 0.0};
    for (int a = 0; a < 3; ++a)
      xq[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)] +
                                        p[static_cast<std::size_t>(a)] * h[static_cast<std::size_t>(a)];
    const double fq = f ? f(t, xq) : 0.0;

    for (int i = 0; i < out.n; ++i) {
      const BasisEval& bi = basis[static_cast<std::size_t>(i)];
      out.load[static_cast<std::size_t>(i)] += w * fq * bi.value;
      for (int j = 0; j < out.n; ++j) {
        const BasisEval& bj = basis[static_cast<std::size_t>(j)];
        out.m(i, j) += w * bi.value * bj.value;
        double grad = 0.0;
        for (int a = 0; a < dimension; ++a)
          grad += bi.gradient[static_cast<std::size_t>(a)] * bj.gradient[static_cast<std::size_t>(a)] /
                  (h[static_cast<std::size_t>(a)] * h[static_cast<std::size_t>(a)]);
        out.k(i, j) += w * grad;
      }
    }
  }
  return out;
}

ElementMatrices element_matrices(const Cell& cell, const SubdomainMesh& sub, FEFamily family,
                                 const ScalarField& f, double t) {
  const int opposite = (1 << sub.dimension) - 2;  // ring vertex diagonal to vertex 0
  const Vertex& v0 = sub.vertices[static_cast<std::size_t>(cell.vertex_ids[0])];
  const Vertex& v1 =
      sub.vertices[static_cast<std::size_t>(cell.vertex_ids[static_cast<std::size_t>(opposite)])];
  return element_matrices(v0.coords, v1.coords, sub.dimension, family, f, t);
}

AssembledSystem assemble_system(const ParFEMapper& mapper, const ParFECommunicator& comm,
                                const ScalarField& f, double t) {
  if (!mapper.space) throw std::invalid_argument("assemble_system: mapper has no space");
  const SubdomainMesh& sub = *mapper.space->sub;

  std::vector<std::vector<int>> pattern(static_cast<std::size_t>(mapper.n_dofs));
  for (const auto& dofs : mapper.cell_dofs)
    for (int i : dofs)
      for (int j : dofs) pattern[static_cast<std::size_t>(i)].push_back(j);
  for (auto& row : pattern) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }

  AssembledSystem sys;
  sys.mass = csr_from_columns(mapper.n_dofs, pattern);
  sys.stiffness = sys.mass;
  sys.load = DistributedVector(static_cast<std::size_t>(mapper.n_dofs), 0.0);

  for (std::size_t c = 0; c < sub.cells.size(); ++c) {
    const ElementMatrices elem =
        element_matrices(sub.cells[c], sub, mapper.space->family, f, t);
    const std::vector<int>& dofs = mapper.cell_dofs[c];
    const bool own = sub.is_own(static_cast<int>(c));
    for (int i = 0; i < elem.n; ++i) {
      const int gi = dofs[static_cast<std::size_t>(i)];
      for (int j = 0; j < elem.n; ++j) {
        const int gj = dofs[static_cast<std::size_t>(j)];
        sys.mass.at(gi, gj) += elem.m(i, j);
        sys.stiffness.at(gi, gj) += elem.k(i, j);
      }
      // Load contributions come from own cells only; the accumulate pass
      // below merges the interface parts without double counting halo cells.
      if (own) sys.load[static_cast<std::size_t>(gi)] += elem.load[static_cast<std::size_t>(i)];
    }
  }
  sys.load.state = ConsistencyState::Additive;
  comm.update_master_slave(sys.load, UpdateMode::AccumulateThenScatter);
  return sys;
}

DistributedVector assemble_load(const ParFEMapper& mapper, const ParFECommunicator& comm,
                                const ScalarField& f, double t) {
  const SubdomainMesh& sub = *mapper.space->sub;
  DistributedVector load(static_cast<std::size_t>(mapper.n_dofs), 0.0);
  for (std::size_t c = 0; c < sub.cells.size(); ++c) {
    if (!sub.is_own(static_cast<int>(c))) continue;
    const ElementMatrices elem = element_matrices(sub.cells[c], sub, mapper.space->family, f, t);
    const std::vector<int>& dofs = mapper.cell_dofs[c];
    for (int i = 0; i < elem.n; ++i) {
      load[static_cast<std::size_t>(dofs[static_cast<std::size_t>(i)])] +=
          elem.load[static_cast<std::size_t>(i)];
    }
  }
  load.state = ConsistencyState::Additive;
  comm.update_master_slave(load, UpdateMode::AccumulateThenScatter);
  return load;
}

void apply_dirichlet_rows(CsrSparseMatrix& a, const ParFEMapper& mapper) {
  for (int dof = 0; dof < mapper.n_dofs; ++dof) {
    if (mapper.class_of[static_cast<std::size_t>(dof)] != DofClass::Dirichlet) continue;
    for (int k = a.row_offsets[static_cast<std::size_t>(dof)];
         k < a.row_offsets[static_cast<std::size_t>(dof) + 1]; ++k)
      a.values[static_cast<std::size_t>(k)] =
          a.col_indices[static_cast<std::size_t>(k)] == dof ? 1.0 : 0.0;
  }
}

void apply_dirichlet_rhs(DistributedVector& rhs, const ScalarField& g, double t,
                         const ParFEMapper& mapper) {
  for (int dof = 0; dof < mapper.n_dofs; ++dof) {
    if (mapper.class_of[static_cast<std::size_t>(dof)] != DofClass::Dirichlet) continue;
    rhs[static_cast<std::size_t>(dof)] =
        g ? g(t, mapper.dofs[static_cast<std::size_t>(dof)].coords) : 0.0;
  }
}

void apply_dirichlet(CsrSparseMatrix& a, DistributedVector& rhs, const ScalarField& g, double t,
                     const ParFEMapper& mapper) {
  apply_dirichlet_rows(a, mapper);
  apply_dirichlet_rhs(rhs, g, t, mapper);
}

}  // namespace parfem
