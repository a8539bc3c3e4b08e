#include "parfem/fespace.hpp"

#include <map>
#include <stdexcept>

namespace parfem {

namespace {

// Corner lattice coordinates of the carrier behind (cell, slot).
std::vector<LatticeCoord> carrier_corners(const SubdomainMesh& sub, const Cell& cell, int slot) {
  auto lattice_of = [&](int ref_v) {
    return sub.vertices[static_cast<std::size_t>(cell.vertex_ids[static_cast<std::size_t>(ref_v)])]
        .lattice;
  };
  switch (dof_entity_kind(sub.family)) {
    case EntityKind::Vertex:
      return {lattice_of(slot)};
    case EntityKind::Facet: {
      std::vector<LatticeCoord> corners;
      for (int v : facet_corner_vertices(sub.dimension, slot)) corners.push_back(lattice_of(v));
      return corners;
    }
    case EntityKind::CellInterior: {
      std::vector<LatticeCoord> corners;
      for (std::size_t v = 0; v < cell.vertex_ids.size(); ++v)
        corners.push_back(lattice_of(static_cast<int>(v)));
      return corners;
    }
  }
  throw std::invalid_argument("unknown entity kind");
}

}  // namespace

FESpace build_fespace(std::shared_ptr<const SubdomainMesh> sub, FEFamily family) {
  if (!sub) throw std::invalid_argument("build_fespace: null subdomain");
  if (sub->family != family)
    throw std::invalid_argument("subdomain halo closure was built for a different family");

  FESpace space;
  space.sub = sub;
  space.family = family;
  const int slots = dofs_per_cell(family, sub->dimension);
  const std::int64_t denom = sub->lattice_denominator();

  std::map<LatticeCoord, int> index;
  space.cell_dofs.resize(sub->cells.size());
  for (std::size_t c = 0; c < sub->cells.size(); ++c) {
    const Cell& cell = sub->cells[c];
    space.cell_dofs[c].reserve(static_cast<std::size_t>(slots));
    for (int s = 0; s < slots; ++s) {
      const std::vector<LatticeCoord> corners = carrier_corners(*sub, cell, s);
      LatticeCoord key{0, 0, 0};
      for (const LatticeCoord& lat : corners)
        for (int a = 0; a < 3; ++a) key[static_cast<std::size_t>(a)] += lat[static_cast<std::size_t>(a)];

      int dof;
      auto it = index.find(key);
      if (it != index.end()) {
        dof = it->second;
      } else {
        dof = static_cast<int>(space.dofs.size());
        DofInfo info;
        info.kind = dof_entity_kind(family);
        info.key = key;
        const double scale = static_cast<double>(corners.size()) * static_cast<double>(denom);
        for (int a = 0; a < 3; ++a)
          info.coords[static_cast<std::size_t>(a)] =
              static_cast<double>(key[static_cast<std::size_t>(a)]) / scale;
        info.on_boundary = false;
        for (int a = 0; a < sub->dimension; ++a) {
          bool all_low = true, all_high = true;
          for (const LatticeCoord& lat : corners) {
            all_low = all_low && lat[static_cast<std::size_t>(a)] == 0;
            all_high = all_high && lat[static_cast<std::size_t>(a)] == denom;
          }
          if (all_low || all_high) info.on_boundary = true;
        }
        space.dofs.push_back(info);
        index.emplace(key, dof);
      }
      space.cell_dofs[c].push_back(dof);
    }
  }
  space.n_dofs = static_cast<int>(space.dofs.size());
  for (int i = 0; i < space.n_dofs; ++i)
    if (space.dofs[static_cast<std::size_t>(i)].on_boundary) space.dirichlet.push_back(i);
  return space;
}

namespace {

BasisEval q1_eval(int d, int v, const std::array<double, 3>& x) {
  const LatticeCoord off = reference_vertex_offset(d, v);
  BasisEval out;
  out.value = 1.0;
  std::array<double, 3> factor{1.0, 1.0, 1.0}, dfactor{0.0, 0.0, 0.0};
  for (int a = 0; a < d; ++a) {
    const bool high = off[static_cast<std::size_t>(a)] == 1;
    factor[static_cast<std::size_t>(a)] = high ? x[static_cast<std::size_t>(a)]
                                               : 1.0 - x[static_cast<std::size_t>(a)];
    dfactor[static_cast<std::size_t>(a)] = high ? 1.0 : -1.0;
  }
  for (int a = 0; a < d; ++a) out.value *= factor[static_cast<std::size_t>(a)];
  for (int a = 0; a < d; ++a) {
    double g = dfactor[static_cast<std::size_t>(a)];
    for (int b = 0; b < d; ++b)
      if (b != a) g *= factor[static_cast<std::size_t>(b)];
    out.gradient[static_cast<std::size_t>(a)] = g;
  }
  return out;
}

// Rotated multilinears on [-1,1]^d, one function per facet, equal to 1 at
// the facet's midpoint and 0 at the other facets' midpoints.
BasisEval rotated_eval(int d, int f, const std::array<double, 3>& x) {
  std::array<double, 3> xi{0.0, 0.0, 0.0};
  for (int a = 0; a < d; ++a)
    xi[static_cast<std::size_t>(a)] = 2.0 * x[static_cast<std::size_t>(a)] - 1.0;
  const int axis = f / 2;
  const double sign = f % 2 == 0 ? -1.0 : 1.0;
  const auto X = [&](int a) { return xi[static_cast<std::size_t>(a)]; };

  BasisEval out;
  std::array<double, 3> dxi{0.0, 0.0, 0.0};  // gradient w.r.t. xi
  if (d == 2) {
    const int other = 1 - axis;
    out.value = 0.25 + sign * X(axis) / 2.0 + (X(axis) * X(axis) - X(other) * X(other)) / 4.0;
    dxi[static_cast<std::size_t>(axis)] = sign / 2.0 + X(axis) / 2.0;
    dxi[static_cast<std::size_t>(other)] = -X(other) / 2.0;
  } else {
    out.value = 1.0 / 6.0 + sign * X(axis) / 2.0 + 2.0 * X(axis) * X(axis) / 6.0;
    dxi[static_cast<std::size_t>(axis)] = sign / 2.0 + 2.0 * X(axis) / 3.0;
    for (int a = 0; a < 3; ++a) {
      if (a == axis) continue;
      out.value -= X(a) * X(a) / 6.0;
      dxi[static_cast<std::size_t>(a)] = -X(a) / 3.0;
    }
  }
  for (int a = 0; a < d; ++a)
    out.gradient[static_cast<std::size_t>(a)] = 2.0 * dxi[static_cast<std::size_t>(a)];
  return out;
}

}  // namespace

BasisEval local_basis_eval(FEFamily family, int dimension, int local_dof,
                           const std::array<double, 3>& ref_point) {
  if (dimension != 2 && dimension != 3) throw std::invalid_argument("dimension must be 2 or 3");
  if (local_dof < 0 || local_dof >= dofs_per_cell(family, dimension))
    throw std::invalid_argument("local dof out of range");
  switch (family) {
    case FEFamily::ContinuousQ1:
      return q1_eval(dimension, local_dof, ref_point);
    case FEFamily::NonconformingRotatedQ1:
      return rotated_eval(dimension, local_dof, ref_point);
    case FEFamily::DiscontinuousQ0:
      return BasisEval{1.0, {0.0, 0.0, 0.0}};
  }
  throw std::invalid_argument("unknown element family");
}

}  // namespace parfem
