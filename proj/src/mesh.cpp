#include "parfem/mesh.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace parfem {

namespace {

void check_dimension(int dimension) {
  if (dimension != 2 && dimension != 3)
    throw std::invalid_argument("dimension must be 2 or 3, got " + std::to_string(dimension));
}

// Ring order on the z=0 plane, repeated on z=1 for 3D.
constexpr std::array<std::array<std::int64_t, 3>, 8> kRingOffsets = {{
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
    {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
}};

}  // namespace

double MeshLevel::cell_volume() const {
  const double h = 1.0 / static_cast<double>(lattice_denominator());
  return dimension == 2 ? h * h : h * h * h;
}

LatticeCoord reference_vertex_offset(int dimension, int v) {
  check_dimension(dimension);
  if (v < 0 || v >= (1 << dimension))
    throw std::invalid_argument("reference vertex out of range");
  return kRingOffsets[static_cast<std::size_t>(v)];
}

LatticeCoord child_offset(int dimension, int c) {
  check_dimension(dimension);
  if (c < 0 || c >= (1 << dimension))
    throw std::invalid_argument("child index out of range");
  if (dimension == 2) return {c / 2, c % 2, 0};
  return {c / 4, (c / 2) % 2, c % 2};
}

int facets_per_cell(int dimension) {
  check_dimension(dimension);
  return 2 * dimension;
}

std::vector<int> facet_corner_vertices(int dimension, int f) {
  check_dimension(dimension);
  if (f < 0 || f >= 2 * dimension) throw std::invalid_argument("facet index out of range");
  const int axis = f / 2;
  const std::int64_t side = f % 2;  // 0 = low face, 1 = high face
  std::vector<int> corners;
  for (int v = 0; v < (1 << dimension); ++v)
    if (kRingOffsets[static_cast<std::size_t>(v)][static_cast<std::size_t>(axis)] == side)
      corners.push_back(v);
  return corners;
}

MeshLevel generate_unit_mesh(int dimension, std::int64_t n_per_axis) {
  check_dimension(dimension);
  if (n_per_axis < 1) throw std::invalid_argument("n_per_axis must be >= 1");

  MeshLevel mesh;
  mesh.dimension = dimension;
  mesh.level = 0;
  mesh.n_coarse = n_per_axis;

  const std::int64_t n = n_per_axis;
  const std::int64_t nv = n + 1;
  const std::int64_t nz_v = dimension == 3 ? nv : 1;
  const std::int64_t nz_c = dimension == 3 ? n : 1;
  const double h = 1.0 / static_cast<double>(n);

  auto vertex_id = [&](std::int64_t ix, std::int64_t iy, std::int64_t iz) {
    return static_cast<int>(dimension == 2 ? ix * nv + iy : (ix * nv + iy) * nv + iz);
  };

  mesh.vertices.reserve(static_cast<std::size_t>(nv * nv * nz_v));
  for (std::int64_t ix = 0; ix < nv; ++ix)
    for (std::int64_t iy = 0; iy < nv; ++iy)
      for (std::int64_t iz = 0; iz < nz_v; ++iz) {
        Vertex v;
        v.id = vertex_id(ix, iy, iz);
        v.lattice = {ix, iy, iz};
        v.coords = {static_cast<double>(ix) * h, static_cast<double>(iy) * h,
                    dimension == 3 ? static_cast<double>(iz) * h : 0.0};
        v.on_boundary = ix == 0 || ix == n || iy == 0 || iy == n ||
                        (dimension == 3 && (iz == 0 || iz == n));
        mesh.vertices.push_back(v);
      }

  mesh.cells.reserve(static_cast<std::size_t>(n * n * nz_c));
  for (std::int64_t ix = 0; ix < n; ++ix)
    for (std::int64_t iy = 0; iy < n; ++iy)
      for (std::int64_t iz = 0; iz < nz_c; ++iz) {
        Cell c;
        c.local_id = static_cast<int>(mesh.cells.size());
        c.gcn = c.local_id;
        c.level = 0;
        c.vertex_ids.reserve(static_cast<std::size_t>(mesh.vertices_per_cell()));
        for (int v = 0; v < mesh.vertices_per_cell(); ++v) {
          const LatticeCoord off = reference_vertex_offset(dimension, v);
          c.vertex_ids.push_back(vertex_id(ix + off[0], iy + off[1], iz + off[2]));
        }
        mesh.cells.push_back(std::move(c));
      }
  return mesh;
}

MeshLevel refine_uniform(const MeshLevel& coarse) {
  const int d = coarse.dimension;
  check_dimension(d);
  const int nc = coarse.n_children();

  MeshLevel fine;
  fine.dimension = d;
  fine.level = coarse.level + 1;
  fine.n_coarse = coarse.n_coarse;
  const std::int64_t denom = fine.lattice_denominator();

  std::map<LatticeCoord, int> vertex_index;
  auto get_vertex = [&](const LatticeCoord& lat) {
    auto it = vertex_index.find(lat);
    if (it != vertex_index.end()) return it->second;
    Vertex v;
    v.id = static_cast<int>(fine.vertices.size());
    v.lattice = lat;
    for (int a = 0; a < 3; ++a)
      v.coords[static_cast<std::size_t>(a)] =
          static_cast<double>(lat[static_cast<std::size_t>(a)]) / static_cast<double>(denom);
    v.on_boundary = false;
    for (int a = 0; a < d; ++a) {
      const std::int64_t x = lat[static_cast<std::size_t>(a)];
      if (x == 0 || x == denom) v.on_boundary = true;
    }
    vertex_index.emplace(lat, v.id);
    fine.vertices.push_back(v);
    return v.id;
  };

  fine.cells.reserve(coarse.cells.size() * static_cast<std::size_t>(nc));
  for (const Cell& parent : coarse.cells) {
    // Parent min corner in fine lattice units: coarse lattice doubled.
    const Vertex& p0 = coarse.vertices[static_cast<std::size_t>(parent.vertex_ids[0])];
    const LatticeCoord base = {2 * p0.lattice[0], 2 * p0.lattice[1], 2 * p0.lattice[2]};
    for (int ci = 0; ci < nc; ++ci) {
      const LatticeCoord co = child_offset(d, ci);
      const LatticeCoord corner = {base[0] + co[0], base[1] + co[1], base[2] + co[2]};
      Cell child;
      child.local_id = static_cast<int>(fine.cells.size());
      child.gcn = child_gcn(parent.gcn, nc, ci);
      child.level = fine.level;
      child.parent = parent.local_id;
      child.vertex_ids.reserve(static_cast<std::size_t>(fine.vertices_per_cell()));
      for (int v = 0; v < fine.vertices_per_cell(); ++v) {
        const LatticeCoord off = reference_vertex_offset(d, v);
        child.vertex_ids.push_back(
            get_vertex({corner[0] + off[0], corner[1] + off[1], corner[2] + off[2]}));
      }
      fine.cells.push_back(std::move(child));
    }
  }
  // Parents are visited in ascending gcn order and child gcns nest inside
  // disjoint ranges [nc*pg, nc*pg+nc), so the output is already gcn-sorted.
  return fine;
}

std::int64_t child_gcn(std::int64_t parent_gcn, int nc, int child_index) {
  if (parent_gcn < 0) throw std::invalid_argument("parent gcn must be >= 0");
  if (nc != 4 && nc != 8) throw std::invalid_argument("nc must be 4 or 8");
  if (child_index < 0 || child_index >= nc)
    throw std::invalid_argument("child index out of range");
  return static_cast<std::int64_t>(nc) * parent_gcn + child_index;
}

void link_children(MeshLevel& coarse, const MeshLevel& fine) {
  for (Cell& c : coarse.cells) c.children.clear();
  for (const Cell& f : fine.cells) {
    if (f.parent < 0) continue;
    coarse.cells[static_cast<std::size_t>(f.parent)].children.push_back(f.local_id);
  }
}

}  // namespace parfem
