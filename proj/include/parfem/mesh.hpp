#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace parfem {

/// Integer lattice position of a vertex. At refinement level L of a mesh
/// family with n coarse cells per axis the denominator is n * 2^L, so every
/// vertex coordinate is lattice[a] / denominator exactly. Unused axes are 0.
using LatticeCoord = std::array<std::int64_t, 3>;

struct Vertex {
  int id = -1;
  LatticeCoord lattice{0, 0, 0};
  std::array<double, 3> coords{0.0, 0.0, 0.0};
  bool on_boundary = false;
};

/// Axis-aligned cube cell. vertex_ids follow the fixed reference ring order:
/// 2D (0,0),(1,0),(1,1),(0,1); 3D the same ring on the z=0 plane, then on z=1.
struct Cell {
  int local_id = -1;
  std::int64_t gcn = -1;
  int level = 0;
  std::vector<int> vertex_ids;
  int parent = -1;             // local id on the next coarser level, -1 if none
  std::vector<int> children;   // local ids on the next finer level, empty if unset
};

struct MeshLevel {
  int dimension = 2;
  int level = 0;
  std::int64_t n_coarse = 1;   // cells per axis at level 0
  std::vector<Vertex> vertices;
  std::vector<Cell> cells;

  std::int64_t lattice_denominator() const { return n_coarse << level; }
  int vertices_per_cell() const { return 1 << dimension; }
  int n_children() const { return 1 << dimension; }
  double cell_volume() const;
};

/// Offset (0/1 per axis) of reference vertex v within a cell, ring order.
LatticeCoord reference_vertex_offset(int dimension, int v);

/// Offset of child c within its parent, lexicographic by (cx, cy, cz) with
/// x compared first. The child index runs over [0, 2^dimension).
LatticeCoord child_offset(int dimension, int c);

/// Facets in the fixed order -x, +x, -y, +y, -z, +z. Returns the reference
/// vertex numbers of facet f (2 corners in 2D, 4 in 3D).
std::vector<int> facet_corner_vertices(int dimension, int f);
int facets_per_cell(int dimension);

/// Uniform mesh of the unit square/cube with n cells per axis. Cells and
/// vertices are numbered lexicographically by integer position, x compared
/// first; gcn equals the cell index.
MeshLevel generate_unit_mesh(int dimension, std::int64_t n_per_axis);

/// One global refinement step: every cell splits into 2^d children, shared
/// vertices deduplicated via exact lattice coordinates. Children keep their
/// parent's local id in `parent`; output cells are sorted by gcn.
MeshLevel refine_uniform(const MeshLevel& coarse);

/// Global cell number of a child: nc * parent_gcn + child_index.
std::int64_t child_gcn(std::int64_t parent_gcn, int nc, int child_index);

/// Fill `children` on the coarse cells from the fine level's parent links.
void link_children(MeshLevel& coarse, const MeshLevel& fine);

}  // namespace parfem
