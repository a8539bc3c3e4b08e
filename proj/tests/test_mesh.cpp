#include <algorithm>
#include <cstdint>
#include <set>

#include "doctest.h"
#include "parfem/mesh.hpp"

using namespace parfem;

TEST_SUITE_BEGIN("mesh");

TEST_CASE("unit mesh counts and numbering") {
  const MeshLevel m22 = generate_unit_mesh(2, 2);
  CHECK(m22.cells.size() == 4);
  CHECK(m22.vertices.size() == 9);
  for (std::size_t c = 0; c < m22.cells.size(); ++c)
    CHECK(m22.cells[c].gcn == static_cast<std::int64_t>(c));
  CHECK(m22.cell_volume() == doctest::Approx(0.25).epsilon(1e-15));

  const MeshLevel m34 = generate_unit_mesh(3, 4);
  CHECK(m34.cells.size() == 64);
  CHECK(m34.vertices.size() == 125);

  const MeshLevel big = generate_unit_mesh(3, 64);
  CHECK(big.cells.size() == 262144);
  CHECK(big.vertices.size() == 274625);
}

TEST_CASE("vertex coordinates and boundary flags are exact lattice data") {
  for (const MeshLevel& m : {generate_unit_mesh(2, 2), refine_uniform(generate_unit_mesh(2, 2))}) {
    const std::int64_t denom = m.lattice_denominator();
    for (const Vertex& v : m.vertices) {
      bool boundary = false;
      for (int a = 0; a < m.dimension; ++a) {
        CHECK(v.coords[static_cast<std::size_t>(a)] ==
              static_cast<double>(v.lattice[static_cast<std::size_t>(a)]) / static_cast<double>(denom));
        boundary = boundary || v.lattice[static_cast<std::size_t>(a)] == 0 ||
                   v.lattice[static_cast<std::size_t>(a)] == denom;
      }
      CHECK(v.on_boundary == boundary);
    }
  }
  int boundary_count = 0;
  for (const Vertex& v : generate_unit_mesh(2, 2).vertices) boundary_count += v.on_boundary ? 1 : 0;
  CHECK(boundary_count == 8);
}

TEST_CASE("two refinements of a single 3d cell") {
  MeshLevel l0 = generate_unit_mesh(3, 1);
  MeshLevel l1 = refine_uniform(l0);
  MeshLevel l2 = refine_uniform(l1);
  CHECK(l1.cells.size() == 8);
  CHECK(l2.cells.size() == 64);

  std::set<std::int64_t> gcns;
  for (const Cell& c : l2.cells) {
    CHECK(c.gcn >= 0);
    CHECK(c.gcn < 64);
    gcns.insert(c.gcn);
    CHECK(c.parent >= 0);
    CHECK(c.parent < 8);
  }
  CHECK(gcns.size() == 64);

  CHECK(l2.cell_volume() * static_cast<double>(l2.cells.size()) == doctest::Approx(1.0).epsilon(1e-12));

  link_children(l1, l2);
  for (const Cell& parent : l1.cells) {
    REQUIRE(parent.children.size() == 8);
    for (int idx = 0; idx < 8; ++idx) {
      const Cell& child = l2.cells[static_cast<std::size_t>(parent.children[static_cast<std::size_t>(idx)])];
      CHECK(child.gcn == child_gcn(parent.gcn, 8, idx));
      CHECK(child.parent == parent.local_id);
    }
  }
}

TEST_CASE("child cell numbering is injective") {
  CHECK(child_gcn(5, 8, 3) == 43);
  CHECK(child_gcn(0, 4, 0) == 0);
  std::set<std::int64_t> seen;
  for (std::int64_t p = 0; p < 64; ++p)
    for (int c = 0; c < 8; ++c) seen.insert(child_gcn(p, 8, c));
  CHECK(seen.size() == 512);
}

TEST_CASE("refinement of a 2x2 mesh") {
  const MeshLevel fine = refine_uniform(generate_unit_mesh(2, 2));
  CHECK(fine.cells.size() == 16);
  CHECK(fine.vertices.size() == 25);
  CHECK(fine.level == 1);
  CHECK(fine.lattice_denominator() == 4);
  CHECK(fine.cell_volume() * 16.0 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reference vertex ring order") {
  CHECK(reference_vertex_offset(2, 0) == LatticeCoord{0, 0, 0});
  CHECK(reference_vertex_offset(2, 1) == LatticeCoord{1, 0, 0});
  CHECK(reference_vertex_offset(2, 2) == LatticeCoord{1, 1, 0});
  CHECK(reference_vertex_offset(2, 3) == LatticeCoord{0, 1, 0});
  for (int v = 0; v < 8; ++v) {
    const LatticeCoord o = reference_vertex_offset(3, v);
    CHECK(o[2] == (v < 4 ? 0 : 1));
    CHECK(o[0] == reference_vertex_offset(2, v % 4)[0]);
    CHECK(o[1] == reference_vertex_offset(2, v % 4)[1]);
  }
}

TEST_CASE("facets cover every axis side") {
  for (int dim : {2, 3}) {
    const int corners = dim == 2 ? 2 : 4;
    CHECK(facets_per_cell(dim) == 2 * dim);
    for (int f = 0; f < facets_per_cell(dim); ++f) {
      const std::vector<int> fc = facet_corner_vertices(dim, f);
      REQUIRE(static_cast<int>(fc.size()) == corners);
      const int axis = f / 2, side = f % 2;
      for (int v : fc)
        CHECK(reference_vertex_offset(dim, v)[static_cast<std::size_t>(axis)] == side);
    }
  }
}

TEST_SUITE_END();
