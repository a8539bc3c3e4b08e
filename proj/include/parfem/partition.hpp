#pragma once

#include <cstdint>
#include <vector>

#include "parfem/fe_family.hpp"
#include "parfem/mesh.hpp"

namespace parfem {

/// Own cells split into Dependent (touch another rank's cells through a
/// dof-carrying entity) and Independent; Halo cells are the foreign cells
/// needed to complete dof couplings of own cells.
enum class CellClass { Dependent, Independent, Halo };
const char* to_string(CellClass c);

enum class PartitionStrategy { Greedy, CoordinateBisection };

/// Owner rank per cell, indexed by gcn of the level the map was built for.
struct PartitionMap {
  int n_ranks = 1;
  std::vector<int> owner;
};

/// Disjoint complete assignment of mesh cells to k ranks. Greedy grows rank
/// blocks in gcn order; CoordinateBisection recursively splits along the
/// axis of largest extent by cell centers. Both balance to within one cell.
PartitionMap partition_cells(const MeshLevel& mesh, int k, PartitionStrategy strategy);

/// Owner map for a mesh `generations` refinements below the one `coarse_map`
/// was built for: ownership is inherited along parent chains.
PartitionMap derive_descendant_partition(const PartitionMap& coarse_map, int nc, int generations);

/// One rank's view of a mesh level: its own cells plus the halo closure for
/// the given element family, cells sorted by gcn.
struct SubdomainMesh {
  int rank = 0;
  int n_ranks = 1;
  int dimension = 2;
  int level = 0;
  std::int64_t n_coarse = 1;
  FEFamily family = FEFamily::ContinuousQ1;

  std::vector<Vertex> vertices;
  std::vector<Cell> cells;
  std::vector<CellClass> cell_class;  // parallel to cells
  std::vector<int> cell_owner;        // parallel to cells
  std::vector<int> neighbor_ranks;    // sorted owners of halo cells

  int n_own = 0, n_dependent = 0, n_independent = 0, n_halo = 0;

  std::int64_t lattice_denominator() const { return n_coarse << level; }
  bool is_own(int c) const { return cell_class[static_cast<std::size_t>(c)] != CellClass::Halo; }
  double cell_volume() const;
};

/// Restriction of a full mesh level to one rank: own cells from the owner
/// map plus every foreign cell sharing a dof-carrying entity with them.
SubdomainMesh build_subdomain(const MeshLevel& mesh, const PartitionMap& map, int rank,
                              FEFamily family);

/// Refine a subdomain without global knowledge: split all local cells, then
/// keep only halo children that still share a dof-carrying entity with an
/// own child. Fine cells keep the parent's local id in `parent`.
SubdomainMesh refine_subdomain(const SubdomainMesh& sub);

}  // namespace parfem
