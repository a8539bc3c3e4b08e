#pragma once

namespace parfem {

/// Supported scalar element families on axis-aligned cube cells.
///  - ContinuousQ1: multilinear, one dof per vertex.
///  - NonconformingRotatedQ1: one dof per facet (facet-midpoint based).
///  - DiscontinuousQ0: one dof per cell, no coupling across cells.
enum class FEFamily { ContinuousQ1, NonconformingRotatedQ1, DiscontinuousQ0 };

/// Geometric carrier of a dof.
enum class EntityKind { Vertex, Facet, CellInterior };

EntityKind dof_entity_kind(FEFamily family);
int dofs_per_cell(FEFamily family, int dimension);
const char* to_string(FEFamily family);

}  // namespace parfem
