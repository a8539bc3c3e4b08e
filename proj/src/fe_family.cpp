#include "parfem/fe_family.hpp"

#include <stdexcept>

namespace parfem {

EntityKind dof_entity_kind(FEFamily family) {
  switch (family) {
    case FEFamily::ContinuousQ1: return EntityKind::Vertex;
    case FEFamily::NonconformingRotatedQ1: return EntityKind::Facet;
    case FEFamily::DiscontinuousQ0: return EntityKind::CellInterior;
  }
  throw std::invalid_argument("unknown element family");
}

int dofs_per_cell(FEFamily family, int dimension) {
  if (dimension != 2 && dimension != 3)
    throw std::invalid_argument("dimension must be 2 or 3");
  switch (family) {
    case FEFamily::ContinuousQ1: return 1 << dimension;
    case FEFamily::NonconformingRotatedQ1: return 2 * dimension;
    case FEFamily::DiscontinuousQ0: return 1;
  }
  throw std::invalid_argument("unknown element family");
}

const char* to_string(FEFamily family) {
  switch (family) {
    case FEFamily::ContinuousQ1: return "q1";
    case FEFamily::NonconformingRotatedQ1: return "rotated_q1";
    case FEFamily::DiscontinuousQ0: return "q0";
  }
  return "?";
}

}  // namespace parfem
