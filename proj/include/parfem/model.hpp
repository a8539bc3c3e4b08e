#pragma once

#include "parfem/assembly.hpp"

namespace parfem {

/// Manufactured heat problem on the unit square/cube:
///   u(t, x) = exp(-0.1 t) sin(pi x) cos(pi y) [cos(pi z)]
/// with u_t - laplace(u) = f, f = (-0.1 + d pi^2) u, and Dirichlet data
/// taken from u itself on the whole boundary.
struct HeatProblem {
  int dimension = 2;
  ScalarField exact() const;
  ScalarField source() const;
  ScalarField dirichlet() const;  // trace of exact()
};

/// Time-independent Poisson counterpart: -laplace(u) = f with the same
/// spatial profile, f = d pi^2 u, boundary data from u.
struct PoissonProblem {
  int dimension = 2;
  ScalarField exact() const;
  ScalarField source() const;
  ScalarField dirichlet() const;
};

}  // namespace parfem
