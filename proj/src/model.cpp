#include "parfem/model.hpp"

#include <cmath>

namespace parfem {

namespace {

const double kPi = std::acos(-1.0);

double profile(int dimension, const std::array<double, 3>& x) {
  double u = std::sin(kPi * x[0]) * std::cos(kPi * x[1]);
  if (dimension == 3) u *= std::cos(kPi * x[2]);
  return u;
}

}  // namespace

ScalarField HeatProblem::exact() const {
  const int d = dimension;
  return [d](double t, const std::array<double, 3>& x) { return std::exp(-0.1 * t) * profile(d, x); };
}

ScalarField HeatProblem::source() const {
  const int d = dimension;
  return [d](double t, const std::array<double, 3>& x) {
    return (-0.1 + d * kPi * kPi) * std::exp(-0.1 * t) * profile(d, x);
  };
}

ScalarField HeatProblem::dirichlet() const { return exact(); }

ScalarField PoissonProblem::exact() const {
  const int d = dimension;
  return [d](double, const std::array<double, 3>& x) { return profile(d, x); };
}

ScalarField PoissonProblem::source() const {
  const int d = dimension;
  return [d](double, const std::array<double, 3>& x) { return d * kPi * kPi * profile(d, x); };
}

ScalarField PoissonProblem::dirichlet() const { return exact(); }

}  // namespace parfem
