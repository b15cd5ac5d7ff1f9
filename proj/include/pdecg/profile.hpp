#pragma once

#include "pdecg/grid.hpp"

namespace pdecg {

/// a*cos(gamma*arccos(x)) evaluated for x in [0,1]. Throws InputError outside [0,1].
double beta_chebyshev(double x, double gamma_cheb, double amplitude);

/// Spatial coefficient of the form a*cos(gamma*arccos(x)) on [0,1].
///
/// Used for the transport recirculation beta(x) and the reaction term lambda(x).
/// gamma = 0 gives the constant profile a. For integer gamma the profile is a
/// scaled Chebyshev polynomial.
class ChebyshevProfile {
 public:
  ChebyshevProfile(double gamma_cheb, double amplitude);

  /// Value at x; the arccos argument is clamped to [-1, 1].
  double operator()(double x) const;

  /// Exact integral over [a, b] from the closed-form antiderivative.
  double integral(double a, double b) const;

  Field1D sample(const Grid1D& grid) const;

  double gamma_cheb() const { return gamma_; }
  double amplitude() const { return amplitude_; }

 private:
  double antiderivative(double x) const;

  double gamma_;
  double amplitude_;
};

/// A profile together with its samples on a particular grid.
struct CoefficientProfile {
  CoefficientProfile(ChebyshevProfile generator, const Grid1D& grid)
      : generator(generator), grid(grid), values(generator.sample(grid)) {}

  ChebyshevProfile generator;
  Grid1D grid;
  Field1D values;
};

using BetaProfile = CoefficientProfile;
using LambdaProfile = CoefficientProfile;

}  // namespace pdecg
