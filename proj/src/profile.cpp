#include "pdecg/profile.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pdecg/errors.hpp"

namespace pdecg {

double beta_chebyshev(double x, double gamma_cheb, double amplitude) {
  if (!(x >= 0.0 && x <= 1.0))
    throw InputError("Chebyshev profile evaluated outside [0,1]: x=" + std::to_string(x));
  return amplitude * std::cos(gamma_cheb * std::acos(x));
}

ChebyshevProfile::ChebyshevProfile(double gamma_cheb, double amplitude)
    : gamma_(gamma_cheb), amplitude_(amplitude) {
  if (!std::isfinite(gamma_cheb) || !std::isfinite(amplitude))
    throw ConfigError("coefficient profile parameters must be finite");
}

double ChebyshevProfile::operator()(double x) const {
  return amplitude_ * std::cos(gamma_ * std::acos(std::clamp(x, -1.0, 1.0)));
}

// With x = cos(theta): d/dx F = cos(gamma*theta) when
//   F = 1/2 [cos((1+g)theta)/(1+g) + cos((1-g)theta)/(1-g)].
// A zero frequency contributes a constant and is dropped.
double ChebyshevProfile::antiderivative(double x) const {
  const double theta = std::acos(std::clamp(x, -1.0, 1.0));
  auto term = [theta](double freq) {
    return std::abs(freq) < 1e-300 ? 0.0 : std::cos(freq * theta) / freq;
  };
  if (gamma_ == 0.0) return amplitude_ * x;
  return amplitude_ * 0.5 * (term(1.0 + gamma_) + term(1.0 - gamma_));
}

double ChebyshevProfile::integral(double a, double b) const {
  return antiderivative(b) - antiderivative(a);
}

Field1D ChebyshevProfile::sample(const Grid1D& grid) const {
  Field1D out(grid.nx);
  for (int j = 0; j < grid.nx; ++j) out[j] = (*this)(grid.x(j));
  return out;
}

}  // namespace pdecg
