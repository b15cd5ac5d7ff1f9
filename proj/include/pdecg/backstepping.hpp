#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "pdecg/grid.hpp"
#include "pdecg/profile.hpp"

namespace pdecg {

/// Gain k(x) on [0,1] solving k(x) = -beta(x) + int_0^x beta(x-y) k(y) dy.
struct KernelHyperbolic {
  Grid1D grid;
  Field1D k;
  double residual = 0.0;  // max |k^{m+1} - k^m| at the last iteration
  int iterations = 0;
};

/// Successive approximations from k^0 = -beta with trapezoid quadrature.
/// On the uniform grid beta(x_i - y_j) = beta_{i-j}, so no interpolation is needed.
/// Throws ConvergenceError (carrying the last residual) if max_iters is exhausted.
KernelHyperbolic solve_kernel_hyperbolic(const BetaProfile& beta, double tol = 1e-12,
                                         int max_iters = 500);

/// U = int_0^1 k(1-y) u(y) dy by the trapezoid rule; k(1-y_j) = k_{N-j}.
double control_hyperbolic(const KernelHyperbolic& kernel, std::span<const double> u,
                          const Grid1D& grid);

/// Lower-triangular kernel k(x_i, y_j), 0 <= j <= i, solving
///   k_xx - k_yy = lambda(y) k,  k(x,0) = 0,  k(x,x) = -1/2 int_0^x lambda.
class KernelParabolic {
 public:
  explicit KernelParabolic(const Grid1D& grid);

  double operator()(int i, int j) const { return data_[index(i, j)]; }
  double& operator()(int i, int j) { return data_[index(i, j)]; }

  const Grid1D& grid() const { return grid_; }
  /// k(1, y_j) for j = 0..N.
  Field1D top_row() const;

  double residual = 0.0;           // fixed-point change at the last sweep
  int iterations = 0;
  double goursat_residual = 0.0;   // max interior |k_xx - k_yy - lambda(y) k|, centred differences

 private:
  static std::size_t index(int i, int j) {
    return static_cast<std::size_t>(i) * (i + 1) / 2 + j;
  }

  Grid1D grid_;
  std::vector<double> data_;
};

/// Solves the Goursat problem in characteristic coordinates xi = x+y, eta = x-y,
/// where it becomes the integral equation
///   G(xi,eta) = -1/4 int_eta^xi lambda(t/2) dt
///               + 1/4 int_eta^xi int_0^eta lambda((t-s)/2) G(t,s) ds dt,
/// iterated by successive approximations on a (xi, eta) lattice of spacing dx.
/// Both boundary identities hold exactly by construction; lambda is evaluated
/// from the profile generator at half-grid points.
KernelParabolic solve_kernel_parabolic(const LambdaProfile& lambda, int sweeps = 200,
                                       double tol = 1e-10);

/// U = int_0^1 k(1,y) u(y) dy by the trapezoid rule.
double control_parabolic(const KernelParabolic& kernel, std::span<const double> u,
                         const Grid1D& grid);

/// Max interior residual of the kernel PDE under centred second differences.
double goursat_residual(const KernelParabolic& kernel, const ChebyshevProfile& lambda);

/// Kernels are reused across episodes for a given (profile, grid).
std::shared_ptr<const KernelHyperbolic> cached_kernel_hyperbolic(const BetaProfile& beta);
std::shared_ptr<const KernelParabolic> cached_kernel_parabolic(const LambdaProfile& lambda);

/// CSV dumps: "x,k" rows, and "x,y,k" rows over the triangle.
void write_kernel_csv(std::ostream& os, const KernelHyperbolic& kernel);
void write_kernel_csv(std::ostream& os, const KernelParabolic& kernel);

}  // namespace pdecg
