#include "pdecg/backstepping.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <tuple>

#include "pdecg/errors.hpp"
#include "pdecg/io.hpp"

namespace pdecg {

KernelHyperbolic solve_kernel_hyperbolic(const BetaProfile& beta, double tol, int max_iters) {
  if (!(tol > 0.0)) throw ConfigError("kernel tolerance must be positive");
  const Grid1D& grid = beta.grid;
  const auto& b = beta.values;
  const int n = grid.nx;
  const double h = grid.dx;

  KernelHyperbolic out{grid, Field1D(n), 0.0, 0};
  Field1D k(n), next(n);
  for (int i = 0; i < n; ++i) k[i] = -b[i];

  for (int m = 1; m <= max_iters; ++m) {
    double change = 0.0;
    next[0] = -b[0];
    for (int i = 1; i < n; ++i) {
      // trapezoid over y_j, j = 0..i, of beta_{i-j} k_j
      double s = 0.5 * (b[i] * k[0] + b[0] * k[i]);
      for (int j = 1; j < i; ++j) s += b[i - j] * k[j];
      next[i] = -b[i] + h * s;
      change = std::max(change, std::abs(next[i] - k[i]));
    }
    k.swap(next);
    out.iterations = m;
    out.residual = change;
    if (!std::isfinite(change)) break;
    if (change < tol) {
      out.k = std::move(k);
      return out;
    }
  }
  throw ConvergenceError("hyperbolic kernel did not converge; last residual " +
                             std::to_string(out.residual),
                         out.residual);
}

double control_hyperbolic(const KernelHyperbolic& kernel, std::span<const double> u,
                          const Grid1D& grid) {
  if (!(kernel.grid == grid) || static_cast<int>(u.size()) != grid.nx)
    throw InputError("hyperbolic kernel, state and grid do not match");
  const int n = grid.nx - 1;
  double s = 0.5 * (kernel.k[n] * u[0] + kernel.k[0] * u[n]);
  for (int j = 1; j < n; ++j) s += kernel.k[n - j] * u[j];
  return s * grid.dx;
}

KernelParabolic::KernelParabolic(const Grid1D& grid)
    : grid_(grid), data_(static_cast<std::size_t>(grid.nx) * (grid.nx + 1) / 2, 0.0) {}

Field1D KernelParabolic::top_row() const {
  const int n = grid_.nx - 1;
  Field1D row(grid_.nx);
  for (int j = 0; j <= n; ++j) row[j] = (*this)(n, j);
  return row;
}

namespace {

// Lattice in (xi, eta) = (a h, b h), a in [0, 2N], b in [0, N], valid for b <= a <= 2N - b.
class Lattice {
 public:
  explicit Lattice(int n) : n_(n), cols_(n + 1), data_(static_cast<std::size_t>(2 * n + 1) * (n + 1), 0.0) {}
  double& operator()(int a, int b) { return data_[static_cast<std::size_t>(a) * cols_ + b]; }
  double operator()(int a, int b) const { return data_[static_cast<std::size_t>(a) * cols_ + b]; }
  int n() const { return n_; }

 private:
  int n_;
  int cols_;
  std::vector<double> data_;
};

}  // namespace

KernelParabolic solve_kernel_parabolic(const LambdaProfile& lambda, int sweeps, double tol) {
  const Grid1D& grid = lambda.grid;
  const int n = grid.nx - 1;
  if (n < 2) throw ConfigError("parabolic kernel needs at least 3 diagonal points");
  if (sweeps < 1 || !(tol > 0.0)) throw ConfigError("invalid parabolic kernel iteration settings");
  const double h = grid.dx;
  const ChebyshevProfile& gen = lambda.generator;

  Lattice g0(n), coef(n), g(n), c(n), next(n);
  for (int a = 0; a <= 2 * n; ++a) {
    const int bmax = std::min(a, 2 * n - a);
    for (int b = 0; b <= bmax; ++b) {
      g0(a, b) = -0.5 * gen.integral(0.5 * b * h, 0.5 * a * h);
      coef(a, b) = gen(0.5 * (a - b) * h);
      g(a, b) = g0(a, b);
    }
  }

  int iterations = 0;
  double change = 0.0;
  bool converged = false;
  for (int m = 1; m <= sweeps; ++m) {
    // c(a, b) = int_0^{eta_b} lambda G (xi_a, s) ds, cumulative trapezoid in b
    for (int a = 0; a <= 2 * n; ++a) {
      const int bmax = std::min(a, 2 * n - a);
      c(a, 0) = 0.0;
      double prev = coef(a, 0) * g(a, 0);
      for (int b = 1; b <= bmax; ++b) {
        const double cur = coef(a, b) * g(a, b);
        c(a, b) = c(a, b - 1) + 0.5 * h * (prev + cur);
        prev = cur;
      }
    }
    // next(a, b) = g0 + 1/4 int_{eta_b}^{xi_a} c(t, b) dt, cumulative trapezoid in a
    change = 0.0;
    for (int b = 0; b <= n; ++b) {
      double integral = 0.0;
      next(b, b) = g0(b, b);
      for (int a = b + 1; a <= 2 * n - b; ++a) {
        integral += 0.5 * h * (c(a - 1, b) + c(a, b));
        next(a, b) = g0(a, b) + 0.25 * integral;
      }
      for (int a = b; a <= 2 * n - b; ++a) change = std::max(change, std::abs(next(a, b) - g(a, b)));
    }
    std::swap(g, next);
    iterations = m;
    if (!std::isfinite(change)) break;
    if (change < tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw ConvergenceError("parabolic kernel did not converge; last change " +
                               std::to_string(change),
                           change);

  KernelParabolic kernel(grid);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= i; ++j) kernel(i, j) = g(i + j, i - j);
  kernel.residual = change;
  kernel.iterations = iterations;
  kernel.goursat_residual = goursat_residual(kernel, gen);
  return kernel;
}

double goursat_residual(const KernelParabolic& kernel, const ChebyshevProfile& lambda) {
  const Grid1D& grid = kernel.grid();
  const int n = grid.nx - 1;
  const double ih2 = 1.0 / (grid.dx * grid.dx);
  double r = 0.0;
  for (int i = 2; i < n; ++i)
    for (int j = 1; j <= i - 1; ++j) {
      const double kxx = (kernel(i - 1, j) - 2.0 * kernel(i, j) + kernel(i + 1, j)) * ih2;
      const double kyy = (kernel(i, j - 1) - 2.0 * kernel(i, j) + kernel(i, j + 1)) * ih2;
      r = std::max(r, std::abs(kxx - kyy - lambda(grid.x(j)) * kernel(i, j)));
    }
  return r;
}

double control_parabolic(const KernelParabolic& kernel, std::span<const double> u,
                         const Grid1D& grid) {
  if (!(kernel.grid() == grid) || static_cast<int>(u.size()) != grid.nx)
    throw InputError("parabolic kernel, state and grid do not match");
  const int n = grid.nx - 1;
  double s = 0.5 * (kernel(n, 0) * u[0] + kernel(n, n) * u[n]);
  for (int j = 1; j < n; ++j) s += kernel(n, j) * u[j];
  return s * grid.dx;
}

namespace {

using CacheKey = std::tuple<double, double, int>;

template <typename Kernel, typename Solve>
std::shared_ptr<const Kernel> lookup(std::map<CacheKey, std::shared_ptr<const Kernel>>& cache,
                                     std::mutex& mutex, const CoefficientProfile& profile,
                                     Solve&& solve) {
  const CacheKey key{profile.generator.gamma_cheb(), profile.generator.amplitude(),
                     profile.grid.nx};
  std::lock_guard lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto kernel = std::make_shared<const Kernel>(solve(profile));
  cache.emplace(key, kernel);
  return kernel;
}

}  // namespace

std::shared_ptr<const KernelHyperbolic> cached_kernel_hyperbolic(const BetaProfile& beta) {
  static std::map<CacheKey, std::shared_ptr<const KernelHyperbolic>> cache;
  static std::mutex mutex;
  return lookup<KernelHyperbolic>(cache, mutex, beta,
                                  [](const BetaProfile& p) { return solve_kernel_hyperbolic(p); });
}

std::shared_ptr<const KernelParabolic> cached_kernel_parabolic(const LambdaProfile& lambda) {
  static std::map<CacheKey, std::shared_ptr<const KernelParabolic>> cache;
  static std::mutex mutex;
  return lookup<KernelParabolic>(cache, mutex, lambda, [](const LambdaProfile& p) {
    return solve_kernel_parabolic(p);
  });
}

void write_kernel_csv(std::ostream& os, const KernelHyperbolic& kernel) {
  os << "x,k\n";
  for (int j = 0; j < kernel.grid.nx; ++j)
    os << format_double(kernel.grid.x(j)) << ',' << format_double(kernel.k[j]) << '\n';
}

void write_kernel_csv(std::ostream& os, const KernelParabolic& kernel) {
  const Grid1D& grid = kernel.grid();
  os << "x,y,k\n";
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j <= i; ++j)
      os << format_double(grid.x(i)) << ',' << format_double(grid.x(j)) << ','
         << format_double(kernel(i, j)) << '\n';
}

}  // namespace pdecg
