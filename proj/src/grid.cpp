#include "pdecg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pdecg/errors.hpp"

namespace pdecg {

Grid1D::Grid1D(int n) : nx(n), dx(0.0) {
  if (nx < 3) throw ConfigError("Grid1D needs nx >= 3, got " + std::to_string(nx));
  dx = 1.0 / (nx - 1);
}

Grid1D Grid1D::with_spacing(double spacing) {
  if (!(spacing > 0.0) || spacing > 0.5)
    throw ConfigError("grid spacing must lie in (0, 0.5], got " + std::to_string(spacing));
  const double cells = 1.0 / spacing;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * rounded)
    throw ConfigError("1/dx must be an integer, got dx=" + std::to_string(spacing));
  return Grid1D(static_cast<int>(rounded) + 1);
}

Grid2D::Grid2D(int nx_, int ny_) : nx(nx_), ny(ny_), dx(0.0), dy(0.0) {
  if (nx < 3 || ny < 3)
    throw ConfigError("Grid2D needs nx, ny >= 3, got " + std::to_string(nx) + "x" +
                      std::to_string(ny));
  dx = 1.0 / (nx - 1);
  dy = 1.0 / (ny - 1);
}

bool operator==(const Grid1D& a, const Grid1D& b) { return a.nx == b.nx; }
bool operator==(const Grid2D& a, const Grid2D& b) { return a.nx == b.nx && a.ny == b.ny; }

void Array2D::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

double Array2D::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

bool Array2D::all_finite() const { return pdecg::all_finite(data_); }

Velocity Field2D::velocity() const {
  Velocity w;
  w.u = u;
  w.v = v;
  return w;
}

bool Field2D::all_finite() const { return u.all_finite() && v.all_finite() && p.all_finite(); }

double l2_norm(std::span<const double> f, const Grid1D& grid) {
  if (static_cast<int>(f.size()) != grid.nx)
    throw InputError("field length " + std::to_string(f.size()) + " does not match grid nx=" +
                     std::to_string(grid.nx));
  double s = 0.0;
  for (double x : f) s += x * x;
  return std::sqrt(s * grid.dx);
}

double l2_distance(std::span<const double> a, std::span<const double> b, const Grid1D& grid) {
  if (a.size() != b.size() || static_cast<int>(a.size()) != grid.nx)
    throw InputError("field lengths " + std::to_string(a.size()) + " and " +
                     std::to_string(b.size()) + " do not match grid nx=" +
                     std::to_string(grid.nx));
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return std::sqrt(s * grid.dx);
}

double l2_norm_sq(const Velocity& w, const Grid2D& grid) {
  double s = 0.0;
  for (double x : w.u.flat()) s += x * x;
  for (double x : w.v.flat()) s += x * x;
  return s * grid.dx * grid.dy;
}

double l2_distance_sq(const Velocity& a, const Velocity& b, const Grid2D& grid) {
  if (a.u.nx() != b.u.nx() || a.u.ny() != b.u.ny())
    throw InputError("velocity fields have mismatched shapes");
  const auto au = a.u.flat(), av = a.v.flat(), bu = b.u.flat(), bv = b.v.flat();
  double s = 0.0;
  for (std::size_t k = 0; k < au.size(); ++k) {
    const double du = au[k] - bu[k];
    const double dv = av[k] - bv[k];
    s += du * du + dv * dv;
  }
  return s * grid.dx * grid.dy;
}

double vector_norm(std::span<const double> f) {
  double s = 0.0;
  for (double x : f) s += x * x;
  return std::sqrt(s);
}

double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t j = 1; j + 1 < f.size(); ++j) s += f[j];
  return s * h;
}

bool all_finite(std::span<const double> f) {
  return std::all_of(f.begin(), f.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace pdecg
