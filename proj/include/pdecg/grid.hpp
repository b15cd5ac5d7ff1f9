#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pdecg {

/// Uniform grid on [0,1]; point j sits at x = j*dx.
struct Grid1D {
  explicit Grid1D(int nx);

  /// Grid whose spacing is `dx` (1/dx must be an integer to within 1e-9).
  static Grid1D with_spacing(double dx);

  double x(int j) const { return j * dx; }

  int nx;
  double dx;
};

/// Uniform grid on [0,1]x[0,1].
struct Grid2D {
  Grid2D(int nx, int ny);

  double x(int i) const { return i * dx; }
  double y(int j) const { return j * dy; }

  int nx;
  int ny;
  double dx;
  double dy;
};

bool operator==(const Grid1D& a, const Grid1D& b);
bool operator==(const Grid2D& a, const Grid2D& b);

using Field1D = std::vector<double>;

/// Dense nx-by-ny array, index (i, j) with i along x and j along y.
/// Storage is row-major in i: element (i, j) lives at i*ny + j.
class Array2D {
 public:
  Array2D() = default;
  Array2D(int nx, int ny, double fill = 0.0)
      : nx_(nx), ny_(ny), data_(static_cast<std::size_t>(nx) * ny, fill) {}

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * ny_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * ny_ + j]; }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  void fill(double value);
  double max_abs() const;
  bool all_finite() const;

  friend bool operator==(const Array2D&, const Array2D&) = default;

 private:
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> data_;
};

/// Two-component velocity on a 2D grid.
struct Velocity {
  Velocity() = default;
  explicit Velocity(const Grid2D& g) : u(g.nx, g.ny), v(g.nx, g.ny) {}

  Array2D u;
  Array2D v;

  friend bool operator==(const Velocity&, const Velocity&) = default;
};

/// Velocity plus pressure.
struct Field2D {
  Field2D() = default;
  explicit Field2D(const Grid2D& g) : u(g.nx, g.ny), v(g.nx, g.ny), p(g.nx, g.ny) {}

  Array2D u;
  Array2D v;
  Array2D p;

  Velocity velocity() const;
  bool all_finite() const;

  friend bool operator==(const Field2D&, const Field2D&) = default;
};

// Discrete norms use the rectangle rule on all grid points:
//   ||f||^2 = sum_j f_j^2 dx  (1D),  sum_ij (u^2 + v^2) dx dy  (2D velocity).

double l2_norm(std::span<const double> f, const Grid1D& grid);
double l2_distance(std::span<const double> a, std::span<const double> b, const Grid1D& grid);
double l2_norm_sq(const Velocity& w, const Grid2D& grid);
double l2_distance_sq(const Velocity& a, const Velocity& b, const Grid2D& grid);

/// Unweighted Euclidean vector norm, kept for comparison with tables that report it.
double vector_norm(std::span<const double> f);

/// Composite trapezoid rule for samples spaced `h` apart.
double trapezoid(std::span<const double> f, double h);

bool all_finite(std::span<const double> f);

}  // namespace pdecg
