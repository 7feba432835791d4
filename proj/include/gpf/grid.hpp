#pragma once
#include <Eigen/Dense>
#include <cstddef>

namespace gpf {

// Periodic box [-L/2, L/2)^d with n points per axis.
struct SpatialGrid {
  int dim = 1;
  int n = 256;
  double L = 16.0;

  SpatialGrid() = default;
  SpatialGrid(int d, int points, double length);

  std::size_t size() const;
  double dx() const { return L / n; }
  double cell_volume() const;
  double coord(int i) const { return -0.5 * L + i * dx(); }
  // squared angular wave number of axis index i
  double wavenumber(int i) const;
  // |x| of flattened index, axis 0 fastest
  double radius(std::size_t idx) const;
  // |k|^2 of flattened index
  double k2(std::size_t idx) const;
  Eigen::VectorXd radii() const;
  Eigen::VectorXd k2_all() const;
  Eigen::VectorXd kabs_all() const;
};

}  // namespace gpf
