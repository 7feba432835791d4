#include "gpf/grid.hpp"

#include <cmath>
#include <numbers>

#include "gpf/errors.hpp"

namespace gpf {

SpatialGrid::SpatialGrid(int d, int points, double length) : dim(d), n(points), L(length) {
  if (d != 1 && d != 3) throw DomainError("grid dimension must be 1 or 3");
  if (points < 2 || (points & (points - 1)) != 0)
    throw DomainError("points per axis must be a power of two");
  if (!(length > 0.0)) throw DomainError("box length must be positive");
}

std::size_t SpatialGrid::size() const {
  std::size_t s = 1;
  for (int k = 0; k < dim; ++k) s *= static_cast<std::size_t>(n);
  return s;
}

double SpatialGrid::cell_volume() const { return std::pow(dx(), dim); }

double SpatialGrid::wavenumber(int i) const {
  int m = i <= n / 2 ? i : i - n;
  return 2.0 * std::numbers::pi * m / L;
}

double SpatialGrid::radius(std::size_t idx) const {
  double r2 = 0.0;
  for (int k = 0; k < dim; ++k) {
    double x = coord(static_cast<int>(idx % n));
    r2 += x * x;
    idx /= n;
  }
  return std::sqrt(r2);
}

double SpatialGrid::k2(std::size_t idx) const {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) {
    double q = wavenumber(static_cast<int>(idx % n));
    s += q * q;
    idx /= n;
  }
  return s;
}

Eigen::VectorXd SpatialGrid::radii() const {
  Eigen::VectorXd r(size());
  for (std::size_t i = 0; i < size(); ++i) r[i] = radius(i);
  return r;
}

Eigen::VectorXd SpatialGrid::k2_all() const {
  Eigen::VectorXd r(size());
  for (std::size_t i = 0; i < size(); ++i) r[i] = k2(i);
  return r;
}

Eigen::VectorXd SpatialGrid::kabs_all() const { return k2_all().cwiseSqrt(); }

}  // namespace gpf
