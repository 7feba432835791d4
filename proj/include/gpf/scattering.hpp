#pragma once
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpf/grid.hpp"

namespace gpf {

class RadialPotential {
 public:
  RadialPotential(std::function<double(double)> v, double support, std::string name);

  static RadialPotential zero(double support = 1.0);
  static RadialPotential square_well(double V0, double R);
  // V0 (1 - r^2/R^2)^3, twice continuously differentiable at R
  static RadialPotential soft_sphere(double V0, double R);
  // linear interpolation of samples on a uniform grid over [0, R]
  static RadialPotential table(const std::vector<double>& samples, double R);
  static RadialPotential from_file(const std::string& path);

  double operator()(double r) const;
  double support() const { return R_; }
  const std::string& name() const { return name_; }
  bool is_zero() const { return zero_; }
  std::vector<double> samples(int n) const;
  // 4 pi \int r^2 V dr
  double integral() const;

 private:
  std::function<double(double)> v_;
  double R_;
  std::string name_;
  bool zero_ = false;
};

struct ScatteringSolution {
  std::vector<double> r;
  std::vector<double> u;
  std::vector<double> du;
  std::vector<double> f;
  double a0 = 0.0;
  double lambda = 0.0;
  bool neumann = false;
  double N = 1.0;
  double ell = 0.0;
  double support = 0.0;
  std::size_t inner_points = 0;  // nodes on [0, R_V]
  double fit_slope = 1.0;
  double fit_rms = 0.0;

  // outer radius of the tabulated region (Nl for the Neumann variant)
  double boundary() const { return r.back(); }
  double f_at(double rr) const;
  double w_at(double rr) const { return 1.0 - f_at(rr); }
  // radial derivative of f
  double df_at(double rr) const;
  double u_at(double rr) const;
  // max w(r)(r+1) and max |w'(r)|(r^2+1) over the grid
  double w_decay_constant() const;
  double dw_decay_constant() const;
};

ScatteringSolution solve_zero_energy(const RadialPotential& V, double r_max = 0.0,
                                     int grid_points = 2049);

double scattering_length_integral(const RadialPotential& V, const ScatteringSolution& f);

ScatteringSolution solve_neumann(const RadialPotential& V, double N, double ell,
                                 int grid_points = 4097);

// \int_{R^3} V(x) f(x) dx
double integral_Vf(const RadialPotential& V, const ScatteringSolution& f);

struct RescaledProfiles {
  Eigen::VectorXd f;   // f_l(N x)
  Eigen::VectorXd w;   // w_l(N x)
  Eigen::VectorXd Vf;  // N^2 V(N x) f_l(N x)
};

RescaledProfiles rescaled_profiles(const ScatteringSolution& sol, const RadialPotential& V,
                                   double N, const SpatialGrid& grid);

// discrete L2 norm over |x| <= l of (-Delta + N^2 V(N.)/2) f_l(N.) - N^2 lambda f_l(N.)
double rescaled_residual(const ScatteringSolution& sol, const RadialPotential& V,
                         int samples = 2000);

// \int N^3 V(N x) f(N x) dx evaluated in rescaled coordinates
double rescaled_integral_Vf(const ScatteringSolution& sol, const RadialPotential& V, double N);

// Fourier transform at wave number q of the pair function N^3 F(N|x|) with
// F = V f (3D), evaluated exactly by radial quadrature.
// dim = 3: 4 pi \int s^2 F(s) sinc(q s / N) ds
// dim = 1: 4 pi \int s^2 F(s) cos(q s / N) ds (radially projected 1D analog)
double kernel_transform(const RadialPotential& V, const ScatteringSolution& sol, double N,
                        double q, int dim);

// integrals \int_0^b s^2 g(s) j(q s) ds of a radial function, composite Gauss-Legendre
double radial_transform(const std::function<double(double)>& g, const std::vector<double>& breaks,
                        double q, int dim);

}  // namespace gpf
