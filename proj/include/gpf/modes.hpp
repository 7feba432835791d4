#pragma once
#include <array>
#include <functional>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "gpf/fockspace.hpp"
#include "gpf/scattering.hpp"

namespace gpf {

using K3 = std::array<int, 3>;
// f(x) = sum_p c_p exp(2 pi i p.x) on the unit torus
using FourierSeries = std::map<K3, cplx>;

FourierSeries series_product(const FourierSeries& a, const FourierSeries& b);
FourierSeries series_conj(const FourierSeries& a);
double series_norm2(const FourierSeries& a);

// Real trigonometric modes on the unit 3-torus: 1, sqrt2 cos(2 pi p.x), sqrt2 sin(2 pi p.x) for
// p = e_x, e_y, e_z, e_x+e_y, e_x+e_z, e_y+e_z. Real modes make conj() of a coefficient vector
// the coefficient vector of the conjugate function.
struct TorusModes {
  int M = 0;
  std::vector<K3> wave;
  std::vector<int> kind;  // 0 constant, 1 cosine, 2 sine
  Eigen::VectorXd kinetic;  // (2 pi |p|)^2, the diagonal of -Laplace
  std::vector<FourierSeries> fourier;

  double value(int i, const Eigen::Vector3d& x) const;
  Eigen::Vector3d gradient(int i, const Eigen::Vector3d& x) const;
  cplx field(const CVec& c, const Eigen::Vector3d& x) const;
  FourierSeries series(const CVec& c) const;
  ModeBasis basis() const;
};

TorusModes torus_modes(int M);
constexpr int kMaxTorusModes = 13;

// T_{ij,kl} = \int\int e_i(x) e_k(x) F(x - y) e_j(y) e_l(y) dx dy for a radial pair function F
// given by its Fourier transform Fhat(|q|), q = 2 pi p
class PairTensor {
 public:
  PairTensor() = default;
  PairTensor(int M, std::vector<double> v) : M_(M), v_(std::move(v)) {}
  int M() const { return M_; }
  double operator()(int i, int j, int k, int l) const {
    return v_[((static_cast<std::size_t>(i) * M_ + j) * M_ + k) * M_ + l];
  }
  PairTensor operator-(const PairTensor& o) const;
  PairTensor operator*(double s) const;

  // (F * |phi|^2) phi projected on the modes
  CVec mean_field(const CVec& phi) const;
  // <phi, (F * |phi|^2) phi>
  double quartic(const CVec& phi) const;
  // D_ik = sum T_{ij,kl} conj(phi_j) phi_l, E_ik = sum T_{ik,jl} phi_j conj(phi_l),
  // G_ij = sum T_{ij,kl} phi_k phi_l
  CMat direct(const CVec& phi) const;
  CMat exchange(const CVec& phi) const;
  CMat pairing(const CVec& phi) const;

 private:
  int M_ = 0;
  std::vector<double> v_;
};

PairTensor pair_tensor(const TorusModes& modes, const std::function<double(double)>& Fhat);

// Exact Fourier transforms (argument |q|) of the rescaled radial pair functions used on the torus.
// sol is a Neumann solution at scale N (profile tabulated on [0, N l]).
struct ScaledTransforms {
  const RadialPotential* V = nullptr;
  const ScatteringSolution* sol = nullptr;
  double N = 1.0;

  double VN(double q) const;      // N^3 V(N.)
  double VNf(double q) const;     // N^3 V(N.) f(N.)
  double VNw(double q) const;     // N^3 V(N.) w(N.)
  double P(double q) const;       // N w(N.)
  double P2(double q) const;      // N^2 w(N.)^2
  double gradP2(double q) const;  // |grad N w(N.)|^2 = N^4 w'(N.)^2
  double VNw2N(double q) const;   // N^4 V(N.) w(N.)^2
  double VNwN(double q) const;    // N^4 V(N.) w(N.)

  std::vector<double> breaks() const;
};

// Galerkin (modified) GP flow in mode space: i c' = h c + mean_field(c)
struct ModeGP {
  Eigen::VectorXd kinetic;
  PairTensor T;

  CVec rhs(const CVec& c) const;  // i dc/dt
  double energy(const CVec& c) const;
};

CVec propagate(const ModeGP& gp, const CVec& c0, double t0, double t1, double rtol = 1e-13);

}  // namespace gpf
