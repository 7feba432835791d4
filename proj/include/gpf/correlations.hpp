#pragma once
#include <map>

#include "gpf/modes.hpp"

namespace gpf {

// k(x;y) = -N w_l(N(x-y)) phi(x) phi(y), eta = q k qbar, mu = eta - k, q = 1 - |phi><phi|.
// Mode matrices are the projections onto span{e_i (x) e_j}; the continuum quantities are
// evaluated exactly through Fourier sums of |phi|^2 against radial transforms of w_l.
struct CorrelationKernel {
  double t = 0.0;
  double N = 1.0;
  CVec phi;
  CMat k, eta, mu;
  double eta_hs = 0.0;  // mode-space Hilbert-Schmidt norm of eta
};

class KernelBuilder {
 public:
  // sol: Neumann solution at scale N
  KernelBuilder(const TorusModes& modes, const RadialPotential& V, const ScatteringSolution& sol);

  CorrelationKernel build(const CVec& phi, double t = 0.0) const;

  // continuum norms
  double k_norm(const CVec& phi) const;
  double eta_norm(const CVec& phi) const;
  double grad_k_norm(const CVec& phi) const;  // || grad_x k ||_2

  // pointwise values on the torus (minimum image for x - y)
  double P(const Eigen::Vector3d& z) const;  // N w_l(N|z|)
  cplx k_at(const CVec& phi, const Eigen::Vector3d& x, const Eigen::Vector3d& y) const;
  cplx eta_at(const CVec& phi, const Eigen::Vector3d& x, const Eigen::Vector3d& y) const;

  const TorusModes& modes() const { return modes_; }
  const PairTensor& tensor() const { return TP_; }
  double N() const { return N_; }
  double ell() const { return ell_; }
  bool trivial() const { return trivial_; }

  double P_hat(const K3& p) const;
  double P2_hat(const K3& p) const;
  double gradP2_hat(const K3& p) const;

 private:
  TorusModes modes_;
  RadialPotential V_;
  ScatteringSolution sol_;
  double N_ = 1.0, ell_ = 0.0;
  bool trivial_ = false;
  PairTensor TP_;
  std::map<int, double> Phat_, P2hat_, gP2hat_;
};

// eta^{(n)} with alternating conjugation
CMat kernel_powers(const CorrelationKernel& K, int n);

// central difference of eta_t along the flow, phi_t given at time t; with gauge = true the global
// phase of phi at t +- delta is aligned with phi_t first
CMat kernel_time_derivative(const KernelBuilder& kb, const ModeGP& flow, const CVec& phi_t,
                            double delta = 1e-4, bool gauge = false);

struct PointwiseReport {
  double C_eta = 0.0;   // max |eta(x;y)| (|x-y| + 1/N) / (|phi(x)||phi(y)|)
  double C_eta2 = 0.0;  // max |eta^{(2)}(x;y)| / (|phi(x)||phi(y)|)
  std::size_t pairs = 0;
};

// streamed over an s^3 lattice of x and its pairing with y = x + offsets;
// eta^{(2)} uses an n^3 midpoint rule in the intermediate variable
PointwiseReport pointwise_bounds(const KernelBuilder& kb, const CVec& phi, int s = 4, int n = 24);

}  // namespace gpf
