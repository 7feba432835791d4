#pragma once
#include <Eigen/Dense>
#include <vector>

#include "gpf/grid.hpp"
#include "gpf/record.hpp"
#include "gpf/scattering.hpp"

namespace gpf {

enum class GPVariant { gp, modified };

struct GPState {
  SpatialGrid grid;
  Eigen::VectorXcd psi;
  double t = 0.0;
  GPVariant variant = GPVariant::gp;
  double a0 = 0.0;               // gp variant coupling 8 pi a0
  Eigen::VectorXd kernel_hat;    // modified variant: Fourier multipliers of the kernel
  Eigen::VectorXd V_ext;         // optional external potential (empty = none)
};

// unitary FFT helpers on a grid (forward carries no normalization, backward divides by size)
void fft_forward(const SpatialGrid& g, Eigen::VectorXcd& v);
void fft_backward(const SpatialGrid& g, Eigen::VectorXcd& v);

// Fourier multipliers of a real-space kernel sampled on the grid
Eigen::VectorXd kernel_spectrum_from_samples(const SpatialGrid& g, const Eigen::VectorXd& samples);
// exact multipliers of N^3 V(N.) f_l(N.) (dim 3) or of its radially projected 1D analog
Eigen::VectorXd kernel_spectrum(const SpatialGrid& g, const RadialPotential& V,
                                const ScatteringSolution& sol, double N);
// periodic convolution (kernel * rho) with precomputed multipliers
Eigen::VectorXd convolve(const SpatialGrid& g, const Eigen::VectorXd& kernel_hat,
                         const Eigen::VectorXd& rho);

GPState make_state(const SpatialGrid& g, const Eigen::VectorXcd& psi, GPVariant variant);
Eigen::VectorXcd gaussian(const SpatialGrid& g, double sigma, double p = 0.0, double x0 = 0.0);

double mass(const GPState& s);
void normalize(GPState& s);

GPState gp_step(const GPState& s, double dt);
GPState modified_gp_step(const GPState& s, double dt, const Eigen::VectorXd& kernel_hat);
// dispatch on the state's variant; n steps
GPState evolve(GPState s, double dt, int steps);

// gp: \int|grad|^2 + 4 pi a0 \int|phi|^4 (+ \int V_ext |phi|^2)
// modified: \int|grad|^2 + (1/2) \int (K * |phi|^2)|phi|^2 (+ V_ext term)
double gp_energy(const GPState& s);
double kinetic_energy(const GPState& s);

struct GroundStateOptions {
  double tol = 1e-10;
  int max_iter = 200000;
};

GPState gp_ground_state(const Eigen::VectorXd& V_ext, double a0, const SpatialGrid& grid,
                        double tol = 1e-10);
GPState gp_ground_state(const Eigen::VectorXd& V_ext, double a0, const SpatialGrid& grid,
                        const GroundStateOptions& opt);
// mu and || (-Delta + V + 8 pi a0 |phi|^2 - mu) phi ||
std::pair<double, double> euler_lagrange_residual(const GPState& s);

Eigen::VectorXd harmonic_potential(const SpatialGrid& g, double omega);
Eigen::VectorXd quartic_potential(const SpatialGrid& g, double c);

struct CompareOptions {
  double dt = 1e-3;
  double ell = 0.5;
  int samples = 20;  // sup over this many equally spaced times
};

// sup_t ||phi_t - phi~_t|| per N (columns: N, sup_diff, int_Vf, kernel_dev)
ExperimentRecord compare_dynamics(const GPState& phi0, const RadialPotential& V, double a0,
                                  const std::vector<double>& N_values, double T,
                                  const CompareOptions& opt = {});

}  // namespace gpf
