#pragma once
#include <optional>
#include <vector>

#include "gpf/correlations.hpp"
#include "gpf/excitations.hpp"
#include "gpf/record.hpp"

namespace gpf {

// H = sum h_i a*_i a_i + 1/2 sum v_{ij,kl} a*_i a*_j a_l a_k on F^{<=N}, v from N^2 V(N.)
struct ManyBodyHamiltonian {
  FockOperator op;
  FockOperator kinetic;
  Eigen::VectorXd h;
  PairTensor v;
  int N = 0;
};

ManyBodyHamiltonian build_hamiltonian(const RadialPotential& V, int N, const TorusModes& modes,
                                      const FockSpace& F);
// same, from a prepared two-body tensor
ManyBodyHamiltonian build_hamiltonian(const PairTensor& v, int N, const TorusModes& modes,
                                      const FockSpace& F);

// 1/2 sum v_{ij,kl} a*_i a*_j a_l a_k
SpMat two_body(const PairTensor& v, const FockSpace& F);

// exact propagation in one particle-number sector via the spectral decomposition
class SectorPropagator {
 public:
  SectorPropagator(const ManyBodyHamiltonian& H, const FockSpace& F, int n);
  // psi: full-length vector supported in the sector
  CVec evolve(const CVec& psi, double t) const;
  const Eigen::VectorXd& energies() const { return E_; }

 private:
  const FockBasis* B_;
  int n_;
  Eigen::VectorXd E_;
  CMat V_;
};

CVec evolve(const CVec& psi, const ManyBodyHamiltonian& H, const FockSpace& F, double T);

// gamma(i;j) = <psi, a*_j a_i psi> / N
CMat reduced_density(const CVec& psi, const FockSpace& F, int N);
double depletion(const CMat& gamma, const CVec& phi);
double trace_norm(const CMat& X);

// Shared inputs for the fluctuation experiments on the torus.
struct FluctuationConfig {
  RadialPotential V = RadialPotential::soft_sphere(20.0, 0.5);
  int N = 3;
  int M = 5;
  double ell = 0.4;
  CVec phi0;                // empty selects default_condensate(M)
  bool correlations = true;  // false sets eta = 0
  bool many_body = true;     // false skips the Fock space (continuum checks at large N)
};

CVec default_condensate(int M);

class FluctuationModel {
 public:
  explicit FluctuationModel(const FluctuationConfig& cfg);

  const FluctuationConfig& config() const { return cfg_; }
  int N() const { return cfg_.N; }
  const TorusModes& modes() const { return modes_; }
  const FockSpace& space() const;
  const ManyBodyHamiltonian& hamiltonian() const;
  const KernelBuilder* kernels() const { return kb_ ? &*kb_ : nullptr; }
  const ScatteringSolution& scattering() const { return sol_; }
  double a0() const { return a0_; }
  const PairTensor& TV() const { return TV_; }    // N^3 V(N.)
  const PairTensor& TVf() const { return TVf_; }  // N^3 V(N.) f(N.)
  const ModeGP& modified_flow() const { return modified_; }
  const ModeGP& gp_flow() const { return gp_; }    // coupling 8 pi a0
  const CVec& phi0() const { return phi0_; }

  CVec phi_tilde(double t) const;  // modified GP
  CVec phi_gp(double t) const;     // cubic GP
  CMat eta(const CVec& phi) const;
  // scale for difference steps: 1 / (N (max kinetic + |chemical potential|))
  double dynamical_time() const;

 private:
  FluctuationConfig cfg_;
  TorusModes modes_;
  ScatteringSolution sol_;
  double a0_ = 0.0;
  std::optional<FockSpace> F_;
  PairTensor TV_, TVf_;
  ModeGP modified_, gp_;
  std::optional<ManyBodyHamiltonian> H_;
  std::optional<KernelBuilder> kb_;
  CVec phi0_;
};

struct GeneratorBundle {
  double t = 0.0;
  double delta = 0.0;
  CVec phi;
  CMat perp;           // isometry onto F_perp(phi_t)
  CMat G;              // generator compressed to F_perp
  CMat dU;             // (i d_t U) U* + U H U*, compressed
  CMat L[5];           // L^(0..4), compressed
  double C = 0.0;      // mode-projected C_{N,t}
  double C_continuum = 0.0;
  double scalar = 0.0;  // <i d_t phi, phi>
  double hermiticity = 0.0;
  double decomposition_residual = 0.0;
};

GeneratorBundle assemble_generator(const FluctuationModel& model, double t, double delta = 0.0);

struct FormBoundReport {
  double C_lo = 0.0, C_hi = 0.0;  // 1/2 H - C_lo (N+1) <= G - C <= 2H + C_hi (N+1)
  double C_comm = 0.0;             // +-i[N, G] <= H + C_comm (N+1)
};
FormBoundReport generator_form_bounds(const GeneratorBundle& g, const FluctuationModel& model);

// C_{N,t} with all two-point integrals evaluated in the continuum (Fourier sums)
double cnt_continuum(const FluctuationModel& model, const CVec& phi);
// C_{N,t} with k replaced by its mode projection
double cnt_modes(const FluctuationModel& model, const CVec& phi);
// E_GP(phi) = \int |grad phi|^2 + 4 pi a0 |phi|^4
double gp_energy_modes(const FluctuationModel& model, const CVec& phi);

// |C_{N,t} + N <i d_t phi~, phi~> - N E_GP(phi)| over the schedule
ExperimentRecord cnt_vs_gp_energy(const FluctuationModel& model, const std::vector<double>& times);

// xi_t = e^{-B(eta_t)} U_t e^{-iHt} U*_0 e^{B(eta_0)} xi_0; xi_0 in F_perp(phi_0) (sector-major
// order of F^{<=N}); records <N>, <H>, ||xi_t||
ExperimentRecord fluctuation_dynamics(const FluctuationModel& model, const CVec& xi0,
                                      const std::vector<double>& times);

enum class InitialState { correlated_vacuum, product };

struct DepletionOptions {
  std::vector<double> times{0.0, 0.25, 0.5};
  InitialState initial = InitialState::correlated_vacuum;
};

// one row per time for one model: depletion along both paths, trace norm and its bound;
// meta holds a_N, b_N
ExperimentRecord depletion_run(const FluctuationModel& model, const DepletionOptions& opt);

}  // namespace gpf
