#pragma once
#include <vector>

#include "gpf/fockspace.hpp"

namespace gpf {

// symmetric pair kernel eta(i;j) = eta(j;i); optionally orthogonal to phi (q eta qbar = eta)
void require_symmetric(const CMat& eta, double tol = 1e-12);
double orthogonality_defect(const CMat& eta, const CVec& phi);

// B(eta) = 1/2 sum [eta b*_x b*_y - conj(eta) b_x b_y], antihermitian on F^{<=N}
FockOperator build_B(const CMat& eta, const FockSpace& F);
// the a-field version, truncated at N_max
FockOperator build_B_tilde(const CMat& eta, const FockSpace& F);

// exp of an antihermitian operator: eigendecomposition of iB below dense_threshold, Pade above
FockOperator exp_B(const FockOperator& B, std::size_t dense_threshold = 2000);

struct HyperbolicPair {
  CMat cosh_eta, sinh_eta;
  CMat p_eta, r_eta;  // cosh - 1, sinh - eta
  int terms = 0;
};
HyperbolicPair hyperbolic_kernels(const CMat& eta);

// eta^{(n)}: 1, (eta conj(eta))^l, (eta conj(eta))^l eta
CMat kernel_power(const CMat& eta, int n);
// eta_{natural_1} ... eta_{natural_n} with '.' -> eta, '*' -> conj(eta)
CMat kernel_product(const CMat& eta, const std::string& naturals);

// || P (e^{-B~} a(f) e^{B~} - a(cosh f) - a*(sinh conj f)) P ||, P the projector onto sectors <= low
double standard_action_residual(const CMat& eta, const CVec& f, int N_max, int low_sector);

// ad^{(n)}_B(A) = [B, ad^{(n-1)}_B(A)]
CMat nested_ad(const CMat& B, const CMat& A, int n, int max_order = 20);
SpMat nested_ad(const SpMat& B, const SpMat& A, int n, int max_order = 20);

// -((N - N_op)/N)^{(n+1)/2} ((N + 1 - N_op)/N)^{(n-1)/2} b*(eta^{(n)} conj f) for odd n,
// ((N - N_op)/N)^{n/2} ((N + 1 - N_op)/N)^{n/2} b(eta^{(n)} f) for even n
CMat leading_ad_term(const CMat& eta, const CVec& f, int n, const FockSpace& F);
// [B(eta), b_z] in the form -((N - N_op)/N) b*(eta_z) + (1/N) sum eta(x;y) b*_x a*_y a_z
CMat ad1_closed_form(const CMat& eta, int z, const FockSpace& F);

struct SeriesResult {
  CMat partial;                    // sum_{n <= order} (-1)^n/n! ad^n(b(f))
  double residual = 0.0;           // operator norm distance to e^{-B} b(f) e^{B}
  std::vector<double> by_order;    // residual after each order
  bool diverging = false;          // residual grew for 3 consecutive orders
};
SeriesResult series_conjugation(const CMat& eta, const CVec& f, int order, const FockSpace& F,
                                bool dagger = false);

// smallest C with e^{-B}(N_op+1)^{n1}(N+1-N_op)^{n2}e^{B} <= C (N_op+1)^{n1}(N+1-N_op)^{n2}
double npow_constant(const CMat& eta, int n1, int n2, const FockSpace& F);

}  // namespace gpf
