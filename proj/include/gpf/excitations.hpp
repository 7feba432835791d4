#pragma once
#include <random>
#include <vector>

#include "gpf/fockspace.hpp"

namespace gpf {

// unitary Q with first column phi (Householder reflection, phase-adjusted)
CMat orthonormal_completion(const CVec& phi);

// permanent by Ryser's formula with Gray-code updates
cplx permanent(const CMat& A);

// Gamma(W) on a Fock basis: block diagonal over sectors,
// <m|Gamma(W)|n> = perm(W[m,n]) / sqrt(prod m_i! prod n_j!)
CMat second_quantize(const CMat& W, const FockBasis& B);

// U(phi) as an isometry from the N-sector (columns, in sector order) into F^{<=N}
struct ExcitationMap {
  CVec phi;
  CMat Q;       // mode-space completion, Q.col(0) = phi
  CMat U;       // dim(F^{<=N}) x sector_dim(N)
  CMat perp;    // isometry onto F^{<=N}_{perp phi}, columns Gamma(Q)|0, r>
  int N = 0;
};

ExcitationMap excitation_map(const CVec& phi, const FockSpace& F);

// full-length vectors on F^{<=N}; inputs must live in the N-sector resp. F_perp
CVec u_map(const CVec& phi, const CVec& psi_N, const FockSpace& F);
CVec u_inverse(const CVec& phi, const CVec& xi, const FockSpace& F);
CVec u_map(const ExcitationMap& E, const CVec& psi_N, const FockBasis& B);
CVec u_inverse(const ExcitationMap& E, const CVec& xi, const FockBasis& B);

// embed / extract the N-sector block of a full vector
CVec sector_part(const CVec& v, const FockBasis& B, int n);
CVec embed_sector(const CVec& s, const FockBasis& B, int n);

// projector onto F^{<=N}_{perp phi}
CMat perp_projector(const ExcitationMap& E);

struct ConjugationReport {
  double unitarity = 0.0;         // ||U*U - 1||
  double range = 0.0;             // ||UU* - P_perp||
  double sector_mapping = 0.0;    // weight of the image outside the declared sectors
  double rule[4] = {0, 0, 0, 0};  // worst residual of each rule
  int trials = 0;
  bool pass(double tol = 1e-10) const;
};

// U a*(phi)a(phi) U* = N - N_op, U a*(f)a(phi) U* = sqrt(N) b*(f),
// U a*(phi)a(g) U* = sqrt(N) b(g), U a*(f)a(g) U* = a*(f)a(g), for f, g orthogonal to phi
ConjugationReport check_conjugation_rules(const CVec& phi, const FockSpace& F, std::mt19937_64& rng,
                                          int trials = 20);

// first-quantized cross-check (small M, N only)
// normalized symmetric tensor of an occupation vector in (C^M)^{(x)n}
CVec symmetric_tensor(const int* occ, int M);
// (1/sqrt(n!)) sum over permutations of f_{s(1)} (x) ... (x) f_{s(n)}
CVec symprod(const std::vector<CVec>& fs);
// coefficients of a symmetric tensor in the n-sector of B
CVec tensor_to_sector(const CVec& T, const FockBasis& B, int n);

}  // namespace gpf
