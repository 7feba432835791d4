#pragma once
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace gpf {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using SpMat = Eigen::SparseMatrix<cplx>;

// Mode labels and, optionally, each mode as a sampled field.
struct ModeBasis {
  int M = 0;
  std::vector<std::string> labels;
  std::vector<Eigen::VectorXcd> embedding;  // empty when abstract
  double cell_volume = 1.0;

  static ModeBasis abstract(int M);
  // Gram matrix of the embedded modes (identity for abstract bases)
  CMat gram() const;
};

// Occupation vectors (n_1..n_M), sum <= N_max, graded by total then reverse-lex within a sector
// ({00,10,01,20,11,02} for M = 2, N_max = 2).
class FockBasis {
 public:
  FockBasis(int M, int N_max, std::size_t cap = 200000);

  int M() const { return M_; }
  int N_max() const { return Nmax_; }
  std::size_t dim() const { return dim_; }
  // number of states with total occupation <= n
  std::size_t dim_upto(int n) const { return offset_[n + 1]; }
  std::size_t sector_offset(int n) const { return offset_[n]; }
  std::size_t sector_dim(int n) const { return offset_[n + 1] - offset_[n]; }
  const int* state(std::size_t k) const { return &occ_[k * M_]; }
  int total(std::size_t k) const { return tot_[k]; }
  // O(M) combinatorial rank; occupation must have total <= N_max
  std::size_t index(const int* occ) const;
  std::size_t index(const std::vector<int>& occ) const { return index(occ.data()); }

  static std::uint64_t binom(int n, int k);

 private:
  int M_, Nmax_;
  std::size_t dim_;
  std::vector<std::size_t> offset_;
  std::vector<int> occ_;
  std::vector<int> tot_;
};

std::size_t fock_dimension(int M, int N_max);

enum class Symmetry { none, hermitian, antihermitian, unitary };

// Sparse operator with a declared symmetry, verified on construction.
struct FockOperator {
  SpMat mat;
  Symmetry symmetry = Symmetry::none;

  FockOperator() = default;
  FockOperator(SpMat m, Symmetry s = Symmetry::none);
  FockOperator adjoint() const;
  CMat dense() const { return CMat(mat); }
  Eigen::Index rows() const { return mat.rows(); }
};

// Truncated Fock space with cached mode operators. The basis holds sectors up to
// N + extra; b-fields use the physical N. Buffer sectors let products that pass
// through N + 1 be assembled exactly before restricting to F^{<=N}.
class FockSpace {
 public:
  FockSpace(int M, int N, int extra = 0);

  int M() const { return basis_.M(); }
  int N() const { return N_; }
  const FockBasis& basis() const { return basis_; }
  std::size_t dim() const { return basis_.dim(); }
  std::size_t dim_phys() const { return basis_.dim_upto(N_); }

  const SpMat& a(int i) const { return a_[i]; }
  const SpMat& adag(int i) const { return adag_[i]; }
  const SpMat& number() const { return num_; }
  const SpMat& identity() const { return id_; }
  // diagonal sqrt(max(N - n, 0) / N)
  const SpMat& bfactor() const { return bfac_; }

  SpMat lower(const CVec& c) const;  // sum_i c_i a_i
  SpMat raise(const CVec& c) const;  // sum_i c_i a*_i
  SpMat annihilation(const CVec& f) const { return lower(f.conjugate()); }
  SpMat creation(const CVec& f) const { return raise(f); }
  SpMat b(const CVec& f) const { return bfac_ * annihilation(f); }
  SpMat bdag(const CVec& f) const { return creation(f) * bfac_; }
  SpMat b_mode(int i) const { return bfac_ * a_[i]; }
  SpMat bdag_mode(int i) const { return adag_[i] * bfac_; }
  // diagonal g(n) over the basis
  SpMat diag(const std::function<double(int)>& g) const;
  // top-left F^{<=N} block
  SpMat restrict(const SpMat& X) const;
  CVec vacuum() const;

 private:
  FockBasis basis_;
  int N_;
  std::vector<SpMat> a_, adag_;
  SpMat num_, id_, bfac_;
};

// operations on F^{<=N}
FockBasis enumerate_basis(int M, int N_max, std::size_t cap = 200000);
FockOperator creation(const CVec& f, const FockSpace& F);
FockOperator annihilation(const CVec& f, const FockSpace& F);
FockOperator number_operator(const FockSpace& F);
FockOperator dGamma(const CMat& B, const FockSpace& F);
FockOperator b_field(const CVec& f, const FockSpace& F, int N);
FockOperator b_dagger_field(const CVec& f, const FockSpace& F, int N);

enum class PiKind { Pi1, Pi2, Pi1Tilde };
// patterns use '.' for annihilation and '*' for creation
// Pi2:  sharp = (#_1..#_n), flat = (b_0..b_{n-1})
// Pi1:  sharp = (#_1..#_n), flat = (b_0..b_n), needs f
// Pi1~: sharp = (#_0..#_{n-1}), flat = (b_0..b_n), needs f
FockOperator pi_operator(PiKind kind, const std::vector<CMat>& kernels, const std::string& sharp,
                         const std::string& flat, const std::optional<CVec>& f,
                         const FockSpace& F);

enum class QuadKind { A, B };
// A_{#1,#2}(J) = sum J^{bar #1}(x;y) a^{#1}_y a^{#2}_x, B the same with b-fields
FockOperator quadratic_field(QuadKind kind, char s1, char s2, const CMat& J, const FockSpace& F);

// K factor of the bounds: ||J||_2 (+ sum |J(x;x)| for the non-normally-ordered pattern)
double k_factor(const CMat& J, bool non_normal);

// random instances (fixed-seed generator supplied by the caller)
CVec random_vector(Eigen::Index n, std::mt19937_64& rng);
CMat random_matrix(Eigen::Index n, std::mt19937_64& rng);
CMat random_hermitian(Eigen::Index n, std::mt19937_64& rng);
CMat random_symmetric(Eigen::Index n, std::mt19937_64& rng);

// numerical checks
double op_norm(const SpMat& X);
double op_norm(const CMat& X);
double min_eigenvalue(const CMat& H);
struct LeqResult {
  bool holds = false;
  double min_eig = 0.0;
  double scale = 0.0;
};
// X <= Y on the range of the isometry P (columns orthonormal); P empty = whole space
LeqResult operator_leq(const CMat& X, const CMat& Y, const CMat& P = CMat());
double max_abs(const SpMat& X);
double max_abs(const CMat& X);

}  // namespace gpf
