#include "gpf/fockspace.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Eigenvalues>

#include "gpf/errors.hpp"

namespace gpf {

ModeBasis ModeBasis::abstract(int M) {
  ModeBasis b;
  b.M = M;
  for (int i = 0; i < M; ++i) b.labels.push_back("e" + std::to_string(i));
  return b;
}

CMat ModeBasis::gram() const {
  if (embedding.empty()) return CMat::Identity(M, M);
  CMat G(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) G(i, j) = embedding[i].dot(embedding[j]) * cell_volume;
  return G;
}

std::uint64_t FockBasis::binom(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
  return r;
}

std::size_t fock_dimension(int M, int N_max) {
  // sum_{n<=N} C(n+M-1, M-1) = C(N+M, M)
  return FockBasis::binom(N_max + M, M);
}

FockBasis::FockBasis(int M, int N_max, std::size_t cap) : M_(M), Nmax_(N_max) {
  if (M < 1) throw DomainError("mode count must be at least 1");
  if (N_max < 0) throw DomainError("N_max must be nonnegative");
  dim_ = fock_dimension(M, N_max);
  if (dim_ > cap) throw DomainError("Fock dimension " + std::to_string(dim_) + " exceeds cap");
  offset_.assign(N_max + 2, 0);
  occ_.reserve(dim_ * M);
  tot_.reserve(dim_);
  std::vector<int> cur(M, 0);
  std::function<void(int, int, int)> fill = [&](int i, int rem, int n) {
    if (i == M - 1) {
      cur[i] = rem;
      occ_.insert(occ_.end(), cur.begin(), cur.end());
      tot_.push_back(n);
      return;
    }
    for (int v = rem; v >= 0; --v) {
      cur[i] = v;
      fill(i + 1, rem - v, n);
    }
  };
  for (int n = 0; n <= N_max; ++n) {
    offset_[n] = tot_.size();
    fill(0, n, n);
  }
  offset_[N_max + 1] = tot_.size();
}

std::size_t FockBasis::index(const int* occ) const {
  int n = 0;
  for (int i = 0; i < M_; ++i) n += occ[i];
  if (n > Nmax_) throw DomainError("occupation exceeds truncation");
  std::size_t r = 0;
  int rem = n;
  for (int i = 0; i + 1 < M_; ++i) {
    int p = M_ - i - 1;
    if (rem > occ[i]) r += binom(rem - occ[i] - 1 + p, p);
    rem -= occ[i];
  }
  return offset_[n] + r;
}

FockBasis enumerate_basis(int M, int N_max, std::size_t cap) { return FockBasis(M, N_max, cap); }

double max_abs(const SpMat& X) {
  double m = 0.0;
  for (int k = 0; k < X.outerSize(); ++k)
    for (SpMat::InnerIterator it(X, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

double max_abs(const CMat& X) { return X.size() ? X.cwiseAbs().maxCoeff() : 0.0; }

FockOperator::FockOperator(SpMat m, Symmetry s) : mat(std::move(m)), symmetry(s) {
  mat.prune(cplx(0.0));
  mat.makeCompressed();
  double scale = std::max(1.0, max_abs(mat));
  double defect = 0.0;
  switch (s) {
    case Symmetry::none: return;
    case Symmetry::hermitian: defect = max_abs(SpMat(mat - SpMat(mat.adjoint()))); break;
    case Symmetry::antihermitian: defect = max_abs(SpMat(mat + SpMat(mat.adjoint()))); break;
    case Symmetry::unitary: {
      SpMat I(mat.rows(), mat.cols());
      I.setIdentity();
      defect = max_abs(SpMat(SpMat(mat.adjoint()) * mat - I));
      break;
    }
  }
  if (defect > 1e-12 * scale) throw DomainError("declared operator symmetry fails");
}

FockOperator FockOperator::adjoint() const {
  Symmetry s = symmetry;
  return FockOperator(SpMat(mat.adjoint()), s);
}

FockSpace::FockSpace(int M, int N, int extra) : basis_(M, N + extra), N_(N) {
  if (N < 1) throw DomainError("particle number must be at least 1");
  std::size_t d = basis_.dim();
  a_.resize(M);
  adag_.resize(M);
  std::vector<int> tmp(M);
  for (int i = 0; i < M; ++i) {
    std::vector<Eigen::Triplet<cplx>> t;
    for (std::size_t k = 0; k < d; ++k) {
      const int* s = basis_.state(k);
      if (s[i] == 0) continue;
      std::copy(s, s + M, tmp.begin());
      tmp[i] -= 1;
      t.emplace_back(basis_.index(tmp.data()), k, std::sqrt(static_cast<double>(s[i])));
    }
    a_[i].resize(d, d);
    a_[i].setFromTriplets(t.begin(), t.end());
    a_[i].makeCompressed();
    adag_[i] = a_[i].adjoint();
  }
  num_ = diag([](int n) { return static_cast<double>(n); });
  id_ = diag([](int) { return 1.0; });
  double Nd = N;
  bfac_ = diag([Nd](int n) { return std::sqrt(std::max(Nd - n, 0.0) / Nd); });
}

SpMat FockSpace::diag(const std::function<double(int)>& g) const {
  std::size_t d = basis_.dim();
  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(d);
  for (std::size_t k = 0; k < d; ++k) {
    double v = g(basis_.total(k));
    if (v != 0.0) t.emplace_back(k, k, v);
  }
  SpMat D(d, d);
  D.setFromTriplets(t.begin(), t.end());
  return D;
}

SpMat FockSpace::lower(const CVec& c) const {
  if (c.size() != M()) throw DomainError("mode coefficient length mismatch");
  SpMat X(dim(), dim());
  for (int i = 0; i < M(); ++i)
    if (c[i] != cplx(0.0)) X += c[i] * a_[i];
  return X;
}

SpMat FockSpace::raise(const CVec& c) const {
  if (c.size() != M()) throw DomainError("mode coefficient length mismatch");
  SpMat X(dim(), dim());
  for (int i = 0; i < M(); ++i)
    if (c[i] != cplx(0.0)) X += c[i] * adag_[i];
  return X;
}

SpMat FockSpace::restrict(const SpMat& X) const {
  Eigen::Index n = static_cast<Eigen::Index>(dim_phys());
  return X.topLeftCorner(n, n);
}

CVec FockSpace::vacuum() const {
  CVec v = CVec::Zero(dim_phys());
  v[0] = 1.0;
  return v;
}

FockOperator creation(const CVec& f, const FockSpace& F) { return FockOperator(F.creation(f)); }
FockOperator annihilation(const CVec& f, const FockSpace& F) { return FockOperator(F.annihilation(f)); }
FockOperator number_operator(const FockSpace& F) { return FockOperator(F.number(), Symmetry::hermitian); }

FockOperator dGamma(const CMat& B, const FockSpace& F) {
  if (B.rows() != F.M() || B.cols() != F.M()) throw DomainError("dGamma needs an M x M matrix");
  SpMat X(F.dim(), F.dim());
  for (int j = 0; j < F.M(); ++j) X += F.raise(B.col(j)) * F.a(j);
  return FockOperator(X);
}

FockOperator b_field(const CVec& f, const FockSpace& F, int N) {
  if (N != F.N() || F.basis().N_max() != N) throw DomainError("b-fields need N = N_max");
  return FockOperator(F.b(f));
}

FockOperator b_dagger_field(const CVec& f, const FockSpace& F, int N) {
  if (N != F.N() || F.basis().N_max() != N) throw DomainError("b-fields need N = N_max");
  return FockOperator(F.bdag(f));
}

namespace {

bool valid_symbol(char c) { return c == '.' || c == '*'; }

// field at index x: b or a, annihilation or creation
SpMat field(const FockSpace& E, bool bfield, char s, int x) {
  if (bfield) return s == '*' ? E.bdag_mode(x) : E.b_mode(x);
  return s == '*' ? E.adag(x) : E.a(x);
}

// sum_y c_y X_y for the field family X
SpMat field_comb(const FockSpace& E, bool bfield, char s, const CVec& c) {
  if (s == '*') {
    SpMat X = E.raise(c);
    return bfield ? SpMat(X * E.bfactor()) : X;
  }
  SpMat X = E.lower(c);
  return bfield ? SpMat(E.bfactor() * X) : X;
}

// sum_{x,y} j(x;y) L_x R_y
SpMat pair(const FockSpace& E, const CMat& j, bool bl, char sl, bool br, char sr) {
  SpMat X(E.dim(), E.dim());
  for (int x = 0; x < E.M(); ++x) {
    CVec row = j.row(x).transpose();
    if (row.isZero(0.0)) continue;
    X += field(E, bl, sl, x) * field_comb(E, br, sr, row);
  }
  return X;
}

SpMat a_sharp_f(const FockSpace& E, char s, const CVec& f) {
  return s == '*' ? E.creation(f) : E.annihilation(f);
}

SpMat b_sharp_f(const FockSpace& E, char s, const CVec& f) {
  return s == '*' ? E.bdag(f) : E.b(f);
}

}  // namespace

FockOperator pi_operator(PiKind kind, const std::vector<CMat>& kernels, const std::string& sharp,
                         const std::string& flat, const std::optional<CVec>& f,
                         const FockSpace& F) {
  std::size_t n = kernels.size();
  for (char c : sharp + flat)
    if (!valid_symbol(c)) throw DomainError("pattern symbols must be '.' or '*'");
  for (const auto& j : kernels)
    if (j.rows() != F.M() || j.cols() != F.M()) throw DomainError("kernel size mismatch");
  if (sharp.size() != n) throw DomainError("order/kernel mismatch in sharp pattern");
  bool needs_f = kind != PiKind::Pi2;
  if (needs_f && !f) throw DomainError("Pi1 operators need a function f");
  if (flat.size() != (needs_f ? n + 1 : n)) throw DomainError("order/kernel mismatch in flat pattern");
  if (kind == PiKind::Pi2 && n == 0) throw DomainError("Pi2 operators have order at least 1");

  auto opposite = [](char a, char b) { return a != b; };
  if (kind == PiKind::Pi2) {
    for (std::size_t l = 1; l < n; ++l)
      if (!opposite(sharp[l - 1], flat[l])) throw DomainError("illegal Pi2 pattern");
  } else if (kind == PiKind::Pi1) {
    for (std::size_t l = 1; l <= n; ++l)
      if (!opposite(sharp[l - 1], flat[l])) throw DomainError("illegal Pi1 pattern");
  } else {
    for (std::size_t l = 0; l < n; ++l)
      if (!opposite(sharp[l], flat[l])) throw DomainError("illegal Pi1~ pattern");
  }

  FockSpace E(F.M(), F.N(), static_cast<int>(n) + 2);
  SpMat X = E.identity();
  if (kind == PiKind::Pi2) {
    // b^{b0}_{x1} a^{#1}_{y1} | a^{b1}_{x2} a^{#2}_{y2} | ... | a^{b_{n-1}}_{xn} b^{#n}_{yn}
    for (std::size_t l = 1; l <= n; ++l)
      X = X * pair(E, kernels[l - 1], l == 1, flat[l - 1], l == n, sharp[l - 1]);
  } else if (kind == PiKind::Pi1) {
    if (n == 0) return FockOperator(F.restrict(b_sharp_f(E, flat[0], *f)));
    for (std::size_t l = 1; l <= n; ++l)
      X = X * pair(E, kernels[l - 1], l == 1, flat[l - 1], false, sharp[l - 1]);
    X = X * a_sharp_f(E, flat[n], *f);
  } else {
    if (n == 0) return FockOperator(F.restrict(b_sharp_f(E, flat[0], *f)));
    // a^{b0}(f) a^{#0}_{x1} a^{b1}_{y1} ... a^{#_{n-1}}_{xn} b^{bn}_{yn}
    X = a_sharp_f(E, flat[0], *f);
    for (std::size_t l = 1; l <= n; ++l)
      X = X * pair(E, kernels[l - 1], false, sharp[l - 1], l == n, flat[l]);
  }
  return FockOperator(F.restrict(X));
}

FockOperator quadratic_field(QuadKind kind, char s1, char s2, const CMat& J, const FockSpace& F) {
  if (!valid_symbol(s1) || !valid_symbol(s2)) throw DomainError("pattern symbols must be '.' or '*'");
  if (J.rows() != F.M() || J.cols() != F.M()) throw DomainError("kernel size mismatch");
  FockSpace E(F.M(), F.N(), 2);
  bool bf = kind == QuadKind::B;
  CMat Jk = (s1 == '*') ? J : CMat(J.conjugate());
  SpMat X(E.dim(), E.dim());
  for (int x = 0; x < E.M(); ++x) {
    CVec row = Jk.row(x).transpose();
    X += field_comb(E, bf, s1, row) * field(E, bf, s2, x);
  }
  return FockOperator(F.restrict(X));
}

double k_factor(const CMat& J, bool non_normal) {
  double k = J.norm();
  if (non_normal) k += J.diagonal().cwiseAbs().sum();
  return k;
}

CVec random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(d(rng), d(rng));
  return v;
}

CMat random_matrix(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  CMat A(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = cplx(d(rng), d(rng));
  return A;
}

CMat random_hermitian(Eigen::Index n, std::mt19937_64& rng) {
  CMat A = random_matrix(n, rng);
  return 0.5 * (A + A.adjoint());
}

CMat random_symmetric(Eigen::Index n, std::mt19937_64& rng) {
  CMat A = random_matrix(n, rng);
  return 0.5 * (A + A.transpose());
}

double op_norm(const CMat& X) {
  if (X.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(X.adjoint() * X, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double op_norm(const SpMat& X) { return op_norm(CMat(X)); }

double min_eigenvalue(const CMat& H) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (H + H.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

LeqResult operator_leq(const CMat& X, const CMat& Y, const CMat& P) {
  CMat D = Y - X;
  CMat Yr = Y;
  if (P.size()) {
    D = P.adjoint() * D * P;
    Yr = P.adjoint() * Y * P;
  }
  LeqResult r;
  r.min_eig = min_eigenvalue(D);
  r.scale = op_norm(Yr);
  if (r.scale == 0.0) r.scale = op_norm(P.size() ? CMat(P.adjoint() * X * P) : X);
  r.holds = r.min_eig >= -1e-9 * r.scale;
  return r;
}

}  // namespace gpf
