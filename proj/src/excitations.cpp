#include "gpf/excitations.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gpf/errors.hpp"

namespace gpf {

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

void require_unit(const CVec& phi, int M) {
  if (phi.size() != M) throw DomainError("condensate mode length mismatch");
  if (std::abs(phi.norm() - 1.0) > 1e-12) throw DomainError("condensate mode must be normalized");
}

// rows of W repeated by occupation
std::vector<int> expand(const int* occ, int M) {
  std::vector<int> r;
  for (int i = 0; i < M; ++i)
    for (int k = 0; k < occ[i]; ++k) r.push_back(i);
  return r;
}

}  // namespace

CMat orthonormal_completion(const CVec& phi) {
  Eigen::Index M = phi.size();
  if (std::abs(phi.norm() - 1.0) > 1e-12) throw DomainError("condensate mode must be normalized");
  cplx p0 = phi[0];
  cplx ph = std::abs(p0) > 0 ? p0 / std::abs(p0) : cplx(1.0);
  CVec e0 = CVec::Zero(M);
  e0[0] = 1.0;
  // reflect e0 onto u = conj(ph) phi, whose first entry is real and nonnegative
  CVec u = std::conj(ph) * phi;
  CVec w = e0 - u;
  CMat Q = CMat::Identity(M, M);
  double nw = w.squaredNorm();
  if (nw > 1e-30) Q -= 2.0 * w * w.adjoint() / nw;
  Q.col(0) = phi;
  return Q;
}

cplx permanent(const CMat& A) {
  Eigen::Index n = A.rows();
  if (n != A.cols()) throw DomainError("permanent needs a square matrix");
  if (n == 0) return 1.0;
  if (n == 1) return A(0, 0);
  // Ryser: perm = (-1)^n sum_S (-1)^{|S|} prod_i sum_{j in S} a_ij
  CVec rowsum = CVec::Zero(n);
  cplx total = 0.0;
  std::uint64_t gray = 0;
  for (std::uint64_t k = 1; k < (std::uint64_t(1) << n); ++k) {
    std::uint64_t g = k ^ (k >> 1);
    std::uint64_t diff = g ^ gray;
    int j = __builtin_ctzll(diff);
    if (g & diff) rowsum += A.col(j);
    else rowsum -= A.col(j);
    gray = g;
    cplx prod = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) prod *= rowsum[i];
    int bits = __builtin_popcountll(g);
    total += (bits % 2 ? -1.0 : 1.0) * prod;
  }
  return (n % 2 ? -1.0 : 1.0) * total;
}

CMat second_quantize(const CMat& W, const FockBasis& B) {
  int M = B.M();
  if (W.rows() != M || W.cols() != M) throw DomainError("Gamma needs an M x M matrix");
  CMat G = CMat::Zero(B.dim(), B.dim());
  for (int n = 0; n <= B.N_max(); ++n) {
    std::size_t off = B.sector_offset(n), d = B.sector_dim(n);
    std::vector<std::vector<int>> ex(d);
    std::vector<double> norm(d);
    for (std::size_t k = 0; k < d; ++k) {
      const int* s = B.state(off + k);
      ex[k] = expand(s, M);
      double f = 1.0;
      for (int i = 0; i < M; ++i) f *= factorial(s[i]);
      norm[k] = std::sqrt(f);
    }
    CMat sub(n, n);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) {
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) sub(a, b) = W(ex[r][a], ex[c][b]);
        G(off + r, off + c) = permanent(sub) / (norm[r] * norm[c]);
      }
  }
  return G;
}

CVec sector_part(const CVec& v, const FockBasis& B, int n) {
  return v.segment(B.sector_offset(n), B.sector_dim(n));
}

CVec embed_sector(const CVec& s, const FockBasis& B, int n) {
  if (static_cast<std::size_t>(s.size()) != B.sector_dim(n)) throw DomainError("sector length mismatch");
  CVec v = CVec::Zero(B.dim());
  v.segment(B.sector_offset(n), B.sector_dim(n)) = s;
  return v;
}

ExcitationMap excitation_map(const CVec& phi, const FockSpace& F) {
  const FockBasis& B = F.basis();
  int M = B.M(), N = F.N();
  if (B.N_max() != N) throw DomainError("excitation map needs N_max = N");
  require_unit(phi, M);
  ExcitationMap E;
  E.phi = phi;
  E.N = N;
  E.Q = orthonormal_completion(phi);
  CMat G = second_quantize(E.Q, B);
  // in the rotated basis |N-n, r> -> |0, r>
  std::size_t offN = B.sector_offset(N), dN = B.sector_dim(N);
  std::vector<Eigen::Index> perp_idx;
  for (std::size_t k = 0; k < B.dim(); ++k)
    if (B.state(k)[0] == 0) perp_idx.push_back(k);
  E.perp.resize(B.dim(), perp_idx.size());
  for (std::size_t c = 0; c < perp_idx.size(); ++c) E.perp.col(c) = G.col(perp_idx[c]);
  CMat S = CMat::Zero(B.dim(), dN);
  std::vector<int> occ(M);
  for (std::size_t k = 0; k < dN; ++k) {
    const int* s = B.state(offN + k);
    std::copy(s, s + M, occ.begin());
    occ[0] = 0;
    S(B.index(occ), k) = 1.0;
  }
  CMat GN = G.block(offN, offN, dN, dN);
  E.U = G * S * GN.adjoint();
  return E;
}

CVec u_map(const ExcitationMap& E, const CVec& psi_N, const FockBasis& B) {
  if (static_cast<std::size_t>(psi_N.size()) != B.dim()) throw DomainError("Fock vector length mismatch");
  CVec s = sector_part(psi_N, B, E.N);
  double outside = std::sqrt(std::max(0.0, psi_N.squaredNorm() - s.squaredNorm()));
  if (outside > 1e-12 * std::max(1.0, psi_N.norm())) throw DomainError("input not supported on the N-sector");
  return E.U * s;
}

CVec u_inverse(const ExcitationMap& E, const CVec& xi, const FockBasis& B) {
  if (static_cast<std::size_t>(xi.size()) != B.dim()) throw DomainError("Fock vector length mismatch");
  CVec proj = E.perp * (E.perp.adjoint() * xi);
  if ((xi - proj).norm() > 1e-10 * std::max(1.0, xi.norm()))
    throw DomainError("input not in the orthogonal excitation space");
  return embed_sector(E.U.adjoint() * xi, B, E.N);
}

CVec u_map(const CVec& phi, const CVec& psi_N, const FockSpace& F) {
  return u_map(excitation_map(phi, F), psi_N, F.basis());
}

CVec u_inverse(const CVec& phi, const CVec& xi, const FockSpace& F) {
  return u_inverse(excitation_map(phi, F), xi, F.basis());
}

CMat perp_projector(const ExcitationMap& E) { return E.perp * E.perp.adjoint(); }

bool ConjugationReport::pass(double tol) const {
  bool ok = unitarity <= tol && range <= tol && sector_mapping <= tol;
  for (double r : rule) ok = ok && r <= tol;
  return ok;
}

ConjugationReport check_conjugation_rules(const CVec& phi, const FockSpace& F, std::mt19937_64& rng,
                                          int trials) {
  const FockBasis& B = F.basis();
  int N = F.N(), M = B.M();
  ExcitationMap E = excitation_map(phi, F);
  ConjugationReport rep;
  rep.trials = trials;
  std::size_t offN = B.sector_offset(N), dN = B.sector_dim(N);
  rep.unitarity = max_abs(CMat(E.U.adjoint() * E.U - CMat::Identity(dN, dN)));
  rep.range = max_abs(CMat(E.U * E.U.adjoint() - perp_projector(E)));

  // the image of |N-n, r> (rotated) lies in sector n with no phi occupation
  CMat N_phi = dGamma(phi * phi.adjoint(), F).dense();
  double sm = max_abs(CMat(N_phi * E.U));
  CMat Nop = number_operator(F).dense();
  CMat GN = second_quantize(E.Q, B).block(offN, offN, dN, dN);
  CMat rot = E.U * GN;  // columns: images of rotated states
  for (std::size_t k = 0; k < dN; ++k) {
    int n = N - B.state(offN + k)[0];
    sm = std::max(sm, (Nop * rot.col(k) - double(n) * rot.col(k)).cwiseAbs().maxCoeff());
  }
  rep.sector_mapping = sm;

  auto restrictN = [&](const SpMat& X) { return CMat(CMat(X).block(offN, offN, dN, dN)); };
  CMat q = CMat::Identity(M, M) - phi * phi.adjoint();
  double sN = std::sqrt(double(N));
  CMat lhs = E.U * restrictN(F.creation(phi) * F.annihilation(phi));
  CMat rhs = (double(N) * CMat::Identity(B.dim(), B.dim()) - Nop) * E.U;
  rep.rule[0] = max_abs(CMat(lhs - rhs));
  for (int t = 0; t < trials; ++t) {
    CVec f = q * random_vector(M, rng);
    CVec g = q * random_vector(M, rng);
    CMat l2 = E.U * restrictN(F.creation(f) * F.annihilation(phi));
    CMat r2 = sN * CMat(F.bdag(f)) * E.U;
    CMat l3 = E.U * restrictN(F.creation(phi) * F.annihilation(g));
    CMat r3 = sN * CMat(F.b(g)) * E.U;
    SpMat fg = F.creation(f) * F.annihilation(g);
    CMat l4 = E.U * restrictN(fg);
    CMat r4 = CMat(fg) * E.U;
    rep.rule[1] = std::max(rep.rule[1], max_abs(CMat(l2 - r2)));
    rep.rule[2] = std::max(rep.rule[2], max_abs(CMat(l3 - r3)));
    rep.rule[3] = std::max(rep.rule[3], max_abs(CMat(l4 - r4)));
  }
  return rep;
}

CVec symmetric_tensor(const int* occ, int M) {
  std::vector<int> word = expand(occ, M);
  int n = static_cast<int>(word.size());
  Eigen::Index size = 1;
  for (int k = 0; k < n; ++k) size *= M;
  CVec T = CVec::Zero(size);
  double mult = 1.0;
  for (int i = 0; i < M; ++i) mult *= factorial(occ[i]);
  double c = std::sqrt(mult / factorial(n));
  std::sort(word.begin(), word.end());
  do {
    Eigen::Index idx = 0;
    for (int k = 0; k < n; ++k) idx = idx * M + word[k];
    T[idx] = c;
  } while (std::next_permutation(word.begin(), word.end()));
  return T;
}

CVec symprod(const std::vector<CVec>& fs) {
  int n = static_cast<int>(fs.size());
  if (n == 0) return CVec::Ones(1);
  Eigen::Index M = fs[0].size();
  Eigen::Index size = 1;
  for (int k = 0; k < n; ++k) size *= M;
  CVec T = CVec::Zero(size);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    CVec t = fs[perm[0]];
    for (int k = 1; k < n; ++k) {
      CVec next(t.size() * M);
      for (Eigen::Index a = 0; a < t.size(); ++a) next.segment(a * M, M) = t[a] * fs[perm[k]];
      t = next;
    }
    T += t;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return T / std::sqrt(factorial(n));
}

CVec tensor_to_sector(const CVec& T, const FockBasis& B, int n) {
  std::size_t off = B.sector_offset(n), d = B.sector_dim(n);
  CVec s(d);
  for (std::size_t k = 0; k < d; ++k) s[k] = symmetric_tensor(B.state(off + k), B.M()).dot(T);
  return s;
}

}  // namespace gpf
