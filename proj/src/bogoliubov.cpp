#include "gpf/bogoliubov.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "gpf/errors.hpp"

namespace gpf {

void require_symmetric(const CMat& eta, double tol) {
  if (eta.rows() != eta.cols()) throw DomainError("pair kernel must be square");
  double scale = std::max(1.0, max_abs(eta));
  if (max_abs(CMat(eta - eta.transpose())) > tol * scale) throw DomainError("pair kernel must be symmetric");
}

double orthogonality_defect(const CMat& eta, const CVec& phi) {
  Eigen::Index M = eta.rows();
  CMat q = CMat::Identity(M, M) - phi * phi.adjoint();
  CMat qbar = q.conjugate();
  return max_abs(CMat(q * eta * qbar - eta));
}

namespace {

SpMat pair_sum(const CMat& eta, const FockSpace& F, bool bfield) {
  SpMat X(F.dim(), F.dim());
  for (int x = 0; x < F.M(); ++x) {
    SpMat cx = bfield ? F.bdag_mode(x) : SpMat(F.adag(x));
    SpMat cy = F.raise(eta.row(x).transpose());
    if (bfield) cy = cy * F.bfactor();
    X += cx * cy;
  }
  return X;
}

}  // namespace

FockOperator build_B(const CMat& eta, const FockSpace& F) {
  require_symmetric(eta);
  if (eta.rows() != F.M()) throw DomainError("kernel size mismatch");
  if (F.basis().N_max() != F.N()) throw DomainError("B(eta) needs N_max = N");
  SpMat X = pair_sum(eta, F, true);
  return FockOperator(0.5 * (X - SpMat(X.adjoint())), Symmetry::antihermitian);
}

FockOperator build_B_tilde(const CMat& eta, const FockSpace& F) {
  require_symmetric(eta);
  if (eta.rows() != F.M()) throw DomainError("kernel size mismatch");
  SpMat X = pair_sum(eta, F, false);
  return FockOperator(0.5 * (X - SpMat(X.adjoint())), Symmetry::antihermitian);
}

FockOperator exp_B(const FockOperator& B, std::size_t dense_threshold) {
  if (B.symmetry != Symmetry::antihermitian) throw DomainError("exp_B needs an antihermitian operator");
  CMat Bd = B.dense();
  CMat U;
  if (static_cast<std::size_t>(Bd.rows()) < dense_threshold) {
    CMat H = cplx(0.0, 1.0) * Bd;
    H = 0.5 * (H + H.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(H);
    CVec ph = (cplx(0.0, -1.0) * es.eigenvalues().cast<cplx>()).array().exp();
    U = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
  } else {
    U = Bd.exp();
  }
  return FockOperator(U.sparseView(), Symmetry::unitary);
}

HyperbolicPair hyperbolic_kernels(const CMat& eta) {
  Eigen::Index M = eta.rows();
  HyperbolicPair h;
  CMat e2 = eta * eta.conjugate();
  CMat term = CMat::Identity(M, M);  // (eta conj eta)^n / (2n)!
  h.cosh_eta = CMat::Zero(M, M);
  h.sinh_eta = CMat::Zero(M, M);
  for (int n = 0; n < 200; ++n) {
    CMat s = term * eta / double(2 * n + 1);
    h.cosh_eta += term;
    h.sinh_eta += s;
    h.terms = n + 1;
    if (term.norm() < 1e-15 && s.norm() < 1e-15) break;
    term = term * e2 / double((2 * n + 1) * (2 * n + 2));
  }
  h.p_eta = h.cosh_eta - CMat::Identity(M, M);
  h.r_eta = h.sinh_eta - eta;
  return h;
}

CMat kernel_power(const CMat& eta, int n) {
  if (n < 0) throw DomainError("kernel power must be nonnegative");
  CMat P = CMat::Identity(eta.rows(), eta.cols());
  for (int k = 0; k < n; ++k) P = P * (k % 2 ? CMat(eta.conjugate()) : eta);
  return P;
}

CMat kernel_product(const CMat& eta, const std::string& naturals) {
  CMat P = CMat::Identity(eta.rows(), eta.cols());
  for (char c : naturals) {
    if (c != '.' && c != '*') throw DomainError("natural symbols must be '.' or '*'");
    P = P * (c == '*' ? CMat(eta.conjugate()) : eta);
  }
  return P;
}

double standard_action_residual(const CMat& eta, const CVec& f, int N_max, int low_sector) {
  int M = static_cast<int>(eta.rows());
  FockSpace F(M, N_max);
  FockOperator Bt = build_B_tilde(eta, F);
  CMat U = exp_B(Bt).dense();
  HyperbolicPair h = hyperbolic_kernels(eta);
  CMat lhs = U.adjoint() * CMat(F.annihilation(f)) * U;
  CMat rhs = CMat(F.annihilation(h.cosh_eta * f)) + CMat(F.creation(h.sinh_eta * f.conjugate()));
  Eigen::Index k = static_cast<Eigen::Index>(F.basis().dim_upto(low_sector));
  return op_norm(CMat((lhs - rhs).topLeftCorner(k, k)));
}

CMat nested_ad(const CMat& B, const CMat& A, int n, int max_order) {
  if (n < 0) throw DomainError("commutator order must be nonnegative");
  if (n > max_order) throw ResourceError("commutator order exceeds the configured maximum");
  CMat X = A;
  for (int k = 0; k < n; ++k) X = B * X - X * B;
  return X;
}

SpMat nested_ad(const SpMat& B, const SpMat& A, int n, int max_order) {
  if (n < 0) throw DomainError("commutator order must be nonnegative");
  if (n > max_order) throw ResourceError("commutator order exceeds the configured maximum");
  SpMat X = A;
  for (int k = 0; k < n; ++k) {
    X = SpMat(B * X) - SpMat(X * B);
    X.prune(cplx(0.0));
  }
  return X;
}

CMat leading_ad_term(const CMat& eta, const CVec& f, int n, const FockSpace& F) {
  double N = F.N();
  CMat e = kernel_power(eta, n);
  if (n % 2 == 0) {
    SpMat L = F.diag([N, n](int m) {
      return std::pow((N - m) / N, n / 2) * std::pow((N + 1 - m) / N, n / 2);
    });
    return CMat(L * F.b(e * f));
  }
  SpMat L = F.diag([N, n](int m) {
    return std::pow(std::max(N - m, 0.0) / N, (n + 1) / 2) * std::pow((N + 1 - m) / N, (n - 1) / 2);
  });
  return -CMat(L * F.bdag(e * f.conjugate()));
}

CMat ad1_closed_form(const CMat& eta, int z, const FockSpace& F) {
  double N = F.N();
  SpMat L = F.diag([N](int m) { return (N - m) / N; });
  CVec ez = eta.col(z);
  CMat X = -CMat(L * F.bdag(ez));
  SpMat S(F.dim(), F.dim());
  for (int x = 0; x < F.M(); ++x) S += F.bdag_mode(x) * F.raise(eta.row(x).transpose());
  X += (1.0 / N) * CMat(S * F.a(z));
  return X;
}

SeriesResult series_conjugation(const CMat& eta, const CVec& f, int order, const FockSpace& F,
                                bool dagger) {
  CMat B = build_B(eta, F).dense();
  CMat U = exp_B(FockOperator(B.sparseView(), Symmetry::antihermitian)).dense();
  CMat A = dagger ? CMat(F.bdag(f)) : CMat(F.b(f));
  CMat exact = U.adjoint() * A * U;
  SeriesResult r;
  CMat term = A;
  r.partial = A;
  r.by_order.push_back(op_norm(CMat(exact - r.partial)));
  int rises = 0;
  for (int n = 1; n <= order; ++n) {
    term = -(B * term - term * B) / double(n);
    r.partial += term;
    r.by_order.push_back(op_norm(CMat(exact - r.partial)));
    rises = r.by_order[n] > r.by_order[n - 1] ? rises + 1 : 0;
    if (rises >= 3) r.diverging = true;
  }
  r.residual = r.by_order.back();
  return r;
}

double npow_constant(const CMat& eta, int n1, int n2, const FockSpace& F) {
  double N = F.N();
  CMat U = exp_B(build_B(eta, F)).dense();
  CVec d(F.dim()), dis(F.dim());
  for (std::size_t k = 0; k < F.dim(); ++k) {
    int m = F.basis().total(k);
    double v = std::pow(m + 1.0, n1) * std::pow(N + 1.0 - m, n2);
    d[k] = v;
    dis[k] = 1.0 / std::sqrt(v);
  }
  CMat X = U.adjoint() * d.asDiagonal() * U;
  CMat Y = dis.asDiagonal() * X * dis.asDiagonal();
  Y = 0.5 * (Y + Y.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(Y, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace gpf
