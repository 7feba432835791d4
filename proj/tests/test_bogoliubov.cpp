#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gpf/bogoliubov.hpp"
#include "gpf/errors.hpp"
#include "gpf/excitations.hpp"
#include "gpf/record.hpp"

using namespace gpf;

namespace {

CMat random_pair_kernel(int M, double norm, std::mt19937_64& rng) {
  CMat A = random_matrix(M, rng);
  CMat S = 0.5 * (A + A.transpose());
  return S * (norm / S.norm());
}

}  // namespace

TEST_CASE("build_B") {
  std::mt19937_64 rng(31);
  FockSpace F(2, 4);
  CHECK(max_abs(build_B(CMat::Zero(2, 2), F).mat) == 0.0);
  CMat bad = random_matrix(2, rng);
  CHECK_THROWS_AS(build_B(bad, F), DomainError);
  CMat eta = random_pair_kernel(2, 0.3, rng);
  CMat B = build_B(eta, F).dense();
  CHECK(max_abs(CMat(B + B.adjoint())) == 0.0);
  // B Omega = 1/2 sum eta(x;y) b*_x b*_y Omega; the b-weights give sqrt(N/N) sqrt((N-1)/N)
  CVec om = F.vacuum();
  double direct = (B * om).squaredNorm();
  CVec two = CVec::Zero(F.dim());
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) two += 0.5 * eta(x, y) * CMat(F.adag(x) * F.adag(y)) * om;
  double oracle = two.squaredNorm() * (4.0 / 4.0) * (3.0 / 4.0);
  CHECK(std::abs(direct - oracle) < 1e-14);
  // with the CCR two.norm()^2 = 1/2 ||eta||^2
  CHECK(std::abs(two.squaredNorm() - 0.5 * eta.squaredNorm()) < 1e-14);
}

TEST_CASE("exp_B") {
  std::mt19937_64 rng(32);
  FockSpace F(3, 4);
  FockOperator Z(SpMat(F.dim(), F.dim()), Symmetry::antihermitian);
  CHECK(max_abs(CMat(exp_B(Z).dense() - CMat::Identity(F.dim(), F.dim()))) < 1e-15);
  CHECK_THROWS_AS(exp_B(number_operator(F)), DomainError);
  for (double s : {0.1, 0.5, 1.0}) {
    CMat eta = random_pair_kernel(3, s, rng);
    CMat U = exp_B(build_B(eta, F)).dense();
    CHECK(max_abs(CMat(U.adjoint() * U - CMat::Identity(F.dim(), F.dim()))) <= 1e-10);
    // eigendecomposition and Pade agree
    CMat Up = exp_B(build_B(eta, F), 0).dense();
    CHECK(max_abs(CMat(U - Up)) < 1e-12);
  }
  // orthogonal kernels preserve F_perp
  CVec phi = random_vector(3, rng).normalized();
  CMat q = CMat::Identity(3, 3) - phi * phi.adjoint();
  CMat eta = q * random_pair_kernel(3, 0.4, rng) * q.transpose();
  CHECK(orthogonality_defect(eta, phi) < 1e-14);
  ExcitationMap E = excitation_map(phi, F);
  CMat P = perp_projector(E);
  CMat U = exp_B(build_B(eta, F)).dense();
  CMat I = CMat::Identity(F.dim(), F.dim());
  CHECK(max_abs(CMat((I - P) * U * P)) <= 1e-10);
}

TEST_CASE("hyperbolic kernels and kernel powers") {
  CMat z = CMat::Zero(3, 3);
  HyperbolicPair h0 = hyperbolic_kernels(z);
  CHECK(max_abs(CMat(h0.cosh_eta - CMat::Identity(3, 3))) == 0.0);
  CHECK(max_abs(h0.sinh_eta) == 0.0);

  Eigen::Vector3d s(0.3, -0.7, 1.2);
  CMat d = s.cast<cplx>().asDiagonal();
  HyperbolicPair h = hyperbolic_kernels(d);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(h.cosh_eta(i, i) - std::cosh(s[i])) < 1e-14);
    CHECK(std::abs(h.sinh_eta(i, i) - std::sinh(s[i])) < 1e-14);
  }

  std::mt19937_64 rng(33);
  for (int k = 0; k < 20; ++k) {
    CMat eta = random_pair_kernel(4, 0.1 + 0.1 * k, rng);
    HyperbolicPair hk = hyperbolic_kernels(eta);
    double n = eta.norm();
    CHECK(hk.p_eta.norm() <= std::cosh(n) - 1.0 + 1e-14);
    CHECK(hk.r_eta.norm() <= std::sinh(n) - n + 1e-14);
    // cosh^2 - sinh conj(sinh) = 1 for symmetric kernels
    CMat id = hk.cosh_eta * hk.cosh_eta - hk.sinh_eta * hk.sinh_eta.conjugate();
    CHECK(max_abs(CMat(id - CMat::Identity(4, 4))) < 1e-12);
    CHECK(max_abs(CMat(kernel_power(eta, 0) - CMat::Identity(4, 4))) == 0.0);
    CHECK(kernel_power(eta, 3).norm() <= std::pow(n, 3) * (1 + 1e-12));
    CHECK(max_abs(CMat(kernel_power(eta, 3) - kernel_product(eta, ".*."))) == 0.0);
  }
}

TEST_CASE("standard Bogoliubov action") {
  std::mt19937_64 rng(34);
  CMat eta = random_pair_kernel(2, 0.3, rng);
  CVec f = random_vector(2, rng).normalized();
  CHECK(standard_action_residual(CMat::Zero(2, 2), f, 6, 2) < 1e-15);
  CHECK(standard_action_residual(eta, f, 16, 2) <= 1e-6);
  double r12 = standard_action_residual(eta, f, 12, 4);
  double r24 = standard_action_residual(eta, f, 24, 4);
  CHECK(r24 * 10.0 <= r12);
}

TEST_CASE("nested commutators: closed forms") {
  std::mt19937_64 rng(35);
  int M = 3;
  CMat eta = random_pair_kernel(M, 0.2, rng);
  CVec f = random_vector(M, rng);
  FockSpace F(M, 4);
  CMat B = build_B(eta, F).dense();
  CMat A = CMat(F.b(f));
  CHECK(max_abs(CMat(nested_ad(B, A, 0) - A)) == 0.0);
  CHECK_THROWS_AS(nested_ad(B, A, 21), ResourceError);
  for (int z = 0; z < M; ++z) {
    CMat lhs = nested_ad(B, CMat(F.b_mode(z)), 1);
    CHECK(max_abs(CMat(lhs - ad1_closed_form(eta, z, F))) < 1e-14);
  }
  // [B, b(f)]: the b* term is exactly the leading term of the expansion
  SpMat S(F.dim(), F.dim());
  for (int x = 0; x < M; ++x) S += F.bdag_mode(x) * F.raise(eta.row(x).transpose());
  CMat rest = (1.0 / 4.0) * CMat(S * F.annihilation(f));
  CHECK(max_abs(CMat(nested_ad(B, A, 1) - leading_ad_term(eta, f, 1, F) - rest)) < 1e-14);

  // remainders after subtracting the leading term decay like 1/N on the vacuum
  CMat eta2 = random_pair_kernel(2, 0.2, rng);
  CVec f2 = random_vector(2, rng);
  for (int n : {2, 3}) {
    std::vector<double> Ns, rem;
    for (int N : {8, 16, 32, 64}) {
      FockSpace G(2, N);
      SpMat ad = nested_ad(build_B(eta2, G).mat, G.b(f2), n);
      CVec R = CMat(ad).col(0) - leading_ad_term(eta2, f2, n, G).col(0);
      Ns.push_back(N);
      rem.push_back(R.norm());
    }
    double slope = loglog_slope(std::vector<double>(Ns.begin(), Ns.begin() + 3),
                                std::vector<double>(rem.begin(), rem.begin() + 3));
    INFO("n=" << n << " slope " << slope);
    CHECK(slope <= -0.7);
    CHECK(slope >= -1.3);
    // N * remainder settles: successive changes shrink
    std::vector<double> c;
    for (std::size_t k = 0; k < Ns.size(); ++k) c.push_back(Ns[k] * rem[k]);
    CHECK(std::abs(c[3] - c[2]) < std::abs(c[2] - c[1]));
    CHECK(std::abs(c[2] - c[1]) < std::abs(c[1] - c[0]));
  }
}

TEST_CASE("series conjugation") {
  std::mt19937_64 rng(36);
  int M = 3;
  FockSpace F(M, 4);
  CVec f = random_vector(M, rng).normalized();
  SeriesResult r0 = series_conjugation(CMat::Zero(M, M), f, 0, F);
  CHECK(r0.residual < 1e-15);
  CMat dir = random_pair_kernel(M, 1.0, rng);
  SeriesResult r = series_conjugation(0.2 * dir, f, 12, F);
  CHECK(r.residual <= 1e-8);
  CHECK_FALSE(r.diverging);
  // consecutive orders shrink at a rate controlled by ||eta||
  for (int n = 4; n <= 10; ++n) CHECK(r.by_order[n + 1] <= r.by_order[n]);
  SeriesResult rd = series_conjugation(0.2 * dir, f, 12, F, true);
  CHECK(rd.residual <= 1e-8);
  // monotone in ||eta|| along a ray
  double prev = 0.0;
  for (double s : {0.05, 0.1, 0.15, 0.2, 0.25}) {
    double res = series_conjugation(s * dir, f, 6, F).residual;
    CHECK(res >= prev * 0.95);
    prev = res;
  }
}

TEST_CASE("Npow constants") {
  std::mt19937_64 rng(37);
  FockSpace F4(2, 4);
  CHECK(std::abs(npow_constant(CMat::Zero(2, 2), 1, 0, F4) - 1.0) < 1e-14);
  CMat dir = random_pair_kernel(2, 1.0, rng);
  std::vector<double> C;
  for (int N : {4, 8, 16}) C.push_back(npow_constant(0.2 * dir, 1, 0, FockSpace(2, N)));
  double lo = *std::min_element(C.begin(), C.end()), hi = *std::max_element(C.begin(), C.end());
  CHECK(hi / lo - 1.0 <= 0.10);
  double prev = 1.0;
  for (double s : {0.0, 0.1, 0.2, 0.3, 0.4}) {
    double c = npow_constant(s * dir, 2, -1, F4);
    CHECK(c >= prev - 1e-12);
    prev = c;
  }
}
