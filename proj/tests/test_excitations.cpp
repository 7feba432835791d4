#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "gpf/errors.hpp"
#include "gpf/excitations.hpp"

using namespace gpf;

namespace {

cplx brute_permanent(const CMat& A) {
  int n = static_cast<int>(A.rows());
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  cplx s = 0.0;
  do {
    cplx t = 1.0;
    for (int i = 0; i < n; ++i) t *= A(i, p[i]);
    s += t;
  } while (std::next_permutation(p.begin(), p.end()));
  return s;
}

CVec random_unit(int M, std::mt19937_64& rng) { return random_vector(M, rng).normalized(); }

CMat random_unitary(int M, std::mt19937_64& rng) {
  Eigen::HouseholderQR<CMat> qr(random_matrix(M, rng));
  return qr.householderQ() * CMat::Identity(M, M);
}

}  // namespace

TEST_CASE("permanent") {
  CMat A(2, 2);
  A << 1.0, 2.0, 3.0, 4.0;
  CHECK(std::abs(permanent(A) - cplx(10.0)) < 1e-14);
  CHECK(std::abs(permanent(CMat::Ones(3, 3)) - cplx(6.0)) < 1e-13);
  CHECK(std::abs(permanent(CMat(0, 0)) - cplx(1.0)) == 0.0);
  std::mt19937_64 rng(21);
  for (int n = 1; n <= 6; ++n) {
    CMat B = random_matrix(n, rng);
    CHECK(std::abs(permanent(B) - brute_permanent(B)) < 1e-10 * std::max(1.0, std::abs(brute_permanent(B))));
  }
}

TEST_CASE("orthonormal completion") {
  std::mt19937_64 rng(22);
  for (int M : {1, 2, 3, 5}) {
    CVec phi = random_unit(M, rng);
    CMat Q = orthonormal_completion(phi);
    CHECK(max_abs(CMat(Q.adjoint() * Q - CMat::Identity(M, M))) < 1e-13);
    CHECK((Q.col(0) - phi).norm() == 0.0);
  }
  CVec e = CVec::Zero(3);
  e[0] = 1.0;
  CHECK(max_abs(CMat(orthonormal_completion(e) - CMat::Identity(3, 3))) < 1e-15);
  CHECK_THROWS_AS(orthonormal_completion(CVec::Ones(2)), DomainError);
}

TEST_CASE("second quantization of mode unitaries") {
  std::mt19937_64 rng(23);
  int M = 3, N = 3;
  FockSpace F(M, N);
  CMat W1 = random_unitary(M, rng), W2 = random_unitary(M, rng);
  CMat G1 = second_quantize(W1, F.basis()), G2 = second_quantize(W2, F.basis());
  CHECK(max_abs(CMat(second_quantize(W1 * W2, F.basis()) - G1 * G2)) < 1e-12);
  CHECK(max_abs(CMat(G1.adjoint() * G1 - CMat::Identity(F.dim(), F.dim()))) < 1e-12);
  // Gamma(W) a*_j Gamma(W)* = sum_i W_ij a*_i
  for (int j = 0; j < M; ++j) {
    CMat lhs = G1 * CMat(F.adag(j)) * G1.adjoint();
    CMat rhs = CMat(F.raise(W1.col(j)));
    CHECK(max_abs(CMat(lhs - rhs)) < 1e-12);
  }
}

TEST_CASE("u_map examples") {
  std::mt19937_64 rng(24);
  SUBCASE("condensate maps to vacuum") {
    int M = 3, N = 4;
    FockSpace F(M, N);
    CVec e0 = CVec::Zero(M);
    e0[0] = 1.0;
    CVec psi = CVec::Zero(F.dim());
    psi[F.basis().index(std::vector<int>{N, 0, 0})] = 1.0;
    CHECK((u_map(e0, psi, F) - F.vacuum()).norm() < 1e-13);
    CVec phi = random_unit(M, rng);
    // phi^{(x)N} = a*(phi)^N / sqrt(N!) Omega
    CVec cond = F.vacuum();
    for (int k = 0; k < N; ++k) cond = CMat(F.creation(phi)) * cond;
    cond /= std::sqrt(24.0);
    CVec out = u_map(phi, cond, F);
    CHECK((out - F.vacuum()).norm() < 1e-12);
    CHECK((u_inverse(phi, F.vacuum(), F) - cond).norm() < 1e-12);
  }
  SUBCASE("one excitation, first-quantized input") {
    int M = 2, N = 2;
    FockSpace F(M, N);
    CVec phi = random_unit(M, rng);
    CVec f = random_vector(M, rng);
    f -= phi * phi.dot(f);
    CVec T = symprod({f, phi});
    CHECK(std::abs(T.norm() - f.norm()) < 1e-13);
    CVec psi = embed_sector(tensor_to_sector(T / T.norm(), F.basis(), N), F.basis(), N);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-13);
    CVec out = u_map(phi, psi, F);
    CVec expected = CMat(F.creation(f / f.norm())) * F.vacuum();
    CHECK((out - expected).norm() < 1e-12);
  }
  SUBCASE("vacuum pulls back to the first-quantized condensate") {
    int M = 3, N = 3;
    FockSpace F(M, N);
    CVec phi = random_unit(M, rng);
    CVec T = symprod({phi, phi, phi});
    CVec cond = embed_sector(tensor_to_sector(T / T.norm(), F.basis(), N), F.basis(), N);
    CHECK((u_inverse(phi, F.vacuum(), F) - cond).norm() < 1e-12);
  }
  SUBCASE("errors") {
    FockSpace F(2, 2);
    CHECK_THROWS_AS(u_map(CVec::Ones(2), F.vacuum(), F), DomainError);
    CVec phi = random_unit(2, rng);
    CHECK_THROWS_AS(u_map(phi, F.vacuum(), F), DomainError);
  }
}

TEST_CASE("u_map is unitary and invertible") {
  std::mt19937_64 rng(25);
  for (auto [M, N] : {std::pair{2, 3}, {3, 4}, {4, 3}, {5, 5}}) {
    FockSpace F(M, N);
    const FockBasis& B = F.basis();
    CVec phi = random_unit(M, rng);
    ExcitationMap E = excitation_map(phi, F);
    for (int k = 0; k < 5; ++k) {
      CVec psi = embed_sector(random_vector(B.sector_dim(N), rng), B, N);
      CVec xi = u_map(E, psi, B);
      CHECK(std::abs(xi.norm() - psi.norm()) < 1e-10 * psi.norm());
      CHECK((u_inverse(E, xi, B) - psi).norm() < 1e-10 * psi.norm());
      CVec eta = perp_projector(E) * random_vector(B.dim(), rng);
      CHECK(std::abs(u_inverse(E, eta, B).norm() - eta.norm()) < 1e-10 * eta.norm());
      CHECK((u_map(E, u_inverse(E, eta, B), B) - eta).norm() < 1e-10 * eta.norm());
    }
  }
}

TEST_CASE("conjugation rules") {
  std::mt19937_64 rng(26);
  for (auto [M, N] : {std::pair{2, 3}, {3, 3}, {4, 4}, {5, 5}}) {
    FockSpace F(M, N);
    CVec phi = random_unit(M, rng);
    ConjugationReport r = check_conjugation_rules(phi, F, rng, 20);
    INFO("M=" << M << " N=" << N);
    CHECK(r.unitarity <= 1e-10);
    CHECK(r.range <= 1e-10);
    CHECK(r.sector_mapping <= 1e-10);
    for (double x : r.rule) CHECK(x <= 1e-10);
    CHECK(r.pass());
  }
  // rule 1 on (2,3) with phi a basis mode is a diagonal identity
  std::mt19937_64 rng2(27);
  CVec e0 = CVec::Zero(2);
  e0[0] = 1.0;
  FockSpace F(2, 3);
  CHECK(check_conjugation_rules(e0, F, rng2, 1).rule[0] < 1e-14);
}
