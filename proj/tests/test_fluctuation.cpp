#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "gpf/bogoliubov.hpp"
#include "gpf/errors.hpp"
#include "gpf/fluctuation.hpp"

using namespace gpf;

namespace {

CVec unit(int M, int i) {
  CVec e = CVec::Zero(M);
  e(i) = 1.0;
  return e;
}

double spread(const std::vector<double>& v) {
  double lo = *std::min_element(v.begin(), v.end()), hi = *std::max_element(v.begin(), v.end());
  double s = std::max(std::abs(lo), std::abs(hi));
  return s > 0 ? (hi - lo) / s : 0.0;
}

FluctuationConfig free_config(int N, int M) {
  FluctuationConfig c;
  c.V = RadialPotential::zero(0.5);
  c.N = N;
  c.M = M;
  return c;
}

Eigen::VectorXd sorted(Eigen::VectorXd v) {
  std::sort(v.data(), v.data() + v.size());
  return v;
}
}  // namespace

TEST_CASE("many-body Hamiltonian") {
  TorusModes m3 = torus_modes(3);
  auto V = RadialPotential::soft_sphere(20.0, 0.5);

  SUBCASE("zero potential is diagonal in occupations") {
    FockSpace F(5, 3);
    TorusModes m = torus_modes(5);
    auto H = build_hamiltonian(RadialPotential::zero(0.5), 3, m, F);
    const FockBasis& B = F.basis();
    CMat D = H.op.dense();
    CHECK((D - CMat(D.diagonal().asDiagonal())).norm() == 0.0);
    for (std::size_t k = 0; k < B.dim(); ++k) {
      double e = 0.0;
      for (int i = 0; i < 5; ++i) e += B.state(k)[i] * m.kinetic(i);
      CHECK(D(k, k).real() == doctest::Approx(e).epsilon(1e-14));
    }
  }
  SUBCASE("one particle has the kinetic spectrum") {
    FockSpace F(3, 2);
    auto H = build_hamiltonian(V, 2, m3, F);
    SectorPropagator P(H, F, 1);
    CHECK((P.energies() - sorted(m3.kinetic)).norm() <= 1e-12);
  }
  SUBCASE("two particles against the first-quantized operator") {
    FockSpace F(3, 2);
    auto H = build_hamiltonian(V, 2, m3, F);
    const int M = 3;
    // h (x) 1 + 1 (x) h + v on C^3 (x) C^3
    CMat H1 = CMat::Zero(M * M, M * M);
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j) {
        H1(i * M + j, i * M + j) += m3.kinetic(i) + m3.kinetic(j);
        for (int k = 0; k < M; ++k)
          for (int l = 0; l < M; ++l) H1(i * M + j, k * M + l) += H.v(i, j, k, l);
      }
    // restrict to the symmetric subspace
    CMat S = CMat::Zero(M * M, M * (M + 1) / 2);
    int c = 0;
    for (int i = 0; i < M; ++i)
      for (int j = i; j < M; ++j, ++c) {
        S(i * M + j, c) += 1.0;
        S(j * M + i, c) += 1.0;
        S.col(c).normalize();
      }
    Eigen::SelfAdjointEigenSolver<CMat> es(S.adjoint() * H1 * S, Eigen::EigenvaluesOnly);
    SectorPropagator P(H, F, 2);
    CHECK((P.energies() - es.eigenvalues()).norm() <= 1e-10);
  }
  SUBCASE("hermitian and number conserving") {
    FockSpace F(5, 3);
    auto H = build_hamiltonian(V, 3, torus_modes(5), F);
    CMat D = H.op.dense();
    CHECK((D - D.adjoint()).norm() <= 1e-12 * D.norm());
    CMat Nd = CMat(F.number());
    CHECK((D * Nd - Nd * D).norm() <= 1e-12 * D.norm());
  }
  SUBCASE("inconsistent inputs") {
    FockSpace F(4, 2);
    CHECK_THROWS_AS(build_hamiltonian(V, 2, m3, F), DomainError);
    CHECK_THROWS_AS(build_hamiltonian(V, 0, torus_modes(4), F), DomainError);
  }
}

TEST_CASE("sector evolution") {
  FluctuationConfig c;
  FluctuationModel model(c);
  const FockSpace& F = model.space();
  const auto& H = model.hamiltonian();
  SectorPropagator P(H, F, model.N());
  const FockBasis& B = F.basis();
  std::size_t off = B.sector_offset(model.N()), d = B.sector_dim(model.N());
  CMat Hs = CMat(H.op.mat).block(off, off, d, d);
  Eigen::SelfAdjointEigenSolver<CMat> es(Hs);

  CVec v = embed_sector(es.eigenvectors().col(2), B, model.N());
  CVec out = P.evolve(v, 0.7);
  CHECK((out - std::polar(1.0, -0.7 * es.eigenvalues()(2)) * v).norm() <= 1e-12);

  CVec psi = u_inverse(model.phi0(), F.vacuum(), F);
  CVec psit = evolve(psi, H, F, 0.9);
  CHECK(std::abs(psit.norm() - 1.0) <= 1e-12);
  CHECK(std::abs(psit.dot(H.op.mat * psit).real() - psi.dot(H.op.mat * psi).real()) <= 1e-10);
  CHECK((P.evolve(psit, -0.9) - psi).norm() <= 1e-12);
  CHECK_THROWS_AS(P.evolve(F.vacuum(), 0.1), DomainError);
}

TEST_CASE("reduced densities") {
  FluctuationConfig c;
  c.N = 4;
  c.M = 5;
  FluctuationModel model(c);
  const FockSpace& F = model.space();
  CVec phi = model.phi0();
  ExcitationMap E = excitation_map(phi, F);

  CVec prod = u_inverse(E, F.vacuum(), F.basis());
  CMat g = reduced_density(prod, F, 4);
  CHECK((g - phi * phi.adjoint()).norm() <= 1e-12);
  CHECK(std::abs(depletion(g, phi)) <= 1e-12);
  CHECK(trace_norm(CMat(g - phi * phi.adjoint())) <= 1e-12);

  CVec one = u_inverse(E, F.raise(E.Q.col(1)) * F.vacuum(), F.basis());
  CMat g1 = reduced_density(one, F, 4);
  CHECK(depletion(g1, phi) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(g1.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trace_norm(CMat(g1 - phi * phi.adjoint())) == doctest::Approx(0.5).epsilon(1e-12));

  CVec psi = evolve(u_inverse(E, exp_B(build_B(model.eta(phi), F)).mat * F.vacuum(), F.basis()),
                    model.hamiltonian(), F, 0.3);
  CMat gp = reduced_density(psi, F, 4);
  CHECK((gp - gp.adjoint()).norm() <= 1e-13);
  CHECK(gp.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  Eigen::SelfAdjointEigenSolver<CMat> es(gp, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() >= -1e-13);
  CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-13);
}

TEST_CASE("fluctuation dynamics") {
  SUBCASE("decoupled free system") {
    FluctuationConfig c = free_config(3, 5);
    c.phi0 = unit(5, 0);
    FluctuationModel model(c);
    const FockSpace& F = model.space();
    CVec xi = F.raise(unit(5, 1)) * F.raise(unit(5, 2)) * F.vacuum();
    xi.normalize();
    auto rec = fluctuation_dynamics(model, xi, {0.0, 0.3, 0.8});
    for (std::size_t i = 0; i < rec.rows(); ++i) {
      CHECK(rec.at("number")[i] == doctest::Approx(2.0).epsilon(1e-12));
      CHECK(rec.at("norm_defect")[i] <= 1e-12);
      CHECK(rec.at("energy")[i] == doctest::Approx(rec.at("energy")[0]).epsilon(1e-12));
    }
  }
  SUBCASE("interacting system stays bounded") {
    FluctuationConfig c;
    FluctuationModel model(c);
    const FockSpace& F = model.space();
    std::vector<double> ts{0.0, 0.25, 0.5, 0.75, 1.0};
    auto rec = fluctuation_dynamics(model, F.vacuum(), ts);
    const auto& n = rec.at("number");
    CHECK(n[0] <= 1e-12);
    double c1 = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      CHECK(rec.at("norm_defect")[i] <= 1e-8);
      CHECK(n[i] >= -1e-12);
      c1 = std::max(c1, n[i]);
    }
    // <N> <= C e^{ct} with an N-independent scale
    CHECK(c1 < 1.0);
    CHECK_THROWS_AS(fluctuation_dynamics(model, CVec::Ones(3), ts), DomainError);
  }
}

TEST_CASE("generator of the fluctuation dynamics") {
  SUBCASE("decoupled free system") {
    FluctuationConfig c = free_config(3, 4);
    c.phi0 = unit(4, 0);
    FluctuationModel model(c);
    auto g = assemble_generator(model, 0.2);
    for (int j : {0, 1, 3, 4}) CHECK(g.L[j].norm() <= 1e-14);
    CHECK(g.decomposition_residual <= 1e-8);
    CHECK(g.hermiticity <= 1e-8);
    CHECK(g.C == 0.0);
    CHECK(g.C_continuum == 0.0);
  }
  SUBCASE("decomposition and form bounds") {
    FluctuationConfig c;
    c.N = 3;
    c.M = 4;
    FluctuationModel small(c);
    auto g = assemble_generator(small, 0.2);
    CHECK(g.decomposition_residual <= 1e-6);
    CHECK(g.hermiticity <= 1e-6);
    CHECK_THROWS_AS(assemble_generator(small, 0.2, 0.5), DomainError);

    std::vector<double> lo, hi, comm;
    for (int N : {3, 4, 5}) {
      FluctuationConfig cn;
      cn.N = N;
      FluctuationModel model(cn);
      auto gn = assemble_generator(model, 0.2);
      CHECK(gn.decomposition_residual <= 1e-6);
      auto r = generator_form_bounds(gn, model);
      CHECK(std::isfinite(r.C_lo));
      CHECK(std::isfinite(r.C_hi));
      CHECK(std::isfinite(r.C_comm));
      lo.push_back(r.C_lo);
      hi.push_back(r.C_hi);
      comm.push_back(r.C_comm);
    }
    CHECK(spread(lo) <= 0.25);
    CHECK(spread(hi) <= 0.25);
    CHECK(spread(comm) <= 0.25);
  }
}

TEST_CASE("C_{N,t} against the GP energy") {
  SUBCASE("free system") {
    FluctuationConfig c = free_config(16, 5);
    c.many_body = false;
    FluctuationModel model(c);
    auto rec = cnt_vs_gp_energy(model, {0.0, 0.5});
    for (double d : rec.at("deviation")) CHECK(d <= 1e-9);
    for (double C : rec.at("C_Nt")) CHECK(C == 0.0);
  }
  SUBCASE("bounded uniformly in N") {
    std::vector<double> worst;
    for (int N : {16, 32, 64}) {
      FluctuationConfig c;
      c.N = N;
      c.many_body = false;
      FluctuationModel model(c);
      auto rec = cnt_vs_gp_energy(model, {0.0, 0.25, 0.5, 0.75, 1.0});
      const auto& d = rec.at("deviation");
      worst.push_back(*std::max_element(d.begin(), d.end()));
      // the O(N) terms cancel
      CHECK(std::abs(rec.at("C_Nt")[0]) > 5 * worst.back());
    }
    CHECK(worst.back() <= 1.5 * worst.front());
    CHECK(spread(worst) <= 0.5);
  }
}

TEST_CASE("condensate depletion") {
  SUBCASE("decays with N") {
    std::vector<double> dep;
    for (int N : {3, 6}) {
      FluctuationConfig c;
      c.N = N;
      FluctuationModel model(c);
      auto rec = depletion_run(model, {});
      for (std::size_t i = 0; i < rec.rows(); ++i) {
        CHECK(std::abs(rec.at("depletion")[i] - rec.at("depletion_U")[i]) <= 1e-8);
        CHECK(rec.at("trace_norm")[i] <= rec.at("trace_bound")[i] * (1 + 1e-12));
        CHECK(rec.at("trace_gamma")[i] == doctest::Approx(1.0).epsilon(1e-12));
      }
      CHECK(rec.meta["a_N"].get<double>() >= 0.0);
      CHECK(rec.meta["b_N"].get<double>() >= 0.0);
      dep.push_back(rec.at("depletion").back());
    }
    CHECK(dep[1] / dep[0] <= 0.7);
  }
  SUBCASE("free product state stays condensed") {
    FluctuationConfig c = free_config(4, 5);
    FluctuationModel model(c);
    DepletionOptions opt;
    opt.initial = InitialState::product;
    auto rec = depletion_run(model, opt);
    for (double d : rec.at("depletion")) CHECK(std::abs(d) <= 1e-12);
    CHECK(rec.meta["b_N"].get<double>() <= 1e-10);
  }
  SUBCASE("product state starts condensed") {
    FluctuationConfig c;
    FluctuationModel model(c);
    DepletionOptions opt;
    opt.initial = InitialState::product;
    opt.times = {0.0};
    auto rec = depletion_run(model, opt);
    CHECK(rec.meta["a_N"].get<double>() <= 1e-12);
  }
}
