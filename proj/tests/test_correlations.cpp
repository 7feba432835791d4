#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gpf/bogoliubov.hpp"
#include "gpf/correlations.hpp"
#include "gpf/errors.hpp"
#include "gpf/record.hpp"

using namespace gpf;

namespace {
constexpr double kPi = std::numbers::pi;

CVec sample_condensate(int M) {
  CVec phi = CVec::Zero(M);
  phi(0) = 1.0;
  phi(1) = 0.4;
  if (M > 4) phi(4) = cplx(0, 0.3);
  if (M > 5) phi(5) = 0.2;
  return phi / phi.norm();
}

const RadialPotential& potential() {
  static RadialPotential V = RadialPotential::soft_sphere(20.0, 0.5);
  return V;
}

KernelBuilder builder(int M, double N, double ell) {
  static std::map<std::pair<double, double>, ScatteringSolution> cache;
  auto key = std::make_pair(N, ell);
  if (!cache.count(key)) cache[key] = solve_neumann(potential(), N, ell);
  return KernelBuilder(torus_modes(M), potential(), cache[key]);
}
}  // namespace

TEST_CASE("torus modes and pair tensors") {
  TorusModes m = torus_modes(7);
  CHECK_THROWS_AS(torus_modes(kMaxTorusModes + 1), ResourceError);
  // orthonormality and kinetic energies on an exact lattice rule
  const int n = 8;
  CMat gram = CMat::Zero(7, 7);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        Eigen::Vector3d x(double(a) / n, double(b) / n, double(c) / n);
        for (int i = 0; i < 7; ++i)
          for (int j = 0; j < 7; ++j) gram(i, j) += m.value(i, x) * m.value(j, x) / double(n * n * n);
      }
  CHECK((gram - CMat::Identity(7, 7)).norm() <= 1e-13);
  CHECK(m.kinetic(0) == 0.0);
  CHECK(m.kinetic(3) == doctest::Approx(4 * kPi * kPi));

  // contact interaction: T = g \int e_i e_j e_k e_l, exact on the lattice
  PairTensor T = pair_tensor(m, [](double) { return 2.5; });
  double worst = 0.0;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j)
      for (int k = 0; k < 7; ++k)
        for (int l = 0; l < 7; ++l) {
          double s = 0.0;
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              for (int c = 0; c < n; ++c) {
                Eigen::Vector3d x(double(a) / n, double(b) / n, double(c) / n);
                s += m.value(i, x) * m.value(j, x) * m.value(k, x) * m.value(l, x);
              }
          worst = std::max(worst, std::abs(T(i, j, k, l) - 2.5 * s / (n * n * n)));
        }
  CHECK(worst <= 1e-12);

  // quartic form against the Fourier series of |phi|^2
  auto Fhat = [](double q) { return std::exp(-q * q / 200.0); };
  PairTensor G = pair_tensor(m, Fhat);
  CVec phi = sample_condensate(7);
  FourierSeries s = m.series(phi);
  FourierSeries rho = series_product(s, series_conj(s));
  double ref = 0.0;
  for (const auto& [p, x] : rho) ref += Fhat(2 * kPi * std::sqrt(double(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]))) * std::norm(x);
  CHECK(G.quartic(phi) == doctest::Approx(ref).epsilon(1e-13));
  CHECK(series_norm2(s) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("zero potential gives vanishing kernels") {
  auto V = RadialPotential::zero(0.5);
  auto sol = solve_neumann(V, 8.0, 0.25);
  KernelBuilder kb(torus_modes(5), V, sol);
  auto K = kb.build(sample_condensate(5));
  CHECK(K.k.norm() == 0.0);
  CHECK(K.eta.norm() == 0.0);
  CHECK(K.mu.norm() == 0.0);
  CHECK(kb.eta_norm(sample_condensate(5)) == 0.0);
}

TEST_CASE("kernel structure in mode space") {
  KernelBuilder kb = builder(7, 16, 0.25);
  CVec phi = sample_condensate(7);
  auto K = kb.build(phi);
  CHECK((K.k - K.k.transpose()).norm() <= 1e-14);
  CHECK((K.eta - K.eta.transpose()).norm() <= 1e-14);
  CHECK((K.eta - (K.k + K.mu)).norm() <= 1e-12);
  CHECK(orthogonality_defect(K.eta, phi) <= 1e-12);
  CMat q = CMat::Identity(7, 7) - phi * phi.adjoint();
  CHECK((q * K.eta - K.eta).norm() <= 1e-12);
  CHECK((K.eta * q.conjugate() - K.eta).norm() <= 1e-12);
  // projection onto the modes contracts Hilbert-Schmidt norms
  CHECK(K.eta_hs <= kb.eta_norm(phi));
  CHECK(K.k.norm() <= kb.k_norm(phi));
  CHECK_THROWS_AS(kb.build(CVec::Ones(3)), DomainError);
  CHECK_THROWS_AS(kb.build(2.0 * phi), DomainError);
}

TEST_CASE("eta decreases with l and is uniform in N") {
  CVec phi = sample_condensate(7);
  for (double N : {8.0, 16.0, 32.0}) {
    double prev = 1e9;
    for (double ell : {0.5, 0.25, 0.125}) {
      KernelBuilder kb = builder(7, N, ell);
      double e = kb.eta_norm(phi);
      CHECK(e < prev);
      prev = e;
    }
  }
  std::vector<double> Ns{8, 16, 32}, eta, grad;
  for (double N : Ns) {
    KernelBuilder kb = builder(7, N, 0.5);
    eta.push_back(kb.eta_norm(phi));
    grad.push_back(kb.grad_k_norm(phi));
  }
  double lo = *std::min_element(eta.begin(), eta.end()), hi = *std::max_element(eta.begin(), eta.end());
  CHECK((hi - lo) / hi <= 0.10);
  double slope = loglog_slope(Ns, grad);
  CHECK(slope >= 0.4);
  CHECK(slope <= 0.6);
}

TEST_CASE("eta bounded along the modified flow") {
  KernelBuilder kb = builder(5, 8, 0.25);
  ScatteringSolution sol = solve_neumann(potential(), 8, 0.25);
  TorusModes m = torus_modes(5);
  ScaledTransforms tr{&potential(), &sol, 8.0};
  ModeGP flow{m.kinetic, pair_tensor(m, [&](double q) { return tr.VNf(q); })};
  CVec phi = sample_condensate(5);
  double lo = 1e9, hi = 0.0;
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    CVec p = propagate(flow, phi, 0.0, t);
    double e = kb.eta_norm(p / p.norm());
    lo = std::min(lo, e), hi = std::max(hi, e);
  }
  CHECK(hi < 0.25);
  CHECK(hi / lo < 2.0);
}

TEST_CASE("pointwise bounds") {
  CVec phi = sample_condensate(7);
  for (double N : {8.0, 16.0}) {
    KernelBuilder kb = builder(7, N, 0.25);
    auto r = pointwise_bounds(kb, phi, 3, 16);
    CHECK(r.pairs > 0);
    CHECK(std::isfinite(r.C_eta));
    CHECK(std::isfinite(r.C_eta2));
    CHECK(r.C_eta > 0.0);
    CHECK(r.C_eta < 10.0);
    CHECK(r.C_eta2 < 10.0);
    // eta_at agrees with k + mu pointwise through its explicit form
    Eigen::Vector3d x(0.1, 0.2, 0.3), y(0.15, 0.2, 0.3);
    cplx e = kb.eta_at(phi, x, y);
    CHECK(std::abs(e) <= r.C_eta * std::abs(kb.modes().field(phi, x)) * std::abs(kb.modes().field(phi, y)) /
                             (0.05 + 1.0 / N) * (1 + 1e-12));
  }
}

TEST_CASE("kernel powers") {
  KernelBuilder kb = builder(7, 16, 0.5);
  auto K = kb.build(sample_condensate(7));
  CHECK((kernel_powers(K, 0) - CMat::Identity(7, 7)).norm() == 0.0);
  CHECK((kernel_powers(K, 1) - K.eta).norm() == 0.0);
  double e = K.eta.norm();
  for (int n = 2; n <= 5; ++n) CHECK(kernel_powers(K, n).norm() <= std::pow(e, n) * (1 + 1e-12));
  CHECK((kernel_powers(K, 2) - K.eta * K.eta.conjugate()).norm() <= 1e-15);
}

TEST_CASE("time derivative of eta") {
  TorusModes m = torus_modes(5);
  ScatteringSolution sol = solve_neumann(potential(), 8, 0.25);
  KernelBuilder kb(m, potential(), sol);
  ScaledTransforms tr{&potential(), &sol, 8.0};
  ModeGP flow{m.kinetic, pair_tensor(m, [&](double q) { return tr.VNf(q); })};

  SUBCASE("stationary condensate") {
    CVec e0 = CVec::Zero(5);
    e0(0) = 1.0;
    CHECK(kernel_time_derivative(kb, flow, e0, 1e-4, true).norm() <= 1e-6);
    CHECK(kernel_time_derivative(kb, flow, e0, 1e-4, false).norm() > 1e-3);
  }
  SUBCASE("convergent difference and bounded growth") {
    CVec phi = sample_condensate(5);
    double a = kernel_time_derivative(kb, flow, phi, 1e-3).norm();
    double b = kernel_time_derivative(kb, flow, phi, 5e-4).norm();
    CHECK(a > 0.0);
    CHECK(b / a <= 2.0);
    CHECK(b / a >= 0.5);
    // fourth-order difference; the highest mode frequency sets the residual
    CHECK(std::abs(a - b) <= 1e-3 * b);
    CHECK_THROWS_AS(kernel_time_derivative(kb, flow, phi, 1e-10), DomainError);

    std::vector<double> ts{0.0, 0.5, 1.0, 1.5, 2.0}, norms;
    for (double t : ts) {
      CVec p = propagate(flow, phi, 0.0, t);
      norms.push_back(kernel_time_derivative(kb, flow, p / p.norm(), 1e-4).norm());
    }
    // smallest c with norms(t) <= norms(0) e^{c t}
    double c = 0.0;
    for (std::size_t i = 1; i < ts.size(); ++i) c = std::max(c, std::log(norms[i] / norms[0]) / ts[i]);
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(norms[i] <= norms[0] * std::exp(c * ts[i]) * (1 + 1e-12));
    CHECK(c < 5.0);
  }
}
