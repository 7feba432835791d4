#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gpf/errors.hpp"
#include "gpf/record.hpp"
#include "gpf/scattering.hpp"
#include "support.hpp"

using namespace gpf;
using gpf::test::rel;

namespace {
constexpr double kPi = std::numbers::pi;

// closed form for -u'' + V0/2 u = 0 inside r < R, u(0) = 0, matched to s(r - a0)
double square_well_a0(double V0, double R) {
  double k = std::sqrt(V0 / 2);
  return R - std::tanh(k * R) / k;
}

// trapezoid of r^2 g(r) on [0, b] with n panels, independent of the library quadrature
double trapezoid_r2(const std::function<double(double)>& g, double b, int n) {
  double h = b / n, s = 0.0;
  for (int i = 0; i <= n; ++i) {
    double r = i * h;
    double w = (i == 0 || i == n) ? 0.5 : 1.0;
    s += w * r * r * g(r);
  }
  return 4 * kPi * s * h;
}
}  // namespace

TEST_CASE("zero potential is handled analytically") {
  auto V = RadialPotential::zero();
  auto s = solve_zero_energy(V);
  CHECK(s.a0 == 0.0);
  for (double r : {0.0, 0.3, 2.0, 9.0}) CHECK(s.f_at(r) == doctest::Approx(1.0));
  CHECK(scattering_length_integral(V, s) == 0.0);
  auto n = solve_neumann(V, 10.0, 0.5);
  CHECK(n.lambda == 0.0);
  for (double r : {0.0, 1.0, 4.9}) CHECK(n.w_at(r) == doctest::Approx(0.0));
}

TEST_CASE("square well matches the closed form") {
  for (double V0 : {1.0, 10.0, 40.0}) {
    auto V = RadialPotential::square_well(V0, 1.0);
    auto s = solve_zero_energy(V);
    CHECK(rel(s.a0, square_well_a0(V0, 1.0)) <= 1e-6);
    CHECK(rel(scattering_length_integral(V, s), s.a0) <= 1e-6);
    for (double f : s.f) {
      CHECK(f >= -1e-14);
      CHECK(f <= 1.0 + 1e-14);
    }
  }
}

TEST_CASE("profile and integral scattering lengths agree") {
  for (auto V : {RadialPotential::soft_sphere(10.0, 1.0), RadialPotential::soft_sphere(3.0, 0.5),
                 RadialPotential::table({5.0, 4.0, 2.0, 0.5, 0.0}, 1.0)}) {
    auto s = solve_zero_energy(V);
    CHECK(s.a0 > 0.0);
    CHECK(rel(scattering_length_integral(V, s), s.a0) <= 1e-6);
    CHECK(s.w_decay_constant() < 10.0);
    CHECK(s.dw_decay_constant() < 10.0);
  }
}

TEST_CASE("negative or malformed inputs are rejected") {
  CHECK_THROWS_AS(RadialPotential::square_well(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(RadialPotential::table({1.0, -0.5, 0.0}, 1.0), DomainError);
  RadialPotential neg([](double r) { return r < 0.5 ? -1.0 : 0.0; }, 1.0, "negative");
  CHECK_THROWS_AS(solve_zero_energy(neg), DomainError);
  auto V = RadialPotential::square_well(10.0, 1.0);
  CHECK_THROWS_AS(solve_zero_energy(V, 0.5), DomainError);
  CHECK_THROWS_AS(solve_zero_energy(V, 10.0, 100), DomainError);
  CHECK_THROWS_AS(solve_neumann(V, 1.0, 0.5), DomainError);
}

TEST_CASE("Neumann eigenvalue approaches 3 a0 / (N l)^3") {
  auto V = RadialPotential::soft_sphere(10.0, 1.0);
  double a0 = solve_zero_energy(V).a0;
  double prev = 1e9;
  for (double L : {25.0, 50.0, 100.0, 200.0}) {
    auto n = solve_neumann(V, L, 1.0);
    double ratio = n.lambda * L * L * L / (3 * a0);
    CHECK(std::abs(ratio - 1) < prev);
    prev = std::abs(ratio - 1);
    for (double f : n.f) {
      CHECK(f >= -1e-14);
      CHECK(f <= 1.0 + 1e-12);
    }
    CHECK(n.f_at(L) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(n.w_decay_constant() < 10.0);
    CHECK(n.dw_decay_constant() < 10.0);
  }
  auto n = solve_neumann(V, 100 * a0, 1.0);
  double ratio = n.lambda * std::pow(100 * a0, 3) / (3 * a0);
  CHECK(ratio >= 0.95);
  CHECK(ratio <= 1.05);
}

TEST_CASE("int V f_l approaches 8 pi a0 like 1/N") {
  auto V = RadialPotential::soft_sphere(10.0, 1.0);
  double a0 = solve_zero_energy(V).a0;
  std::vector<double> inv, dev;
  for (double N : {50.0, 100.0, 200.0, 400.0}) {
    auto n = solve_neumann(V, N, 1.0);
    inv.push_back(1.0 / N);
    dev.push_back(std::abs(integral_Vf(V, n) - 8 * kPi * a0));
    CHECK(rel(scattering_length_integral(V, n), integral_Vf(V, n) / (8 * kPi)) <= 1e-12);
  }
  double slope = loglog_slope(inv, dev);
  CHECK(slope >= 0.7);
  CHECK(slope <= 1.3);
}

TEST_CASE("zero-energy and Neumann profiles agree inside the support") {
  auto V = RadialPotential::soft_sphere(10.0, 1.0);
  auto z = solve_zero_energy(V);
  double prev = 1e9;
  for (double L : {50.0, 100.0, 200.0}) {
    auto n = solve_neumann(V, L, 1.0);
    // normalize both at r = R so the comparison isolates the shape
    double sup = 0.0;
    for (int i = 0; i <= 100; ++i) {
      double r = i / 100.0;
      sup = std::max(sup, std::abs(n.f_at(r) / n.f_at(1.0) - z.f_at(r) / z.f_at(1.0)));
    }
    CHECK(sup <= 10 * n.lambda);
    CHECK(sup < prev);
    prev = sup;
  }
}

TEST_CASE("rescaled profiles") {
  auto V = RadialPotential::soft_sphere(10.0, 1.0);
  auto n = solve_neumann(V, 100.0, 0.5);
  CHECK(rescaled_residual(n, V) <= 1e-6);
  CHECK(rel(rescaled_integral_Vf(n, V, 100.0), integral_Vf(V, n)) <= 1e-8);

  SpatialGrid g(1, 128, 8.0);
  auto one = solve_neumann(V, 1.0, 4.0);
  auto p = rescaled_profiles(one, V, 1.0, g);
  for (std::size_t i = 0; i < g.size(); i += 7) {
    CHECK(p.f(i) == doctest::Approx(one.f_at(g.radius(i))).epsilon(1e-14));
    CHECK(p.w(i) + p.f(i) == doctest::Approx(1.0));
  }
}

TEST_CASE("exact kernel transform") {
  auto V = RadialPotential::soft_sphere(10.0, 1.0);
  auto n = solve_neumann(V, 40.0, 0.5);
  CHECK(rel(kernel_transform(V, n, 40.0, 0.0, 3), integral_Vf(V, n)) <= 1e-10);
  // independent oracle: fine trapezoid of the sinc transform
  for (double q : {3.0, 20.0, 90.0}) {
    double ref = trapezoid_r2([&](double s) {
      double x = q * s / 40.0;
      return V(s) * n.f_at(s) * (x == 0 ? 1.0 : std::sin(x) / x);
    }, 1.0, 20000);
    CHECK(std::abs(kernel_transform(V, n, 40.0, q, 3) - ref) <= 1e-6);
  }
  CHECK(rel(V.integral(), trapezoid_r2([&](double s) { return V(s); }, 1.0, 20000)) <= 1e-7);
}
