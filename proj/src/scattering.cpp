#include "gpf/scattering.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/numeric/odeint.hpp>

#include "gpf/errors.hpp"

namespace gpf {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;
constexpr double kPi = std::numbers::pi;

RadialPotential::RadialPotential(std::function<double(double)> v, double support, std::string name)
    : v_(std::move(v)), R_(support), name_(std::move(name)) {
  if (!(R_ > 0.0)) throw DomainError("potential support radius must be positive");
}

RadialPotential RadialPotential::zero(double support) {
  RadialPotential p([](double) { return 0.0; }, support, "zero");
  p.zero_ = true;
  return p;
}

RadialPotential RadialPotential::square_well(double V0, double R) {
  if (V0 < 0.0) throw DomainError("square well height must be nonnegative");
  RadialPotential p([V0, R](double r) { return std::abs(r) <= R ? V0 : 0.0; }, R, "square-well");
  p.zero_ = (V0 == 0.0);
  return p;
}

RadialPotential RadialPotential::soft_sphere(double V0, double R) {
  if (V0 < 0.0) throw DomainError("soft sphere height must be nonnegative");
  RadialPotential p(
      [V0, R](double r) {
        double x = std::abs(r) / R;
        if (x >= 1.0) return 0.0;
        double s = 1.0 - x * x;
        return V0 * s * s * s;
      },
      R, "soft-sphere");
  p.zero_ = (V0 == 0.0);
  return p;
}

RadialPotential RadialPotential::table(const std::vector<double>& samples, double R) {
  if (samples.size() < 2) throw DomainError("potential table needs at least two samples");
  bool all_zero = true;
  for (double s : samples) {
    if (!(s >= 0.0)) throw DomainError("potential table has negative or NaN entries");
    if (s != 0.0) all_zero = false;
  }
  auto data = samples;
  RadialPotential p(
      [data, R](double r) {
        r = std::abs(r);
        if (r > R) return 0.0;
        double x = r / R * (data.size() - 1);
        std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(x), data.size() - 2);
        double t = x - i;
        return (1 - t) * data[i] + t * data[i + 1];
      },
      R, "table");
  p.zero_ = all_zero;
  return p;
}

// first line: support radius; then one sample per line (uniform over [0, R])
RadialPotential RadialPotential::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open potential table " + path);
  double R = 0.0;
  if (!(in >> R)) throw DomainError("potential table missing support radius");
  std::vector<double> s;
  double v;
  while (in >> v) s.push_back(v);
  return table(s, R);
}

double RadialPotential::operator()(double r) const {
  r = std::abs(r);
  if (r > R_) return 0.0;
  return v_(r);
}

std::vector<double> RadialPotential::samples(int n) const {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = (*this)(R_ * i / (n - 1));
  return out;
}

double RadialPotential::integral() const {
  return radial_transform([this](double s) { return (*this)(s); }, {0.0, R_}, 0.0, 3);
}

namespace {

void check_nonnegative(const RadialPotential& V) {
  for (double s : V.samples(4097))
    if (!(s >= 0.0)) throw DomainError("potential is negative somewhere on its support");
}

// u'' = (V/2 - lambda) u
struct RadialOde {
  const RadialPotential* V;
  double lambda;
  void operator()(const State& x, State& dxdt, double r) const {
    dxdt[0] = x[1];
    dxdt[1] = (0.5 * (*V)(r) - lambda) * x[0];
  }
};

constexpr double kRtol = 1e-10;
constexpr double kAtol = 1e-14;

// integrate from (r0, x) through the sorted nodes, storing state at each
void integrate_nodes(const RadialOde& ode, State x, const std::vector<double>& nodes,
                     std::vector<State>& out) {
  auto stepper = odeint::make_dense_output(kAtol, kRtol, odeint::runge_kutta_dopri5<State>());
  out.clear();
  out.reserve(nodes.size());
  auto obs = [&out](const State& s, double) { out.push_back(s); };
  try {
    odeint::integrate_times(stepper, ode, x, nodes.begin(), nodes.end(), 1e-4, obs,
                            odeint::max_step_checker(1000000));
  } catch (const odeint::step_adjustment_error& e) {
    throw IntegrationError(std::string("radial integration failed: ") + e.what());
  } catch (const odeint::no_progress_error& e) {
    throw IntegrationError(std::string("radial integration failed: ") + e.what());
  }
  for (const auto& s : out)
    if (!std::isfinite(s[0]) || !std::isfinite(s[1]))
      throw IntegrationError("radial integration produced non-finite values");
}

State integrate_to(const RadialOde& ode, State x, double r0, double r1, double rtol = kRtol) {
  if (r0 == r1) return x;
  auto stepper = odeint::make_controlled(rtol * 1e-4, rtol, odeint::runge_kutta_dopri5<State>());
  double dt = (r1 > r0 ? 1.0 : -1.0) * std::min(1e-3, std::abs(r1 - r0));
  try {
    odeint::integrate_adaptive(stepper, ode, x, r0, r1, dt);
  } catch (const std::exception& e) {
    throw IntegrationError(std::string("radial integration failed: ") + e.what());
  }
  return x;
}

// two uniform segments: [0, R] with n_in nodes (odd) and (R, rmax]
std::vector<double> make_grid(double R, double rmax, int n_in, int n_out) {
  std::vector<double> r;
  r.reserve(n_in + n_out);
  for (int i = 0; i < n_in; ++i) r.push_back(R * i / (n_in - 1));
  for (int i = 1; i <= n_out; ++i) r.push_back(R + (rmax - R) * i / n_out);
  return r;
}

int odd(int n) { return n % 2 == 1 ? n : n + 1; }

void fill_f(ScatteringSolution& s) {
  std::size_t n = s.r.size();
  s.f.resize(n);
  for (std::size_t i = 1; i < n; ++i) s.f[i] = s.u[i] / s.r[i];
  // quadratic extrapolation to r = 0
  double r1 = s.r[1], r2 = s.r[2], r3 = s.r[3];
  double f1 = s.f[1], f2 = s.f[2], f3 = s.f[3];
  s.f[0] = f1 * (r2 * r3) / ((r1 - r2) * (r1 - r3)) + f2 * (r1 * r3) / ((r2 - r1) * (r2 - r3)) +
           f3 * (r1 * r2) / ((r3 - r1) * (r3 - r2));
}

// composite Simpson over nodes lo..hi (uniform, even number of intervals)
double simpson(const std::vector<double>& r, const std::vector<double>& g, std::size_t lo,
               std::size_t hi) {
  std::size_t m = hi - lo;
  if (m == 0) return 0.0;
  double h = (r[hi] - r[lo]) / m;
  if (m % 2 == 1) {
    // trailing interval by 3/8 rule when the count is odd
    double s = simpson(r, g, lo, hi - 3);
    return s + 3.0 * h / 8.0 * (g[hi - 3] + 3 * g[hi - 2] + 3 * g[hi - 1] + g[hi]);
  }
  double s = g[lo] + g[hi];
  for (std::size_t i = lo + 1; i < hi; ++i) s += (i - lo) % 2 ? 4 * g[i] : 2 * g[i];
  return s * h / 3.0;
}

}  // namespace

double ScatteringSolution::u_at(double rr) const {
  if (rr <= 0.0) return 0.0;
  if (rr >= r.back()) {
    if (neumann) return rr;  // f = 1 beyond the box
    return rr - a0;
  }
  auto it = std::upper_bound(r.begin(), r.end(), rr);
  std::size_t i = static_cast<std::size_t>(it - r.begin()) - 1;
  double h = r[i + 1] - r[i];
  double t = (rr - r[i]) / h;
  double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  return h00 * u[i] + h10 * h * du[i] + h01 * u[i + 1] + h11 * h * du[i + 1];
}

double ScatteringSolution::f_at(double rr) const {
  rr = std::abs(rr);
  if (rr >= r.back()) return neumann ? 1.0 : (rr - a0) / rr;
  if (rr < r[1]) {
    double t = rr / r[1];
    return (1 - t) * f[0] + t * f[1];
  }
  return u_at(rr) / rr;
}

double ScatteringSolution::df_at(double rr) const {
  rr = std::abs(rr);
  if (rr >= r.back()) return neumann ? 0.0 : a0 / (rr * rr);
  if (rr < r[1]) return 0.0;
  auto it = std::upper_bound(r.begin(), r.end(), rr);
  std::size_t i = static_cast<std::size_t>(it - r.begin()) - 1;
  double h = r[i + 1] - r[i];
  double t = (rr - r[i]) / h;
  double d00 = 6 * t * t - 6 * t, d10 = 3 * t * t - 4 * t + 1;
  double d01 = -6 * t * t + 6 * t, d11 = 3 * t * t - 2 * t;
  double up = (d00 * u[i] + d01 * u[i + 1]) / h + d10 * du[i] + d11 * du[i + 1];
  return up / rr - u_at(rr) / (rr * rr);
}

double ScatteringSolution::w_decay_constant() const {
  double c = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) c = std::max(c, std::abs(1.0 - f[i]) * (r[i] + 1.0));
  return c;
}

double ScatteringSolution::dw_decay_constant() const {
  double c = 0.0;
  for (std::size_t i = 1; i < r.size(); ++i) {
    double dw = -(du[i] / r[i] - u[i] / (r[i] * r[i]));
    c = std::max(c, std::abs(dw) * (r[i] * r[i] + 1.0));
  }
  return c;
}

ScatteringSolution solve_zero_energy(const RadialPotential& V, double r_max, int grid_points) {
  double R = V.support();
  if (r_max <= 0.0) r_max = 10.0 * R;
  if (!(r_max > R)) throw DomainError("r_max must exceed the potential support");
  if (grid_points < 512) throw DomainError("grid_points must be at least 512");
  check_nonnegative(V);

  int n_in = odd(grid_points / 2);
  int n_out = grid_points - n_in;
  ScatteringSolution s;
  s.r = make_grid(R, r_max, n_in, n_out);
  s.inner_points = n_in;
  s.support = R;
  std::size_t n = s.r.size();

  if (V.is_zero()) {
    s.u = s.r;
    s.du.assign(n, 1.0);
    s.f.assign(n, 1.0);
    s.a0 = 0.0;
    return s;
  }

  RadialOde ode{&V, 0.0};
  std::vector<double> inner(s.r.begin(), s.r.begin() + n_in);
  std::vector<double> outer(s.r.begin() + n_in - 1, s.r.end());
  std::vector<State> a, b;
  integrate_nodes(ode, State{0.0, 1.0}, inner, a);
  integrate_nodes(ode, a.back(), outer, b);
  a.insert(a.end(), b.begin() + 1, b.end());

  // least-squares line through the outer 10% of [R, r_max]
  double cut = r_max - 0.1 * (r_max - R);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (s.r[i] < cut) continue;
    double x = s.r[i], y = a[i][0];
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++m;
  }
  double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  double icpt = (sy - slope * sx) / m;
  s.a0 = -icpt / slope;
  s.fit_slope = slope;
  double rms = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (s.r[i] >= cut) rms += std::pow(a[i][0] - (slope * s.r[i] + icpt), 2);
  s.fit_rms = std::sqrt(rms / m) / std::abs(slope);

  s.u.resize(n);
  s.du.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.u[i] = a[i][0] / slope;
    s.du[i] = a[i][1] / slope;
  }
  fill_f(s);
  return s;
}

double scattering_length_integral(const RadialPotential& V, const ScatteringSolution& f) {
  if (f.r.empty() || f.r.back() < V.support() * (1 - 1e-12))
    throw DomainError("profile grid does not cover the potential support");
  if (V.is_zero()) return 0.0;
  // (1/2) \int r^2 V f dr = (1/2) \int r V u dr on the inner segment
  std::size_t hi = f.inner_points ? f.inner_points - 1 : 0;
  if (hi == 0 || std::abs(f.r[hi] - V.support()) > 1e-12 * V.support()) {
    hi = static_cast<std::size_t>(std::upper_bound(f.r.begin(), f.r.end(), V.support()) - f.r.begin()) - 1;
  }
  std::vector<double> g(hi + 1);
  for (std::size_t i = 0; i <= hi; ++i) {
    double r = f.r[i];
    // one-sided limit inside the support at the outer node
    double v = (i == hi) ? V(r * (1 - 1e-14)) : V(r);
    g[i] = 0.5 * r * v * f.u[i];
  }
  return simpson(f.r, g, 0, hi);
}

double integral_Vf(const RadialPotential& V, const ScatteringSolution& f) {
  return 8.0 * kPi * scattering_length_integral(V, f);
}

ScatteringSolution solve_neumann(const RadialPotential& V, double N, double ell, int grid_points) {
  double R = V.support();
  double L = N * ell;
  if (!(L > R)) throw DomainError("Neumann box radius N*ell must exceed the potential support");
  if (grid_points < 512) throw DomainError("grid_points must be at least 512");
  check_nonnegative(V);

  int n_in = odd(std::max(513, grid_points / 4));
  int n_out = std::max(512, grid_points - n_in);
  ScatteringSolution s;
  s.r = make_grid(R, L, n_in, n_out);
  s.inner_points = n_in;
  s.neumann = true;
  s.N = N;
  s.ell = ell;
  s.support = R;
  std::size_t n = s.r.size();

  if (V.is_zero()) {
    s.u = s.r;
    s.du.assign(n, 1.0);
    s.f.assign(n, 1.0);
    s.lambda = 0.0;
    s.a0 = 0.0;
    return s;
  }

  auto mismatch = [&](double lam) {
    RadialOde ode{&V, lam};
    State x = integrate_to(ode, State{0.0, 1.0}, 0.0, R);
    x = integrate_to(ode, x, R, L);
    return x[1] * L - x[0];
  };

  double g0 = mismatch(0.0);
  if (!(g0 > 0.0)) throw SolverError("Neumann mismatch at lambda = 0 is not positive");
  double lo = 0.0, hi = 1.5 * 3.0 * R / (L * L * L);
  double ghi = mismatch(hi);
  int guard = 0;
  while (ghi > 0.0) {
    lo = hi;
    hi *= 2.0;
    ghi = mismatch(hi);
    if (++guard > 200) throw SolverError("failed to bracket the Neumann eigenvalue");
  }
  while ((hi - lo) > 1e-12 * hi) {
    double mid = 0.5 * (lo + hi);
    if (mismatch(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  s.lambda = 0.5 * (lo + hi);
  if (s.lambda < 0.0) throw SolverError("negative Neumann eigenvalue");

  RadialOde ode{&V, s.lambda};
  std::vector<double> inner(s.r.begin(), s.r.begin() + n_in);
  std::vector<double> outer(s.r.begin() + n_in - 1, s.r.end());
  std::vector<State> a, b;
  integrate_nodes(ode, State{0.0, 1.0}, inner, a);
  integrate_nodes(ode, a.back(), outer, b);
  a.insert(a.end(), b.begin() + 1, b.end());

  double scale = L / a.back()[0];
  s.u.resize(n);
  s.du.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.u[i] = a[i][0] * scale;
    s.du[i] = a[i][1] * scale;
  }
  fill_f(s);
  s.f.back() = 1.0;
  s.a0 = scattering_length_integral(V, s);
  return s;
}

RescaledProfiles rescaled_profiles(const ScatteringSolution& sol, const RadialPotential& V,
                                   double N, const SpatialGrid& grid) {
  std::size_t n = grid.size();
  RescaledProfiles p;
  p.f.resize(n);
  p.w.resize(n);
  p.Vf.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double r = N * grid.radius(i);
    double f = sol.f_at(r);
    p.f[i] = f;
    p.w[i] = 1.0 - f;
    p.Vf[i] = N * N * V(r) * f;
  }
  return p;
}

double rescaled_residual(const ScatteringSolution& sol, const RadialPotential& V, int samples) {
  if (!sol.neumann) throw DomainError("rescaled residual needs a Neumann solution");
  double L = sol.boundary();
  double N = sol.N;
  if (V.is_zero()) return 0.0;
  RadialOde ode{&V, sol.lambda};
  double h = 5e-3 * std::min(1.0, sol.support);
  // radial residual of the u-equation divided by r, sampled on a uniform midpoint grid
  double acc = 0.0;
  double dr = L / samples;
  for (int k = 0; k < samples; ++k) {
    double r = (k + 0.5) * dr;
    // start from the closest stored node
    auto it = std::lower_bound(sol.r.begin(), sol.r.end(), r);
    std::size_t i = static_cast<std::size_t>(it - sol.r.begin());
    if (i >= sol.r.size()) i = sol.r.size() - 1;
    State x0{sol.u[i], sol.du[i]};
    State xc = integrate_to(ode, x0, sol.r[i], r, 1e-13);
    std::array<double, 5> v{};
    for (int j = -2; j <= 2; ++j) v[j + 2] = integrate_to(ode, xc, r, r + j * h, 1e-13)[0];
    double upp = (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * h * h);
    double res = (-upp + (0.5 * V(r) - sol.lambda) * v[2]) / r;
    acc += res * res * 4.0 * kPi * r * r * dr;
  }
  // rescaled residual: N^2 res(N x), measure d^3x = N^{-3} d^3r
  return N * N * std::sqrt(acc / (N * N * N));
}

double rescaled_integral_Vf(const ScatteringSolution& sol, const RadialPotential& V, double N) {
  // quadrature over |x| <= R/N using the rescaled nodes x_i = r_i / N
  std::size_t hi = sol.inner_points - 1;
  std::vector<double> x(hi + 1), g(hi + 1);
  for (std::size_t i = 0; i <= hi; ++i) {
    x[i] = sol.r[i] / N;
    double r = N * x[i];
    double v = (i == hi) ? V(r * (1 - 1e-14)) : V(r);
    g[i] = 4.0 * kPi * x[i] * x[i] * N * N * N * v * sol.f[i];
  }
  return simpson(x, g, 0, hi);
}

double radial_transform(const std::function<double(double)>& g, const std::vector<double>& breaks,
                        double q, int dim) {
  using boost::math::quadrature::gauss;
  double total = 0.0;
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    double a0 = breaks[b], a1 = breaks[b + 1];
    if (a1 <= a0) continue;
    int panels = std::max(8, static_cast<int>(std::ceil(2.0 * std::abs(q) * (a1 - a0) / kPi)));
    double h = (a1 - a0) / panels;
    for (int p = 0; p < panels; ++p) {
      double lo = a0 + p * h, hi = lo + h;
      auto integrand = [&](double s) {
        double j;
        double qs = q * s;
        if (dim == 3) j = std::abs(qs) < 1e-8 ? 1.0 - qs * qs / 6.0 : std::sin(qs) / qs;
        else j = std::cos(qs);
        return s * s * g(s) * j;
      };
      total += gauss<double, 20>::integrate(integrand, lo, hi);
    }
  }
  return 4.0 * kPi * total;
}

double kernel_transform(const RadialPotential& V, const ScatteringSolution& sol, double N,
                        double q, int dim) {
  if (V.is_zero()) return 0.0;
  double R = V.support();
  // shrink the upper end so a discontinuity at R stays outside the panels
  auto g = [&](double s) { return V(std::min(s, R * (1 - 1e-14))) * sol.f_at(s); };
  return radial_transform(g, {0.0, R}, q / N, dim);
}

}  // namespace gpf
