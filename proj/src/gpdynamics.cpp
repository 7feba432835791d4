#include "gpf/gpdynamics.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "gpf/errors.hpp"

namespace gpf {

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

struct Plans {
  fftw_plan fwd;
  fftw_plan bwd;
};

std::mutex plan_mutex;

const Plans& plans_for(const SpatialGrid& g) {
  static std::map<std::pair<int, int>, Plans> cache;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_pair(g.dim, g.n);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<int> dims(g.dim, g.n);
  std::vector<cplx> buf(g.size());
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  Plans pl{fftw_plan_dft(g.dim, dims.data(), p, p, FFTW_FORWARD, flags),
           fftw_plan_dft(g.dim, dims.data(), p, p, FFTW_BACKWARD, flags)};
  return cache.emplace(key, pl).first->second;
}

void check_finite(const Eigen::VectorXcd& v) {
  if (!v.allFinite()) throw NumericError("non-finite value in GP state");
}

void kinetic_half(const GPState& s, Eigen::VectorXcd& psi, double dt, const Eigen::VectorXd& k2) {
  fft_forward(s.grid, psi);
  for (Eigen::Index i = 0; i < psi.size(); ++i) psi[i] *= std::polar(1.0, -0.5 * dt * k2[i]);
  fft_backward(s.grid, psi);
}

const Eigen::VectorXd& cached_k2(const SpatialGrid& g) {
  static std::map<std::tuple<int, int, double>, Eigen::VectorXd> cache;
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  auto key = std::make_tuple(g.dim, g.n, g.L);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, g.k2_all()).first;
  return it->second;
}

Eigen::VectorXd density(const Eigen::VectorXcd& psi) { return psi.cwiseAbs2(); }

// nonlinear plus external potential acting on psi
Eigen::VectorXd potential(const GPState& s, const Eigen::VectorXcd& psi) {
  Eigen::VectorXd rho = density(psi);
  Eigen::VectorXd W;
  if (s.variant == GPVariant::gp) {
    W = 8.0 * kPi * s.a0 * rho;
  } else {
    W = convolve(s.grid, s.kernel_hat, rho);
  }
  if (s.V_ext.size()) W += s.V_ext;
  return W;
}

Eigen::VectorXcd apply_laplacian_neg(const SpatialGrid& g, Eigen::VectorXcd v) {
  const auto& k2 = cached_k2(g);
  fft_forward(g, v);
  v.array() *= k2.array().cast<cplx>();
  fft_backward(g, v);
  return v;
}

}  // namespace

void fft_forward(const SpatialGrid& g, Eigen::VectorXcd& v) {
  if (static_cast<std::size_t>(v.size()) != g.size()) throw DomainError("field does not match grid");
  auto* p = reinterpret_cast<fftw_complex*>(v.data());
  fftw_execute_dft(plans_for(g).fwd, p, p);
}

void fft_backward(const SpatialGrid& g, Eigen::VectorXcd& v) {
  if (static_cast<std::size_t>(v.size()) != g.size()) throw DomainError("field does not match grid");
  auto* p = reinterpret_cast<fftw_complex*>(v.data());
  fftw_execute_dft(plans_for(g).bwd, p, p);
  v /= static_cast<double>(g.size());
}

Eigen::VectorXd kernel_spectrum_from_samples(const SpatialGrid& g, const Eigen::VectorXd& samples) {
  if (static_cast<std::size_t>(samples.size()) != g.size())
    throw DomainError("kernel samples do not match grid");
  // samples are given at grid coordinates; shift so x = 0 sits at index 0
  Eigen::VectorXcd v(g.size());
  std::size_t total = g.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx, shifted = 0, stride = 1;
    for (int k = 0; k < g.dim; ++k) {
      std::size_t i = rem % g.n;
      rem /= g.n;
      shifted += ((i + g.n / 2) % g.n) * stride;
      stride *= g.n;
    }
    v[shifted] = samples[idx];
  }
  fft_forward(g, v);
  return v.real() * g.cell_volume();
}

Eigen::VectorXd kernel_spectrum(const SpatialGrid& g, const RadialPotential& V,
                                const ScatteringSolution& sol, double N) {
  Eigen::VectorXd out(g.size());
  std::map<long long, double> cache;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double q = std::sqrt(g.k2(i));
    long long key = std::llround(q * 1e9);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, kernel_transform(V, sol, N, q, g.dim)).first;
    out[i] = it->second;
  }
  return out;
}

Eigen::VectorXd convolve(const SpatialGrid& g, const Eigen::VectorXd& kernel_hat,
                         const Eigen::VectorXd& rho) {
  if (kernel_hat.size() != rho.size()) throw DomainError("kernel grid mismatch");
  Eigen::VectorXcd v = rho.cast<cplx>();
  fft_forward(g, v);
  v.array() *= kernel_hat.array().cast<cplx>();
  fft_backward(g, v);
  return v.real();
}

GPState make_state(const SpatialGrid& g, const Eigen::VectorXcd& psi, GPVariant variant) {
  if (static_cast<std::size_t>(psi.size()) != g.size()) throw DomainError("field does not match grid");
  GPState s;
  s.grid = g;
  s.psi = psi;
  s.variant = variant;
  normalize(s);
  return s;
}

Eigen::VectorXcd gaussian(const SpatialGrid& g, double sigma, double p, double x0) {
  Eigen::VectorXcd v(g.size());
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    std::size_t rem = idx;
    double r2 = 0.0, x1 = 0.0;
    for (int k = 0; k < g.dim; ++k) {
      double x = g.coord(static_cast<int>(rem % g.n)) - (k == 0 ? x0 : 0.0);
      if (k == 0) x1 = x;
      r2 += x * x;
      rem /= g.n;
    }
    v[idx] = std::exp(-r2 / (4 * sigma * sigma)) * std::polar(1.0, p * x1);
  }
  double nrm = std::sqrt(v.squaredNorm() * g.cell_volume());
  return v / nrm;
}

double mass(const GPState& s) { return s.psi.squaredNorm() * s.grid.cell_volume(); }

void normalize(GPState& s) {
  double m = mass(s);
  if (!(m > 0.0)) throw NumericError("cannot normalize a zero state");
  s.psi /= std::sqrt(m);
}

GPState gp_step(const GPState& s, double dt) {
  if (s.variant != GPVariant::gp) throw DomainError("gp_step needs the gp variant");
  GPState out = s;
  const auto& k2 = cached_k2(s.grid);
  kinetic_half(s, out.psi, dt, k2);
  Eigen::VectorXd W = potential(s, out.psi);
  for (Eigen::Index i = 0; i < W.size(); ++i) out.psi[i] *= std::polar(1.0, -dt * W[i]);
  kinetic_half(s, out.psi, dt, k2);
  check_finite(out.psi);
  out.t += dt;
  return out;
}

GPState modified_gp_step(const GPState& s, double dt, const Eigen::VectorXd& kernel_hat) {
  if (static_cast<std::size_t>(kernel_hat.size()) != s.grid.size())
    throw DomainError("kernel grid mismatch");
  GPState out = s;
  out.variant = GPVariant::modified;
  out.kernel_hat = kernel_hat;
  const auto& k2 = cached_k2(s.grid);
  kinetic_half(s, out.psi, dt, k2);
  Eigen::VectorXd W = potential(out, out.psi);
  for (Eigen::Index i = 0; i < W.size(); ++i) out.psi[i] *= std::polar(1.0, -dt * W[i]);
  kinetic_half(s, out.psi, dt, k2);
  check_finite(out.psi);
  out.t += dt;
  return out;
}

GPState evolve(GPState s, double dt, int steps) {
  for (int k = 0; k < steps; ++k)
    s = (s.variant == GPVariant::gp) ? gp_step(s, dt) : modified_gp_step(s, dt, s.kernel_hat);
  return s;
}

double kinetic_energy(const GPState& s) {
  Eigen::VectorXcd v = s.psi;
  fft_forward(s.grid, v);
  const auto& k2 = cached_k2(s.grid);
  // Parseval: \int |grad psi|^2 = dV / size * sum k^2 |psi_hat|^2
  return (k2.array() * v.cwiseAbs2().array()).sum() * s.grid.cell_volume() /
         static_cast<double>(s.grid.size());
}

double gp_energy(const GPState& s) {
  double dv = s.grid.cell_volume();
  Eigen::VectorXd rho = density(s.psi);
  double e = kinetic_energy(s);
  if (s.variant == GPVariant::gp) {
    e += 4.0 * kPi * s.a0 * rho.squaredNorm() * dv;
  } else {
    e += 0.5 * convolve(s.grid, s.kernel_hat, rho).dot(rho) * dv;
  }
  if (s.V_ext.size()) e += s.V_ext.dot(rho) * dv;
  return e;
}

std::pair<double, double> euler_lagrange_residual(const GPState& s) {
  Eigen::VectorXcd Hphi = apply_laplacian_neg(s.grid, s.psi);
  Eigen::VectorXd W = potential(s, s.psi);
  Hphi.array() += W.array().cast<cplx>() * s.psi.array();
  double dv = s.grid.cell_volume();
  double mu = s.psi.dot(Hphi).real() * dv;
  Eigen::VectorXcd r = Hphi - mu * s.psi;
  return {mu, std::sqrt(r.squaredNorm() * dv)};
}

GPState gp_ground_state(const Eigen::VectorXd& V_ext, double a0, const SpatialGrid& grid,
                        double tol) {
  GroundStateOptions opt;
  opt.tol = tol;
  return gp_ground_state(V_ext, a0, grid, opt);
}

// Sobolev-preconditioned normalized gradient flow: explicit imaginary-time steps
// phi <- normalize(phi - (alpha - Delta)^{-1} (H(phi) - mu) phi)
GPState gp_ground_state(const Eigen::VectorXd& V_ext, double a0, const SpatialGrid& grid,
                        const GroundStateOptions& opt) {
  GPState s;
  s.grid = grid;
  s.variant = GPVariant::gp;
  s.a0 = a0;
  Eigen::VectorXd V = V_ext.size() ? V_ext : Eigen::VectorXd::Zero(grid.size());
  if (static_cast<std::size_t>(V.size()) != grid.size()) throw DomainError("potential does not match grid");
  if (!V.allFinite()) throw DomainError("external potential must be finite (bounded below)");
  s.V_ext = V;
  double vmin = V.minCoeff();
  s.psi = (-0.5 * (V.array() - vmin)).exp().matrix().cast<cplx>();
  normalize(s);

  const auto& k2 = cached_k2(grid);
  double dv = grid.cell_volume();
  double e_prev = gp_energy(s);
  int rising = 0;
  for (int it = 0; it < opt.max_iter; ++it) {
    Eigen::VectorXcd Hphi = apply_laplacian_neg(grid, s.psi);
    Eigen::VectorXd W = potential(s, s.psi);
    Hphi.array() += W.array().cast<cplx>() * s.psi.array();
    double mu = s.psi.dot(Hphi).real() * dv;
    Eigen::VectorXcd r = Hphi - mu * s.psi;
    double alpha = std::max(1.0, (W.array() - mu).maxCoeff());
    fft_forward(grid, r);
    r.array() /= (alpha + k2.array()).cast<cplx>();
    fft_backward(grid, r);
    s.psi -= r;
    normalize(s);
    double e = gp_energy(s);
    double res = euler_lagrange_residual(s).second;
    double drop = e_prev - e;
    rising = drop < 0.0 ? rising + 1 : 0;
    if (rising >= 100) throw ConvergenceError("ground-state energy failed to decrease for 100 steps");
    e_prev = e;
    if (drop < opt.tol && res <= opt.tol) break;
    if (it + 1 == opt.max_iter) throw ConvergenceError("ground state did not converge");
  }
  // fix global phase so the largest component is real positive
  Eigen::Index imax;
  s.psi.cwiseAbs().maxCoeff(&imax);
  s.psi *= std::polar(1.0, -std::arg(s.psi[imax]));
  return s;
}

Eigen::VectorXd harmonic_potential(const SpatialGrid& g, double omega) {
  Eigen::VectorXd r = g.radii();
  return omega * omega * r.array().square();
}

Eigen::VectorXd quartic_potential(const SpatialGrid& g, double c) {
  Eigen::VectorXd r = g.radii();
  return c * r.array().pow(4);
}

ExperimentRecord compare_dynamics(const GPState& phi0, const RadialPotential& V, double a0,
                                  const std::vector<double>& N_values, double T,
                                  const CompareOptions& opt) {
  ExperimentRecord rec;
  rec.name = "compare_dynamics";
  int steps = static_cast<int>(std::llround(T / opt.dt));
  for (double N : N_values) {
    ScatteringSolution sol = solve_neumann(V, N, opt.ell);
    Eigen::VectorXd Khat = kernel_spectrum(phi0.grid, V, sol, N);
    GPState a = phi0;
    a.variant = GPVariant::gp;
    a.a0 = a0;
    GPState b = phi0;
    b.variant = GPVariant::modified;
    b.kernel_hat = Khat;
    double dv = phi0.grid.cell_volume();
    double sup = 0.0;
    for (int k = 0; k < steps; ++k) {
      a = gp_step(a, opt.dt);
      b = modified_gp_step(b, opt.dt, Khat);
      sup = std::max(sup, std::sqrt((a.psi - b.psi).squaredNorm() * dv));
    }
    rec.add("N", N);
    rec.add("sup_diff", sup);
    rec.add("int_Vf", integral_Vf(V, sol));
    rec.add("kernel_dev", integral_Vf(V, sol) - 8.0 * kPi * a0);
  }
  rec.meta["slope"] = loglog_slope(rec.at("N"), rec.at("sup_diff"));
  rec.meta["T"] = T;
  rec.meta["dt"] = opt.dt;
  rec.meta["ell"] = opt.ell;
  return rec;
}

}  // namespace gpf
