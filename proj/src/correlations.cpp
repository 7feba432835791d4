#include "gpf/correlations.hpp"

#include <cmath>

#include "gpf/bogoliubov.hpp"
#include "gpf/errors.hpp"

namespace gpf {

namespace {

int norm2(const K3& p) { return p[0] * p[0] + p[1] * p[1] + p[2] * p[2]; }

// \int a b over the torus
cplx integral(const FourierSeries& a, const FourierSeries& b) {
  cplx s = 0.0;
  for (const auto& [p, x] : a) {
    auto it = b.find({-p[0], -p[1], -p[2]});
    if (it != b.end()) s += x * it->second;
  }
  return s;
}

FourierSeries multiply(const FourierSeries& a, const std::function<cplx(const K3&)>& m) {
  FourierSeries out;
  for (const auto& [p, x] : a) out[p] = m(p) * x;
  return out;
}

FourierSeries density(const TorusModes& modes, const CVec& phi) {
  FourierSeries s = modes.series(phi);
  return series_product(s, series_conj(s));
}

double eval_real(const FourierSeries& a, const Eigen::Vector3d& x) {
  cplx s = 0.0;
  for (const auto& [p, c] : a) s += c * std::polar(1.0, 2 * M_PI * (p[0] * x(0) + p[1] * x(1) + p[2] * x(2)));
  return s.real();
}

constexpr int kMaxNorm2 = 12;

}  // namespace

KernelBuilder::KernelBuilder(const TorusModes& modes, const RadialPotential& V,
                             const ScatteringSolution& sol)
    : modes_(modes), V_(V), sol_(sol), N_(sol.N), ell_(sol.ell) {
  if (!sol.neumann) throw DomainError("correlation kernels need the Neumann scattering solution");
  if (!(ell_ > 0.0 && ell_ <= 0.5)) throw DomainError("l must lie in (0, 1/2] on the unit torus");
  trivial_ = V.is_zero();
  ScaledTransforms tr{&V_, &sol_, N_};
  for (int n2 = 0; n2 <= kMaxNorm2; ++n2) {
    double q = 2 * M_PI * std::sqrt(double(n2));
    Phat_[n2] = tr.P(q);
    P2hat_[n2] = tr.P2(q);
    gP2hat_[n2] = tr.gradP2(q);
  }
  TP_ = pair_tensor(modes_, [&](double q) {
    int n2 = static_cast<int>(std::lround(q * q / (4 * M_PI * M_PI)));
    auto it = Phat_.find(n2);
    return it != Phat_.end() ? it->second : tr.P(q);
  });
}

double KernelBuilder::P_hat(const K3& p) const {
  auto it = Phat_.find(norm2(p));
  if (it == Phat_.end()) throw DomainError("momentum outside the tabulated range");
  return it->second;
}

double KernelBuilder::P2_hat(const K3& p) const {
  auto it = P2hat_.find(norm2(p));
  if (it == P2hat_.end()) throw DomainError("momentum outside the tabulated range");
  return it->second;
}

double KernelBuilder::gradP2_hat(const K3& p) const {
  auto it = gP2hat_.find(norm2(p));
  if (it == gP2hat_.end()) throw DomainError("momentum outside the tabulated range");
  return it->second;
}

CorrelationKernel KernelBuilder::build(const CVec& phi, double t) const {
  if (phi.size() != modes_.M) throw DomainError("condensate does not match the mode basis");
  if (std::abs(phi.norm() - 1.0) > 1e-8) throw DomainError("condensate must be normalized");
  const int M = modes_.M;
  CorrelationKernel K;
  K.t = t;
  K.N = N_;
  K.phi = phi;
  K.k = -TP_.pairing(phi);
  CMat P = phi * phi.adjoint();
  CMat Pbar = P.conjugate();
  CMat I = CMat::Identity(M, M);
  K.eta = (I - P) * K.k * (I - Pbar);
  K.mu = P * K.k * Pbar - P * K.k - K.k * Pbar;
  K.eta_hs = K.eta.norm();
  return K;
}

double KernelBuilder::k_norm(const CVec& phi) const {
  FourierSeries rho = density(modes_, phi);
  double s = 0.0;
  for (const auto& [p, x] : rho) s += P2_hat(p) * std::norm(x);
  return std::sqrt(std::max(s, 0.0));
}

double KernelBuilder::eta_norm(const CVec& phi) const {
  FourierSeries rho = density(modes_, phi);
  double k2 = 0.0, kappa = 0.0;
  for (const auto& [p, x] : rho) {
    k2 += P2_hat(p) * std::norm(x);
    kappa += P_hat(p) * std::norm(x);
  }
  FourierSeries g = multiply(rho, [&](const K3& p) { return cplx(P_hat(p)); });
  // || k conj(phi) ||^2 = \int rho g^2
  double kphi2 = integral(rho, series_product(g, g)).real();
  return std::sqrt(std::max(k2 - 2 * kphi2 + kappa * kappa, 0.0));
}

double KernelBuilder::grad_k_norm(const CVec& phi) const {
  FourierSeries s = modes_.series(phi);
  FourierSeries rho = series_product(s, series_conj(s));
  double t1 = 0.0;
  for (const auto& [p, x] : rho) t1 += gradP2_hat(p) * std::norm(x);
  FourierSeries half = multiply(rho, [&](const K3& p) { return cplx(0.5 * P2_hat(p)); });
  FourierSeries full = multiply(rho, [&](const K3& p) { return cplx(P2_hat(p)); });
  double t2 = 0.0, t3 = 0.0;
  for (int d = 0; d < 3; ++d) {
    FourierSeries ds = multiply(s, [&](const K3& p) { return cplx(0, 2 * M_PI * p[d]); });
    FourierSeries sigma = series_product(ds, series_conj(ds));
    t2 += integral(sigma, full).real();
    FourierSeries tau = series_product(series_conj(s), ds);
    FourierSeries dh = multiply(half, [&](const K3& p) { return cplx(0, 2 * M_PI * p[d]); });
    t3 += 2 * integral(tau, dh).real();
  }
  return std::sqrt(std::max(t1 + t2 + t3, 0.0));
}

double KernelBuilder::P(const Eigen::Vector3d& z) const {
  if (trivial_) return 0.0;
  Eigen::Vector3d m = z.array() - z.array().round();
  double r = m.norm();
  if (r >= ell_) return 0.0;
  return N_ * sol_.w_at(N_ * r);
}

cplx KernelBuilder::k_at(const CVec& phi, const Eigen::Vector3d& x, const Eigen::Vector3d& y) const {
  return -P(x - y) * modes_.field(phi, x) * modes_.field(phi, y);
}

cplx KernelBuilder::eta_at(const CVec& phi, const Eigen::Vector3d& x, const Eigen::Vector3d& y) const {
  FourierSeries rho = density(modes_, phi);
  FourierSeries g = multiply(rho, [&](const K3& p) { return cplx(P_hat(p)); });
  double kappa = integral(rho, g).real();
  double A = -P(x - y) + eval_real(g, x) + eval_real(g, y) - kappa;
  return A * modes_.field(phi, x) * modes_.field(phi, y);
}

CMat kernel_powers(const CorrelationKernel& K, int n) { return kernel_power(K.eta, n); }

CMat kernel_time_derivative(const KernelBuilder& kb, const ModeGP& flow, const CVec& phi_t, double delta,
                            bool gauge) {
  if (!(delta >= 1e-8)) throw DomainError("difference step below the time-step resolution");
  CVec p = propagate(flow, phi_t, 0.0, delta);
  CVec m = propagate(flow, phi_t, 0.0, -delta);
  p /= p.norm();
  m /= m.norm();
  if (gauge) {
    cplx zp = phi_t.dot(p), zm = phi_t.dot(m);
    p *= std::conj(zp) / std::abs(zp);
    m *= std::conj(zm) / std::abs(zm);
  }
  return (kb.build(p).eta - kb.build(m).eta) / (2 * delta);
}

PointwiseReport pointwise_bounds(const KernelBuilder& kb, const CVec& phi, int s, int n) {
  PointwiseReport rep;
  if (kb.trivial()) return rep;
  const TorusModes& modes = kb.modes();
  FourierSeries rho = density(modes, phi);
  FourierSeries g = multiply(rho, [&](const K3& p) { return cplx(kb.P_hat(p)); });
  double kappa = integral(rho, g).real();
  const double N = kb.N(), ell = kb.ell();

  // intermediate quadrature lattice
  std::vector<Eigen::Vector3d> zs;
  std::vector<double> gz, rz;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        Eigen::Vector3d z((a + 0.5) / n, (b + 0.5) / n, (c + 0.5) / n);
        zs.push_back(z);
        gz.push_back(eval_real(g, z));
        rz.push_back(std::norm(modes.field(phi, z)));
      }
  const double dz = 1.0 / zs.size();
  const std::vector<double> radii{0.0, 0.5 / N, 1.0 / N, 2.0 / N, 0.5 * ell, 0.9 * ell, 0.45};
  const Eigen::Vector3d dirs[3] = {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(1, 1, 0).normalized(),
                                   Eigen::Vector3d(1, 2, 3).normalized()};
  for (int a = 0; a < s; ++a)
    for (int b = 0; b < s; ++b)
      for (int c = 0; c < s; ++c) {
        Eigen::Vector3d x((a + 0.3) / s, (b + 0.6) / s, (c + 0.1) / s);
        double gx = eval_real(g, x);
        double fx = std::abs(modes.field(phi, x));
        if (fx < 1e-8) continue;
        for (int d = 0; d < 3; ++d)
          for (std::size_t ri = 0; ri < radii.size(); ++ri) {
            Eigen::Vector3d y = x + radii[ri] * dirs[d];
            double fy = std::abs(modes.field(phi, y));
            if (fy < 1e-8) continue;
            double A = -kb.P(x - y) + gx + eval_real(g, y) - kappa;
            rep.C_eta = std::max(rep.C_eta, std::abs(A) * (radii[ri] + 1.0 / N));
            ++rep.pairs;
            // second power on a thinned set of pairs
            if (d == 0 && (ri == 0 || ri == 2 || ri == 5)) {
              double gy = eval_real(g, y);
              double acc = 0.0;
              for (std::size_t q = 0; q < zs.size(); ++q) {
                double A1 = -kb.P(x - zs[q]) + gx + gz[q] - kappa;
                double A2 = -kb.P(zs[q] - y) + gz[q] + gy - kappa;
                acc += A1 * A2 * rz[q];
              }
              rep.C_eta2 = std::max(rep.C_eta2, std::abs(acc * dz));
            }
          }
      }
  return rep;
}

}  // namespace gpf
