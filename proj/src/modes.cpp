#include "gpf/modes.hpp"

#include <cmath>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "gpf/errors.hpp"

namespace gpf {

namespace {

constexpr double kPi = std::numbers::pi;
namespace odeint = boost::numeric::odeint;

K3 neg(const K3& p) { return {-p[0], -p[1], -p[2]}; }
int norm2(const K3& p) { return p[0] * p[0] + p[1] * p[1] + p[2] * p[2]; }

const K3 kWaves[6] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}};

}  // namespace

FourierSeries series_product(const FourierSeries& a, const FourierSeries& b) {
  FourierSeries out;
  for (const auto& [p, x] : a)
    for (const auto& [r, y] : b) out[{p[0] + r[0], p[1] + r[1], p[2] + r[2]}] += x * y;
  return out;
}

FourierSeries series_conj(const FourierSeries& a) {
  FourierSeries out;
  for (const auto& [p, x] : a) out[neg(p)] = std::conj(x);
  return out;
}

double series_norm2(const FourierSeries& a) {
  double s = 0.0;
  for (const auto& [p, x] : a) s += std::norm(x);
  return s;
}

TorusModes torus_modes(int M) {
  if (M < 1 || M > kMaxTorusModes)
    throw ResourceError("torus mode count must be in [1, " + std::to_string(kMaxTorusModes) + "]");
  TorusModes m;
  m.M = M;
  m.kinetic.resize(M);
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < M; ++i) {
    if (i == 0) {
      m.wave.push_back({0, 0, 0});
      m.kind.push_back(0);
      m.fourier.push_back({{{0, 0, 0}, 1.0}});
    } else {
      K3 p = kWaves[(i - 1) / 2];
      int kind = (i - 1) % 2 == 0 ? 1 : 2;
      m.wave.push_back(p);
      m.kind.push_back(kind);
      if (kind == 1) m.fourier.push_back({{p, r}, {neg(p), r}});
      else m.fourier.push_back({{p, cplx(0, -r)}, {neg(p), cplx(0, r)}});
    }
    m.kinetic(i) = 4 * kPi * kPi * norm2(m.wave.back());
  }
  return m;
}

double TorusModes::value(int i, const Eigen::Vector3d& x) const {
  const K3& p = wave[i];
  double arg = 2 * kPi * (p[0] * x(0) + p[1] * x(1) + p[2] * x(2));
  switch (kind[i]) {
    case 0: return 1.0;
    case 1: return std::sqrt(2.0) * std::cos(arg);
    default: return std::sqrt(2.0) * std::sin(arg);
  }
}

Eigen::Vector3d TorusModes::gradient(int i, const Eigen::Vector3d& x) const {
  const K3& p = wave[i];
  Eigen::Vector3d k(p[0], p[1], p[2]);
  k *= 2 * kPi;
  double arg = k.dot(x);
  switch (kind[i]) {
    case 0: return Eigen::Vector3d::Zero();
    case 1: return -std::sqrt(2.0) * std::sin(arg) * k;
    default: return std::sqrt(2.0) * std::cos(arg) * k;
  }
}

cplx TorusModes::field(const CVec& c, const Eigen::Vector3d& x) const {
  cplx s = 0.0;
  for (int i = 0; i < M; ++i) s += c(i) * value(i, x);
  return s;
}

FourierSeries TorusModes::series(const CVec& c) const {
  if (c.size() != M) throw DomainError("coefficient vector does not match the mode count");
  FourierSeries out;
  for (int i = 0; i < M; ++i)
    for (const auto& [p, x] : fourier[i]) out[p] += c(i) * x;
  return out;
}

ModeBasis TorusModes::basis() const {
  ModeBasis b = ModeBasis::abstract(M);
  const char* axes = "xyz";
  for (int i = 1; i < M; ++i) {
    std::string arg;
    for (int d = 0; d < 3; ++d)
      if (wave[i][d]) arg += (arg.empty() ? "" : "+") + std::string(1, axes[d]);
    b.labels[i] = (kind[i] == 1 ? "cos(" : "sin(") + arg + ")";
  }
  b.labels[0] = "1";
  return b;
}

PairTensor PairTensor::operator-(const PairTensor& o) const {
  if (o.M_ != M_) throw DomainError("pair tensor size mismatch");
  std::vector<double> v(v_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = v_[i] - o.v_[i];
  return PairTensor(M_, std::move(v));
}

PairTensor PairTensor::operator*(double s) const {
  std::vector<double> v(v_);
  for (double& x : v) x *= s;
  return PairTensor(M_, std::move(v));
}

CVec PairTensor::mean_field(const CVec& phi) const {
  CVec out = CVec::Zero(M_);
  for (int i = 0; i < M_; ++i)
    for (int j = 0; j < M_; ++j)
      for (int k = 0; k < M_; ++k)
        for (int l = 0; l < M_; ++l)
          out(i) += (*this)(i, j, k, l) * std::conj(phi(j)) * phi(k) * phi(l);
  return out;
}

double PairTensor::quartic(const CVec& phi) const { return phi.dot(mean_field(phi)).real(); }

CMat PairTensor::direct(const CVec& phi) const {
  CMat D = CMat::Zero(M_, M_);
  for (int i = 0; i < M_; ++i)
    for (int k = 0; k < M_; ++k)
      for (int j = 0; j < M_; ++j)
        for (int l = 0; l < M_; ++l) D(i, k) += (*this)(i, j, k, l) * std::conj(phi(j)) * phi(l);
  return D;
}

CMat PairTensor::exchange(const CVec& phi) const {
  CMat E = CMat::Zero(M_, M_);
  for (int i = 0; i < M_; ++i)
    for (int k = 0; k < M_; ++k)
      for (int m = 0; m < M_; ++m)
        for (int n = 0; n < M_; ++n) E(i, k) += (*this)(i, k, m, n) * phi(m) * std::conj(phi(n));
  return E;
}

CMat PairTensor::pairing(const CVec& phi) const {
  CMat G = CMat::Zero(M_, M_);
  for (int i = 0; i < M_; ++i)
    for (int j = 0; j < M_; ++j)
      for (int m = 0; m < M_; ++m)
        for (int n = 0; n < M_; ++n) G(i, j) += (*this)(i, j, m, n) * phi(m) * phi(n);
  return G;
}

PairTensor pair_tensor(const TorusModes& modes, const std::function<double(double)>& Fhat) {
  const int M = modes.M;
  std::vector<std::vector<FourierSeries>> prod(M, std::vector<FourierSeries>(M));
  for (int i = 0; i < M; ++i)
    for (int k = i; k < M; ++k) prod[i][k] = prod[k][i] = series_product(modes.fourier[i], modes.fourier[k]);
  std::map<int, double> cache;
  auto F = [&](const K3& p) {
    int n2 = norm2(p);
    auto it = cache.find(n2);
    if (it == cache.end()) it = cache.emplace(n2, Fhat(2 * kPi * std::sqrt(double(n2)))).first;
    return it->second;
  };
  std::vector<double> v(static_cast<std::size_t>(M) * M * M * M, 0.0);
  for (int i = 0; i < M; ++i)
    for (int k = 0; k < M; ++k)
      for (int j = 0; j < M; ++j)
        for (int l = 0; l < M; ++l) {
          cplx s = 0.0;
          const FourierSeries& b = prod[j][l];
          for (const auto& [p, x] : prod[i][k]) {
            auto it = b.find(neg(p));
            if (it != b.end()) s += F(p) * x * it->second;
          }
          v[((static_cast<std::size_t>(i) * M + j) * M + k) * M + l] = s.real();
        }
  return PairTensor(M, std::move(v));
}

std::vector<double> ScaledTransforms::breaks() const {
  double R = V->support(), L = sol->boundary();
  if (!(L > R)) throw DomainError("scattering ball N l must exceed the potential range");
  std::vector<double> b{0.0, R};
  for (double r = 2 * R; r < L; r *= 2) b.push_back(r);
  b.push_back(L);
  return b;
}

double ScaledTransforms::VN(double q) const {
  if (V->is_zero()) return 0.0;
  double R = V->support();
  return radial_transform([&](double s) { return (*V)(std::min(s, R * (1 - 1e-14))); }, {0.0, R},
                          q / N, 3);
}

double ScaledTransforms::VNf(double q) const { return kernel_transform(*V, *sol, N, q, 3); }

double ScaledTransforms::VNw(double q) const {
  if (V->is_zero()) return 0.0;
  double R = V->support();
  return radial_transform(
      [&](double s) { return (*V)(std::min(s, R * (1 - 1e-14))) * sol->w_at(s); }, {0.0, R}, q / N, 3);
}

double ScaledTransforms::P(double q) const {
  if (V->is_zero()) return 0.0;
  return radial_transform([&](double s) { return sol->w_at(s); }, breaks(), q / N, 3) / (N * N);
}

double ScaledTransforms::P2(double q) const {
  if (V->is_zero()) return 0.0;
  return radial_transform([&](double s) { double w = sol->w_at(s); return w * w; }, breaks(), q / N, 3) / N;
}

double ScaledTransforms::gradP2(double q) const {
  if (V->is_zero()) return 0.0;
  return N * radial_transform([&](double s) { double d = sol->df_at(s); return d * d; }, breaks(), q / N, 3);
}

double ScaledTransforms::VNw2N(double q) const {
  if (V->is_zero()) return 0.0;
  double R = V->support();
  return N * radial_transform(
                 [&](double s) {
                   double w = sol->w_at(s);
                   return (*V)(std::min(s, R * (1 - 1e-14))) * w * w;
                 },
                 {0.0, R}, q / N, 3);
}

double ScaledTransforms::VNwN(double q) const { return N * VNw(q); }

CVec ModeGP::rhs(const CVec& c) const {
  return (kinetic.array() * c.array()).matrix() + T.mean_field(c);
}

double ModeGP::energy(const CVec& c) const {
  return (kinetic.array() * c.array().abs2()).sum() + 0.5 * T.quartic(c);
}

CVec propagate(const ModeGP& gp, const CVec& c0, double t0, double t1, double rtol) {
  if (t1 == t0) return c0;
  using State = std::vector<double>;
  const Eigen::Index M = c0.size();
  State x(2 * M);
  for (Eigen::Index i = 0; i < M; ++i) x[2 * i] = c0(i).real(), x[2 * i + 1] = c0(i).imag();
  auto sys = [&](const State& s, State& ds, double) {
    CVec c(M);
    for (Eigen::Index i = 0; i < M; ++i) c(i) = cplx(s[2 * i], s[2 * i + 1]);
    CVec d = cplx(0, -1) * gp.rhs(c);
    for (Eigen::Index i = 0; i < M; ++i) ds[2 * i] = d(i).real(), ds[2 * i + 1] = d(i).imag();
  };
  auto stepper = odeint::make_controlled(rtol * 1e-2, rtol, odeint::runge_kutta_dopri5<State>());
  try {
    odeint::integrate_adaptive(stepper, sys, x, t0, t1, (t1 - t0) * 1e-3);
  } catch (const std::exception& e) {
    throw IntegrationError(std::string("mode GP integration failed: ") + e.what());
  }
  CVec c(M);
  for (Eigen::Index i = 0; i < M; ++i) c(i) = cplx(x[2 * i], x[2 * i + 1]);
  return c;
}

}  // namespace gpf
