#include "gpf/fluctuation.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "gpf/bogoliubov.hpp"
#include "gpf/errors.hpp"

namespace gpf {

namespace {

constexpr double kPi = std::numbers::pi;

CMat compress(const SpMat& X, const CMat& P) { return P.adjoint() * (X * P); }
CMat compress(const CMat& X, const CMat& P) { return P.adjoint() * X * P; }

// sum_ik X_ik b*_i b_k
SpMat bb(const CMat& X, const FockSpace& F) {
  SpMat f2 = F.bfactor() * F.bfactor();
  SpMat out(F.dim(), F.dim());
  for (int k = 0; k < F.M(); ++k) out += F.raise(X.col(k)) * f2 * F.a(k);
  return out;
}

// sum_ij G_ij b*_i b*_j
SpMat bdbd(const CMat& G, const FockSpace& F) {
  SpMat out(F.dim(), F.dim());
  for (int j = 0; j < F.M(); ++j) out += F.raise(G.col(j)) * F.bfactor() * F.adag(j) * F.bfactor();
  return out;
}

double rho_quartic(const FourierSeries& rho, const std::function<double(double)>& Fhat) {
  std::map<int, double> cache;
  double s = 0.0;
  for (const auto& [p, x] : rho) {
    int n2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    auto it = cache.find(n2);
    if (it == cache.end()) it = cache.emplace(n2, Fhat(2 * kPi * std::sqrt(double(n2)))).first;
    s += it->second * std::norm(x);
  }
  return s;
}

CVec normalized(CVec c) { return c / c.norm(); }

}  // namespace

SpMat two_body(const PairTensor& v, const FockSpace& F) {
  const int M = F.M();
  std::vector<SpMat> lower(static_cast<std::size_t>(M) * M);
  for (int k = 0; k < M; ++k)
    for (int l = 0; l < M; ++l) lower[k * M + l] = F.a(l) * F.a(k);
  SpMat out(F.dim(), F.dim());
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      SpMat inner(F.dim(), F.dim());
      for (int k = 0; k < M; ++k)
        for (int l = 0; l < M; ++l) {
          double c = v(i, j, k, l);
          if (c != 0.0) inner += c * lower[k * M + l];
        }
      if (inner.nonZeros()) out += SpMat(F.adag(i) * F.adag(j)) * inner;
    }
  out *= 0.5;
  out.prune(cplx(0.0), 0.0);
  return out;
}

ManyBodyHamiltonian build_hamiltonian(const PairTensor& v, int N, const TorusModes& modes,
                                      const FockSpace& F) {
  if (F.M() != modes.M || v.M() != modes.M) throw DomainError("mode basis and Fock space disagree");
  ManyBodyHamiltonian H;
  H.N = N;
  H.h = modes.kinetic;
  H.v = v;
  H.kinetic = dGamma(CMat(modes.kinetic.cast<cplx>().asDiagonal()), F);
  H.kinetic.symmetry = Symmetry::hermitian;
  SpMat X = H.kinetic.mat + two_body(v, F);
  H.op = FockOperator(X, Symmetry::hermitian);
  return H;
}

ManyBodyHamiltonian build_hamiltonian(const RadialPotential& V, int N, const TorusModes& modes,
                                      const FockSpace& F) {
  if (N < 1) throw DomainError("particle number must be positive");
  double R = V.support();
  // N^2 V(N.) has transform V^(q/N) / N
  auto Fhat = [&](double q) {
    if (V.is_zero()) return 0.0;
    return radial_transform([&](double s) { return V(std::min(s, R * (1 - 1e-14))); }, {0.0, R},
                            q / N, 3) /
           N;
  };
  return build_hamiltonian(pair_tensor(modes, Fhat), N, modes, F);
}

SectorPropagator::SectorPropagator(const ManyBodyHamiltonian& H, const FockSpace& F, int n)
    : B_(&F.basis()), n_(n) {
  if (n < 0 || n > F.basis().N_max()) throw DomainError("sector outside the Fock space");
  Eigen::Index off = B_->sector_offset(n), d = B_->sector_dim(n);
  CMat Hs = CMat(H.op.mat).block(off, off, d, d);
  Eigen::SelfAdjointEigenSolver<CMat> es(Hs);
  if (es.info() != Eigen::Success) throw SolverError("sector diagonalization failed");
  E_ = es.eigenvalues();
  V_ = es.eigenvectors();
}

CVec SectorPropagator::evolve(const CVec& psi, double t) const {
  CVec s = sector_part(psi, *B_, n_);
  if (std::abs(psi.squaredNorm() - s.squaredNorm()) > 1e-12 * std::max(1.0, psi.squaredNorm()))
    throw DomainError("state is not supported in the propagated sector");
  CVec c = V_.adjoint() * s;
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::polar(1.0, -E_(i) * t);
  return embed_sector(V_ * c, *B_, n_);
}

CVec evolve(const CVec& psi, const ManyBodyHamiltonian& H, const FockSpace& F, double T) {
  return SectorPropagator(H, F, H.N).evolve(psi, T);
}

CMat reduced_density(const CVec& psi, const FockSpace& F, int N) {
  const int M = F.M();
  std::vector<CVec> v(M);
  for (int i = 0; i < M; ++i) v[i] = F.a(i) * psi;
  CMat g(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) g(i, j) = v[j].dot(v[i]) / double(N);
  return g;
}

double depletion(const CMat& gamma, const CVec& phi) { return 1.0 - phi.dot(gamma * phi).real(); }

double trace_norm(const CMat& X) {
  CMat H = 0.5 * (X + X.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

CVec default_condensate(int M) {
  const cplx c[5] = {1.0, 0.4, cplx(0, 0.25), 0.2, cplx(0, -0.15)};
  CVec phi = CVec::Zero(M);
  for (int i = 0; i < std::min(M, 5); ++i) phi(i) = c[i];
  return normalized(phi);
}

FluctuationModel::FluctuationModel(const FluctuationConfig& cfg)
    : cfg_(cfg), modes_(torus_modes(cfg.M)) {
  if (cfg.N < 1) throw DomainError("particle number must be positive");
  const RadialPotential& V = cfg_.V;
  sol_ = solve_neumann(V, cfg.N, cfg.ell);
  a0_ = V.is_zero() ? 0.0 : solve_zero_energy(V).a0;
  ScaledTransforms tr{&cfg_.V, &sol_, double(cfg.N)};
  TV_ = pair_tensor(modes_, [&](double q) { return tr.VN(q); });
  TVf_ = pair_tensor(modes_, [&](double q) { return tr.VNf(q); });
  modified_ = ModeGP{modes_.kinetic, TVf_};
  double g = 8 * kPi * a0_;
  gp_ = ModeGP{modes_.kinetic, pair_tensor(modes_, [g](double) { return g; })};
  if (cfg.many_body) {
    F_.emplace(cfg.M, cfg.N, 0);
    H_ = build_hamiltonian(TV_ * (1.0 / cfg.N), cfg.N, modes_, *F_);
  }
  if (cfg.correlations && !V.is_zero()) kb_.emplace(modes_, V, sol_);
  phi0_ = cfg.phi0.size() ? cfg.phi0 : default_condensate(cfg.M);
  if (phi0_.size() != cfg.M) throw DomainError("initial condensate does not match M");
  phi0_ = normalized(phi0_);
}

const FockSpace& FluctuationModel::space() const {
  if (!F_) throw DomainError("model was built without the Fock space");
  return *F_;
}

const ManyBodyHamiltonian& FluctuationModel::hamiltonian() const {
  if (!H_) throw DomainError("model was built without the Fock space");
  return *H_;
}

CVec FluctuationModel::phi_tilde(double t) const { return normalized(propagate(modified_, phi0_, 0.0, t)); }
CVec FluctuationModel::phi_gp(double t) const { return normalized(propagate(gp_, phi0_, 0.0, t)); }

CMat FluctuationModel::eta(const CVec& phi) const {
  if (!kb_) return CMat::Zero(cfg_.M, cfg_.M);
  return kb_->build(phi).eta;
}

double FluctuationModel::dynamical_time() const {
  double mu = std::abs(phi0_.dot(modified_.rhs(phi0_)).real());
  double scale = cfg_.N * (modes_.kinetic.maxCoeff() + mu);
  return scale > 0 ? 1.0 / scale : 1.0;
}

double gp_energy_modes(const FluctuationModel& model, const CVec& phi) {
  return model.gp_flow().energy(phi);
}

double cnt_modes(const FluctuationModel& model, const CVec& phi) {
  const double N = model.N();
  const int M = model.modes().M;
  const PairTensor& TV = model.TV();
  double c = 0.5 * ((N - 1) * TV.quartic(phi) - 2 * N * model.TVf().quartic(phi));
  if (!model.kernels()) return c;
  CMat k = model.kernels()->build(phi).k;
  const Eigen::VectorXd& h = model.modes().kinetic;
  for (int i = 0; i < M; ++i) c += h(i) * k.row(i).squaredNorm();
  cplx pot = 0.0, cross = 0.0;
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j)
      for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b) {
          pot += std::conj(k(i, j)) * k(a, b) * TV(i, j, a, b);
          cross += std::conj(phi(i)) * std::conj(phi(j)) * k(a, b) * TV(i, j, a, b);
        }
  c += 0.5 * pot.real() / N + cross.real();
  return c;
}

double cnt_continuum(const FluctuationModel& model, const CVec& phi) {
  const double N = model.N();
  double c = 0.5 * ((N - 1) * model.TV().quartic(phi) - 2 * N * model.TVf().quartic(phi));
  const KernelBuilder* kb = model.kernels();
  if (!kb) return c;
  FourierSeries s = model.modes().series(phi);
  FourierSeries rho = series_product(s, series_conj(s));
  ScaledTransforms tr{&model.config().V, &model.scattering(), N};
  double gk = kb->grad_k_norm(phi);
  c += gk * gk;
  c += 0.5 * rho_quartic(rho, [&](double q) { return tr.VNw2N(q); });
  c -= rho_quartic(rho, [&](double q) { return tr.VNwN(q); });
  return c;
}

GeneratorBundle assemble_generator(const FluctuationModel& model, double t, double delta) {
  const FockSpace& F = model.space();
  const ManyBodyHamiltonian& H = model.hamiltonian();
  const int N = model.N(), M = model.modes().M;
  if (delta <= 0.0) delta = 1e-3 * model.dynamical_time();
  if (delta > 0.1) throw DomainError("difference stencil wider than the schedule resolution");
  GeneratorBundle g;
  g.t = t;
  g.delta = delta;
  CVec phi = model.phi_tilde(t);
  g.phi = phi;
  const ModeGP& flow = model.modified_flow();
  auto phi_at = [&](double s) { return normalized(propagate(flow, phi, 0.0, s)); };
  auto Umat = [&](const CVec& p) { return excitation_map(p, F).U; };
  auto emB = [&](const CVec& p) { return CMat(exp_B(build_B(-model.eta(p), F)).mat); };

  ExcitationMap E = excitation_map(phi, F);
  g.perp = E.perp;
  const CMat& U = E.U;
  CMat eB = CMat(exp_B(build_B(model.eta(phi), F)).mat);
  CMat emBt = eB.adjoint();

  // central differences with one Richardson step
  auto dU = [&](double d) {
    return CMat(cplx(0, 1) * (Umat(phi_at(d)) - Umat(phi_at(-d))) / (2 * d) * U.adjoint());
  };
  auto dB = [&](double d) { return CMat(cplx(0, 1) * (emB(phi_at(d)) - emB(phi_at(-d))) / (2 * d) * eB); };
  CMat DU = (4.0 * dU(delta / 2) - dU(delta)) / 3.0;
  CMat DB = (4.0 * dB(delta / 2) - dB(delta)) / 3.0;

  std::size_t off = F.basis().sector_offset(N), dN = F.basis().sector_dim(N);
  CMat Hs = CMat(H.op.mat).block(off, off, dN, dN);
  CMat X = DU + U * Hs * U.adjoint();
  CMat G = DB + emBt * X * eB;
  g.G = compress(G, E.perp);
  g.dU = compress(X, E.perp);
  g.hermiticity = op_norm(CMat(g.G - g.G.adjoint()));

  // L^(0..4)
  const double Nd = N, sN = std::sqrt(Nd);
  const PairTensor& TV = model.TV();
  PairTensor TVw = TV - model.TVf();
  SpMat Nop = F.number(), I = F.identity();
  SpMat NmN = Nd * I - Nop, Np1 = Nop + I;
  double Q1 = TV.quartic(phi) - 2 * model.TVf().quartic(phi), Q2 = TV.quartic(phi);
  SpMat L0 = 0.5 * Q1 * NmN - (0.5 * Q2 / Nd) * SpMat(Np1 * NmN);
  SpMat L1a = sN * F.b(TVw.mean_field(phi)) - (1.0 / sN) * SpMat(Np1 * F.b(TV.mean_field(phi)));
  SpMat L1 = L1a + SpMat(L1a.adjoint());
  CMat DE = TV.direct(phi) + TV.exchange(phi);
  SpMat ones(F.dim(), F.dim());
  for (int k = 0; k < M; ++k) ones += F.raise(DE.col(k)) * F.a(k);
  SpMat pair = bdbd(TV.pairing(phi), F);
  SpMat L2 = H.kinetic.mat + bb(DE, F) - (1.0 / Nd) * ones + 0.5 * (pair + SpMat(pair.adjoint()));
  SpMat L3a(F.dim(), F.dim());
  for (int j = 0; j < M; ++j)
    for (int k = 0; k < M; ++k) {
      CVec c(M);
      for (int i = 0; i < M; ++i) {
        cplx s = 0.0;
        for (int n = 0; n < M; ++n) s += phi(n) * TV(i, j, k, n);
        c(i) = s;
      }
      L3a += F.raise(c) * F.bfactor() * F.adag(j) * F.a(k);
    }
  L3a *= 1.0 / sN;
  SpMat L3 = L3a + SpMat(L3a.adjoint());
  SpMat L4 = H.op.mat - H.kinetic.mat;
  const SpMat* Ls[5] = {&L0, &L1, &L2, &L3, &L4};
  CMat sum = CMat::Zero(E.perp.cols(), E.perp.cols());
  for (int j = 0; j < 5; ++j) {
    g.L[j] = compress(*Ls[j], E.perp);
    sum += g.L[j];
  }
  g.decomposition_residual = op_norm(CMat(g.dU - sum));
  g.scalar = flow.rhs(phi).dot(phi).real();
  g.C = cnt_modes(model, phi);
  g.C_continuum = cnt_continuum(model, phi);
  return g;
}

FormBoundReport generator_form_bounds(const GeneratorBundle& g, const FluctuationModel& model) {
  const FockSpace& F = model.space();
  const CMat& P = g.perp;
  CMat Hp = compress(model.hamiltonian().op.mat, P);
  CMat Np = compress(F.number(), P);
  Hp = 0.5 * (Hp + Hp.adjoint());
  Eigen::VectorXd w = Np.diagonal().real().array() + 1.0;
  if ((Np - CMat(Np.diagonal().asDiagonal())).norm() > 1e-10)
    throw NumericError("number operator is not diagonal on the excitation isometry");
  Eigen::VectorXcd s = w.cwiseSqrt().cwiseInverse().cast<cplx>();
  auto top = [&](const CMat& X) {
    CMat Y = s.asDiagonal() * X * s.asDiagonal();
    Y = 0.5 * (Y + Y.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(Y, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
  };
  CMat Gs = 0.5 * (g.G + g.G.adjoint()) - g.C * CMat::Identity(P.cols(), P.cols());
  FormBoundReport r;
  r.C_lo = top(0.5 * Hp - Gs);
  r.C_hi = top(Gs - 2.0 * Hp);
  CMat comm = cplx(0, 1) * (Np * Gs - Gs * Np);
  r.C_comm = std::max(top(comm - Hp), top(-comm - Hp));
  return r;
}

ExperimentRecord cnt_vs_gp_energy(const FluctuationModel& model, const std::vector<double>& times) {
  ExperimentRecord rec;
  rec.name = "cnt_vs_gp_energy";
  const double N = model.N();
  const double E0 = gp_energy_modes(model, model.phi0());
  for (double t : times) {
    CVec phi = model.phi_tilde(t);
    double scalar = model.modified_flow().rhs(phi).dot(phi).real();
    double C = cnt_continuum(model, phi);
    rec.add("t", t);
    rec.add("N", N);
    rec.add("C_Nt", C);
    rec.add("phase_term", N * scalar);
    rec.add("deviation", std::abs(C + N * scalar - N * E0));
  }
  rec.meta["a0"] = model.a0();
  rec.meta["E_GP"] = E0;
  return rec;
}

ExperimentRecord fluctuation_dynamics(const FluctuationModel& model, const CVec& xi0,
                                      const std::vector<double>& times) {
  const FockSpace& F = model.space();
  const ManyBodyHamiltonian& H = model.hamiltonian();
  const FockBasis& B = F.basis();
  ExperimentRecord rec;
  rec.name = "fluctuation_dynamics";
  if (static_cast<std::size_t>(xi0.size()) != F.dim()) throw DomainError("xi0 has the wrong length");
  ExcitationMap E0 = excitation_map(model.phi0(), F);
  CVec x = exp_B(build_B(model.eta(model.phi0()), F)).mat * xi0;
  CVec psi0 = u_inverse(E0, x, B);
  SectorPropagator prop(H, F, model.N());
  double n0 = xi0.norm();
  for (double t : times) {
    CVec phi = model.phi_tilde(t);
    ExcitationMap Et = excitation_map(phi, F);
    CVec xi = exp_B(build_B(-model.eta(phi), F)).mat * u_map(Et, prop.evolve(psi0, t), B);
    rec.add("t", t);
    rec.add("number", xi.dot(F.number() * xi).real());
    rec.add("energy", xi.dot(H.op.mat * xi).real());
    rec.add("norm_defect", std::abs(xi.norm() - n0));
  }
  return rec;
}

ExperimentRecord depletion_run(const FluctuationModel& model, const DepletionOptions& opt) {
  const FockSpace& F = model.space();
  const ManyBodyHamiltonian& H = model.hamiltonian();
  const FockBasis& B = F.basis();
  const int N = model.N();
  ExperimentRecord rec;
  rec.name = "depletion";
  ExcitationMap E0 = excitation_map(model.phi0(), F);
  CVec xi = F.vacuum();
  if (opt.initial == InitialState::correlated_vacuum)
    xi = exp_B(build_B(model.eta(model.phi0()), F)).mat * xi;
  CVec psi0 = u_inverse(E0, xi, B);
  SectorPropagator prop(H, F, N);
  CMat g0 = reduced_density(psi0, F, N);
  double aN = depletion(g0, model.phi0());
  double bN = std::abs(psi0.dot(H.op.mat * psi0).real() / N - gp_energy_modes(model, model.phi0()));
  for (double t : opt.times) {
    CVec psi = prop.evolve(psi0, t);
    CVec phi = model.phi_gp(t);
    CMat gamma = reduced_density(psi, F, N);
    double d = depletion(gamma, phi);
    CVec u = u_map(excitation_map(phi, F), psi, B);
    double dU = u.dot(F.number() * u).real() / N;
    double tn = trace_norm(CMat(gamma - phi * phi.adjoint()));
    rec.add("t", t);
    rec.add("N", N);
    rec.add("depletion", d);
    rec.add("depletion_U", dU);
    rec.add("trace_norm", tn);
    rec.add("trace_bound", std::pow(2.0, 1.5) * std::sqrt(std::max(d, 0.0)));
    rec.add("trace_gamma", gamma.trace().real());
  }
  rec.meta["a_N"] = aN;
  rec.meta["b_N"] = bN;
  rec.meta["N"] = N;
  return rec;
}

}  // namespace gpf
