#include "gpf/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "gpf/bogoliubov.hpp"
#include "gpf/errors.hpp"
#include "gpf/excitations.hpp"
#include "gpf/gpdynamics.hpp"

namespace gpf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

class Timer {
 public:
  explicit Timer(CheckSuite& s) : s_(s), t0_(std::chrono::steady_clock::now()) {}
  ~Timer() { s_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  CheckSuite& s_;
  std::chrono::steady_clock::time_point t0_;
};

// relative excess of lhs over rhs; <= 0 when the inequality holds
double excess(double lhs, double rhs) { return (lhs - rhs) / std::max(rhs, 1e-300); }

double rel_spread(const std::vector<double>& v) {
  double lo = *std::min_element(v.begin(), v.end()), hi = *std::max_element(v.begin(), v.end());
  double s = std::max(std::abs(lo), std::abs(hi));
  return s > 0 ? (hi - lo) / s : 0.0;
}

SpMat comm(const SpMat& A, const SpMat& B) { return A * B - B * A; }

CMat diag_of(const FockSpace& F, const std::function<double(int)>& g) { return CMat(F.diag(g)); }

CMat random_pair_kernel(int M, double norm, std::mt19937_64& rng) {
  CMat A = random_matrix(M, rng);
  CMat S = 0.5 * (A + A.transpose());
  return S * (norm / S.norm());
}

}  // namespace

void CheckSuite::at_most(const std::string& check, double value, double tol) {
  within(check, value, -kInf, tol);
}

void CheckSuite::within(const std::string& check, double value, double lo, double hi) {
  checks.push_back({check, value, lo, hi, std::isfinite(value) && value >= lo && value <= hi});
}

bool CheckSuite::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult& CheckSuite::get(const std::string& check) const {
  for (const auto& c : checks)
    if (c.name == check) return c;
  throw DomainError("suite " + name + " has no check " + check);
}

CsvTable check_table(const std::vector<const CheckSuite*>& suites) {
  CsvTable t;
  t.header = {"suite", "check", "value", "lower", "upper", "passed"};
  for (const CheckSuite* s : suites)
    for (const auto& c : s->checks)
      t.rows.push_back({s->name, c.name, format_double(c.value), format_double(c.lower),
                        format_double(c.upper), c.passed ? "true" : "false"});
  return t;
}

nlohmann::json check_json(const CheckSuite& s) {
  nlohmann::json j;
  j["suite"] = s.name;
  j["passed"] = s.passed();
  j["seconds"] = s.seconds;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : s.checks) {
    nlohmann::json e;
    e["name"] = c.name;
    e["value"] = std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(format_double(c.value));
    if (std::isfinite(c.lower)) e["lower"] = c.lower;
    e["upper"] = c.upper;
    e["passed"] = c.passed;
    j["checks"].push_back(e);
  }
  return j;
}

CheckSuite scattering_suite(const ScatteringCheckOptions& opt) {
  CheckSuite s;
  s.name = "scattering";
  Timer timer(s);
  for (double V0 : opt.well_depths) {
    auto V = RadialPotential::square_well(V0, 1.0);
    double k = std::sqrt(V0 / 2);
    double exact = 1.0 - std::tanh(k) / k;
    double a0 = solve_zero_energy(V).a0;
    s.at_most("square_well_a0_rel_V0=" + format_double(V0), std::abs(a0 - exact) / exact, 1e-6);
  }
  auto V = RadialPotential::soft_sphere(10.0, 1.0);
  double a0 = solve_zero_energy(V).a0;
  auto n = solve_neumann(V, 100 * a0, 1.0);
  s.within("neumann_eigenvalue_ratio", n.lambda * std::pow(100 * a0, 3) / (3 * a0), 0.95, 1.05);

  ExperimentRecord rec;
  rec.name = "scattering_sweep";
  std::vector<double> inv, dev;
  for (double N : opt.N_values) {
    auto sol = solve_neumann(V, N, 1.0);
    double d = std::abs(integral_Vf(V, sol) - 8 * kPi * a0);
    inv.push_back(1.0 / N);
    dev.push_back(d);
    rec.add("N", N);
    rec.add("lambda_ratio", sol.lambda * N * N * N / (3 * a0));
    rec.add("int_Vf_deviation", d);
  }
  s.within("int_Vf_slope_vs_inverse_N", loglog_slope(inv, dev), 0.7, 1.3);
  rec.meta["a0"] = a0;
  s.data.push_back(rec);
  return s;
}

CheckSuite gp_suite(const GPCheckOptions& opt) {
  CheckSuite s;
  s.name = "gp";
  Timer timer(s);
  SpatialGrid g(1, 256, 32.0);
  GPState gp = make_state(g, gaussian(g, 1.0, 1.0), GPVariant::gp);
  gp.a0 = 0.05;
  s.at_most("mass_drift_gp_1000_steps", std::abs(mass(evolve(gp, 1e-3, 1000)) - 1.0), 1e-9);

  auto V = RadialPotential::soft_sphere(10.0, 1.0);
  GPState mod = make_state(g, gaussian(g, 1.0, 0.5), GPVariant::modified);
  mod.kernel_hat = kernel_spectrum(g, V, solve_neumann(V, 50.0, 0.5), 50.0);
  s.at_most("mass_drift_modified_1000_steps", std::abs(mass(evolve(mod, 1e-3, 1000)) - 1.0), 1e-9);

  ExperimentRecord rec;
  rec.name = "energy_drift";
  auto order = [&](GPState st, const std::vector<double>& dts, const std::string& label) {
    double e0 = gp_energy(st);
    std::vector<double> drift;
    for (double dt : dts) {
      double d = std::abs(gp_energy(evolve(st, dt, static_cast<int>(std::lround(1.0 / dt)))) - e0);
      drift.push_back(d);
      rec.add(label + "_dt", dt);
      rec.add(label + "_drift", d);
    }
    double worst = kInf;
    for (std::size_t i = 1; i < drift.size(); ++i) worst = std::min(worst, std::log2(drift[i - 1] / drift[i]));
    return worst;
  };
  s.within("energy_drift_order_gp", order(gp, {2e-3, 1e-3, 5e-4}, "gp"), 1.8, kInf);
  s.within("energy_drift_order_modified", order(mod, {2e-3, 1e-3, 5e-4}, "modified"), 1.8, kInf);
  s.data.push_back(rec);

  double a0 = solve_zero_energy(V).a0;
  GPState c = make_state(g, gaussian(g, 1.0, 0.5), GPVariant::gp);
  ExperimentRecord cmp = compare_dynamics(c, V, a0, opt.N_values, opt.T);
  cmp.name = "compare_gp";
  s.within("compare_dynamics_slope", loglog_slope(cmp.at("N"), cmp.at("sup_diff")), -1.3, -0.7);
  s.data.push_back(cmp);
  return s;
}

CheckSuite fock_suite(const FockCheckOptions& opt) {
  CheckSuite s;
  s.name = "fock_M" + std::to_string(opt.M) + "_N" + std::to_string(opt.N);
  Timer timer(s);
  const int M = opt.M, N = opt.N;
  if (N < 1) throw DomainError("fock checks need N >= 1");
  std::mt19937_64 rng(opt.seed);
  FockSpace F(M, N);
  const std::size_t D = F.dim();
  SpMat Id = F.identity(), Nop = F.number();
  CMat Nd = CMat(Nop);

  // CCR on sectors below the top
  double ccr = 0.0, adj = 0.0;
  std::size_t inner = F.basis().dim_upto(N - 1);
  for (int t = 0; t < std::min(opt.trials, 10); ++t) {
    CVec g = random_vector(M, rng), h = random_vector(M, rng);
    CMat C = CMat(comm(F.annihilation(g), F.creation(h))).topLeftCorner(inner, inner);
    ccr = std::max(ccr, max_abs(CMat(C - g.dot(h) * CMat::Identity(inner, inner))));
    adj = std::max(adj, max_abs(SpMat(F.annihilation(g) - SpMat(F.creation(g).adjoint()))));
    adj = std::max(adj, max_abs(SpMat(F.b(g) - SpMat(F.bdag(g).adjoint()))));
  }
  s.at_most("ccr_interior_sectors", ccr, 1e-12);
  s.at_most("field_adjoints", adj, 1e-12);

  // modified commutators of the b-fields
  double cb = 0.0, cb2 = 0.0;
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      SpMat rhs = -(1.0 / N) * SpMat(F.adag(j) * F.a(i));
      if (i == j) rhs += Id - (1.0 / N) * Nop;
      cb = std::max(cb, max_abs(SpMat(comm(F.b_mode(i), F.bdag_mode(j)) - rhs)));
      for (int k = 0; k < M; ++k) {
        SpMat ajk = F.adag(j) * F.a(k);
        SpMat r2 = (i == j) ? F.b_mode(k) : SpMat(D, D);
        SpMat r3 = (i == k) ? SpMat(-F.bdag_mode(j)) : SpMat(D, D);
        cb2 = std::max(cb2, max_abs(SpMat(comm(F.b_mode(i), ajk) - r2)));
        cb2 = std::max(cb2, max_abs(SpMat(comm(F.bdag_mode(i), ajk) - r3)));
      }
    }
  s.at_most("b_commutator", cb, 1e-12);
  s.at_most("b_commutator_with_quadratic", cb2, 1e-12);
  {
    CVec f = random_vector(M, rng);
    s.at_most("pull_through", max_abs(SpMat(Nop * F.bdag(f) - F.bdag(f) * (Nop + Id))), 1e-12);
  }

  CMat sqrtN = Nd.cwiseSqrt();
  CMat f1 = diag_of(F, [N](int n) { return std::sqrt(n * (N - n + 1.0) / N); });
  CMat f2 = diag_of(F, [N](int n) { return std::sqrt((n + 1.0) * (N - n) / N); });
  CMat Np1 = diag_of(F, [](int n) { return n + 1.0; });
  CMat wB = diag_of(F, [N](int n) { return (n + 1.0) * (N - n + 2.0) / N; });
  double a_bd = -kInf, dg_bd = -kInf, b_bd = -kInf, b_norm = -kInf;
  double A_bd = -kInf, B_bd = -kInf, B_norm = -kInf, B_adj = 0.0;
  const char pats[4][2] = {{'.', '.'}, {'.', '*'}, {'*', '.'}, {'*', '*'}};
  for (int t = 0; t < opt.trials; ++t) {
    CVec f = random_vector(M, rng);
    CVec xi = random_vector(D, rng);
    a_bd = std::max(a_bd, excess((CMat(F.annihilation(f)) * xi).norm(), f.norm() * (sqrtN * xi).norm()));
    CMat H = random_hermitian(M, rng);
    double nh = op_norm(H);
    dg_bd = std::max(dg_bd, excess((dGamma(H, F).dense() * xi).norm(), nh * (Nd * xi).norm()));
    CMat b = CMat(F.b(f)), bd = CMat(F.bdag(f));
    b_bd = std::max(b_bd, excess((b * xi).norm(), f.norm() * (f1 * xi).norm()));
    b_bd = std::max(b_bd, excess((bd * xi).norm(), f.norm() * (f2 * xi).norm()));
    b_norm = std::max(b_norm, excess(op_norm(b), std::sqrt(N + 1.0) * f.norm()));
    b_norm = std::max(b_norm, excess(op_norm(bd), std::sqrt(N + 1.0) * f.norm()));
    CMat J = random_matrix(M, rng);
    for (auto& p : pats) {
      double K = k_factor(J, p[0] == '.' && p[1] == '*');
      CMat A = quadratic_field(QuadKind::A, p[0], p[1], J, F).dense();
      CMat B = quadratic_field(QuadKind::B, p[0], p[1], J, F).dense();
      A_bd = std::max(A_bd, excess((A * xi).norm(), std::sqrt(2.0) * K * (Np1 * xi).norm()));
      B_bd = std::max(B_bd, excess((B * xi).norm(), std::sqrt(2.0) * K * (wB * xi).norm()));
      B_norm = std::max(B_norm, excess(op_norm(B), std::sqrt(2.0) * N * K));
    }
    CMat Bss = quadratic_field(QuadKind::B, '*', '*', J, F).dense();
    CMat Bdd = quadratic_field(QuadKind::B, '.', '.', J, F).dense();
    B_adj = std::max(B_adj, max_abs(CMat(Bss - Bdd.adjoint())));
  }
  s.at_most("a_field_bound", a_bd, 1e-12);
  s.at_most("second_quantized_bound", dg_bd, 1e-12);
  s.at_most("b_field_bound", b_bd, 1e-12);
  s.at_most("b_field_norm_bound", b_norm, 1e-12);
  s.at_most("quadratic_a_bound", A_bd, 1e-12);
  s.at_most("quadratic_b_bound", B_bd, 1e-12);
  s.at_most("quadratic_b_norm_bound", B_norm, 1e-12);
  s.at_most("quadratic_b_adjoint", B_adj, 1e-12);

  // Pi operators over all order-1 and order-2 patterns
  auto w2 = [N](int n) { return 1.0 - (n - 2.0) / N; };
  std::vector<std::pair<std::string, std::string>> pats2{
      {".", "."}, {".", "*"}, {"*", "."}, {"*", "*"},
      {".*", ".*"}, {"*.", "*."}, {"..", ".*"}, {"**", "*."}, {"..", "**"}, {"*.", ".."}};
  std::vector<CMat> W2(3), W1(3);
  for (int n = 1; n <= 2; ++n) {
    W2[n] = diag_of(F, [&](int m) { return std::pow(m + 1.0, n) * w2(m); });
    W1[n] = diag_of(F, [&](int m) { return std::pow(m + 1.0, n + 0.5) * std::sqrt(std::max(w2(m), 0.0)); });
  }
  double p2 = -kInf, p2n = -kInf, p1 = -kInf, padj = 0.0;
  for (int t = 0; t < opt.trials; ++t) {
    CVec xi = random_vector(D, rng);
    CVec f = random_vector(M, rng);
    for (const auto& [sh, fl] : pats2) {
      std::size_t n = sh.size();
      std::vector<CMat> js;
      double prodK = 1.0;
      for (std::size_t l = 1; l <= n; ++l) {
        js.push_back(random_matrix(M, rng));
        prodK *= k_factor(js.back(), fl[l - 1] == '.' && sh[l - 1] == '*');
      }
      CMat P = pi_operator(PiKind::Pi2, js, sh, fl, std::nullopt, F).dense();
      p2 = std::max(p2, excess((P * xi).norm(), std::pow(6.0, n) * prodK * (W2[n] * xi).norm()));
      p2n = std::max(p2n, excess(op_norm(P), std::pow(12.0 * N, n) * prodK));
      std::string fl1 = fl + (sh.back() == '.' ? '*' : '.');
      bool legal = true;
      for (std::size_t l = 1; l <= n; ++l) legal = legal && (sh[l - 1] != fl1[l]);
      if (!legal) continue;
      CMat P1 = pi_operator(PiKind::Pi1, js, sh, fl1, f, F).dense();
      p1 = std::max(p1, excess((P1 * xi).norm(), std::pow(6.0, n) * f.norm() * prodK * (W1[n] * xi).norm()));
      std::vector<CMat> rev;
      for (auto it = js.rbegin(); it != js.rend(); ++it) rev.push_back(it->adjoint());
      std::string flp, shp;
      for (auto it = fl1.rbegin(); it != fl1.rend(); ++it) flp += (*it == '.' ? '*' : '.');
      for (auto it = sh.rbegin(); it != sh.rend(); ++it) shp += (*it == '.' ? '*' : '.');
      CMat Pt = pi_operator(PiKind::Pi1Tilde, rev, shp, flp, f, F).dense();
      padj = std::max(padj, max_abs(CMat(P1.adjoint() - Pt)) / std::max(1.0, max_abs(Pt)));
    }
  }
  s.at_most("pi2_bound", p2, 1e-12);
  s.at_most("pi2_norm_bound", p2n, 1e-12);
  s.at_most("pi1_bound", p1, 1e-12);
  s.at_most("pi_adjoint", padj, 1e-12);

  // kernels adapted to phi keep F_perp invariant
  CVec phi = random_vector(M, rng).normalized();
  CMat q = CMat::Identity(M, M) - phi * phi.adjoint();
  CMat qbar = q.conjugate();
  auto proj = [&](char c) { return c == '.' ? qbar : q; };
  CMat Pp = perp_projector(excitation_map(phi, F));
  CMat I = CMat::Identity(D, D);
  double leak = 0.0;
  std::vector<std::pair<std::string, std::string>> pp{{".*", ".*"}, {"*.", "*."}, {"*", "."}, {".", "*"}};
  for (int t = 0; t < std::min(opt.trials, 10); ++t)
    for (const auto& [sh, fl] : pp) {
      std::vector<CMat> js;
      for (std::size_t l = 1; l <= sh.size(); ++l)
        js.push_back(proj(fl[l - 1]) * random_matrix(M, rng) * proj(sh[l - 1]).transpose());
      CMat X = pi_operator(PiKind::Pi2, js, sh, fl, std::nullopt, F).dense();
      leak = std::max(leak, ((I - Pp) * X * Pp).norm() / std::max(1.0, X.norm()));
    }
  s.at_most("pi_preserves_perp", leak, 1e-12);
  return s;
}

CheckSuite excitation_suite(const ExcitationCheckOptions& opt) {
  CheckSuite s;
  s.name = "excitation_M" + std::to_string(opt.M) + "_N" + std::to_string(opt.N);
  Timer timer(s);
  std::mt19937_64 rng(opt.seed);
  FockSpace F(opt.M, opt.N);
  const FockBasis& B = F.basis();
  CVec phi = random_vector(opt.M, rng).normalized();
  ConjugationReport r = check_conjugation_rules(phi, F, rng, opt.trials);
  s.at_most("unitarity", r.unitarity, 1e-10);
  s.at_most("range", r.range, 1e-10);
  s.at_most("sector_mapping", r.sector_mapping, 1e-10);
  for (int k = 0; k < 4; ++k) s.at_most("conjugation_rule_" + std::to_string(k + 1), r.rule[k], 1e-10);
  ExcitationMap E = excitation_map(phi, F);
  double rt = 0.0;
  for (int t = 0; t < 5; ++t) {
    CVec psi = embed_sector(random_vector(B.sector_dim(opt.N), rng), B, opt.N);
    rt = std::max(rt, (u_inverse(E, u_map(E, psi, B), B) - psi).norm() / psi.norm());
  }
  s.at_most("round_trip", rt, 1e-10);
  return s;
}

CheckSuite bogoliubov_suite(const BogoliubovCheckOptions& opt) {
  CheckSuite s;
  s.name = "bogoliubov";
  Timer timer(s);
  std::mt19937_64 rng(opt.seed);
  const int M = opt.eta ? static_cast<int>(opt.eta->rows()) : opt.M;
  FockSpace F(M, opt.N);
  CMat dir = opt.eta ? CMat(*opt.eta / opt.eta->norm()) : random_pair_kernel(M, 1.0, rng);
  double norm = opt.eta ? opt.eta->norm() : opt.eta_norm;
  CMat eta = norm * dir;
  const std::size_t D = F.dim();

  double unit = 0.0, agree = 0.0;
  for (int t = 0; t < opt.trials; ++t) {
    CMat e = t == 0 ? eta : random_pair_kernel(M, norm, rng);
    CMat U = exp_B(build_B(e, F)).dense();
    unit = std::max(unit, max_abs(CMat(U.adjoint() * U - CMat::Identity(D, D))));
    if (t < 3) agree = std::max(agree, max_abs(CMat(U - exp_B(build_B(e, F), 0).dense())));
  }
  s.at_most("exp_B_unitarity", unit, 1e-10);
  s.at_most("exp_B_eig_vs_pade", agree, 1e-10);

  CVec f = random_vector(M, rng).normalized();
  SeriesResult r = series_conjugation(eta, f, opt.order, F);
  SeriesResult rd = series_conjugation(eta, f, opt.order, F, true);
  s.at_most("series_conjugation_b", r.residual, 1e-8);
  s.at_most("series_conjugation_bdag", rd.residual, 1e-8);
  s.at_most("series_diverging", (r.diverging || rd.diverging) ? 1.0 : 0.0, 0.0);
  ExperimentRecord ser;
  ser.name = "series_residuals";
  for (std::size_t n = 0; n < r.by_order.size(); ++n) {
    ser.add("order", double(n));
    ser.add("residual_b", r.by_order[n]);
    ser.add("residual_bdag", n < rd.by_order.size() ? rd.by_order[n] : r.by_order[n]);
  }
  s.data.push_back(ser);

  ExperimentRecord ray;
  ray.name = "eta_ray";
  double prev = 0.0, worst = -kInf;
  for (double a : opt.ray) {
    double res = series_conjugation(a * dir, f, 6, F).residual;
    worst = std::max(worst, 0.95 * prev - res);
    prev = res;
    ray.add("eta_norm", a);
    ray.add("residual_order6", res);
  }
  s.at_most("series_residual_monotone_on_ray", worst, 0.0);
  s.data.push_back(ray);

  // closed forms of the first commutator
  CMat Bd = build_B(eta, F).dense();
  double ad1 = 0.0;
  for (int z = 0; z < M; ++z)
    ad1 = std::max(ad1, max_abs(CMat(nested_ad(Bd, CMat(F.b_mode(z)), 1) - ad1_closed_form(eta, z, F))));
  s.at_most("ad1_closed_form", ad1, 1e-12);
  SpMat S(D, D);
  for (int x = 0; x < M; ++x) S += F.bdag_mode(x) * F.raise(eta.row(x).transpose());
  CMat rest = (1.0 / opt.N) * CMat(S * F.annihilation(f));
  s.at_most("ad1_leading_term",
            max_abs(CMat(nested_ad(Bd, CMat(F.b(f)), 1) - leading_ad_term(eta, f, 1, F) - rest)), 1e-12);

  // two-mode instances for the N sweeps
  CMat e2 = random_pair_kernel(2, norm, rng);
  CVec f2 = random_vector(2, rng).normalized();
  double r12 = standard_action_residual(e2, f2, 12, 4), r24 = standard_action_residual(e2, f2, 24, 4);
  // residuals at round-off count as converged
  s.at_most("standard_action_decay_ratio", r24 / std::max(r12, 1e-12), 0.1);

  ExperimentRecord rem;
  rem.name = "ad_remainders";
  for (int n : {2, 3}) {
    std::vector<double> Ns, vals;
    for (int N : {8, 16, 32}) {
      FockSpace G(2, N);
      SpMat ad = nested_ad(build_B(e2, G).mat, G.b(f2), n);
      CVec R = CMat(ad).col(0) - leading_ad_term(e2, f2, n, G).col(0);
      Ns.push_back(N);
      vals.push_back(R.norm());
      rem.add("n", n);
      rem.add("N", N);
      rem.add("remainder", R.norm());
    }
    s.within("ad" + std::to_string(n) + "_remainder_slope", loglog_slope(Ns, vals), -1.3, -0.7);
  }
  s.data.push_back(rem);

  ExperimentRecord np;
  np.name = "npow_constants";
  std::vector<double> C;
  for (int N : opt.npow_N) {
    C.push_back(npow_constant(e2, 1, 0, FockSpace(2, N)));
    np.add("N", N);
    np.add("constant", C.back());
  }
  double lo = *std::min_element(C.begin(), C.end()), hi = *std::max_element(C.begin(), C.end());
  s.at_most("npow_constant_variation", hi / lo - 1.0, 0.10);
  s.data.push_back(np);
  return s;
}

CheckSuite kernel_suite(const KernelCheckOptions& opt) {
  CheckSuite s;
  s.name = "kernels";
  Timer timer(s);
  auto V = RadialPotential::soft_sphere(20.0, 0.5);
  TorusModes modes = torus_modes(opt.M);
  CVec phi = default_condensate(opt.M);
  ExperimentRecord rec;
  rec.name = "kernel_norms";
  double mono = 0.0, sub = -kInf;
  std::vector<double> eta_first, grad_first;
  for (double N : opt.N_values) {
    double prev = kInf;
    for (std::size_t k = 0; k < opt.ell_values.size(); ++k) {
      double ell = opt.ell_values[k];
      KernelBuilder kb(modes, V, solve_neumann(V, N, ell));
      CorrelationKernel K = kb.build(phi);
      double e = kb.eta_norm(phi), g = kb.grad_k_norm(phi);
      if (k > 0) mono = std::max(mono, e / prev);
      prev = e;
      double en = K.eta.norm();
      for (int n = 0; n <= 6; ++n) sub = std::max(sub, excess(kernel_powers(K, n).norm(), n == 0 ? std::sqrt(double(opt.M)) : std::pow(en, n)));
      if (k == 0) {
        eta_first.push_back(e);
        grad_first.push_back(g);
      }
      rec.add("N", N);
      rec.add("ell", ell);
      rec.add("eta_norm", e);
      rec.add("eta_mode_norm", en);
      rec.add("grad_k_norm", g);
    }
  }
  s.within("eta_ratio_under_ell_halving", mono, 0.0, 1.0 - 1e-12);
  s.at_most("submultiplicativity", sub, 1e-12);
  s.at_most("eta_norm_N_variation", rel_spread(eta_first), 0.10);
  s.within("grad_k_exponent", loglog_slope(opt.N_values, grad_first), 0.4, 0.6);
  s.data.push_back(rec);
  return s;
}

CheckSuite generator_suite(const GeneratorCheckOptions& opt) {
  CheckSuite s;
  s.name = "generator";
  Timer timer(s);
  {
    FluctuationConfig c = opt.base;
    c.M = opt.residual_M;
    c.N = opt.residual_N;
    c.phi0 = CVec();
    FluctuationModel m(c);
    auto g = assemble_generator(m, opt.t, opt.delta);
    s.at_most("decomposition_residual_M" + std::to_string(c.M) + "_N" + std::to_string(c.N),
              g.decomposition_residual, 1e-6);
    s.at_most("hermiticity_defect", g.hermiticity, 1e-6);
  }
  ExperimentRecord fb;
  fb.name = "form_bounds";
  std::vector<double> lo, hi, cm;
  double worst_res = 0.0;
  int nonfinite = 0;
  for (int N : opt.N_values) {
    FluctuationConfig c = opt.base;
    c.N = N;
    FluctuationModel m(c);
    auto g = assemble_generator(m, opt.t, opt.delta);
    auto r = generator_form_bounds(g, m);
    for (double x : {r.C_lo, r.C_hi, r.C_comm})
      if (!std::isfinite(x)) ++nonfinite;
    lo.push_back(r.C_lo);
    hi.push_back(r.C_hi);
    cm.push_back(r.C_comm);
    worst_res = std::max(worst_res, g.decomposition_residual);
    fb.add("N", N);
    fb.add("t", opt.t);
    fb.add("delta", g.delta);
    fb.add("C_lo", r.C_lo);
    fb.add("C_hi", r.C_hi);
    fb.add("C_comm", r.C_comm);
    fb.add("C_Nt_modes", g.C);
    fb.add("C_Nt_continuum", g.C_continuum);
    fb.add("residual", g.decomposition_residual);
    fb.add("hermiticity", g.hermiticity);
  }
  s.at_most("form_bound_constants_nonfinite", nonfinite, 0);
  s.at_most("decomposition_residual_sweep", worst_res, 1e-6);
  s.at_most("C_lo_N_variation", rel_spread(lo), 0.25);
  s.at_most("C_hi_N_variation", rel_spread(hi), 0.25);
  s.at_most("C_comm_N_variation", rel_spread(cm), 0.25);
  s.data.push_back(fb);

  ExperimentRecord cn;
  cn.name = "cnt_vs_gp_energy";
  std::vector<double> sup;
  for (int N : opt.cn_N) {
    FluctuationConfig c = opt.base;
    c.N = N;
    c.many_body = false;
    FluctuationModel m(c);
    ExperimentRecord r = cnt_vs_gp_energy(m, opt.cn_times);
    double w = 0.0;
    for (std::size_t i = 0; i < r.rows(); ++i) {
      for (const auto& k : r.order) cn.add(k, r.at(k)[i]);
      w = std::max(w, r.at("deviation")[i]);
    }
    sup.push_back(w);
  }
  s.at_most("cnt_deviation_N_variation", rel_spread(sup), 0.5);
  s.at_most("cnt_deviation_growth", sup.back() / sup.front(), 1.5);
  s.data.push_back(cn);
  return s;
}

CheckSuite depletion_suite(const DepletionCheckOptions& opt) {
  CheckSuite s;
  s.name = "depletion";
  Timer timer(s);
  ExperimentRecord all;
  all.name = "depletion";
  double paths = 0.0, trace = -kInf, ratio = 0.0;
  std::vector<double> last;
  for (int N : opt.N_values) {
    FluctuationConfig c = opt.base;
    c.N = N;
    FluctuationModel m(c);
    ExperimentRecord r = depletion_run(m, opt.run);
    for (std::size_t i = 0; i < r.rows(); ++i) {
      for (const auto& k : r.order) all.add(k, r.at(k)[i]);
      all.add("a_N", r.meta["a_N"].get<double>());
      all.add("b_N", r.meta["b_N"].get<double>());
      paths = std::max(paths, std::abs(r.at("depletion")[i] - r.at("depletion_U")[i]));
      trace = std::max(trace, r.at("trace_norm")[i] - r.at("trace_bound")[i]);
    }
    last.push_back(r.at("depletion").back());
  }
  for (std::size_t i = 1; i < last.size(); ++i) ratio = std::max(ratio, last[i] / last[i - 1]);
  s.at_most("path_agreement", paths, 1e-8);
  s.at_most("trace_norm_inequality", trace, 1e-12);
  if (last.size() > 1) s.at_most("depletion_ratio_under_N_doubling", ratio, 0.7);
  s.data.push_back(all);
  return s;
}

}  // namespace gpf
