// Scenario runner: every subcommand becomes a flat config, validated against its schema,
// executed, and written as CSV tables plus a JSON manifest under <output root>/<scenario>/.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

#include "gpf/checks.hpp"
#include "gpf/errors.hpp"
#include "gpf/gpdynamics.hpp"
#include "gpf/io.hpp"

#ifndef GPF_VERSION
#define GPF_VERSION "unknown"
#endif

using namespace gpf;
namespace fs = std::filesystem;

namespace {

constexpr const char* kOutputEnv = "GPF_OUTPUT_ROOT";

const std::set<std::string> kRunKeys{"run.scenario", "run.seed", "run.threads", "run.output"};
const std::set<std::string> kPotentialKeys{"potential.preset", "potential.V0", "potential.R", "potential.file"};
const std::set<std::string> kGridKeys{"grid.points", "grid.length"};
const std::set<std::string> kFluctKeys{"fluct.M", "fluct.ell", "fluct.N_list", "fluct.times", "fluct.t",
                                       "fluct.delta", "fluct.cn_N_list", "fluct.residual_M",
                                       "fluct.residual_N", "fluct.initial"};

std::set<std::string> merge(std::initializer_list<std::set<std::string>> parts) {
  std::set<std::string> out;
  for (const auto& p : parts) out.insert(p.begin(), p.end());
  return out;
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"scatter", merge({kRunKeys, kPotentialKeys, {"scatter.N", "scatter.ell", "scatter.points"}})},
      {"gp", merge({kRunKeys, kPotentialKeys, kGridKeys,
                    {"gp.dt", "gp.T", "gp.variant", "gp.a0", "gp.N", "gp.ell", "gp.sigma", "gp.momentum",
                     "gp.samples"}})},
      {"compare-gp", merge({kRunKeys, kPotentialKeys, kGridKeys,
                            {"gp.dt", "gp.T", "gp.N_list", "gp.ell", "gp.sigma", "gp.momentum"}})},
      {"fock-check", merge({kRunKeys, {"fock.M", "fock.N", "fock.trials"}})},
      {"bogoliubov-check", merge({kRunKeys, kPotentialKeys,
                                  {"bogoliubov.M", "bogoliubov.N", "bogoliubov.eta_norm", "bogoliubov.order",
                                   "bogoliubov.ray", "bogoliubov.trials", "bogoliubov.kernels_from_gp",
                                   "fluct.ell"}})},
      {"generator-check", merge({kRunKeys, kPotentialKeys, kFluctKeys})},
      {"depletion", merge({kRunKeys, kPotentialKeys, kFluctKeys})},
      {"all-regressions", kRunKeys},
  };
  return s;
}

std::string timestamp() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

RadialPotential potential_from(const Config& c, double V0, double R) {
  std::string preset = c.str("potential.preset", "soft-sphere");
  if (preset == "table-from-file" || preset == "table") return RadialPotential::from_file(c.str("potential.file"));
  V0 = c.num("potential.V0", V0);
  R = c.num("potential.R", R);
  if (preset == "soft-sphere") return RadialPotential::soft_sphere(V0, R);
  if (preset == "square-well") return RadialPotential::square_well(V0, R);
  if (preset == "zero") return RadialPotential::zero(R);
  throw ConfigError("config key potential.preset: unknown preset '" + preset + "'");
}

std::vector<int> int_list(const Config& c, const std::string& key, const std::vector<int>& fallback) {
  std::vector<double> d(fallback.begin(), fallback.end());
  std::vector<int> out;
  for (double x : c.list(key, d)) {
    if (x != std::round(x) || x < 1) throw ConfigError("config key " + key + ": expected positive integers");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

FluctuationConfig fluct_from(const Config& c) {
  FluctuationConfig f;
  f.V = potential_from(c, 20.0, 0.5);
  f.M = c.integer("fluct.M", f.M);
  f.ell = c.num("fluct.ell", f.ell);
  return f;
}

struct RunOutput {
  std::vector<CheckSuite> suites;
  std::vector<std::pair<std::string, CsvTable>> tables;  // file name, table
  nlohmann::json summary = nlohmann::json::object();
};

void add_data(RunOutput& out, const CheckSuite& s, const std::string& prefix = "") {
  for (const auto& rec : s.data) out.tables.emplace_back(prefix + rec.name + ".csv", to_table(rec));
}

RunOutput run_scatter(const Config& c) {
  RunOutput out;
  RadialPotential V = potential_from(c, 10.0, 1.0);
  int points = c.integer("scatter.points", 4097);
  bool neumann = c.has("scatter.N");
  ScatteringSolution sol = neumann ? solve_neumann(V, c.num("scatter.N", 0), c.num("scatter.ell", 0.5), points)
                                   : solve_zero_energy(V, 0.0, points);
  double a0 = V.is_zero() ? 0.0 : (neumann ? solve_zero_energy(V).a0 : sol.a0);
  ExperimentRecord prof;
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    prof.add("r", sol.r[i]);
    prof.add("f", sol.f[i]);
    prof.add("w", 1.0 - sol.f[i]);
    prof.add("u", sol.u[i]);
  }
  out.tables.emplace_back("profile.csv", to_table(prof));
  out.summary = {{"a0", a0}, {"lambda_ell", sol.lambda}, {"fit_slope", sol.fit_slope}, {"fit_rms", sol.fit_rms},
                 {"neumann", neumann}};
  CheckSuite s;
  s.name = "scatter";
  double lo = *std::min_element(sol.f.begin(), sol.f.end()), hi = *std::max_element(sol.f.begin(), sol.f.end());
  s.within("profile_min", lo, -1e-12, 1.0);
  s.within("profile_max", hi, 0.0, 1.0 + 1e-10);
  if (!neumann && !V.is_zero())
    s.at_most("a0_profile_vs_integral", std::abs(scattering_length_integral(V, sol) - a0) / a0, 1e-6);
  out.suites.push_back(std::move(s));
  return out;
}

GPState initial_gp_state(const Config& c, GPVariant variant) {
  SpatialGrid g(1, c.integer("grid.points", 256), c.num("grid.length", 32.0));
  return make_state(g, gaussian(g, c.num("gp.sigma", 1.0), c.num("gp.momentum", 0.5)), variant);
}

RunOutput run_gp(const Config& c) {
  RunOutput out;
  std::string variant = c.str("gp.variant", "gp");
  if (variant != "gp" && variant != "modified")
    throw ConfigError("config key gp.variant: expected gp or modified");
  RadialPotential V = potential_from(c, 10.0, 1.0);
  GPState s = initial_gp_state(c, variant == "gp" ? GPVariant::gp : GPVariant::modified);
  if (variant == "gp") {
    s.a0 = c.num("gp.a0", V.is_zero() ? 0.0 : solve_zero_energy(V).a0);
  } else {
    double N = c.num("gp.N", 50.0);
    s.kernel_hat = kernel_spectrum(s.grid, V, solve_neumann(V, N, c.num("gp.ell", 0.5)), N);
  }
  double dt = c.num("gp.dt", 1e-3), T = c.num("gp.T", 1.0);
  int samples = c.integer("gp.samples", 20);
  if (dt <= 0 || T <= 0 || samples < 1) throw ConfigError("config keys gp.dt, gp.T, gp.samples must be positive");
  int steps = static_cast<int>(std::lround(T / dt / samples));
  if (steps < 1) throw ConfigError("config key gp.samples: more samples than steps");
  ExperimentRecord rec;
  double e0 = gp_energy(s), drift = 0.0, mdrift = 0.0;
  for (int k = 0; k <= samples; ++k) {
    if (k) s = evolve(s, dt, steps);
    double e = gp_energy(s), m = mass(s);
    rec.add("t", k * steps * dt);
    rec.add("mass", m);
    rec.add("energy", e);
    drift = std::max(drift, std::abs(e - e0));
    mdrift = std::max(mdrift, std::abs(m - 1.0));
  }
  out.tables.emplace_back("trajectory.csv", to_table(rec));
  CheckSuite cs;
  cs.name = "gp";
  cs.at_most("mass_drift", mdrift, 1e-9);
  cs.at_most("energy_drift", drift, 1e-6);
  out.suites.push_back(std::move(cs));
  return out;
}

RunOutput run_compare_gp(const Config& c) {
  RunOutput out;
  RadialPotential V = potential_from(c, 10.0, 1.0);
  GPState s = initial_gp_state(c, GPVariant::gp);
  CompareOptions opt;
  opt.dt = c.num("gp.dt", opt.dt);
  opt.ell = c.num("gp.ell", opt.ell);
  std::vector<double> Ns = c.list("gp.N_list", {25, 50, 100, 200});
  ExperimentRecord rec = compare_dynamics(s, V, V.is_zero() ? 0.0 : solve_zero_energy(V).a0, Ns, c.num("gp.T", 1.0), opt);
  out.tables.emplace_back("compare.csv", to_table(rec));
  CheckSuite cs;
  cs.name = "compare_gp";
  if (Ns.size() > 1 && !V.is_zero())
    cs.within("sup_difference_slope", loglog_slope(rec.at("N"), rec.at("sup_diff")), -1.3, -0.7);
  out.suites.push_back(std::move(cs));
  return out;
}

RunOutput run_fock(const Config& c, std::uint64_t seed) {
  RunOutput out;
  FockCheckOptions o;
  o.M = c.integer("fock.M", 3);
  o.N = c.integer("fock.N", 4);
  o.trials = c.integer("fock.trials", 50);
  o.seed = seed;
  out.suites.push_back(fock_suite(o));
  return out;
}

RunOutput run_bogoliubov(const Config& c, std::uint64_t seed) {
  RunOutput out;
  BogoliubovCheckOptions o;
  o.M = c.integer("bogoliubov.M", o.M);
  o.N = c.integer("bogoliubov.N", o.N);
  o.eta_norm = c.num("bogoliubov.eta_norm", o.eta_norm);
  o.order = c.integer("bogoliubov.order", o.order);
  o.ray = c.list("bogoliubov.ray", o.ray);
  o.trials = c.integer("bogoliubov.trials", o.trials);
  o.seed = seed;
  if (c.flag("bogoliubov.kernels_from_gp", false)) {
    FluctuationConfig f;
    f.V = potential_from(c, 20.0, 0.5);
    f.M = o.M;
    f.N = o.N;
    f.ell = c.num("fluct.ell", f.ell);
    f.many_body = false;
    FluctuationModel m(f);
    o.eta = m.eta(m.phi0());
    out.summary["kernel_norm"] = o.eta->norm();
  }
  CheckSuite s = bogoliubov_suite(o);
  add_data(out, s);
  out.suites.push_back(std::move(s));
  return out;
}

RunOutput run_generator(const Config& c) {
  RunOutput out;
  GeneratorCheckOptions o;
  o.base = fluct_from(c);
  o.N_values = int_list(c, "fluct.N_list", o.N_values);
  o.cn_N = int_list(c, "fluct.cn_N_list", o.cn_N);
  o.cn_times = c.list("fluct.times", o.cn_times);
  o.t = c.num("fluct.t", o.t);
  o.delta = c.num("fluct.delta", o.delta);
  o.residual_M = c.integer("fluct.residual_M", o.residual_M);
  o.residual_N = c.integer("fluct.residual_N", o.residual_N);
  CheckSuite s = generator_suite(o);
  add_data(out, s);
  out.suites.push_back(std::move(s));
  return out;
}

RunOutput run_depletion(const Config& c) {
  RunOutput out;
  DepletionCheckOptions o;
  o.base = fluct_from(c);
  o.N_values = int_list(c, "fluct.N_list", o.N_values);
  o.run.times = c.list("fluct.times", o.run.times);
  std::string init = c.str("fluct.initial", "correlated-vacuum");
  if (init == "product") o.run.initial = InitialState::product;
  else if (init != "correlated-vacuum") throw ConfigError("config key fluct.initial: expected correlated-vacuum or product");
  CheckSuite s = depletion_suite(o);
  add_data(out, s);
  out.suites.push_back(std::move(s));
  return out;
}

RunOutput run_all(std::uint64_t seed) {
  RunOutput out;
  auto take = [&](CheckSuite s) {
    add_data(out, s, s.name + "_");
    out.suites.push_back(std::move(s));
  };
  take(scattering_suite());
  take(gp_suite());
  for (auto [M, N] : {std::pair{2, 4}, {3, 4}, {4, 3}}) take(fock_suite({M, N, 50, seed}));
  for (auto [M, N] : {std::pair{2, 3}, {3, 4}, {4, 4}, {5, 5}}) take(excitation_suite({M, N, 20, seed}));
  BogoliubovCheckOptions b;
  b.seed = seed;
  take(bogoliubov_suite(b));
  take(kernel_suite());
  take(generator_suite());
  take(depletion_suite());
  return out;
}

struct Globals {
  std::uint64_t seed = 12345;
  int threads = 1;
  std::string out;
  std::string config;
};

// returns the process exit code: 0 all checks pass, 1 a check failed, 2 invalid config, 3 runtime error
int run(Config cfg, const Globals& g) {
  auto t0 = std::chrono::steady_clock::now();
  nlohmann::json man;
  man["code_version"] = GPF_VERSION;
  man["started"] = timestamp();
  fs::path root = g.out.empty() ? fs::path(cfg.str("run.output", std::getenv(kOutputEnv) ? std::getenv(kOutputEnv) : "gpf-output"))
                                : fs::path(g.out);
  fs::path dir = root / cfg.str("run.scenario", "invalid");
  int code = 0;
  RunOutput out;
  try {
    std::string scenario = cfg.str("run.scenario");
    auto it = schema().find(scenario);
    if (it == schema().end()) throw ConfigError("config key run.scenario: unknown scenario '" + scenario + "'");
    cfg.require_known(it->second);
    std::uint64_t seed = cfg.has("run.seed") ? static_cast<std::uint64_t>(cfg.integer("run.seed", 0)) : g.seed;
    int threads = cfg.integer("run.threads", g.threads);
    if (threads < 1) throw ConfigError("config key run.threads: must be at least 1");
    man["seed"] = seed;
    man["threads"] = threads;
    if (scenario == "scatter") out = run_scatter(cfg);
    else if (scenario == "gp") out = run_gp(cfg);
    else if (scenario == "compare-gp") out = run_compare_gp(cfg);
    else if (scenario == "fock-check") out = run_fock(cfg, seed);
    else if (scenario == "bogoliubov-check") out = run_bogoliubov(cfg, seed);
    else if (scenario == "generator-check") out = run_generator(cfg);
    else if (scenario == "depletion") out = run_depletion(cfg);
    else out = run_all(seed);
    bool ok = true;
    for (const auto& s : out.suites) ok = ok && s.passed();
    code = ok ? 0 : 1;
    man["status"] = ok ? "pass" : "fail";
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    man["status"] = "invalid-config";
    man["error"] = e.what();
    code = 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    man["status"] = "error";
    man["error"] = e.what();
    code = 3;
  }
  man["config"] = cfg.to_json();
  man["summary"] = out.summary;
  man["suites"] = nlohmann::json::array();
  std::vector<const CheckSuite*> ptrs;
  std::size_t n_checks = 0;
  for (const auto& s : out.suites) {
    man["suites"].push_back(check_json(s));
    ptrs.push_back(&s);
    n_checks += s.checks.size();
  }
  man["check_count"] = n_checks;
  man["outputs"] = nlohmann::json::array();
  try {
    if (!ptrs.empty()) {
      write_csv(dir / "checks.csv", check_table(ptrs));
      man["outputs"].push_back("checks.csv");
    }
    for (const auto& [name, table] : out.tables) {
      write_csv(dir / name, table);
      man["outputs"].push_back(name);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    man["status"] = "error";
    man["error"] = e.what();
    code = 3;
  }
  man["finished"] = timestamp();
  man["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    write_json_atomic(dir / "manifest.json", man);
  } catch (const std::exception& e) {
    std::cerr << "error: cannot write manifest: " << e.what() << "\n";
    return 3;
  }
  for (const auto& s : out.suites) {
    std::size_t pass = std::count_if(s.checks.begin(), s.checks.end(), [](const CheckResult& c) { return c.passed; });
    std::cout << s.name << ": " << pass << "/" << s.checks.size() << " checks pass";
    if (s.seconds > 0) std::cout << " (" << s.seconds << " s)";
    std::cout << "\n";
    for (const auto& c : s.checks)
      if (!c.passed) std::cout << "  FAIL " << c.name << " = " << c.value << "\n";
  }
  std::cout << "manifest: " << (dir / "manifest.json").string() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gross-Pitaevskii fluctuation experiments"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "seed for randomized check instances")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads (recorded; runs are serial)")->capture_default_str();
  app.add_option("--out", g.out, std::string("output root (default $") + kOutputEnv + " or ./gpf-output)");
  app.add_option("--config", g.config, "config file with block.key = value lines");

  // flag -> config key, applied after parsing only when given
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::map<std::string, CLI::Option*>> options;
  using Flags = std::vector<std::pair<std::string, std::string>>;
  auto sub = [&](const std::string& name, const std::string& help, const Flags& flags) {
    CLI::App* s = app.add_subcommand(name, help);
    for (const auto& [flag, key] : flags) options[name][key] = s->add_option("--" + flag, values[name][key], key);
    return s;
  };
  auto with = [](Flags a, const Flags& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  const Flags pot{{"potential", "potential.preset"}, {"V0", "potential.V0"}, {"R", "potential.R"},
                  {"potential-file", "potential.file"}};
  const Flags fl{{"M", "fluct.M"}, {"ell", "fluct.ell"}, {"N-list", "fluct.N_list"}, {"times", "fluct.times"}};
  sub("scatter", "scattering solutions", with(pot, {{"N", "scatter.N"}, {"ell", "scatter.ell"}, {"points", "scatter.points"}}));
  sub("gp", "GP or modified GP evolution",
        with(pot, {{"grid-points", "grid.points"}, {"grid-length", "grid.length"}, {"dt", "gp.dt"}, {"T", "gp.T"},
                   {"variant", "gp.variant"}, {"a0", "gp.a0"}, {"N", "gp.N"}, {"ell", "gp.ell"}, {"sigma", "gp.sigma"},
                   {"momentum", "gp.momentum"}, {"samples", "gp.samples"}}));
  sub("compare-gp", "GP vs modified GP over an N sweep",
        with(pot, {{"grid-points", "grid.points"}, {"grid-length", "grid.length"}, {"dt", "gp.dt"}, {"T", "gp.T"},
                   {"N-list", "gp.N_list"}, {"ell", "gp.ell"}, {"sigma", "gp.sigma"}, {"momentum", "gp.momentum"}}));
  sub("fock-check", "Fock-space identities and bounds", {{"M", "fock.M"}, {"N", "fock.N"}, {"trials", "fock.trials"}});
  CLI::App* bog = sub("bogoliubov-check", "generalized Bogoliubov transformations",
                        with(pot, {{"M", "bogoliubov.M"}, {"N", "bogoliubov.N"}, {"eta-norm", "bogoliubov.eta_norm"},
                                   {"order", "bogoliubov.order"}, {"ray", "bogoliubov.ray"},
                                   {"trials", "bogoliubov.trials"}, {"ell", "fluct.ell"}}));
  bool kernels_from_gp = false;
  bog->add_flag("--kernels-from-gp", kernels_from_gp, "use the correlation kernel of the default condensate");
  sub("generator-check", "generator decomposition and form bounds",
        with(with(pot, fl), {{"t", "fluct.t"}, {"delta", "fluct.delta"}, {"cn-N-list", "fluct.cn_N_list"},
                   {"residual-M", "fluct.residual_M"}, {"residual-N", "fluct.residual_N"}}));
  sub("depletion", "condensate depletion", with(pot, with(fl, {{"initial", "fluct.initial"}})));
  sub("all-regressions", "every check suite at desk scale", {});
  sub("run", "run the scenario named by run.scenario in --config", {});

  CLI11_PARSE(app, argc, argv);

  Config cfg;
  std::string name = app.get_subcommands().front()->get_name();
  try {
    if (!g.config.empty()) cfg = Config::load(g.config);
    if (name != "run") {
      cfg.set("run.scenario", name);
      for (const auto& [key, opt] : options[name])
        if (opt->count()) cfg.set(key, values[name][key]);
      if (name == "bogoliubov-check" && kernels_from_gp) cfg.set("bogoliubov.kernels_from_gp", "true");
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  return run(cfg, g);
}
