#pragma once
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gpf/fluctuation.hpp"
#include "gpf/io.hpp"

namespace gpf {

struct CheckResult {
  std::string name;
  double value = 0.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = 0.0;
  bool passed = false;
};

// Named pass/fail checks plus the data series they were computed from.
struct CheckSuite {
  std::string name;
  std::vector<CheckResult> checks;
  std::vector<ExperimentRecord> data;
  double seconds = 0.0;

  void at_most(const std::string& check, double value, double tol);
  void within(const std::string& check, double value, double lo, double hi);
  bool passed() const;
  const CheckResult& get(const std::string& check) const;
};

// suite, check, value, lower, upper, passed
CsvTable check_table(const std::vector<const CheckSuite*>& suites);
nlohmann::json check_json(const CheckSuite& s);

struct ScatteringCheckOptions {
  std::vector<double> well_depths{1.0, 10.0, 40.0};
  std::vector<double> N_values{50, 100, 200, 400};
};
CheckSuite scattering_suite(const ScatteringCheckOptions& opt = {});

struct GPCheckOptions {
  std::vector<double> N_values{25, 50, 100, 200};
  double T = 1.0;
};
CheckSuite gp_suite(const GPCheckOptions& opt = {});

struct FockCheckOptions {
  int M = 3;
  int N = 4;
  int trials = 50;
  std::uint64_t seed = 12345;
};
CheckSuite fock_suite(const FockCheckOptions& opt);

struct ExcitationCheckOptions {
  int M = 5;
  int N = 5;
  int trials = 20;
  std::uint64_t seed = 12345;
};
CheckSuite excitation_suite(const ExcitationCheckOptions& opt);

struct BogoliubovCheckOptions {
  int M = 3;
  int N = 4;
  double eta_norm = 0.2;
  int order = 12;
  std::vector<double> ray{0.05, 0.1, 0.15, 0.2, 0.25};
  std::vector<int> npow_N{4, 8, 16};
  int trials = 20;
  std::uint64_t seed = 12345;
  std::optional<CMat> eta;  // fixed kernel (e.g. from the GP condensate); random otherwise
};
CheckSuite bogoliubov_suite(const BogoliubovCheckOptions& opt);

struct KernelCheckOptions {
  int M = 7;
  std::vector<double> N_values{8, 16, 32};
  std::vector<double> ell_values{0.5, 0.25, 0.125};
};
CheckSuite kernel_suite(const KernelCheckOptions& opt = {});

struct GeneratorCheckOptions {
  FluctuationConfig base;             // potential, ell, M for the sweep
  int residual_M = 4, residual_N = 3;
  std::vector<int> N_values{3, 4, 5};
  double t = 0.2;
  double delta = 0.0;                 // 0 selects the dynamical-time default
  std::vector<int> cn_N{16, 32, 64};
  std::vector<double> cn_times{0.0, 0.25, 0.5, 0.75, 1.0};
};
CheckSuite generator_suite(const GeneratorCheckOptions& opt = {});

struct DepletionCheckOptions {
  FluctuationConfig base;
  std::vector<int> N_values{3, 6};
  DepletionOptions run;
};
CheckSuite depletion_suite(const DepletionCheckOptions& opt = {});

}  // namespace gpf
