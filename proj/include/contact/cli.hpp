#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "contact/experiments.hpp"
#include "contact/kernels.hpp"
#include "contact/potentials.hpp"

namespace contact {

// Shape name plus positional factory arguments, or a two-column sample file.
struct PotentialSpec {
  std::string shape = "box";
  std::vector<double> params;
  std::string file;
  double cutoff = 0.0;  // > 0 truncates to |r| <= cutoff

  Potential build() const;
};

struct GreensConfig {
  int samples = 100;
  double closed_tol = 1e-10;
  double marginal_tol = 1e-6;
  double l1_tol = 1e-6;
};

struct BoundsConfig {
  std::vector<PotentialSpec> potentials{{"box", {}, "", 0.0}, {"exponential", {}, "", 0.0}, {"cosine_box", {}, "", 0.0}};
  std::vector<double> z{1.0, 4.0};
  std::vector<double> eps{0.0, 0.1, 1.0};
  std::vector<std::string> targets{"T", "phi12", "phi1j", "phiij"};
  double factor = 1.05;
};

struct KreinConfig {
  int trials = 100;
  int max_dim = 60;
  double tol = 1e-10;
};

struct RateConfig {
  std::vector<std::string> targets{"T", "phi12", "phi1j", "phiij"};
  std::vector<double> z{2.0};
  std::vector<double> eps = dyadic_eps(1, 10);
  GridSpec grid{8.0, 0};  // n = 0: per-class default
  bool op_norm = false;
  double delta = 0.05;         // slope >= 0.9 s - delta
  double delta_coarse = 0.15;  // same for phiij
};

struct ResolventConfig {
  std::vector<double> z{4.0};
  std::vector<double> eps = dyadic_eps(3, 9);
  double slope_min = 0.8;
  // Second sweep with g_ε = g + ε^{schedule_rate}; slope expected in [schedule_lo, schedule_hi].
  double schedule_rate = 0.5;
  double schedule_lo = 0.4;
  double schedule_hi = 0.65;
  int crosscheck_n = 2047;
  double crosscheck_L = 10.0;
  std::vector<double> crosscheck_eps{0.125, 0.0625};
  double z0 = 5.0;
  double independence_tol = 1e-8;
};

struct EigenConfig {
  int n = 2048;
  double L = 10.0;
  std::vector<double> eps = dyadic_eps(3, 8);
  double tol = 5e-3;
};

struct FormsConfig {
  double mu = 0.5;
  std::vector<double> eps = dyadic_eps(2, 7);
  double slope_min = 0.45;
  double scaling_tol = 1e-8;
  std::uint64_t family_seed = 7;
};

struct RunConfig {
  std::string command = "all";
  PotentialSpec potential;
  CouplingSchedule schedule;
  GreensConfig greens;
  BoundsConfig bounds;
  KreinConfig krein;
  RateConfig rate;
  ResolventConfig resolvent;
  EigenConfig eigen;
  FormsConfig forms;
  double tolerance_scale = 1.0;  // multiplies absolute and relative tolerances, not slope thresholds
  std::string out;
  std::uint64_t seed = 7;
  int jobs = 1;

  // Throws ConfigError on out-of-range values or missing files.
  void validate() const;
};

const std::vector<std::string>& suite_names();

// Parses a YAML file into a config on top of the defaults; throws ConfigError.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& yaml_text);

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = true;
  std::string detail;
};

struct SuiteResult {
  std::string name;
  std::vector<Check> checks;
  std::vector<std::string> artifacts;
  nlohmann::json report = nlohmann::json::object();
  double seconds = 0.0;

  bool passed() const;
};

// Each suite writes its CSV artifacts into out_dir when it is non-empty.
SuiteResult greens_check(const RunConfig& cfg, const std::string& out_dir = "");
SuiteResult kernel_bounds(const RunConfig& cfg, const std::string& out_dir = "");
SuiteResult schur_check(const RunConfig& cfg, const std::string& out_dir = "");
SuiteResult krein_selftest_suite(const RunConfig& cfg, const std::string& out_dir = "");
SuiteResult rate_sweep(const RunConfig& cfg, const std::string& out_dir = "");
SuiteResult resolvent_sweep_n2(const RunConfig& cfg, const std::string& out_dir = "");
SuiteResult eigen_sweep_n2(const RunConfig& cfg, const std::string& out_dir = "");
SuiteResult forms_check(const RunConfig& cfg, const std::string& out_dir = "");

SuiteResult run_suite(const std::string& name, const RunConfig& cfg, const std::string& out_dir = "");

// Runs the selected suite (or all of them), writes artifacts and summary.json; returns the exit status.
int run(const RunConfig& cfg);

// Command-line entry point: 0 pass, 1 contract failure, 2 usage or config error.
int cli_main(int argc, char** argv);

}  // namespace contact
