#include "contact/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>

#include <CLI11.hpp>
#include <yaml-cpp/yaml.h>

#include "contact/errors.hpp"
#include "contact/forms.hpp"
#include "contact/greens.hpp"
#include "contact/io.hpp"
#include "contact/krein.hpp"
#include "contact/pair.hpp"

namespace contact {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- configuration

Potential PotentialSpec::build() const {
  auto arg = [&](std::size_t i, double def) { return i < params.size() ? params[i] : def; };
  Potential V = Potential::zero();
  if (!file.empty()) {
    V = Potential::from_file(file);
  } else if (shape == "zero") {
    V = Potential::zero();
  } else if (shape == "box") {
    V = Potential::box(arg(0, 1.0), arg(1, 0.5));
  } else if (shape == "triangle") {
    V = Potential::triangle(arg(0, 1.0), arg(1, 1.0));
  } else if (shape == "exponential") {
    V = Potential::exponential(arg(0, 1.0), arg(1, 1.0));
  } else if (shape == "gaussian") {
    V = Potential::gaussian(arg(0, 1.0), arg(1, 1.0));
  } else if (shape == "cosine_box") {
    V = Potential::cosine_box(arg(0, 1.0));
  } else if (shape == "heavy_tail") {
    V = Potential::heavy_tail(arg(0, 2.2), arg(1, 1.0));
  } else {
    throw ConfigError("unknown potential shape: " + shape);
  }
  return cutoff > 0.0 ? V.cut(cutoff) : V;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"greens-check",       "kernel-bounds",   "schur-check",
                                              "krein-selftest",     "rate-sweep",      "resolvent-sweep-n2",
                                              "eigen-sweep-n2",     "forms-check"};
  return names;
}

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

void check_eps_list(const std::vector<double>& eps, const std::string& key, bool allow_zero) {
  require(!eps.empty(), key + ": empty list");
  for (double e : eps) require(std::isfinite(e) && (allow_zero ? e >= 0.0 : e > 0.0), key + ": out of range");
}

void check_kernel_target(const std::string& t, const std::string& key) {
  static const std::set<std::string> ok{"T", "phi12", "phi1j", "phi2j", "phiij"};
  require(ok.count(t) == 1, key + ": unknown kernel target " + t);
}

void validate_potential(const PotentialSpec& p, const std::string& key) {
  if (!p.file.empty()) {
    require(fs::is_regular_file(p.file), key + ": file not found: " + p.file);
    return;
  }
  static const std::set<std::string> shapes{"zero",     "box",        "triangle",  "exponential",
                                            "gaussian", "cosine_box", "heavy_tail"};
  require(shapes.count(p.shape) == 1, key + ": unknown shape " + p.shape);
  require(p.cutoff >= 0.0, key + ".cutoff: must be nonnegative");
  for (double v : p.params) require(std::isfinite(v), key + ".params: non-finite value");
  try {
    p.build();
  } catch (const Error& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  require(command == "all" || std::count(suite_names().begin(), suite_names().end(), command) == 1,
          "unknown command: " + command);
  validate_potential(potential, "potential");
  require(std::isfinite(schedule.g) && std::isfinite(schedule.c) && std::isfinite(schedule.s_g),
          "schedule: non-finite value");
  require(tolerance_scale > 0.0 && std::isfinite(tolerance_scale), "tolerance_scale: must be positive");
  require(jobs >= 1 && jobs <= 256, "jobs: must be in [1, 256]");

  require(greens.samples >= 1 && greens.samples <= 100000, "greens.samples: out of range");
  require(greens.closed_tol > 0.0 && greens.marginal_tol > 0.0 && greens.l1_tol > 0.0, "greens: tolerances must be positive");

  for (std::size_t i = 0; i < bounds.potentials.size(); ++i)
    validate_potential(bounds.potentials[i], "bounds.potentials[" + std::to_string(i) + "]");
  require(!bounds.potentials.empty(), "bounds.potentials: empty list");
  check_eps_list(bounds.z, "bounds.z", false);
  check_eps_list(bounds.eps, "bounds.eps", true);
  for (const auto& t : bounds.targets) check_kernel_target(t, "bounds.targets");
  require(bounds.factor >= 1.0, "bounds.factor: must be at least 1");

  require(krein.trials >= 1 && krein.max_dim >= 2 && krein.max_dim <= 2000, "krein: trials/max_dim out of range");
  require(krein.tol > 0.0, "krein.tol: must be positive");

  require(!rate.targets.empty(), "rate.targets: empty list");
  for (const auto& t : rate.targets) check_kernel_target(t, "rate.targets");
  check_eps_list(rate.z, "rate.z", false);
  check_eps_list(rate.eps, "rate.eps", false);
  require(rate.eps.size() >= 4, "rate.eps: need at least 4 values");
  require(rate.grid.n == 0 || (rate.grid.n >= 8 && rate.grid.L > 0.0), "rate.grid: n >= 8 and L > 0 required");

  check_eps_list(resolvent.z, "resolvent.z", false);
  check_eps_list(resolvent.eps, "resolvent.eps", false);
  require(resolvent.eps.size() >= 4, "resolvent.eps: need at least 4 values");
  require(resolvent.schedule_rate > 0.0, "resolvent.schedule_rate: must be positive");
  require(resolvent.crosscheck_n >= 15 && resolvent.crosscheck_L > 0.0, "resolvent.crosscheck: mesh out of range");
  check_eps_list(resolvent.crosscheck_eps, "resolvent.crosscheck_eps", false);
  require(resolvent.z0 > 0.0, "resolvent.z0: must be positive");
  require(resolvent.independence_tol > 0.0, "resolvent.independence_tol: must be positive");

  require(eigen.n >= 15 && eigen.L > 0.0, "eigen: mesh out of range");
  check_eps_list(eigen.eps, "eigen.eps", false);
  require(eigen.tol > 0.0, "eigen.tol: must be positive");

  require(forms.mu > 0.0, "forms.mu: must be positive");
  check_eps_list(forms.eps, "forms.eps", false);
  require(forms.eps.size() >= 4, "forms.eps: need at least 4 values");
  require(forms.scaling_tol > 0.0, "forms.scaling_tol: must be positive");

  for (const auto* list : {&rate.eps, &resolvent.eps, &eigen.eps, &forms.eps})
    for (std::size_t i = 1; i < list->size(); ++i) require((*list)[i] < (*list)[i - 1], "ε lists must be strictly decreasing");
}

// ---------------------------------------------------------------- YAML

namespace {

void known_keys(const YAML::Node& n, const std::set<std::string>& keys, const std::string& where) {
  require(n.IsMap(), where + ": expected a mapping");
  for (const auto& kv : n) {
    const auto k = kv.first.as<std::string>();
    require(keys.count(k) == 1, where + ": unknown key " + k);
  }
}

template <class T>
void read(const YAML::Node& n, const char* key, T& out, const std::string& where) {
  if (!n[key]) return;
  try {
    out = n[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

// A list of numbers, or {first, last} for 2^-first ... 2^-last.
void read_eps(const YAML::Node& n, const char* key, std::vector<double>& out, const std::string& where) {
  if (!n[key]) return;
  const YAML::Node e = n[key];
  if (e.IsMap()) {
    known_keys(e, {"first", "last"}, where + "." + key);
    int a = 1, b = 10;
    read(e, "first", a, where + "." + key);
    read(e, "last", b, where + "." + key);
    require(a <= b && a >= -20 && b <= 60, where + "." + key + ": need first <= last");
    out = dyadic_eps(a, b);
    return;
  }
  read(n, key, out, where);
}

PotentialSpec read_potential(const YAML::Node& n, const std::string& where) {
  PotentialSpec p;
  if (n.IsScalar()) {
    p.shape = n.as<std::string>();
    return p;
  }
  known_keys(n, {"shape", "params", "file", "cutoff"}, where);
  read(n, "shape", p.shape, where);
  read(n, "params", p.params, where);
  read(n, "file", p.file, where);
  read(n, "cutoff", p.cutoff, where);
  return p;
}

RunConfig from_yaml(const YAML::Node& root) {
  RunConfig c;
  if (!root || root.IsNull()) return c;
  known_keys(root,
             {"command", "potential", "schedule", "greens", "bounds", "krein", "rate", "resolvent", "eigen", "forms",
              "tolerance_scale", "out", "seed", "jobs"},
             "config");
  read(root, "command", c.command, "config");
  read(root, "tolerance_scale", c.tolerance_scale, "config");
  read(root, "out", c.out, "config");
  read(root, "seed", c.seed, "config");
  read(root, "jobs", c.jobs, "config");
  if (root["potential"]) c.potential = read_potential(root["potential"], "potential");
  if (const auto s = root["schedule"]) {
    known_keys(s, {"g", "c", "s_g"}, "schedule");
    read(s, "g", c.schedule.g, "schedule");
    read(s, "c", c.schedule.c, "schedule");
    read(s, "s_g", c.schedule.s_g, "schedule");
  }
  if (const auto s = root["greens"]) {
    known_keys(s, {"samples", "closed_tol", "marginal_tol", "l1_tol"}, "greens");
    read(s, "samples", c.greens.samples, "greens");
    read(s, "closed_tol", c.greens.closed_tol, "greens");
    read(s, "marginal_tol", c.greens.marginal_tol, "greens");
    read(s, "l1_tol", c.greens.l1_tol, "greens");
  }
  if (const auto s = root["bounds"]) {
    known_keys(s, {"potentials", "z", "eps", "targets", "factor"}, "bounds");
    if (s["potentials"]) {
      require(s["potentials"].IsSequence(), "bounds.potentials: expected a list");
      c.bounds.potentials.clear();
      for (std::size_t i = 0; i < s["potentials"].size(); ++i)
        c.bounds.potentials.push_back(read_potential(s["potentials"][i], "bounds.potentials"));
    }
    read(s, "z", c.bounds.z, "bounds");
    read_eps(s, "eps", c.bounds.eps, "bounds");
    read(s, "targets", c.bounds.targets, "bounds");
    read(s, "factor", c.bounds.factor, "bounds");
  }
  if (const auto s = root["krein"]) {
    known_keys(s, {"trials", "max_dim", "tol"}, "krein");
    read(s, "trials", c.krein.trials, "krein");
    read(s, "max_dim", c.krein.max_dim, "krein");
    read(s, "tol", c.krein.tol, "krein");
  }
  if (const auto s = root["rate"]) {
    known_keys(s, {"targets", "target", "z", "eps", "grid", "op_norm", "delta", "delta_coarse"}, "rate");
    read(s, "targets", c.rate.targets, "rate");
    if (s["target"]) c.rate.targets = {s["target"].as<std::string>()};
    read(s, "z", c.rate.z, "rate");
    read_eps(s, "eps", c.rate.eps, "rate");
    if (const auto g = s["grid"]) {
      known_keys(g, {"L", "n", "aux_order", "aux_nodes"}, "rate.grid");
      read(g, "L", c.rate.grid.L, "rate.grid");
      read(g, "n", c.rate.grid.n, "rate.grid");
      read(g, "aux_order", c.rate.grid.aux_order, "rate.grid");
      read(g, "aux_nodes", c.rate.grid.aux_nodes, "rate.grid");
    }
    read(s, "op_norm", c.rate.op_norm, "rate");
    read(s, "delta", c.rate.delta, "rate");
    read(s, "delta_coarse", c.rate.delta_coarse, "rate");
  }
  if (const auto s = root["resolvent"]) {
    known_keys(s,
               {"z", "eps", "slope_min", "schedule_rate", "schedule_lo", "schedule_hi", "crosscheck_n", "crosscheck_L",
                "crosscheck_eps", "z0", "independence_tol"},
               "resolvent");
    read(s, "z", c.resolvent.z, "resolvent");
    read_eps(s, "eps", c.resolvent.eps, "resolvent");
    read(s, "slope_min", c.resolvent.slope_min, "resolvent");
    read(s, "schedule_rate", c.resolvent.schedule_rate, "resolvent");
    read(s, "schedule_lo", c.resolvent.schedule_lo, "resolvent");
    read(s, "schedule_hi", c.resolvent.schedule_hi, "resolvent");
    read(s, "crosscheck_n", c.resolvent.crosscheck_n, "resolvent");
    read(s, "crosscheck_L", c.resolvent.crosscheck_L, "resolvent");
    read_eps(s, "crosscheck_eps", c.resolvent.crosscheck_eps, "resolvent");
    read(s, "z0", c.resolvent.z0, "resolvent");
    read(s, "independence_tol", c.resolvent.independence_tol, "resolvent");
  }
  if (const auto s = root["eigen"]) {
    known_keys(s, {"n", "L", "eps", "tol"}, "eigen");
    read(s, "n", c.eigen.n, "eigen");
    read(s, "L", c.eigen.L, "eigen");
    read_eps(s, "eps", c.eigen.eps, "eigen");
    read(s, "tol", c.eigen.tol, "eigen");
  }
  if (const auto s = root["forms"]) {
    known_keys(s, {"mu", "eps", "slope_min", "scaling_tol", "family_seed"}, "forms");
    read(s, "mu", c.forms.mu, "forms");
    read_eps(s, "eps", c.forms.eps, "forms");
    read(s, "slope_min", c.forms.slope_min, "forms");
    read(s, "scaling_tol", c.forms.scaling_tol, "forms");
    read(s, "family_seed", c.forms.family_seed, "forms");
  }
  return c;
}

}  // namespace

RunConfig parse_config(const std::string& yaml_text) {
  try {
    return from_yaml(YAML::Load(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

RunConfig load_config(const std::string& path) {
  if (!fs::is_regular_file(path)) throw ConfigError("config file not found: " + path);
  try {
    return from_yaml(YAML::LoadFile(path));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

// ---------------------------------------------------------------- suites

bool SuiteResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

using Clock = std::chrono::steady_clock;

std::string artifact(const std::string& dir, const std::string& name) {
  return dir.empty() ? std::string() : (fs::path(dir) / name).string();
}

Check upper(std::string name, double value, double threshold, std::string detail = "") {
  return {std::move(name), value, threshold, value <= threshold, std::move(detail)};
}

Check lower(std::string name, double value, double threshold, std::string detail = "") {
  return {std::move(name), value, threshold, value >= threshold, std::move(detail)};
}

Check failure(std::string name, const std::exception& e) { return {std::move(name), kNaN, kNaN, false, e.what()}; }

std::string fmt(double x) { return format_double(x); }

json fit_json(const RateFitReport& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2},
          {"s_theory", f.s_theory}, {"tail", f.tail},      {"converging", f.converging}};
}

double green_value(int d, double z, double r) {
  return d == 1 || d == 3 ? green_closed(d, z, r) : green_quad(GreenParams{d, z}, r);
}

}  // namespace

SuiteResult greens_check(const RunConfig& cfg, const std::string& out_dir) {
  SuiteResult res;
  res.name = "greens-check";
  const double ts = cfg.tolerance_scale;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int ns = cfg.greens.samples;
  std::vector<double> zs(ns), rs(ns), ux(ns * 3);
  for (int k = 0; k < ns; ++k) {
    zs[k] = std::exp(std::log(0.25) + U(rng) * std::log(32.0));  // [0.25, 8]
    rs[k] = std::exp(std::log(0.01) + U(rng) * std::log(1000.0));  // [0.01, 10]
    for (int a = 0; a < 3; ++a) ux[3 * k + a] = U(rng) * 2.0 - 1.0;
  }
  static const std::pair<int, int> pairs[] = {{2, 1}, {3, 1}, {3, 2}, {4, 1}, {4, 2}, {4, 3}};

  std::unique_ptr<CsvWriter> csv;
  if (!out_dir.empty()) {
    csv = std::make_unique<CsvWriter>(artifact(out_dir, "greens.csv"),
                                      std::vector<std::string>{"sample", "z", "r", "rel_err_d1", "rel_err_d3", "d",
                                                               "d1", "marginal", "reference", "marginal_rel_err",
                                                               "l1_z_minus_1_max", "monotone"});
    res.artifacts.push_back("greens.csv");
  }
  double e1 = 0.0, e3 = 0.0, em = 0.0, el1 = 0.0, l1_over = 0.0;
  int mono_fail = 0;
  std::vector<std::vector<double>> l1_cache(ns);
  for (int k = 0; k < ns; ++k) {
    const double z = zs[k], r = rs[k];
    const double a1 = std::abs(green_quad(GreenParams{1, z}, r) / green_closed(1, z, r) - 1.0);
    const double a3 = std::abs(green_quad(GreenParams{3, z}, r) / green_closed(3, z, r) - 1.0);
    e1 = std::max(e1, a1);
    e3 = std::max(e3, a3);

    const auto [d, d1] = pairs[k % 6];
    // marginal point of length min(r, 4) along a sampled direction
    std::vector<double> x1(d1);
    double nrm = 0.0;
    for (int a = 0; a < d1; ++a) {
      x1[a] = ux[3 * k + a];
      nrm += x1[a] * x1[a];
    }
    nrm = std::sqrt(std::max(nrm, 1e-24));
    const double len = std::min(std::max(r, 0.05), 4.0);
    for (auto& v : x1) v *= len / nrm;
    const double marg = green_partial_integral(d, d1, z, x1);
    const double ref = green_value(d1, z, euclidean_norm(x1));
    const double am = std::abs(marg / ref - 1.0);
    em = std::max(em, am);

    double l1dev = 0.0;
    bool mono = true;
    for (int dd = 1; dd <= 4; ++dd) {
      const double l1 = green_l1(dd, z);
      l1dev = std::max(l1dev, std::abs(l1 * z - 1.0));
      l1_over = std::max(l1_over, l1 * z - 1.0);
      const double g0 = green_value(dd, z, r);
      mono = mono && g0 > green_value(dd, z, 1.1 * r) && g0 > green_value(dd, 1.1 * z, r);
    }
    el1 = std::max(el1, l1dev);
    if (!mono) ++mono_fail;
    if (csv)
      csv->row({std::to_string(k), fmt(z), fmt(r), fmt(a1), fmt(a3), std::to_string(d), std::to_string(d1), fmt(marg),
                fmt(ref), fmt(am), fmt(l1dev), mono ? "1" : "0"});
  }
  res.checks.push_back(upper("quad_vs_closed_d1_max_rel", e1, cfg.greens.closed_tol * ts));
  res.checks.push_back(upper("quad_vs_closed_d3_max_rel", e3, cfg.greens.closed_tol * ts));
  res.checks.push_back(upper("marginal_identity_max_rel", em, cfg.greens.marginal_tol * ts));
  res.checks.push_back(upper("l1_bound_excess", l1_over, cfg.greens.l1_tol * ts, "max of z‖G‖_1 - 1"));
  res.checks.push_back(upper("l1_equality_max_dev", el1, cfg.greens.l1_tol * ts));
  res.checks.push_back(upper("monotonicity_failures", mono_fail, 0.0, "strict decrease in |x| and z, d = 1..4"));
  res.report = {{"samples", ns}};
  return res;
}

SuiteResult kernel_bounds(const RunConfig& cfg, const std::string& out_dir) {
  SuiteResult res;
  res.name = "kernel-bounds";
  const double factor = 1.0 + (cfg.bounds.factor - 1.0) * cfg.tolerance_scale;
  std::unique_ptr<CsvWriter> csv;
  if (!out_dir.empty()) {
    csv = std::make_unique<CsvWriter>(artifact(out_dir, "kernel_bounds.csv"),
                                      std::vector<std::string>{"potential", "target", "z", "eps", "rows", "cols",
                                                               "op_norm", "hs_norm", "bound", "ratio"});
    res.artifacts.push_back("kernel_bounds.csv");
  }
  double worst = 0.0;
  for (const auto& ps : cfg.bounds.potentials) {
    const Potential V = ps.build();
    for (double z : cfg.bounds.z)
      for (double e : cfg.bounds.eps)
        for (const auto& t : cfg.bounds.targets) {
          const KernelClass cls = kernel_class_from_string(t);
          const std::string name = t + "/" + V.name() + "/z=" + fmt(z) + "/eps=" + fmt(e);
          try {
            const GridSpec g = default_grid(cls);
            const auto [tg, sg] = make_grids(cls, V, g);
            DiscretizeOptions o;
            o.jobs = cfg.jobs;
            o.core_radius = core_radius(cls, g);
            const KernelOperator K = discretize({cls, e, z, 0.0, V}, tg, sg, o);
            const double op = op_norm(K), hs = hs_norm(K);
            double b = 0.0;
            switch (cls) {
              case KernelClass::T: b = t_norm_bound(V, z); break;
              case KernelClass::Phi12: b = phi12_norm_bound(V, z); break;
              case KernelClass::Phi1j:
              case KernelClass::Phi2j: b = phi1j_norm_bound(V, z); break;
              default: b = phiij_norm_bound(V, z); break;
            }
            const double ratio = b > 0.0 ? op / b : (op > 0.0 ? INFINITY : 0.0);
            worst = std::max(worst, ratio);
            if (csv)
              csv->row({V.name(), t, fmt(z), fmt(e), std::to_string(K.M.rows()), std::to_string(K.M.cols()), fmt(op),
                        fmt(hs), fmt(b), fmt(ratio)});
            res.checks.push_back(upper(name, ratio, factor, "op-norm / bound"));
          } catch (const std::exception& ex) {
            res.checks.push_back(failure(name, ex));
          }
        }
  }
  res.report = {{"worst_ratio", worst}, {"factor", factor}};
  return res;
}

SuiteResult schur_check(const RunConfig& cfg, const std::string& out_dir) {
  SuiteResult res;
  res.name = "schur-check";
  const double factor = 1.0 + (cfg.bounds.factor - 1.0) * cfg.tolerance_scale;
  std::unique_ptr<CsvWriter> csv;
  if (!out_dir.empty()) {
    csv = std::make_unique<CsvWriter>(artifact(out_dir, "schur.csv"),
                                      std::vector<std::string>{"operator", "z", "op_norm", "bound", "ratio"});
    res.artifacts.push_back("schur.csv");
  }
  const Potential V = cfg.potential.build();
  for (double z : cfg.bounds.z)
    for (KernelClass cls : {KernelClass::SchurF, KernelClass::SchurB}) {
      const std::string name = to_string(cls) + "/z=" + fmt(z);
      try {
        const GridSpec g = default_grid(cls);
        const auto [tg, sg] = make_grids(cls, V, g);
        DiscretizeOptions o;
        o.jobs = cfg.jobs;
        o.core_radius = core_radius(cls, g);
        const double op = op_norm(discretize({cls, 0.0, z, 0.0, V}, tg, sg, o));
        const double b = cls == KernelClass::SchurF ? schur_bound_F(z) : schur_bound_B(z);
        if (csv) csv->row({to_string(cls), fmt(z), fmt(op), fmt(b), fmt(op / b)});
        res.checks.push_back(upper(name, op / b, factor, "op-norm / (2 sqrt z)^-1"));
      } catch (const std::exception& ex) {
        res.checks.push_back(failure(name, ex));
      }
    }
  return res;
}

SuiteResult krein_selftest_suite(const RunConfig& cfg, const std::string& out_dir) {
  SuiteResult res;
  res.name = "krein-selftest";
  const double tol = cfg.krein.tol * cfg.tolerance_scale;
  const KreinSelfTest st = krein_selftest(cfg.krein.trials, cfg.krein.max_dim, cfg.seed, tol);
  if (!out_dir.empty()) {
    CsvWriter w(artifact(out_dir, "krein_selftest.csv"),
                {"trials", "passed", "max_formula_error", "max_second_error", "max_symmetry_error"});
    w.row({std::to_string(st.trials), std::to_string(st.passed), fmt(st.max_formula_error), fmt(st.max_second_error),
           fmt(st.max_symmetry_error)});
    res.artifacts.push_back("krein_selftest.csv");
  }
  res.checks.push_back(lower("matches", st.passed, st.trials, "trials within tolerance"));
  res.checks.push_back(upper("formula_vs_dense_inverse", st.max_formula_error, tol));
  res.checks.push_back(upper("second_formula_identity", st.max_second_error, tol));
  res.report = {{"trials", st.trials}, {"passed", st.passed}, {"max_symmetry_error", st.max_symmetry_error}};
  return res;
}

SuiteResult rate_sweep(const RunConfig& cfg, const std::string& out_dir) {
  SuiteResult res;
  res.name = "rate-sweep";
  const Potential V = cfg.potential.build();
  res.report["targets"] = json::object();
  for (const auto& t : cfg.rate.targets) {
    const KernelClass cls = kernel_class_from_string(t);
    SweepPlan plan;
    plan.target = t;
    plan.eps = cfg.rate.eps;
    plan.z = cfg.rate.z;
    plan.V = V;
    plan.schedule = cfg.schedule;
    plan.grid = cfg.rate.grid;
    plan.op_norm = cfg.rate.op_norm;
    plan.jobs = cfg.jobs;
    try {
      const SweepResult sr = kernel_convergence_sweep(plan, cls);
      if (!out_dir.empty()) {
        write_sweep_csv(sr.rows, artifact(out_dir, "rate_" + t + ".csv"));
        res.artifacts.push_back("rate_" + t + ".csv");
      }
      const double delta = cls == KernelClass::Phiij ? cfg.rate.delta_coarse : cfg.rate.delta;
      json fits = json::array();
      int rejected = 0;
      for (const auto& r : sr.rows) rejected += r.rejected ? 1 : 0;
      for (std::size_t i = 0; i < sr.fits.size(); ++i) {
        const RateFitReport& f = sr.fits[i];
        const double thr = 0.9 * f.s_theory - delta;
        const Check c = lower(t + "/z=" + fmt(plan.z[i]) + "/slope", f.slope, thr, "slope >= 0.9 s - " + fmt(delta));
        json fj = fit_json(f);
        fj["z"] = plan.z[i];
        fj["threshold"] = thr;
        fj["pass"] = c.pass;
        fits.push_back(fj);
        res.checks.push_back(c);
      }
      res.report["targets"][t] = {{"fits", fits}, {"rejected_points", rejected}};
    } catch (const std::exception& ex) {
      res.checks.push_back(failure(t + "/sweep", ex));
    }
  }
  return res;
}

SuiteResult resolvent_sweep_n2(const RunConfig& cfg, const std::string& out_dir) {
  SuiteResult res;
  res.name = "resolvent-sweep-n2";
  const Potential V = cfg.potential.build();
  const double g = cfg.schedule.g;
  const double alpha = g * V.integral();
  res.report["alpha"] = alpha;

  auto sweep = [&](const CouplingSchedule& s, const std::string& tag) -> SweepResult {
    SweepPlan plan;
    plan.target = "resolvent_n2";
    plan.eps = cfg.resolvent.eps;
    plan.z = cfg.resolvent.z;
    plan.V = V;
    plan.schedule = s;
    plan.jobs = cfg.jobs;
    SweepResult sr = resolvent_convergence_sweep_n2(plan);
    if (!out_dir.empty()) {
      write_sweep_csv(sr.rows, artifact(out_dir, tag + ".csv"));
      res.artifacts.push_back(tag + ".csv");
    }
    return sr;
  };

  try {
    const SweepResult sr = sweep({g, 0.0, 0.0}, "resolvent_n2");
    json fits = json::array();
    for (std::size_t i = 0; i < sr.fits.size(); ++i) {
      const double z = cfg.resolvent.z[i];
      int nonmono = 0;
      double prev = INFINITY;
      for (const auto& r : sr.rows)
        if (r.z == z) {
          if (!(r.error_op < prev)) ++nonmono;
          prev = r.error_op;
        }
      res.checks.push_back(upper("constant/z=" + fmt(z) + "/non_monotone_steps", nonmono, 0.0));
      res.checks.push_back(lower("constant/z=" + fmt(z) + "/slope", sr.fits[i].slope, cfg.resolvent.slope_min));
      json fj = fit_json(sr.fits[i]);
      fj["z"] = z;
      fits.push_back(fj);
    }
    res.report["constant"] = fits;
  } catch (const std::exception& ex) {
    res.checks.push_back(failure("constant/sweep", ex));
  }

  try {
    const SweepResult sr = sweep({g, 1.0, cfg.resolvent.schedule_rate}, "resolvent_n2_schedule");
    json fits = json::array();
    for (std::size_t i = 0; i < sr.fits.size(); ++i) {
      const double z = cfg.resolvent.z[i], s = sr.fits[i].slope;
      const std::string base = "schedule/z=" + fmt(z) + "/slope";
      res.checks.push_back(lower(base + "_lo", s, cfg.resolvent.schedule_lo));
      res.checks.push_back(upper(base + "_hi", s, cfg.resolvent.schedule_hi));
      json fj = fit_json(sr.fits[i]);
      fj["z"] = z;
      fits.push_back(fj);
    }
    res.report["schedule"] = fits;
  } catch (const std::exception& ex) {
    res.checks.push_back(failure("schedule/sweep", ex));
  }

  // grid cross-check against the discrete δ-limit on a Dirichlet mesh; reported, not asserted
  try {
    SweepPlan plan;
    plan.eps = cfg.resolvent.crosscheck_eps;
    plan.z = {cfg.resolvent.z.front()};
    plan.V = V;
    plan.schedule = {g, 0.0, 0.0};
    const auto rows = resolvent_grid_crosscheck_n2(plan, Mesh1D::uniform(cfg.resolvent.crosscheck_L, cfg.resolvent.crosscheck_n));
    if (!out_dir.empty()) {
      write_sweep_csv(rows, artifact(out_dir, "resolvent_n2_grid.csv"));
      res.artifacts.push_back("resolvent_n2_grid.csv");
    }
    json cc = json::array();
    for (const auto& r : rows) {
      const double kr = n2_resolvent_distance(V, g, r.eps, alpha, r.z).even;
      cc.push_back({{"eps", r.eps}, {"grid", r.error_op}, {"krein", kr}, {"rel_diff", std::abs(r.error_op / kr - 1.0)}});
    }
    res.report["grid_crosscheck"] = cc;
  } catch (const std::exception& ex) {
    res.report["grid_crosscheck_error"] = ex.what();
  }

  try {
    std::vector<double> pe(cfg.resolvent.eps.begin(), cfg.resolvent.eps.begin() + std::min<std::size_t>(3, cfg.resolvent.eps.size()));
    const double z = cfg.resolvent.z.front();
    const PropagationCheck p = resolvent_diff_propagation(V, {g, 0.0, 0.0}, pe, z, cfg.resolvent.z0);
    double worst = 0.0;
    for (std::size_t i = 0; i < p.lhs.size(); ++i) worst = std::max(worst, p.lhs[i] / p.rhs[i]);
    res.checks.push_back(upper("propagation/lhs_over_rhs", worst, 1.0 + 1e-9 * cfg.tolerance_scale));
    res.report["propagation"] = {{"C", p.C}, {"z", z}, {"z0", cfg.resolvent.z0}, {"worst_ratio", worst}};
  } catch (const std::exception& ex) {
    res.checks.push_back(failure("propagation", ex));
  }

  try {
    const double z = cfg.resolvent.z.front();
    const QuadratureGrid grid = QuadratureGrid::trapezoid(6.0, 129);
    const double tol = cfg.resolvent.independence_tol * cfg.tolerance_scale;
    if (alpha != 0.0) {
      // exponential with the same α: ∫ a e^{-|r|} = 2a
      const double d = vfree_factor_check(V, g, Potential::exponential(0.5 * alpha, 1.0), 1.0, z, grid);
      res.checks.push_back(upper("independence/vs_exponential", d, tol));
    }
    const double d0 = vfree_factor_check(Potential::zero(), 1.0, Potential::cosine_box(), 1.7, z, grid);
    res.checks.push_back(upper("independence/zero_mean_is_free", d0, tol));
  } catch (const std::exception& ex) {
    res.checks.push_back(failure("independence", ex));
  }
  return res;
}

SuiteResult eigen_sweep_n2(const RunConfig& cfg, const std::string& out_dir) {
  SuiteResult res;
  res.name = "eigen-sweep-n2";
  const Potential V = cfg.potential.build();
  try {
    const EigenReport rep =
        eigenvalue_convergence_n2(V, cfg.schedule, cfg.eigen.eps, Mesh1D::uniform(cfg.eigen.L, cfg.eigen.n));
    if (!out_dir.empty()) {
      write_eigen_csv(rep, artifact(out_dir, "eigen_n2.csv"));
      res.artifacts.push_back("eigen_n2.csv");
    }
    res.checks.push_back(upper("ground_energy_error/eps=" + fmt(rep.eps.back()), rep.error.back(),
                               cfg.eigen.tol * cfg.tolerance_scale, "|E + α²/8|"));
    res.report = {{"reference", rep.reference},       {"energy", rep.energy.back()},
                  {"decreasing", rep.decreasing},     {"under_resolved", bool(rep.under_resolved.back())}};
  } catch (const std::exception& ex) {
    res.checks.push_back(failure("eigen_sweep", ex));
  }
  return res;
}

SuiteResult forms_check(const RunConfig& cfg, const std::string& out_dir) {
  SuiteResult res;
  res.name = "forms-check";
  const Potential V = cfg.potential.build();
  const double ts = cfg.tolerance_scale;
  const auto family = form_test_family(cfg.forms.family_seed);

  {
    const WaveFunction G = WaveFunction::sample(gaussian_product(2));
    const double q1 = 1.0 - 1.0 / std::sqrt(2.0 * M_PI);  // ‖∇ψ‖² = 1, ‖γψ‖² = (2π)^{-1/2}
    res.checks.push_back(upper("gaussian/q_alpha0", std::abs(q_form(G, 0.0, 0.0).value - 1.0), 1e-8 * ts));
    res.checks.push_back(upper("gaussian/q_alpha1", std::abs(q_form(G, 1.0, 0.0).value - q1), 1e-8 * ts));
  }

  std::unique_ptr<CsvWriter> bcsv;
  if (!out_dir.empty()) {
    bcsv = std::make_unique<CsvWriter>(artifact(out_dir, "forms_bounds.csv"),
                                       std::vector<std::string>{"id", "check", "i", "j", "lhs", "rhs", "holds"});
    res.artifacts.push_back("forms_bounds.csv");
  }
  std::vector<WaveFunction> ws;
  int failed = 0, total = 0;
  double worst = 0.0;
  for (const auto& f : family) {
    ws.push_back(WaveFunction::sample(f));
    const FormBoundsReport r = check_form_bounds(ws.back(), V, cfg.forms.mu, 1e-9 * ts);
    for (const auto& c : r.checks) {
      ++total;
      if (!c.holds) ++failed;
      if (c.rhs > 0.0) worst = std::max(worst, c.lhs / c.rhs);
      if (bcsv)
        bcsv->row({f.id, c.name, std::to_string(c.i), std::to_string(c.j), fmt(c.lhs), fmt(c.rhs), c.holds ? "1" : "0"});
    }
  }
  res.checks.push_back(upper("inequalities/failures", failed, 0.0, std::to_string(total) + " checks"));
  res.report["inequalities"] = {{"total", total}, {"worst_ratio", worst}};

  double gmax = std::abs(cfg.schedule.g);
  for (double e : cfg.forms.eps) gmax = std::max(gmax, std::abs(cfg.schedule.g_eps(e)));
  const double C = sufficient_shift(V, gmax, 3);
  const SandwichReport sw = sandwich_check(ws, V, cfg.schedule, cfg.forms.eps, C);
  res.checks.push_back(upper("sandwich/b_fit_over_bound", sw.b_bound > 0.0 ? sw.b_fit / sw.b_bound : sw.b_fit, 1.0));
  res.report["sandwich"] = {{"a", sw.a}, {"b_fit", sw.b_fit}, {"b_bound", sw.b_bound}, {"C", C}};

  double scale_err = 0.0;
  for (const auto& f : family)
    if (f.N == 2)
      scale_err = std::max(scale_err, scaling_consistency(f, V, cfg.schedule.g_eps(0.05), 0.05, C).rel_err);
  res.checks.push_back(upper("scaling_consistency/max_rel", scale_err, cfg.forms.scaling_tol * ts));

  const auto conv = form_convergence_sweep(family, V, cfg.schedule, cfg.forms.eps, cfg.jobs);
  std::unique_ptr<CsvWriter> ccsv;
  if (!out_dir.empty()) {
    ccsv = std::make_unique<CsvWriter>(artifact(out_dir, "forms_convergence.csv"),
                                       std::vector<std::string>{"id", "eps", "gap"});
    res.artifacts.push_back("forms_convergence.csv");
  }
  json fits = json::object();
  for (const auto& fc : conv) {
    if (ccsv)
      for (std::size_t i = 0; i < fc.gap.size(); ++i) ccsv->row({fc.id, fmt(cfg.forms.eps[i]), fmt(fc.gap[i])});
    fits[fc.id] = fit_json(fc.fit);
    if (std::isfinite(fc.fit.s_theory))
      res.checks.push_back(lower("convergence/" + fc.id + "/slope", fc.fit.slope, cfg.forms.slope_min));
  }
  res.report["convergence"] = fits;
  return res;
}

SuiteResult run_suite(const std::string& name, const RunConfig& cfg, const std::string& out_dir) {
  using Fn = SuiteResult (*)(const RunConfig&, const std::string&);
  static const std::vector<std::pair<std::string, Fn>> table{
      {"greens-check", greens_check},         {"kernel-bounds", kernel_bounds},
      {"schur-check", schur_check},           {"krein-selftest", krein_selftest_suite},
      {"rate-sweep", rate_sweep},             {"resolvent-sweep-n2", resolvent_sweep_n2},
      {"eigen-sweep-n2", eigen_sweep_n2},     {"forms-check", forms_check}};
  for (const auto& [n, fn] : table)
    if (n == name) {
      const auto t0 = Clock::now();
      SuiteResult r;
      try {
        r = fn(cfg, out_dir);
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& ex) {
        r.name = name;
        r.checks.push_back(failure("suite", ex));
      }
      r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
      return r;
    }
  throw ConfigError("unknown suite: " + name);
}

// ---------------------------------------------------------------- driver

namespace {

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

json config_json(const RunConfig& c) {
  return {{"command", c.command},
          {"potential", {{"shape", c.potential.shape}, {"params", c.potential.params}, {"file", c.potential.file},
                         {"cutoff", c.potential.cutoff}}},
          {"schedule", {{"g", c.schedule.g}, {"c", c.schedule.c}, {"s_g", c.schedule.s_g}}},
          {"seed", c.seed},
          {"jobs", c.jobs},
          {"tolerance_scale", c.tolerance_scale}};
}

json suite_json(const SuiteResult& s) {
  json checks = json::array();
  for (const auto& c : s.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass},
                      {"detail", c.detail}});
  return {{"name", s.name}, {"passed", s.passed()}, {"checks", checks}, {"artifacts", s.artifacts},
          {"report", s.report}};
}

void write_summary(const std::string& dir, const json& body) {
  fs::create_directories(dir);
  std::ofstream out(fs::path(dir) / "summary.json");
  out << body.dump(2) << "\n";
}

}  // namespace

int run(const RunConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out);
  std::vector<std::string> names = cfg.command == "all" ? suite_names() : std::vector<std::string>{cfg.command};
  json suites = json::array();
  json timing = json::object();
  bool ok = true;
  for (const auto& n : names) {
    const SuiteResult r = run_suite(n, cfg, cfg.out);
    ok = ok && r.passed();
    suites.push_back(suite_json(r));
    timing[n] = r.seconds;
    std::cout << (r.passed() ? "PASS " : "FAIL ") << n << " (" << r.checks.size() << " checks)\n";
    for (const auto& c : r.checks)
      if (!c.pass) std::cout << "  failed " << c.name << ": value " << c.value << " threshold " << c.threshold
                             << (c.detail.empty() ? "" : " [" + c.detail + "]") << "\n";
  }
  write_summary(cfg.out, {{"status", ok ? "pass" : "contract_failure"},
                          {"passed", ok},
                          {"config", config_json(cfg)},
                          {"suites", suites},
                          {"metadata", {{"timestamp", utc_timestamp()}, {"seconds", timing}}}});
  return ok ? 0 : 1;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Contact-interaction limit verification suites and sweeps"};
  std::string config_path, out;
  std::uint64_t seed = 0;
  int jobs = 0;
  double tol_scale = 0.0;
  app.add_option("--config", config_path, "YAML run configuration");
  app.add_option("--out", out, "output directory (default: $CONTACT_LIMIT_OUT or ./contact_out)");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 256));
  app.add_option("--tolerance-scale", tol_scale, "multiplier on tolerances")->check(CLI::PositiveNumber);
  std::vector<CLI::App*> subs;
  subs.push_back(app.add_subcommand("all", "run every suite"));
  for (const auto& n : suite_names()) subs.push_back(app.add_subcommand(n, "run the " + n + " suite"));
  for (auto* s : subs) s->fallthrough();
  app.require_subcommand(0, 1);

  auto out_dir = [&](const RunConfig* c) {
    if (!out.empty()) return out;
    if (c && !c->out.empty()) return c->out;
    if (const char* env = std::getenv("CONTACT_LIMIT_OUT"); env && *env) return std::string(env);
    return std::string("contact_out");
  };
  auto config_error = [&](const std::string& msg, const RunConfig* c) {
    std::cerr << "error: " << msg << "\n";
    try {
      write_summary(out_dir(c), {{"status", "config_error"}, {"passed", false}, {"error", msg},
                                 {"metadata", {{"timestamp", utc_timestamp()}}}});
    } catch (const std::exception&) {
    }
    return 2;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return config_error(e.what(), nullptr);
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    for (auto* s : subs)
      if (s->parsed()) cfg.command = s->get_name();
    cfg.out = out_dir(&cfg);
    if (*seed_opt) cfg.seed = seed;
    if (jobs > 0) cfg.jobs = jobs;
    if (tol_scale > 0.0) cfg.tolerance_scale = tol_scale;
    cfg.validate();
  } catch (const ConfigError& e) {
    return config_error(e.what(), &cfg);
  }
  try {
    return run(cfg);
  } catch (const ConfigError& e) {
    return config_error(e.what(), &cfg);
  }
}

}  // namespace contact
