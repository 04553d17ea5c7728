// One pass/fail line per acceptance criterion; exit status 0 iff all pass.
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "contact/cli.hpp"

using namespace contact;

namespace {

// Pinned thresholds.
constexpr double kGreensClosedTol = 1e-10;
constexpr double kGreensMarginalTol = 1e-6;
constexpr double kGreensSeconds = 30.0;
constexpr int kKreinTrials = 100;
constexpr int kKreinMaxDim = 60;
constexpr double kKreinTol = 1e-10;
constexpr double kKreinSeconds = 60.0;
constexpr double kBoundFactor = 1.05;
constexpr double kRateSeconds = 600.0;
constexpr double kResolventSlope = 0.8;
constexpr double kScheduleLo = 0.4;
constexpr double kScheduleHi = 0.65;
constexpr double kResolventSeconds = 300.0;
constexpr double kEigenTol = 5e-3;
constexpr double kIndependenceTol = 1e-8;
constexpr double kFormsSlope = 0.45;
const std::map<std::string, double> kRateSlope{{"T", 0.85}, {"phi12", 0.85}, {"phi1j", 0.625}, {"phiij", 0.525}};

struct Timed {
  SuiteResult r;
  double seconds;
};

Timed timed(const std::function<SuiteResult()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r = f();
  return {std::move(r), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
}

bool all_pass(const SuiteResult& r, const std::function<bool(const Check&)>& select, std::string& worst) {
  bool ok = true;
  int n = 0;
  for (const auto& c : r.checks) {
    if (!select(c)) continue;
    ++n;
    if (!c.pass) {
      ok = false;
      if (worst.empty()) worst = c.name + "=" + std::to_string(c.value) + " vs " + std::to_string(c.threshold);
    }
  }
  if (n == 0) {
    worst = "no checks selected";
    return false;
  }
  return ok;
}

bool any(const Check&) { return true; }

bool prefix(const Check& c, const std::string& p) { return c.name.rfind(p, 0) == 0; }

int failures = 0;

void line(int k, const std::string& title, bool ok, const std::string& detail) {
  std::printf("criterion %d %s: %s%s%s\n", k, title.c_str(), ok ? "PASS" : "FAIL", detail.empty() ? "" : "  ",
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string secs(double s, double limit) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1fs (limit %.0fs)", s, limit);
  return buf;
}

}  // namespace

int main() {
  RunConfig cfg;
  cfg.seed = 7;
  cfg.tolerance_scale = 1.0;

  {
    cfg.greens.samples = 100;
    cfg.greens.closed_tol = kGreensClosedTol;
    cfg.greens.marginal_tol = kGreensMarginalTol;
    const Timed t = timed([&] { return greens_check(cfg); });
    std::string worst;
    const bool ok = all_pass(t.r, any, worst) && t.seconds < kGreensSeconds;
    line(1, "green identities", ok, worst.empty() ? secs(t.seconds, kGreensSeconds) : worst);
  }
  {
    cfg.krein.trials = kKreinTrials;
    cfg.krein.max_dim = kKreinMaxDim;
    cfg.krein.tol = kKreinTol;
    const Timed t = timed([&] { return krein_selftest_suite(cfg); });
    std::string worst;
    const bool ok = all_pass(t.r, any, worst) && t.seconds < kKreinSeconds;
    line(2, "krein self-test", ok, worst.empty() ? secs(t.seconds, kKreinSeconds) : worst);
  }
  {
    cfg.bounds = BoundsConfig{};
    cfg.bounds.factor = kBoundFactor;
    const Timed b = timed([&] { return kernel_bounds(cfg); });
    const Timed s = timed([&] { return schur_check(cfg); });
    std::string worst;
    const bool ok = all_pass(b.r, any, worst) && all_pass(s.r, any, worst);
    line(3, "norm bounds", ok, worst.empty() ? std::to_string(b.r.checks.size() + s.r.checks.size()) + " checks" : worst);
  }
  {
    cfg.potential = PotentialSpec{};
    cfg.rate = RateConfig{};
    cfg.rate.z = {2.0};
    const Timed t = timed([&] { return rate_sweep(cfg); });
    std::string worst;
    bool ok = all_pass(t.r, any, worst) && t.seconds < kRateSeconds;
    std::string slopes;
    for (const auto& [name, minimum] : kRateSlope) {
      bool seen = false;
      for (const auto& c : t.r.checks)
        if (prefix(c, name + "/z=")) {
          seen = true;
          ok = ok && c.value >= minimum;
          char buf[64];
          std::snprintf(buf, sizeof buf, "%s %.3f>=%.3f ", name.c_str(), c.value, minimum);
          slopes += buf;
        }
      ok = ok && seen;
    }
    line(4, "kernel rates", ok, worst.empty() ? slopes + secs(t.seconds, kRateSeconds) : worst);
  }
  {
    cfg.schedule = CouplingSchedule{};
    cfg.resolvent = ResolventConfig{};
    cfg.resolvent.z = {4.0};
    cfg.resolvent.eps = dyadic_eps(3, 9);
    cfg.resolvent.slope_min = kResolventSlope;
    cfg.resolvent.schedule_rate = 0.5;
    cfg.resolvent.schedule_lo = kScheduleLo;
    cfg.resolvent.schedule_hi = kScheduleHi;
    cfg.resolvent.independence_tol = kIndependenceTol;
    const Timed t = timed([&] { return resolvent_sweep_n2(cfg); });
    std::string w5, w7;
    const bool ok5 = all_pass(t.r, [](const Check& c) { return prefix(c, "constant/") || prefix(c, "schedule/"); }, w5) &&
                     t.seconds < kResolventSeconds;
    line(5, "n2 resolvent convergence", ok5, w5.empty() ? secs(t.seconds, kResolventSeconds) : w5);
    {
      RunConfig e = cfg;
      e.eigen = EigenConfig{};
      e.eigen.n = 2048;
      e.eigen.L = 10.0;
      e.eigen.eps = dyadic_eps(3, 8);
      e.eigen.tol = kEigenTol;
      const Timed g = timed([&] { return eigen_sweep_n2(e); });
      std::string worst;
      const bool ok = all_pass(g.r, any, worst);
      line(6, "ground energy", ok, worst.empty() ? "error " + std::to_string(g.r.checks.back().value) : worst);
    }
    const bool ok7 = all_pass(t.r, [](const Check& c) { return prefix(c, "independence/"); }, w7);
    line(7, "potential independence", ok7, w7);
  }
  {
    cfg.forms = FormsConfig{};
    cfg.forms.slope_min = kFormsSlope;
    const Timed t = timed([&] { return forms_check(cfg); });
    std::string worst;
    const bool ok = all_pass(t.r, any, worst);
    line(8, "forms", ok, worst.empty() ? std::to_string(t.r.checks.size()) + " checks" : worst);
  }
  std::printf("%s: %d of 8 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
