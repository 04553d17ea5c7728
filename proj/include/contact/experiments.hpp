#pragma once

#include <limits>
#include <string>
#include <vector>

#include "contact/forms.hpp"
#include "contact/kernels.hpp"
#include "contact/krein.hpp"
#include "contact/pair.hpp"
#include "contact/potentials.hpp"

namespace contact {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ε geometric 2^{-first} ... 2^{-last}, strictly decreasing.
std::vector<double> dyadic_eps(int first = 1, int last = 10);

struct SweepPlan {
  std::string target = "phi12";
  std::vector<double> eps = dyadic_eps();
  std::vector<double> z{2.0};
  Potential V = Potential::box();
  CouplingSchedule schedule;
  GridSpec grid;             // n = 0 selects default_grid(class)
  bool op_norm = false;      // also record operator-norm errors
  bool richardson = true;    // two-grid discretization estimate where affordable
  int jobs = 1;

  void validate() const;
};

struct RateFitReport {
  std::vector<double> eps;
  std::vector<double> error;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double s_theory = kNaN;
  std::size_t tail = 0;     // points used by the fit: the smallest half of ε
  bool converging = true;   // slope above 0.05
};

// Log-log least squares over the smallest half of ε (at least 2 points).
RateFitReport fit_rate(const std::vector<double>& eps, const std::vector<double>& error, double s_theory = kNaN);

// Largest s in (0, cap] on a 0.05 lattice with ∫|r|^{2s}|V| finite, capped by the schedule exponent.
double theory_rate(const Potential& V, const CouplingSchedule& s, double cap);

struct SweepRow {
  std::string target;
  double eps = 0.0;
  double z = 0.0;
  double error_hs = kNaN;
  double error_op = kNaN;
  int grid_n = 0;
  double grid_L = 0.0;
  double disc_err_est = kNaN;
  bool rejected = false;  // discretization estimate above 10% of the error
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<RateFitReport> fits;  // one per z, fitted on the primary metric of accepted rows
};

// Differences K_ε - K_0 on fixed grids at Q = 0; the primary metric is HS unless plan.op_norm is set.
SweepResult kernel_convergence_sweep(const SweepPlan& plan, KernelClass cls);

// Even-sector distance between the resolvent of -2 d²/dr² - g_ε V_ε and the δ-limit, via the Krein route, with the
// discretization estimate from doubling the Gauss order on supp V.
SweepResult resolvent_convergence_sweep_n2(const SweepPlan& plan, const N2KreinOptions& opt = {});

// Grid cross-check of the same distance on a Dirichlet mesh against the discrete δ-limit.
std::vector<SweepRow> resolvent_grid_crosscheck_n2(const SweepPlan& plan, const Mesh1D& mesh);

struct EigenReport {
  double reference = 0.0;  // -α²/8, or 0 for α <= 0
  std::vector<double> eps;
  std::vector<double> energy;
  std::vector<double> error;
  std::vector<bool> under_resolved;
  bool decreasing = true;
};

EigenReport eigenvalue_convergence_n2(const Potential& V, const CouplingSchedule& s, const std::vector<double>& eps,
                                      const Mesh1D& mesh);

struct FormConvergence {
  std::string id;
  std::vector<double> gap;  // |q_ε(ψ) - q(ψ)|
  RateFitReport fit;
};

std::vector<FormConvergence> form_convergence_sweep(const std::vector<TestFunction>& family, const Potential& V,
                                                    const CouplingSchedule& s, const std::vector<double>& eps,
                                                    int jobs = 1);

}  // namespace contact
