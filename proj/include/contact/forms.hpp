#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "contact/potentials.hpp"
#include "contact/quadrature.hpp"

namespace contact {

// Closed-form wavefunction on R^N with its gradient.
struct TestFunction {
  std::string id;
  int N = 2;
  double L = 6.0;  // half width of the sampling box
  std::function<double(const double*)> f;
  std::function<void(const double*, double*)> grad;
  std::vector<std::pair<int, int>> kinks;  // pairs (a, b) where the function has a kink along x_a = x_b
};

TestFunction gaussian_product(int N, double width = 1.0);  // e^{-|x|²/(2 width²)}, normalized
// 14 functions of two variables and 6 of three: Gaussians (shifted, correlated, straddling the diagonals),
// band-limited random fields under a Gaussian envelope, and diagonal cusps e^{-κ|x_j - x_i|}.
std::vector<TestFunction> form_test_family(std::uint64_t seed = 7);

// Value and gradient tables on the tensor trapezoid grid of [-L, L]^N.
struct WaveFunction {
  TestFunction fn;
  QuadratureGrid grid;
  Eigen::VectorXd values;
  std::vector<Eigen::VectorXd> grad;

  static WaveFunction sample(const TestFunction& f, int n = 0);  // n = 0: 64 for N = 2, 32 for N = 3
  WaveFunction refined() const;                                  // 2n - 1 nodes per axis
  int N() const { return fn.N; }
  double norm2() const;
  double grad2() const;
  // ‖∂_r ψ̃‖² with ψ̃ the pair (i, j) in relative coordinates: ¼‖(∂_j - ∂_i)ψ‖².
  double relative_grad2(int i, int j) const;
};

struct MarginalQuad {
  double panel = 1.0;
  int order = 12;
};

// Ψ_ij(r) = ∫ |ψ|² over the plane x_j - x_i = r.
double pair_marginal(const TestFunction& f, int i, int j, double r, const MarginalQuad& q = {});

// ψ restricted to x_j = x_i, on the grid nodes of the remaining N - 1 variables (x_j dropped).
Eigen::VectorXd trace_gamma(const WaveFunction& psi, int i, int j);
double trace_norm2(const WaveFunction& psi, int i, int j);

// Norms of the closed form by Gauss panels split along its kinks; rel_grad2 follows the (i, j) pair order.
struct H1Norms {
  double norm2 = 0.0;
  double grad2 = 0.0;
  std::vector<double> rel_grad2;
};
H1Norms h1_norms(const TestFunction& f, const MarginalQuad& q = {});

struct FormValue {
  double value = 0.0;
  double refined = 0.0;
  bool under_resolved = false;  // refinement changed the value by more than 1e-4
};

// ∫|∇ψ|² + C|ψ|² - α Σ ‖γ_ij ψ‖².
FormValue q_form(const WaveFunction& psi, double alpha, double C);
// ∫|∇ψ|² + C|ψ|² - g Σ ∫ V_ε(x_j - x_i)|ψ|², the interaction taken from the pair marginals.
FormValue q_eps_form(const WaveFunction& psi, const Potential& V, double g_eps, double eps, double C);
// q_ε(ψ) - q(ψ) evaluated without the common kinetic part.
double form_gap(const TestFunction& f, const Potential& V, double g_eps, double alpha, double eps);
// Σ ∫ V_ε(x_j - x_i)|ψ|².
double pair_interaction(const TestFunction& f, const Potential& V, double eps);

struct InequalityCheck {
  std::string name;
  int i = 0, j = 1;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

struct FormBoundsReport {
  std::string id;
  std::vector<InequalityCheck> checks;
  double fitted_c_mu = 0.0;  // smallest C with ‖γψ‖ <= μ‖∇ψ‖ + C‖ψ‖ over all pairs
  bool all_hold = true;
};

// sup-marginal, Hölder-1/2 marginal, trace and V bounds; the trace bound uses C_μ = 1/(4μ).
// Norms come from h1_norms so kinks on grid diagonals do not bias the right-hand sides.
FormBoundsReport check_form_bounds(const WaveFunction& psi, const Potential& V, double mu, double tol = 1e-9);

// C making q and q_ε nonnegative for |g_ε| <= g_max: (P g_max ‖V‖_1)² / 4 with P the number of pairs.
double sufficient_shift(const Potential& V, double g_max, int N);

struct SandwichReport {
  double a = 0.5;
  double b_fit = 0.0;
  double b_bound = 0.0;
  bool holds = true;
};

// (1 - a)‖ψ‖²_{H1} - b‖ψ‖² <= q_ε(ψ) <= (1 + a)‖ψ‖²_{H1} + b‖ψ‖² over the family and ε list.
SandwichReport sandwich_check(const std::vector<WaveFunction>& family, const Potential& V, const CouplingSchedule& s,
                              const std::vector<double>& eps, double C, double a = 0.5);

struct ScalingCheck {
  double original = 0.0;
  double relative = 0.0;
  double rel_err = 0.0;
};

// N = 2: q_ε in (x1, x2) against -2∂²_r - ½∂²_R in (r, R).
ScalingCheck scaling_consistency(const TestFunction& f, const Potential& V, double g_eps, double eps, double C);

}  // namespace contact
