#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "contact/potentials.hpp"
#include "contact/quadrature.hpp"

namespace contact {

// Dense self-adjoint table.
struct DiscreteHamiltonian {
  Eigen::MatrixXd H;
  std::string boundary = "dirichlet";
};

// Coupling A^T J A with strength g; A maps the state space to an auxiliary space of dimension A.rows().
struct FactoredCoupling {
  Eigen::MatrixXd A;
  Eigen::VectorXd J;  // entries ±1
  double g = 1.0;

  void validate(Eigen::Index state_dim) const;
};

enum class ResolventMethod { Krein, Direct, Limit };

struct ResolventReport {
  double z = 0.0;
  Eigen::MatrixXd R;
  ResolventMethod method = ResolventMethod::Direct;
  double rcond = 0.0;  // reciprocal condition estimate of the matrix inverted last
};

// (H + z)^{-1} by dense LU.
ResolventReport direct_resolvent(const Eigen::MatrixXd& H, double z);

// H0 - g A^T J A.
Eigen::MatrixXd coupled_hamiltonian(const DiscreteHamiltonian& H0, const FactoredCoupling& C);
// φ(z) = J A (H0 + z)^{-1} A^T.
Eigen::MatrixXd krein_phi(const DiscreteHamiltonian& H0, const FactoredCoupling& C, double z);
// R0 + g R0 A^T (1 - g φ)^{-1} J A R0.
ResolventReport krein_resolvent(const DiscreteHamiltonian& H0, const FactoredCoupling& C, double z);
// Relative Frobenius gap between (1 - gφ)^{-1} and 1 + g J A (H + z)^{-1} A^T.
double second_formula_error(const DiscreteHamiltonian& H0, const FactoredCoupling& C, double z);
double relative_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Sign of det(1 - g φ(z)).
int krein_det_sign(const DiscreteHamiltonian& H0, const FactoredCoupling& C, double z);
// z in (z_lo, z_hi) where det(1 - g φ(z)) changes sign, by bisection.
double invertibility_crossing(const DiscreteHamiltonian& H0, const FactoredCoupling& C, double z_lo, double z_hi,
                              double tol = 1e-12);

struct KreinSelfTest {
  int trials = 0;
  int passed = 0;
  double max_formula_error = 0.0;
  double max_second_error = 0.0;
  double max_symmetry_error = 0.0;
};

// Random instances: H0 >= 0 of dimension <= max_dim, low-rank A, signed J, z above the spectrum bottom.
KreinSelfTest krein_selftest(int trials, int max_dim, std::uint64_t seed, double tol = 1e-10);

// Limit resolvent kernel of -2 d²/dr² - α δ at spectral parameter z.
enum class LimitBoundary { FreeSpace, Dirichlet };
double free_pair_kernel(double z, double r, double rp);  // ½ G_{z/2}(r - r')
double delta_limit_kernel(double alpha, double z, double r, double rp, LimitBoundary b = LimitBoundary::FreeSpace,
                          double L = 0.0);
// Kernel table K(r_i, r_j) on the grid nodes.
ResolventReport delta_limit_resolvent_n2(double alpha, double z, const std::vector<double>& nodes,
                                         LimitBoundary b = LimitBoundary::FreeSpace, double L = 0.0);
// 1 - α / (2 sqrt(2z)); pole where it vanishes.
double delta_limit_denominator(double alpha, double z);

// Limit resolvent table built from V through its factorization: R0 + g S* (1 - gφ)^{-1} J S, with S kernel
// ½ v(s) G_{z/2}(r') and φ kernel u(s) v(s') / (2 sqrt(2z)).
ResolventReport factored_limit_resolvent_n2(const Potential& V, double g, double z, const std::vector<double>& nodes,
                                            int aux_order = 16);
// Relative Frobenius distance between the tables built from (V1, g1) and (V2, g2), weighted by the grid.
double vfree_factor_check(const Potential& V1, double g1, const Potential& V2, double g2, double z,
                          const QuadratureGrid& grid);

// Operator-norm distance on L2(R) between the resolvent of -2 d²/dr² - g V_ε and the δ-limit with strength α,
// evaluated through the Krein formula with exact free kernels and Gauss-Nyström on supp V.
struct N2KreinOptions {
  int order = 16;
  double max_width = 0.25;
  double tail_tol = 1e-12;
};

struct N2Distance {
  double even = 0.0;
  double full = 0.0;
  int aux_nodes = 0;
};

N2Distance n2_resolvent_distance(const Potential& V, double g_eps, double eps, double alpha, double z,
                                 const N2KreinOptions& opt = {});
// Ground energy of -2 d²/dr² - g V_ε (0 when there is no bound state), from det(J - g S(ζ)) crossings.
double n2_ground_energy(const Potential& V, double g_eps, double eps, const N2KreinOptions& opt = {});
// ‖(H + z)^{-1}‖ for a self-adjoint H with ground energy e0 <= 0.
double resolvent_norm_from_ground(double e0, double z);
// Ground energy of the δ-limit: -α²/8 for α > 0, else 0.
double delta_limit_ground_energy(double alpha);

struct PropagationCheck {
  std::vector<double> eps;
  std::vector<double> lhs;
  std::vector<double> rhs;
  double C = 0.0;
  bool holds = true;
};

// ‖R_ε(z) - R(z)‖ against (1 + |z - z0| C)² ‖R_ε(z0) - R(z0)‖, C the largest resolvent norm over the sweep and the limit.
PropagationCheck resolvent_diff_propagation(const Potential& V, const CouplingSchedule& sched,
                                            const std::vector<double>& eps, double z, double z0,
                                            const N2KreinOptions& opt = {}, double tol = 1e-9);

}  // namespace contact
