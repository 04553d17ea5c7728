#pragma once

#include <vector>

#include <Eigen/Dense>

#include "contact/krein.hpp"
#include "contact/potentials.hpp"

namespace contact {

// Nodes of [-L, L] including both walls; interior nodes carry the unknowns.
struct Mesh1D {
  std::vector<double> x;

  static Mesh1D uniform(double L, int interior);
  // Spacing h_min on [-core, core], growing geometrically by `growth` up to h_max outside.
  static Mesh1D graded(double L, double h_min, double h_max, double core, double growth = 1.1);

  int interior() const { return static_cast<int>(x.size()) - 2; }
  double L() const { return x.back(); }
  double max_spacing() const;
  bool symmetric(double tol = 1e-12) const;
};

struct Tridiagonal {
  Eigen::VectorXd diag;
  Eigen::VectorXd off;  // size diag.size() - 1

  Eigen::MatrixXd dense() const;
};

// -2 d²/dr² - g V_ε with Dirichlet walls: piecewise-linear elements, lumped mass, potential integrated exactly
// against the hat functions (Gauss panels split at the breakpoints of V_ε).
struct PairHamiltonian {
  Mesh1D mesh;
  Eigen::VectorXd mass;       // lumped mass per interior node
  Eigen::VectorXd potential;  // ∫ V_ε φ_i
  double g = 0.0;
  Tridiagonal H;              // mass-symmetrized table
  bool under_resolved = false;

  DiscreteHamiltonian free_part() const;
  DiscreteHamiltonian dense() const;
  // Coupling with A^T J A = diag(potential / mass).
  FactoredCoupling coupling() const;
};

PairHamiltonian build_pair_hamiltonian(const Potential& V, double g_eps, double eps, const Mesh1D& mesh,
                                       int order = 8);
// Same mesh with the point interaction -α δ in place of g V_ε.
PairHamiltonian build_delta_hamiltonian(double alpha, const Mesh1D& mesh);

// Restriction to even functions in an orthonormal basis of mirror pairs; the mesh must be symmetric.
Tridiagonal even_sector(const PairHamiltonian& h);
// k smallest eigenvalues.
std::vector<double> lowest_eigenvalues(const Tridiagonal& t, int k);
double ground_energy(const Tridiagonal& t);

enum class GridLimit { FreeSpace, Dirichlet, DiscreteDelta };

// Operator-norm distance in the even sector between (H + z)^{-1} on the mesh and the δ-limit resolvent with
// strength α. Analytic limits are sampled on the mesh nodes with the mass weights.
double grid_resolvent_distance(const PairHamiltonian& h, double alpha, double z, GridLimit limit);

}  // namespace contact
