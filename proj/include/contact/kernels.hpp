#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "contact/greens.hpp"
#include "contact/potentials.hpp"
#include "contact/quadrature.hpp"

namespace contact {

enum class KernelClass { T, Phi12, Phi1j, Phi2j, Phiij, SchurF, SchurB };

std::string to_string(KernelClass c);
KernelClass kernel_class_from_string(const std::string& s);

// Pointwise kernels. ε = 0 gives the formal limit kernels.
double t_kernel(double eps, double z, double Q, const Factorization& f, double r, double rp);
double phi12_kernel(double eps, double z, double Q, const Factorization& f, double r, double rp);
// Arguments (r, R, x_j) and (r', R', x_j').
double phi1j_kernel(double eps, double z, double Qj, const Factorization& f, const std::array<double, 3>& x,
                    const std::array<double, 3>& xp);
double phi2j_kernel(double eps, double z, double Qj, const Factorization& f, const std::array<double, 3>& x,
                    const std::array<double, 3>& xp);
// Arguments (r, R, x_i, x_j) and (r', R', x_i', x_j'). g4 may be null; it must match z + Qij otherwise.
double phiij_kernel(double eps, double z, double Qij, const Factorization& f, const std::array<double, 4>& x,
                    const std::array<double, 4>& xp, const RadialGreen* g4 = nullptr);

// Tensor product of one-dimensional rules; the last axis varies fastest.
struct ProductGrid {
  std::vector<Rule> axes;

  std::size_t size() const;
  std::size_t dims() const { return axes.size(); }
  void point(std::size_t idx, double* out) const;
  double weight(std::size_t idx) const;
  Eigen::VectorXd weights() const;
};

struct KernelMeta {
  KernelClass cls = KernelClass::T;
  double eps = 0.0;
  double z = 1.0;
  double Q = 0.0;
  std::string potential;
};

// Nyström table M(i, j) = k(target_i, source_j) with quadrature weights on both sides.
struct KernelOperator {
  Eigen::MatrixXd M;
  ProductGrid target;
  ProductGrid source;
  KernelMeta meta;

  KernelOperator adjoint() const;
};

struct KernelSpec {
  KernelClass cls = KernelClass::T;
  double eps = 0.0;
  double z = 1.0;
  double Q = 0.0;
  Potential V = Potential::box();
};

struct DiscretizeOptions {
  std::size_t max_entries = 50'000'000;
  int jobs = 1;
  double core_radius = 0.0;  // singular kernels are evaluated at max(|X|, core_radius)
};

KernelOperator discretize(const KernelSpec& spec, const ProductGrid& target, const ProductGrid& source,
                          const DiscretizeOptions& opt = {});

// Desk-scale grids per kernel class.
struct GridSpec {
  double L = 8.0;        // half width of spatial axes
  int n = 256;           // nodes per spatial axis
  int aux_order = 16;      // Gauss order per panel on supp V
  int aux_nodes = 0;       // > 0: total node target on supp V, overriding aux_order
  double aux_width = 1.0;  // panel width on supp V in unscaled units; <= 0 keeps breakpoint panels only
  double aux_tail = 1e-10;
};

GridSpec default_grid(KernelClass c);
// Target and source grids; spatial axes of singular kernels are staggered (cell centres against nodes).
std::pair<ProductGrid, ProductGrid> make_grids(KernelClass c, const Potential& V, const GridSpec& g);
// Smallest singular-argument distance between staggered grids at ε = 0; zero for regular classes.
double core_radius(KernelClass c, const GridSpec& g);

double hs_norm(const KernelOperator& K);

struct OpNormOptions {
  double tol = 1e-10;
  int max_iter = 300;
  std::uint64_t seed = 12345;
};

struct OpNormResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Largest singular value of D_t^{1/2} M D_s^{1/2} by Lanczos on its normal operator.
OpNormResult op_norm_report(const KernelOperator& K, const OpNormOptions& opt = {});
double op_norm(const KernelOperator& K, const OpNormOptions& opt = {});
// Dense SVD oracle, limited to tables of at most 2500 x 2500.
double svd_norm(const KernelOperator& K);

// Weighted difference K1 - K2 on identical grids.
KernelOperator difference(const KernelOperator& a, const KernelOperator& b);

double green_l2_norm_1d(double lambda);  // ‖G^1_λ‖_2 = 1/(2 λ^{3/4})
double t_norm_bound(const Potential& V, double z);
double phi12_norm_bound(const Potential& V, double z);
double phi1j_norm_bound(const Potential& V, double z);
double phiij_norm_bound(const Potential& V, double z);
double t_cutoff_bound(const Potential& V, double k, double z);
double phi12_cutoff_bound(const Potential& V, double k, double z);
double phi1j_cutoff_bound(const Potential& V, double k, double z);
double phiij_cutoff_bound(const Potential& V, double k, double z);
double schur_bound_F(double z);
double schur_bound_B(double z);

}  // namespace contact
