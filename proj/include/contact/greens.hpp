#pragma once

#include <complex>
#include <span>
#include <vector>

namespace contact {

// Free Green function of (-Δ + z) on R^d, d in {1,2,3,4}.
struct GreenParams {
  int d = 1;
  double z = 1.0;
};

enum class Transform { LogSubstitution, GaussType };

// Quadrature of the heat-kernel integral over t in (0, t_max].
// t_max <= 0 selects a value from z and |x|.
struct QuadSpec {
  double t_max = 0.0;
  int nodes = 1024;
  Transform transform = Transform::LogSubstitution;
  double tol = 1e-12;  // relative disagreement allowed between the rule and its coarsening
};

double euclidean_norm(std::span<const double> x);

// Closed forms, d in {1,3}; r = |x|.
double green_closed(int d, double z, double r);
std::complex<double> green_closed(int d, std::complex<double> z, double r);
double green_closed(const GreenParams& p, std::span<const double> x);

// Heat-kernel quadrature, any d in {1,2,3,4}; r = |x|.
double green_quad(const GreenParams& p, double r, const QuadSpec& spec = {});
double green_quad(const GreenParams& p, std::span<const double> x, const QuadSpec& spec = {});
std::complex<double> green_quad(int d, std::complex<double> z, double r, const QuadSpec& spec = {});

// Tabulated radial profile for repeated evaluation at real z.
// Closed form for d in {1,3}; cubic Hermite interpolation of ln G against ln r for d in {2,4}.
class RadialGreen {
 public:
  RadialGreen(int d, double z, int nodes = 2048);
  double operator()(double r) const;
  int dimension() const { return d_; }
  double z() const { return z_; }

 private:
  int d_;
  double z_;
  double s_lo_ = 0.0, s_hi_ = 0.0, ds_ = 0.0;
  std::vector<double> y_, m_;
};

// Radial Gauss rule on [0, rho_max], graded toward the origin.
struct RadialQuad {
  double rho_max = 0.0;  // <= 0: 45/sqrt(z) plus the offset scale
  int order = 16;
  int levels = 16;
  double tol = 1e-8;  // allowed relative mass beyond rho_max
};

// Integral of G^d_z(x1, x2) over x2 in R^{d-d1}.
double green_partial_integral(int d, int d1, double z, std::span<const double> x1, const RadialQuad& q = {});

// Integral of |G^d_z| over R^d.
double green_l1(int d, double z, const RadialQuad& q = {});

// max(λ^{-3/4}, (16λ)^{-1/4}).
double green_shift_const(double lambda);

struct ShiftCheck {
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ShiftQuad {
  double L = 0.0;         // <= 0: 50/sqrt(λ) plus |x|
  double max_width = 0.25;
  int order = 16;
  double min_shift = 1e-9;
};

// L2 norm of G^1_λ(· + x) - G^1_λ against C(λ) min(1, |x|).
ShiftCheck check_shift_l2(double lambda, double x, const ShiftQuad& q = {});

struct HolderCheck {
  double lhs = 0.0;
  double bound_form = 0.0;  // (1 + |ln|y||) |y|
  double ratio_s = 0.0;     // lhs / |y|^s
};

struct HolderQuad {
  int order = 12;
  int levels = 18;
  double extent = 0.0;  // <= 0: 40/sqrt(z)
  double tol = 1e-7;
};

// L1 norm over x in R^{d-1} of G^d_z(x + y, 0) - G^d_z(x, 0).
HolderCheck check_holder_shift_l1(int d, double z, std::span<const double> y, double s, const HolderQuad& q = {});

// Largest lhs / bound_form over the given |y| values, y along the first axis.
double fit_holder_constant(int d, double z, const std::vector<double>& ys, const HolderQuad& q = {});

}  // namespace contact
