#pragma once

#include <memory>
#include <string>
#include <vector>

#include "contact/quadrature.hpp"

namespace contact {

enum class Shape { Zero, Box, Triangle, Exponential, Gaussian, CosineBox, HeavyTail, Table };

struct MomentReport {
  double m2s = 0.0;  // ∫ |r|^{2s} |V|
  double I = 0.0;    // ‖V‖_1 + m2s
  bool finite = true;
};

// Even potential V_ε(r) = ε^{-1} B(|r|/ε) restricted to |r| <= k, for a base shape B.
// Immutable; norms are computed once at construction.
class Potential {
 public:
  static Potential zero();
  static Potential box(double height = 1.0, double half_width = 0.5);
  static Potential triangle(double height = 1.0, double half_width = 1.0);
  static Potential exponential(double amplitude = 1.0, double rate = 1.0);
  static Potential gaussian(double amplitude = 1.0, double width = 1.0);
  static Potential cosine_box(double amplitude = 1.0);  // A cos(r) on [-π, π]
  static Potential heavy_tail(double p, double amplitude = 1.0);  // A (1+|r|)^{-p}
  // Linear interpolation of (r_i, V_i), zero outside the sampled range, symmetrized in r.
  // Samples with all r_i >= 0 are a profile of |r|.
  static Potential table(std::vector<double> r, std::vector<double> v);
  static Potential from_file(const std::string& path);

  double operator()(double r) const;

  Shape shape() const { return shape_; }
  std::string name() const;
  double scale() const { return eps_; }
  double cutoff_radius() const { return k_; }
  double support_radius() const;  // may be +inf
  // Sorted, symmetric points in [-R, R] where V is not smooth or changes sign.
  std::vector<double> breakpoints() const;

  double l1() const { return l1_; }
  double l2() const { return l2_; }
  double integral() const { return integral_; }
  MomentReport moment(double s) const;
  // ∫ |V|^p |r|^m dr; +inf when the tail diverges.
  double abs_integral(double p, double m) const;

  Potential scaled(double eps) const;
  Potential cut(double k) const;

  // Gauss rule covering the support, truncated where the remaining L1 mass is below tail_tol·‖V‖_1.
  // Panels are at most max_width wide in unscaled units; split_origin keeps a panel break at 0 for smooth shapes.
  Rule aux_rule(int order, double max_width = 1.0, double tail_tol = 1e-10, bool split_origin = false) const;
  // Truncation radius used by aux_rule.
  double truncation_radius(double tail_tol) const;

 private:
  Potential() = default;
  double base(double xi) const;
  double base_support() const;
  std::vector<double> base_breaks() const;
  std::vector<double> base_panels(double R) const;
  double base_integral(double p, double m, bool signed_value, double R) const;
  double base_tail(double p, double m, double R) const;
  void init_norms();

  Shape shape_ = Shape::Zero;
  double a_ = 1.0;  // amplitude
  double b_ = 1.0;  // shape parameter (half width, rate, width, exponent)
  double eps_ = 1.0;
  double k_ = 0.0;  // 0 means no cutoff
  std::shared_ptr<const std::vector<double>> tr_, tv_;
  double l1_ = 0.0, l2_ = 0.0, integral_ = 0.0;
};

Potential scale(const Potential& V, double eps);
Potential cutoff(const Potential& V, double k);
MomentReport moment(const Potential& V, double s);

// v = |V|^{1/2}, u = sgn(V) v, J = sgn(V) with J = 1 where V = 0.
struct Factorization {
  Potential V;
  double v(double r) const;
  double u(double r) const;
  double J(double r) const;
};

Factorization factorize(const Potential& V);

// g_ε = g + c ε^{s_g}; s_g <= 0 or c = 0 means constant coupling.
struct CouplingSchedule {
  double g = 1.0;
  double c = 0.0;
  double s_g = 0.0;

  double g_eps(double eps) const;
  bool has_rate() const { return c != 0.0 && s_g > 0.0; }
  double alpha(const Potential& V) const { return g * V.integral(); }
};

}  // namespace contact
