#pragma once

#include <cstddef>
#include <vector>

namespace contact {

// Nodes and positive weights of a one-dimensional rule.
struct Rule {
  std::vector<double> x;
  std::vector<double> w;

  std::size_t size() const { return x.size(); }
  void append(const Rule& other);
};

// Gauss-Legendre rule with n nodes on [a, b].
Rule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// One Gauss-Legendre panel of the given order between consecutive breaks.
// Breaks must be strictly increasing.
Rule composite_gauss(const std::vector<double>& breaks, int order);

// Panels on [a, b] whose widths shrink geometrically by `ratio` toward a.
Rule graded_gauss(double a, double b, int order, int levels, double ratio = 0.25);

// Breaks on [a, b] containing every interior cut point, with no panel wider than max_width.
std::vector<double> refine_breaks(double a, double b, const std::vector<double>& cuts, double max_width);

enum class GridKind { Trapezoid, Midpoint, Gauss };

// Truncated grid on [-L, L].
struct QuadratureGrid {
  double L = 0.0;
  int n = 0;
  GridKind kind = GridKind::Trapezoid;
  std::vector<double> nodes;
  std::vector<double> weights;

  // n nodes including both endpoints, spacing 2L/(n-1).
  static QuadratureGrid trapezoid(double L, int n);
  // n cell centres, spacing 2L/n.
  static QuadratureGrid midpoint(double L, int n);
  // n Gauss-Legendre nodes split into panels of `order` nodes.
  static QuadratureGrid gauss(double L, int n, int order = 16);

  double spacing() const;
  std::size_t size() const { return nodes.size(); }
  Rule rule() const { return Rule{nodes, weights}; }
};

}  // namespace contact
