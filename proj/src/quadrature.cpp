#include "contact/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "contact/errors.hpp"

namespace contact {

void Rule::append(const Rule& other) {
  x.insert(x.end(), other.x.begin(), other.x.end());
  w.insert(w.end(), other.w.begin(), other.w.end());
}

Rule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw DomainError("gauss_legendre: n must be positive");
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * x * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (x * p1 - p2) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        if (it > 0) break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.x[i] = mid - half * x;
    r.x[n - 1 - i] = mid + half * x;
    r.w[i] = r.w[n - 1 - i] = half * w;
  }
  if (n % 2 == 1) r.x[n / 2] = mid;
  return r;
}

Rule composite_gauss(const std::vector<double>& breaks, int order) {
  Rule base = gauss_legendre(order);
  Rule out;
  out.x.reserve(order * breaks.size());
  out.w.reserve(order * breaks.size());
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = breaks[k], b = breaks[k + 1];
    if (!(b > a)) throw DomainError("composite_gauss: breaks must increase");
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < order; ++i) {
      out.x.push_back(mid + half * base.x[i]);
      out.w.push_back(half * base.w[i]);
    }
  }
  return out;
}

Rule graded_gauss(double a, double b, int order, int levels, double ratio) {
  std::vector<double> breaks{a};
  std::vector<double> inner;
  double len = b - a;
  for (int k = 0; k < levels; ++k) {
    len *= ratio;
    inner.push_back(a + len);
  }
  std::reverse(inner.begin(), inner.end());
  breaks.insert(breaks.end(), inner.begin(), inner.end());
  breaks.push_back(b);
  return composite_gauss(breaks, order);
}

std::vector<double> refine_breaks(double a, double b, const std::vector<double>& cuts, double max_width) {
  std::vector<double> pts{a, b};
  for (double c : cuts)
    if (c > a && c < b) pts.push_back(c);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<double> out{pts.front()};
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double len = pts[k + 1] - pts[k];
    const int m = std::max(1, static_cast<int>(std::ceil(len / max_width - 1e-12)));
    for (int i = 1; i <= m; ++i) out.push_back(i == m ? pts[k + 1] : pts[k] + len * i / m);
  }
  return out;
}

QuadratureGrid QuadratureGrid::trapezoid(double L, int n) {
  if (L <= 0.0 || n < 8) throw DomainError("QuadratureGrid: need L > 0 and n >= 8");
  QuadratureGrid g;
  g.L = L;
  g.n = n;
  g.kind = GridKind::Trapezoid;
  const double h = 2.0 * L / (n - 1);
  g.nodes.resize(n);
  g.weights.assign(n, h);
  for (int i = 0; i < n; ++i) g.nodes[i] = -L + h * i;
  g.weights.front() = g.weights.back() = 0.5 * h;
  return g;
}

QuadratureGrid QuadratureGrid::midpoint(double L, int n) {
  if (L <= 0.0 || n < 8) throw DomainError("QuadratureGrid: need L > 0 and n >= 8");
  QuadratureGrid g;
  g.L = L;
  g.n = n;
  g.kind = GridKind::Midpoint;
  const double h = 2.0 * L / n;
  g.nodes.resize(n);
  g.weights.assign(n, h);
  for (int i = 0; i < n; ++i) g.nodes[i] = -L + h * (i + 0.5);
  return g;
}

QuadratureGrid QuadratureGrid::gauss(double L, int n, int order) {
  if (L <= 0.0 || n < 8) throw DomainError("QuadratureGrid: need L > 0 and n >= 8");
  if (n % order != 0) throw DomainError("QuadratureGrid::gauss: n must be a multiple of order");
  const int panels = n / order;
  std::vector<double> breaks(panels + 1);
  for (int k = 0; k <= panels; ++k) breaks[k] = -L + 2.0 * L * k / panels;
  Rule r = composite_gauss(breaks, order);
  QuadratureGrid g;
  g.L = L;
  g.n = n;
  g.kind = GridKind::Gauss;
  g.nodes = std::move(r.x);
  g.weights = std::move(r.w);
  return g;
}

double QuadratureGrid::spacing() const {
  switch (kind) {
    case GridKind::Trapezoid: return 2.0 * L / (n - 1);
    case GridKind::Midpoint: return 2.0 * L / n;
    case GridKind::Gauss: break;
  }
  return 2.0 * L / n;
}

}  // namespace contact
