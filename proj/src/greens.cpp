#include "contact/greens.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "contact/errors.hpp"
#include "contact/quadrature.hpp"

namespace contact {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSingularRadius = 1e-8;

void require_dimension(int d, int hi = 4) {
  if (d < 1 || d > hi) throw DomainError("green: dimension out of range");
}

// Heat-kernel integral for d in [1, 6]. Returns the rule value; throws when the
// rule and its coarsening disagree beyond spec.tol.
std::complex<double> heat_integral(int d, std::complex<double> z, double r, const QuadSpec& spec) {
  const double re = z.real();
  if (!(re > 0.0)) throw DomainError("green: Re z must be positive");
  if (spec.nodes < 16) throw DomainError("green: quadrature needs at least 16 nodes");
  if (d >= 2 && r < kSingularRadius) throw SingularPointError("green: |x| below 1e-8 for d >= 2");

  // the integrand at both cuts is below e^{-45} times its peak e^{-r sqrt(z)}
  const double rk = r * std::sqrt(re);
  const double t_min = r > 0.0 ? r * r / (4.0 * (2.0 * rk + 60.0)) : 1e-30;
  const double t_max = spec.t_max > 0.0 ? spec.t_max : (2.0 * rk + 45.0) / re;
  if (!(t_max > t_min)) throw DomainError("green: t_max below the lower cut");
  const double u0 = std::log(t_min), u1 = std::log(t_max);
  const double half_d = 0.5 * d;
  const double log4pi = std::log(4.0 * kPi);

  auto f = [&](double u) {
    const double t = std::exp(u);
    const double expo_re = -half_d * (log4pi + u) - r * r / (4.0 * t) - re * t + u;
    const double phase = -z.imag() * t;
    const double mag = std::exp(expo_re);
    return std::complex<double>(mag * std::cos(phase), mag * std::sin(phase));
  };

  std::complex<double> fine{0.0, 0.0}, coarse{0.0, 0.0};
  if (spec.transform == Transform::LogSubstitution) {
    const int n = spec.nodes;
    const double h = (u1 - u0) / (n - 1);
    for (int k = 0; k < n; ++k) {
      const double wk = (k == 0 || k == n - 1) ? 0.5 : 1.0;
      const std::complex<double> v = f(u0 + h * k);
      fine += wk * h * v;
    }
    // every other node; the last node joins when n - 1 is even
    const int m = (n - 1) / 2;
    const double h2 = 2.0 * h;
    for (int k = 0; k <= m; ++k) {
      const double wk = (k == 0 || k == m) ? 0.5 : 1.0;
      coarse += wk * h2 * f(u0 + h2 * k);
    }
    if ((n - 1) % 2 == 1) coarse += 0.5 * h * (f(u0 + h2 * m) + f(u1));
  } else {
    const int order = 16;
    const int panels = std::max(1, spec.nodes / order);
    std::vector<double> breaks(panels + 1);
    for (int k = 0; k <= panels; ++k) breaks[k] = u0 + (u1 - u0) * k / panels;
    const Rule hi = composite_gauss(breaks, order);
    const Rule lo = composite_gauss(breaks, order / 2);
    for (std::size_t i = 0; i < hi.size(); ++i) fine += hi.w[i] * f(hi.x[i]);
    for (std::size_t i = 0; i < lo.size(); ++i) coarse += lo.w[i] * f(lo.x[i]);
  }
  // below 1e-250 the value is indistinguishable from zero downstream
  if (std::abs(fine) > 1e-250 && std::abs(fine - coarse) > spec.tol * std::abs(fine)) {
    throw NonConvergenceError("green_quad: refinements disagree beyond tolerance");
  }
  return fine;
}

// Breaks on [a, b] graded geometrically toward the chosen end, widths capped by max_width.
// The innermost panel stays above 2e-6 so that Gauss nodes avoid the singular radius.
std::vector<double> graded_breaks(double a, double b, bool toward_a, int levels, double ratio, double max_width) {
  std::vector<double> cuts;
  const int cap = static_cast<int>(std::floor(std::log((b - a) / 2e-6) / std::log(1.0 / ratio)));
  levels = std::max(0, std::min(levels, cap));
  double len = b - a;
  for (int k = 0; k < levels; ++k) {
    len *= ratio;
    cuts.push_back(toward_a ? a + len : b - len);
  }
  return refine_breaks(a, b, cuts, max_width);
}

Rule radial_rule(double rho_max, double scale, int order, int levels) {
  return composite_gauss(graded_breaks(0.0, rho_max, true, levels, 0.5, scale), order);
}

double sphere_area(int k) {  // area of the unit sphere in R^k
  switch (k) {
    case 1: return 2.0;
    case 2: return 2.0 * kPi;
    case 3: return 4.0 * kPi;
    case 4: return 2.0 * kPi * kPi;
    default: throw DomainError("sphere_area: unsupported dimension");
  }
}

}  // namespace

double euclidean_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double green_closed(int d, double z, double r) {
  if (!(z > 0.0)) throw DomainError("green_closed: z must be positive");
  const double k = std::sqrt(z);
  if (d == 1) return std::exp(-k * std::abs(r)) / (2.0 * k);
  if (d == 3) {
    if (std::abs(r) < kSingularRadius) throw SingularPointError("green_closed: x = 0 for d = 3");
    return std::exp(-k * std::abs(r)) / (4.0 * kPi * std::abs(r));
  }
  throw DomainError("green_closed: closed form only for d in {1,3}");
}

std::complex<double> green_closed(int d, std::complex<double> z, double r) {
  if (!(z.real() > 0.0)) throw DomainError("green_closed: Re z must be positive");
  const std::complex<double> k = std::sqrt(z);
  if (d == 1) return std::exp(-k * std::abs(r)) / (2.0 * k);
  if (d == 3) {
    if (std::abs(r) < kSingularRadius) throw SingularPointError("green_closed: x = 0 for d = 3");
    return std::exp(-k * std::abs(r)) / (4.0 * kPi * std::abs(r));
  }
  throw DomainError("green_closed: closed form only for d in {1,3}");
}

double green_closed(const GreenParams& p, std::span<const double> x) {
  if (static_cast<int>(x.size()) != p.d) throw DomainError("green_closed: point dimension mismatch");
  return green_closed(p.d, p.z, euclidean_norm(x));
}

double green_quad(const GreenParams& p, double r, const QuadSpec& spec) {
  require_dimension(p.d);
  return heat_integral(p.d, {p.z, 0.0}, std::abs(r), spec).real();
}

double green_quad(const GreenParams& p, std::span<const double> x, const QuadSpec& spec) {
  if (static_cast<int>(x.size()) != p.d) throw DomainError("green_quad: point dimension mismatch");
  return green_quad(p, euclidean_norm(x), spec);
}

std::complex<double> green_quad(int d, std::complex<double> z, double r, const QuadSpec& spec) {
  require_dimension(d);
  return heat_integral(d, z, std::abs(r), spec);
}

RadialGreen::RadialGreen(int d, double z, int nodes) : d_(d), z_(z) {
  require_dimension(d);
  if (!(z > 0.0)) throw DomainError("RadialGreen: z must be positive");
  if (d == 1 || d == 3) return;
  if (nodes < 16) throw DomainError("RadialGreen: too few nodes");
  s_lo_ = std::log(1e-6);
  s_hi_ = std::log(600.0 / std::sqrt(z));
  ds_ = (s_hi_ - s_lo_) / (nodes - 1);
  y_.resize(nodes);
  m_.resize(nodes);
  QuadSpec spec;
  spec.tol = 1e-11;
  for (int k = 0; k < nodes; ++k) {
    const double r = std::exp(s_lo_ + ds_ * k);
    const double g = heat_integral(d, {z, 0.0}, r, spec).real();
    const double g2 = heat_integral(d + 2, {z, 0.0}, r, spec).real();
    // dG^d/dr = -2π r G^{d+2}
    y_[k] = std::log(g);
    m_[k] = -2.0 * kPi * r * r * g2 / g;
  }
}

double RadialGreen::operator()(double r) const {
  r = std::abs(r);
  if (d_ == 1 || d_ == 3) return green_closed(d_, z_, r);
  if (r < kSingularRadius) throw SingularPointError("RadialGreen: |x| below 1e-8");
  const double s = std::log(r);
  if (s < s_lo_) return heat_integral(d_, {z_, 0.0}, r, QuadSpec{}).real();
  if (s >= s_hi_) return 0.0;
  const double pos = (s - s_lo_) / ds_;
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(pos), y_.size() - 2);
  const double t = pos - static_cast<double>(k);
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  const double y = h00 * y_[k] + h10 * ds_ * m_[k] + h01 * y_[k + 1] + h11 * ds_ * m_[k + 1];
  return std::exp(y);
}

double green_partial_integral(int d, int d1, double z, std::span<const double> x1, const RadialQuad& q) {
  require_dimension(d);
  if (d1 < 1 || d1 >= d) throw DomainError("green_partial_integral: need 1 <= d1 < d");
  if (static_cast<int>(x1.size()) != d1) throw DomainError("green_partial_integral: x1 dimension mismatch");
  if (!(z > 0.0)) throw DomainError("green_partial_integral: z must be positive");
  const double a = euclidean_norm(x1);
  if (d1 >= 2 && a < kSingularRadius) throw SingularPointError("green_partial_integral: x1 = 0 with d1 >= 2");
  const int k = d - d1;
  const double scale = 1.0 / std::sqrt(z);
  const double rho_max = q.rho_max > 0.0 ? q.rho_max : 45.0 * scale;
  const GreenParams p{d, z};
  QuadSpec spec;
  spec.tol = 1e-11;
  auto integrand = [&](double rho) {
    const double r = std::sqrt(a * a + rho * rho);
    const double g = (d == 1 || d == 3) ? green_closed(d, z, r) : green_quad(p, r, spec);
    return sphere_area(k) * std::pow(rho, k - 1) * g;
  };
  const Rule rule = radial_rule(rho_max, 2.0 * scale, q.order, q.levels);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) total += rule.w[i] * integrand(rule.x[i]);
  const Rule tail = composite_gauss(refine_breaks(rho_max, 2.0 * rho_max, {}, 2.0 * scale), q.order);
  double beyond = 0.0;
  for (std::size_t i = 0; i < tail.size(); ++i) beyond += tail.w[i] * integrand(tail.x[i]);
  if (beyond > q.tol * std::abs(total)) throw TruncationError("green_partial_integral: mass beyond rho_max exceeds tolerance");
  return total;
}

double green_l1(int d, double z, const RadialQuad& q) {
  require_dimension(d);
  if (!(z > 0.0)) throw DomainError("green_l1: z must be positive");
  const double scale = 1.0 / std::sqrt(z);
  const double rho_max = q.rho_max > 0.0 ? q.rho_max : 45.0 * scale;
  const GreenParams p{d, z};
  QuadSpec spec;
  spec.tol = 1e-11;
  auto integrand = [&](double rho) {
    const double g = (d == 1 || d == 3) ? green_closed(d, z, rho) : green_quad(p, rho, spec);
    return sphere_area(d) * std::pow(rho, d - 1) * std::abs(g);
  };
  const Rule rule = radial_rule(rho_max, 2.0 * scale, q.order, q.levels);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) total += rule.w[i] * integrand(rule.x[i]);
  const Rule tail = composite_gauss(refine_breaks(rho_max, 2.0 * rho_max, {}, 2.0 * scale), q.order);
  double beyond = 0.0;
  for (std::size_t i = 0; i < tail.size(); ++i) beyond += tail.w[i] * integrand(tail.x[i]);
  if (beyond > q.tol * std::abs(total)) throw TruncationError("green_l1: mass beyond rho_max exceeds tolerance");
  return total;
}

double green_shift_const(double lambda) {
  if (!(lambda > 0.0)) throw DomainError("green_shift_const: λ must be positive");
  return std::max(std::pow(lambda, -0.75), std::pow(16.0 * lambda, -0.25));
}

ShiftCheck check_shift_l2(double lambda, double x, const ShiftQuad& q) {
  if (!(lambda > 0.0)) throw DomainError("check_shift_l2: λ must be positive");
  ShiftCheck out;
  out.rhs = green_shift_const(lambda) * std::min(1.0, std::abs(x));
  if (x == 0.0) return out;
  if (std::abs(x) < q.min_shift) throw GridResolutionError("check_shift_l2: shift below grid resolution");
  const double L = q.L > 0.0 ? q.L : 50.0 / std::sqrt(lambda) + std::abs(x);
  const Rule rule = composite_gauss(refine_breaks(-L, L, {0.0, -x}, q.max_width), q.order);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double diff = green_closed(1, lambda, rule.x[i] + x) - green_closed(1, lambda, rule.x[i]);
    s += rule.w[i] * diff * diff;
  }
  out.lhs = std::sqrt(s);
  return out;
}

HolderCheck check_holder_shift_l1(int d, double z, std::span<const double> y, double s, const HolderQuad& q) {
  if (d < 2 || d > 4) throw DomainError("check_holder_shift_l1: d must be in {2,3,4}");
  if (static_cast<int>(y.size()) != d - 1) throw DomainError("check_holder_shift_l1: y dimension mismatch");
  if (!(s > 0.0 && s < 1.0)) throw DomainError("check_holder_shift_l1: s must lie in (0,1)");
  const double a = euclidean_norm(y);
  HolderCheck out;
  if (a == 0.0) return out;
  out.bound_form = (1.0 + std::abs(std::log(a))) * a;
  const double scale = 1.0 / std::sqrt(z);
  const double E = (q.extent > 0.0 ? q.extent : 40.0 * scale) + a;
  const double w = scale;
  const RadialGreen G(d, z);

  // x1 axis along y, singular points at x1 = -a and x1 = 0, kink at -a/2
  std::vector<double> b1;
  auto add = [&](const std::vector<double>& seg) {
    if (b1.empty()) b1 = seg;
    else b1.insert(b1.end(), seg.begin() + 1, seg.end());
  };
  add(graded_breaks(-E, -a, false, q.levels, 0.5, w));
  add(graded_breaks(-a, -0.5 * a, true, q.levels, 0.5, w));
  add(graded_breaks(-0.5 * a, 0.0, false, q.levels, 0.5, w));
  add(graded_breaks(0.0, E, true, q.levels, 0.5, w));
  const Rule r1 = composite_gauss(b1, q.order);

  double total = 0.0;
  if (d == 2) {
    for (std::size_t i = 0; i < r1.size(); ++i) {
      const double x = r1.x[i];
      total += r1.w[i] * std::abs(G(x + a) - G(x));
    }
  } else {
    const Rule rr = composite_gauss(graded_breaks(0.0, E, true, q.levels, 0.5, w), q.order);
    for (std::size_t j = 0; j < rr.size(); ++j) {
      const double rho = rr.x[j];
      const double meas = (d == 3) ? 2.0 : 2.0 * kPi * rho;
      double line = 0.0;
      for (std::size_t i = 0; i < r1.size(); ++i) {
        const double x = r1.x[i];
        const double g1 = G(std::sqrt((x + a) * (x + a) + rho * rho));
        const double g0 = G(std::sqrt(x * x + rho * rho));
        line += r1.w[i] * std::abs(g1 - g0);
      }
      total += rr.w[j] * meas * line;
    }
  }
  out.lhs = total;
  out.ratio_s = total / std::pow(a, s);
  return out;
}

double fit_holder_constant(int d, double z, const std::vector<double>& ys, const HolderQuad& q) {
  double c = 0.0;
  for (double a : ys) {
    std::vector<double> y(d - 1, 0.0);
    y[0] = a;
    const HolderCheck h = check_holder_shift_l1(d, z, y, 0.5, q);
    if (h.bound_form > 0.0) c = std::max(c, h.lhs / h.bound_form);
  }
  return c;
}

}  // namespace contact
