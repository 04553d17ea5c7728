#include "contact/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "contact/errors.hpp"

namespace contact {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
constexpr double kHeavySplit = 1024.0;

double interp(const std::vector<double>& x, const std::vector<double>& y, double t) {
  if (t < x.front() || t > x.back()) return 0.0;
  const auto it = std::upper_bound(x.begin(), x.end(), t);
  if (it == x.end()) return y.back();
  const std::size_t j = static_cast<std::size_t>(it - x.begin());
  if (j == 0) return y.front();
  const double s = (t - x[j - 1]) / (x[j] - x[j - 1]);
  return (1.0 - s) * y[j - 1] + s * y[j];
}

bool is_integer(double m) { return std::abs(m - std::round(m)) < 1e-14; }

}  // namespace

Potential Potential::zero() {
  Potential p;
  p.shape_ = Shape::Zero;
  p.a_ = 0.0;
  p.init_norms();
  return p;
}

Potential Potential::box(double height, double half_width) {
  if (!(half_width > 0.0)) throw DomainError("box: half width must be positive");
  Potential p;
  p.shape_ = Shape::Box;
  p.a_ = height;
  p.b_ = half_width;
  p.init_norms();
  return p;
}

Potential Potential::triangle(double height, double half_width) {
  if (!(half_width > 0.0)) throw DomainError("triangle: half width must be positive");
  Potential p;
  p.shape_ = Shape::Triangle;
  p.a_ = height;
  p.b_ = half_width;
  p.init_norms();
  return p;
}

Potential Potential::exponential(double amplitude, double rate) {
  if (!(rate > 0.0)) throw DomainError("exponential: rate must be positive");
  Potential p;
  p.shape_ = Shape::Exponential;
  p.a_ = amplitude;
  p.b_ = rate;
  p.init_norms();
  return p;
}

Potential Potential::gaussian(double amplitude, double width) {
  if (!(width > 0.0)) throw DomainError("gaussian: width must be positive");
  Potential p;
  p.shape_ = Shape::Gaussian;
  p.a_ = amplitude;
  p.b_ = width;
  p.init_norms();
  return p;
}

Potential Potential::cosine_box(double amplitude) {
  Potential p;
  p.shape_ = Shape::CosineBox;
  p.a_ = amplitude;
  p.b_ = kPi;
  p.init_norms();
  return p;
}

Potential Potential::heavy_tail(double power, double amplitude) {
  if (!(power > 1.0)) throw DomainError("heavy_tail: exponent must exceed 1 for V in L1");
  Potential p;
  p.shape_ = Shape::HeavyTail;
  p.a_ = amplitude;
  p.b_ = power;
  p.init_norms();
  return p;
}

Potential Potential::table(std::vector<double> r, std::vector<double> v) {
  if (r.size() != v.size() || r.size() < 2) throw DomainError("table: need at least two (r, V) samples");
  std::vector<std::size_t> idx(r.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return r[i] < r[j]; });
  std::vector<double> rs, vs;
  for (std::size_t i : idx) {
    if (!std::isfinite(r[i]) || !std::isfinite(v[i])) throw DomainError("table: non-finite sample");
    if (!rs.empty() && r[i] <= rs.back()) throw DomainError("table: duplicate abscissa");
    rs.push_back(r[i]);
    vs.push_back(v[i]);
  }
  if (rs.front() >= 0.0) {
    // half-line profile: mirror to r < 0
    std::vector<double> mr, mv;
    for (std::size_t i = rs.size(); i-- > 0;)
      if (rs[i] > 0.0) {
        mr.push_back(-rs[i]);
        mv.push_back(vs[i]);
      }
    mr.insert(mr.end(), rs.begin(), rs.end());
    mv.insert(mv.end(), vs.begin(), vs.end());
    rs = std::move(mr);
    vs = std::move(mv);
  }
  Potential p;
  p.shape_ = Shape::Table;
  p.a_ = 1.0;
  p.tr_ = std::make_shared<const std::vector<double>>(std::move(rs));
  p.tv_ = std::make_shared<const std::vector<double>>(std::move(vs));
  p.init_norms();
  return p;
}

Potential Potential::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("potential file not readable: " + path);
  std::vector<double> r, v;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double a = 0.0, b = 0.0;
    if (!(ss >> a)) continue;
    if (!(ss >> b)) throw ConfigError("potential file: expected two columns in " + path);
    r.push_back(a);
    v.push_back(b);
  }
  return table(std::move(r), std::move(v));
}

double Potential::base(double xi) const {
  xi = std::abs(xi);
  switch (shape_) {
    case Shape::Zero: return 0.0;
    case Shape::Box: return xi <= b_ ? a_ : 0.0;
    case Shape::Triangle: return a_ * std::max(0.0, 1.0 - xi / b_);
    case Shape::Exponential: return a_ * std::exp(-b_ * xi);
    case Shape::Gaussian: return a_ * std::exp(-(xi / b_) * (xi / b_));
    case Shape::CosineBox: return xi <= kPi ? a_ * std::cos(xi) : 0.0;
    case Shape::HeavyTail: return a_ * std::pow(1.0 + xi, -b_);
    case Shape::Table: return 0.5 * (interp(*tr_, *tv_, xi) + interp(*tr_, *tv_, -xi));
  }
  return 0.0;
}

double Potential::operator()(double r) const {
  const double ar = std::abs(r);
  if (k_ > 0.0 && ar > k_) return 0.0;
  return base(ar / eps_) / eps_;
}

std::string Potential::name() const {
  switch (shape_) {
    case Shape::Zero: return "zero";
    case Shape::Box: return "box";
    case Shape::Triangle: return "triangle";
    case Shape::Exponential: return "exponential";
    case Shape::Gaussian: return "gaussian";
    case Shape::CosineBox: return "cosine_box";
    case Shape::HeavyTail: return "heavy_tail";
    case Shape::Table: return "table";
  }
  return "unknown";
}

double Potential::base_support() const {
  switch (shape_) {
    case Shape::Zero: return 0.0;
    case Shape::Box:
    case Shape::Triangle: return b_;
    case Shape::CosineBox: return kPi;
    case Shape::Table: return std::max(std::abs(tr_->front()), std::abs(tr_->back()));
    default: return kInf;
  }
}

double Potential::support_radius() const {
  const double s = eps_ * base_support();
  return k_ > 0.0 ? std::min(s, k_) : s;
}

std::vector<double> Potential::base_breaks() const {
  // 0 is a break only where the shape has a kink there
  std::vector<double> out;
  if (shape_ == Shape::Triangle || shape_ == Shape::Exponential || shape_ == Shape::HeavyTail ||
      shape_ == Shape::Table)
    out.push_back(0.0);
  switch (shape_) {
    case Shape::Box:
    case Shape::Triangle: out.push_back(b_); break;
    case Shape::CosineBox: out.push_back(0.5 * kPi); out.push_back(kPi); break;
    case Shape::Table: {
      std::vector<double> nodes;
      for (double r : *tr_) nodes.push_back(std::abs(r));
      std::sort(nodes.begin(), nodes.end());
      nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        out.push_back(nodes[i]);
        if (i + 1 < nodes.size()) {
          const double f0 = base(nodes[i]), f1 = base(nodes[i + 1]);
          if (f0 * f1 < 0.0) out.push_back(nodes[i] + (nodes[i + 1] - nodes[i]) * f0 / (f0 - f1));
        }
      }
      break;
    }
    default: break;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> Potential::breakpoints() const {
  const double R = support_radius();
  std::vector<double> out;
  for (double xi : base_breaks()) {
    const double r = eps_ * xi;
    if (r > R) continue;
    out.push_back(r);
    if (r > 0.0) out.push_back(-r);
  }
  if (k_ > 0.0 && k_ < eps_ * base_support()) {
    out.push_back(k_);
    out.push_back(-k_);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Panel breaks on [0, R] in unscaled units.
std::vector<double> Potential::base_panels(double R) const {
  const double unit = (shape_ == Shape::Exponential) ? 1.0 / b_
                      : (shape_ == Shape::Gaussian || shape_ == Shape::Box || shape_ == Shape::Triangle) ? b_
                                                                                                            : 1.0;
  const double near = std::min(R, 16.0 * unit);
  std::vector<double> cuts = base_breaks();
  std::vector<double> pts = refine_breaks(0.0, near, cuts, 0.25 * unit);
  double x = near;
  while (x < R) {
    const double next = std::min(R, 2.0 * x);
    for (double c : cuts)
      if (c > x && c < next) pts.push_back(c);
    pts.push_back(next);
    x = next;
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double Potential::base_tail(double p, double m, double R0) const {
  // ∫_{R0}^∞ |a|^p (1+ξ)^{-bp} ξ^m dξ via t = 1/(1+ξ), t = t0 w^{1/e}
  const double e = b_ * p - 1.0 - m;
  if (e <= 1e-12) return kInf;
  const double t0 = 1.0 / (1.0 + R0);
  const Rule r = gauss_legendre(48, 0.0, 1.0);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.w[i] * std::pow(1.0 - t0 * std::pow(r.x[i], 1.0 / e), m);
  return std::pow(std::abs(a_), p) * std::pow(t0, e) / e * s;
}

double Potential::base_integral(double p, double m, bool signed_value, double R) const {
  if (shape_ == Shape::Zero || R <= 0.0) return 0.0;
  double limit = R;
  double tail = 0.0;
  if (!std::isfinite(limit)) {
    switch (shape_) {
      case Shape::Exponential: limit = (60.0 + 2.0 * m) / b_; break;
      case Shape::Gaussian: limit = (9.0 + std::sqrt(m)) * b_; break;
      case Shape::HeavyTail:
        limit = kHeavySplit;
        tail = base_tail(p, m, kHeavySplit);
        if (signed_value && a_ < 0.0) tail = -tail;
        break;
      default: break;
    }
  }
  std::vector<double> breaks = base_panels(limit);
  if (breaks.size() < 2) return 0.0;
  if (!is_integer(m)) {
    // graded toward 0 for the |ξ|^m factor
    std::vector<double> graded;
    for (int k = 30; k >= 1; --k) graded.push_back(breaks[1] * std::ldexp(1.0, -k));
    breaks.insert(breaks.begin() + 1, graded.begin(), graded.end());
  }
  const Rule rule = composite_gauss(breaks, 16);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double xi = rule.x[i];
    const double b = base(xi);
    const double f = signed_value ? b : std::pow(std::abs(b), p);
    s += rule.w[i] * f * (m == 0.0 ? 1.0 : std::pow(xi, m));
  }
  return 2.0 * (s + tail);
}

void Potential::init_norms() {
  const double Rb = k_ > 0.0 ? std::min(k_ / eps_, base_support()) : base_support();
  l1_ = base_integral(1.0, 0.0, false, Rb);
  const double l2sq = base_integral(2.0, 0.0, false, Rb) / eps_;
  integral_ = base_integral(1.0, 0.0, true, Rb);
  if (!std::isfinite(l1_) || !std::isfinite(l2sq)) throw DomainError("potential must lie in L1 and L2");
  l2_ = std::sqrt(l2sq);
}

double Potential::abs_integral(double p, double m) const {
  const double Rb = k_ > 0.0 ? std::min(k_ / eps_, base_support()) : base_support();
  const double J = base_integral(p, m, false, Rb);
  return std::pow(eps_, 1.0 - p + m) * J;
}

MomentReport Potential::moment(double s) const {
  if (!(s > 0.0 && s <= 1.0)) throw DomainError("moment: s must lie in (0,1]");
  MomentReport out;
  out.m2s = abs_integral(1.0, 2.0 * s);
  out.finite = std::isfinite(out.m2s);
  out.I = l1_ + out.m2s;
  return out;
}

Potential Potential::scaled(double eps) const {
  if (!(eps > 0.0)) throw DomainError("scale: ε must be positive");
  Potential p = *this;
  p.eps_ = eps_ * eps;
  p.k_ = k_ * eps;
  p.l2_ = l2_ / std::sqrt(eps);
  return p;
}

Potential Potential::cut(double k) const {
  if (!(k > 0.0)) throw DomainError("cutoff: k must be positive");
  Potential p = *this;
  p.k_ = k_ > 0.0 ? std::min(k_, k) : k;
  p.init_norms();
  return p;
}

double Potential::truncation_radius(double tail_tol) const {
  const double S = support_radius();
  if (std::isfinite(S)) return S;
  const double l1b = l1_;
  double xi = 0.0;
  switch (shape_) {
    case Shape::Exponential:
      xi = std::log(2.0 * std::abs(a_) / (b_ * tail_tol * l1b)) / b_;
      break;
    case Shape::Gaussian: {
      xi = b_;
      while (std::abs(a_) * b_ * std::sqrt(kPi) * std::erfc(xi / b_) > tail_tol * l1b) xi += 0.25 * b_;
      break;
    }
    case Shape::HeavyTail:
      xi = std::pow(tail_tol * l1b * (b_ - 1.0) / (2.0 * std::abs(a_)), 1.0 / (1.0 - b_)) - 1.0;
      break;
    default: break;
  }
  xi = std::max(xi, 1.0);
  return eps_ * xi;
}

Rule Potential::aux_rule(int order, double max_width, double tail_tol, bool split_origin) const {
  Rule out;
  if (shape_ == Shape::Zero) return out;
  const double Rb = truncation_radius(tail_tol) / eps_;
  const double unit = (shape_ == Shape::Exponential) ? 1.0 / b_ : 1.0;
  const double near = std::min(Rb, 16.0 * unit);
  std::vector<double> cuts;
  for (double c : base_breaks())
    if (c < near) cuts.push_back(c);
  std::vector<double> half = refine_breaks(0.0, near, cuts, max_width > 0.0 ? max_width : near);
  for (double x = near; x < Rb;) {
    const double next = std::min(Rb, 2.0 * x);
    half.push_back(next);
    x = next;
  }
  std::vector<double> full;
  for (auto it = half.rbegin(); it != half.rend(); ++it)
    if (*it > 0.0) full.push_back(-*it);
  full.insert(full.end(), half.begin(), half.end());
  const std::vector<double> bb = base_breaks();
  if (!split_origin && (bb.empty() || bb.front() != 0.0)) {
    // smooth at the origin: merge the two central panels
    const auto mid = std::find(full.begin(), full.end(), 0.0);
    if (mid != full.end() && full.size() > 2) full.erase(mid);
  }
  out = composite_gauss(full, order);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.x[i] *= eps_;
    out.w[i] *= eps_;
  }
  return out;
}

Potential scale(const Potential& V, double eps) { return V.scaled(eps); }
Potential cutoff(const Potential& V, double k) { return V.cut(k); }
MomentReport moment(const Potential& V, double s) { return V.moment(s); }

double Factorization::v(double r) const { return std::sqrt(std::abs(V(r))); }
double Factorization::u(double r) const {
  const double x = V(r);
  return x < 0.0 ? -std::sqrt(-x) : std::sqrt(x);
}
double Factorization::J(double r) const { return V(r) < 0.0 ? -1.0 : 1.0; }

Factorization factorize(const Potential& V) { return Factorization{V}; }

double CouplingSchedule::g_eps(double eps) const {
  if (!has_rate()) return g;
  return g + c * std::pow(eps, s_g);
}

}  // namespace contact
