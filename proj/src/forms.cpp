#include "contact/forms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "contact/errors.hpp"

namespace contact {

namespace {

constexpr double kPi = std::numbers::pi;

struct Factor {
  std::function<double(const double*)> f;
  std::function<void(const double*, double*)> grad;  // writes ∇f
};

Factor gaussian_factor(const Eigen::MatrixXd& A, const Eigen::VectorXd& c) {
  const int N = static_cast<int>(c.size());
  auto val = [A, c, N](const double* x) {
    Eigen::VectorXd d(N);
    for (int k = 0; k < N; ++k) d[k] = x[k] - c[k];
    return std::exp(-0.5 * d.dot(A * d));
  };
  auto grad = [A, c, N, val](const double* x, double* g) {
    Eigen::VectorXd d(N);
    for (int k = 0; k < N; ++k) d[k] = x[k] - c[k];
    const Eigen::VectorXd Ad = A * d;
    const double v = std::exp(-0.5 * d.dot(Ad));
    for (int k = 0; k < N; ++k) g[k] = -Ad[k] * v;
  };
  return {val, grad};
}

// a0 + Σ a_m cos(k_m · x + φ_m)
Factor wave_factor(int N, double a0, std::vector<double> amp, std::vector<Eigen::VectorXd> k, std::vector<double> phase) {
  auto val = [=](const double* x) {
    double s = a0;
    for (std::size_t m = 0; m < amp.size(); ++m) {
      double arg = phase[m];
      for (int d = 0; d < N; ++d) arg += k[m][d] * x[d];
      s += amp[m] * std::cos(arg);
    }
    return s;
  };
  auto grad = [=](const double* x, double* g) {
    for (int d = 0; d < N; ++d) g[d] = 0.0;
    for (std::size_t m = 0; m < amp.size(); ++m) {
      double arg = phase[m];
      for (int d = 0; d < N; ++d) arg += k[m][d] * x[d];
      const double s = -amp[m] * std::sin(arg);
      for (int d = 0; d < N; ++d) g[d] += s * k[m][d];
    }
  };
  return {val, grad};
}

Factor difference_factor(int N, int i, int j) {
  return {[i, j](const double* x) { return x[j] - x[i]; },
          [N, i, j](const double*, double* g) {
            for (int d = 0; d < N; ++d) g[d] = 0.0;
            g[i] = -1.0;
            g[j] = 1.0;
          }};
}

Factor cusp_factor(int N, int i, int j, double kappa) {
  return {[=](const double* x) { return std::exp(-kappa * std::abs(x[j] - x[i])); },
          [=](const double* x, double* g) {
            const double d = x[j] - x[i];
            const double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
            const double v = -kappa * s * std::exp(-kappa * std::abs(d));
            for (int k = 0; k < N; ++k) g[k] = 0.0;
            g[i] = -v;
            g[j] = v;
          }};
}

TestFunction product(std::string id, int N, double L, std::vector<Factor> fs, std::vector<std::pair<int, int>> kinks = {}) {
  TestFunction t;
  t.id = std::move(id);
  t.N = N;
  t.L = L;
  t.kinks = std::move(kinks);
  t.f = [fs](const double* x) {
    double p = 1.0;
    for (const auto& f : fs) p *= f.f(x);
    return p;
  };
  t.grad = [fs, N](const double* x, double* g) {
    const std::size_t m = fs.size();
    std::vector<double> v(m);
    for (std::size_t a = 0; a < m; ++a) v[a] = fs[a].f(x);
    for (int d = 0; d < N; ++d) g[d] = 0.0;
    std::vector<double> ga(static_cast<std::size_t>(N));
    for (std::size_t a = 0; a < m; ++a) {
      double rest = 1.0;
      for (std::size_t b = 0; b < m; ++b)
        if (b != a) rest *= v[b];
      fs[a].grad(x, ga.data());
      for (int d = 0; d < N; ++d) g[d] += ga[static_cast<std::size_t>(d)] * rest;
    }
  };
  return t;
}

Eigen::MatrixXd iso(int N, double s = 1.0) { return s * Eigen::MatrixXd::Identity(N, N); }

Factor band_field(int N, int waves, double kmax, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uk(-kmax, kmax), ua(-1.0, 1.0), up(0.0, 2.0 * kPi);
  std::vector<double> amp, phase;
  std::vector<Eigen::VectorXd> k;
  for (int m = 0; m < waves; ++m) {
    Eigen::VectorXd km(N);
    for (int d = 0; d < N; ++d) km[d] = uk(rng);
    k.push_back(km);
    amp.push_back(ua(rng));
    phase.push_back(up(rng));
  }
  return wave_factor(N, 1.0, amp, k, phase);
}

std::vector<std::pair<int, int>> pairs(int N) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) out.emplace_back(i, j);
  return out;
}

std::vector<double> breaks_with(double a, double b, double panel, const std::vector<double>& cuts) {
  return refine_breaks(a, b, cuts, panel);
}

}  // namespace

TestFunction gaussian_product(int N, double width) {
  if (N < 1 || !(width > 0.0)) throw DomainError("gaussian_product: invalid arguments");
  const double norm = std::pow(kPi * width * width, -0.25 * N);
  TestFunction t = product("gauss_" + std::to_string(N), N, std::max(6.0, 6.0 * width),
                           {gaussian_factor(iso(N, 1.0 / (width * width)), Eigen::VectorXd::Zero(N)),
                            wave_factor(N, norm, {}, {}, {})});
  return t;
}

std::vector<TestFunction> form_test_family(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TestFunction> fam;
  const Eigen::VectorXd o2 = Eigen::VectorXd::Zero(2), o3 = Eigen::VectorXd::Zero(3);
  auto g2 = [](const Eigen::MatrixXd& A, Eigen::VectorXd c) { return gaussian_factor(A, c); };
  Eigen::MatrixXd A;

  fam.push_back(gaussian_product(2));
  fam.back().id = "gauss_iso";
  fam.push_back(product("gauss_wide", 2, 6.0, {g2(iso(2, 1.0 / 1.69), o2)}));
  fam.push_back(product("gauss_shift", 2, 6.0, {g2(iso(2), Eigen::Vector2d(1.0, -0.5))}));
  A = Eigen::Vector2d(1.0, 3.0).asDiagonal();
  fam.push_back(product("gauss_aniso", 2, 6.0, {g2(A, o2)}));
  A.resize(2, 2);
  A << 1.0, 0.6, 0.6, 1.0;
  fam.push_back(product("gauss_corr_pos", 2, 6.0, {g2(A, o2)}));
  A << 1.0, -0.6, -0.6, 1.0;
  fam.push_back(product("gauss_corr_neg", 2, 6.0, {g2(A, o2)}));
  fam.push_back(product("gauss_straddle", 2, 6.0, {g2(iso(2, 2.0), Eigen::Vector2d(0.4, -0.4))}));
  fam.push_back(product("exchange_odd", 2, 6.0, {g2(iso(2), o2), difference_factor(2, 0, 1)}));
  for (int b = 1; b <= 4; ++b)
    fam.push_back(product("band_" + std::to_string(b), 2, 6.0, {g2(iso(2), o2), band_field(2, 4, 2.5, rng)}));
  fam.push_back(product("cusp_1", 2, 6.0, {g2(iso(2, 0.5), o2), cusp_factor(2, 0, 1, 1.0)}, {{0, 1}}));
  fam.push_back(
      product("cusp_2", 2, 6.0, {g2(iso(2), Eigen::Vector2d(0.3, 0.0)), cusp_factor(2, 0, 1, 2.0)}, {{0, 1}}));

  fam.push_back(product("gauss3_iso", 3, 5.0, {gaussian_factor(iso(3), o3)}));
  A.resize(3, 3);
  A << 1.0, 0.4, 0.2, 0.4, 1.0, 0.3, 0.2, 0.3, 1.0;
  fam.push_back(product("gauss3_corr", 3, 5.0, {gaussian_factor(A, o3)}));
  fam.push_back(product("gauss3_shift", 3, 5.0, {gaussian_factor(iso(3), Eigen::Vector3d(0.5, -0.5, 0.2))}));
  for (int b = 1; b <= 2; ++b)
    fam.push_back(product("band3_" + std::to_string(b), 3, 5.0,
                          {gaussian_factor(iso(3), o3), band_field(3, 3, 2.0, rng)}));
  fam.push_back(product("cusp3", 3, 5.0, {gaussian_factor(iso(3), o3), cusp_factor(3, 0, 1, 1.0)}, {{0, 1}}));
  return fam;
}

WaveFunction WaveFunction::sample(const TestFunction& f, int n) {
  if (f.N < 2 || f.N > 3) throw DomainError("WaveFunction: N must be 2 or 3");
  if (n == 0) n = f.N == 2 ? 64 : 32;
  WaveFunction w;
  w.fn = f;
  w.grid = QuadratureGrid::trapezoid(f.L, n);
  std::size_t total = 1;
  for (int d = 0; d < f.N; ++d) total *= static_cast<std::size_t>(n);
  w.values.resize(static_cast<Eigen::Index>(total));
  w.grad.assign(static_cast<std::size_t>(f.N), Eigen::VectorXd(static_cast<Eigen::Index>(total)));
  std::vector<double> x(static_cast<std::size_t>(f.N)), g(static_cast<std::size_t>(f.N));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (int d = f.N; d-- > 0;) {
      x[static_cast<std::size_t>(d)] = w.grid.nodes[rest % static_cast<std::size_t>(n)];
      rest /= static_cast<std::size_t>(n);
    }
    const Eigen::Index e = static_cast<Eigen::Index>(idx);
    w.values[e] = f.f(x.data());
    f.grad(x.data(), g.data());
    for (int d = 0; d < f.N; ++d) w.grad[static_cast<std::size_t>(d)][e] = g[static_cast<std::size_t>(d)];
  }
  return w;
}

WaveFunction WaveFunction::refined() const { return sample(fn, 2 * grid.n - 1); }

namespace {

Eigen::VectorXd tensor_weights(const QuadratureGrid& g, int N) {
  const std::size_t n = g.size();
  std::size_t total = 1;
  for (int d = 0; d < N; ++d) total *= n;
  Eigen::VectorXd w(static_cast<Eigen::Index>(total));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    double p = 1.0;
    for (int d = 0; d < N; ++d) {
      p *= g.weights[rest % n];
      rest /= n;
    }
    w[static_cast<Eigen::Index>(idx)] = p;
  }
  return w;
}

}  // namespace

double WaveFunction::norm2() const { return tensor_weights(grid, N()).dot(values.cwiseAbs2()); }

double WaveFunction::grad2() const {
  const Eigen::VectorXd w = tensor_weights(grid, N());
  double s = 0.0;
  for (const auto& g : grad) s += w.dot(g.cwiseAbs2());
  return s;
}

double WaveFunction::relative_grad2(int i, int j) const {
  if (i < 0 || j <= i || j >= N()) throw DomainError("relative_grad2: need 0 <= i < j < N");
  const Eigen::VectorXd d = grad[static_cast<std::size_t>(j)] - grad[static_cast<std::size_t>(i)];
  return 0.25 * tensor_weights(grid, N()).dot(d.cwiseAbs2());
}

double pair_marginal(const TestFunction& f, int i, int j, double r, const MarginalQuad& q) {
  if (i < 0 || j <= i || j >= f.N) throw DomainError("pair_marginal: need 0 <= i < j < N");
  const double L = f.L;
  if (std::abs(r) >= 2.0 * L) return 0.0;
  std::vector<int> others;
  for (int k = 0; k < f.N; ++k)
    if (k != i && k != j) others.push_back(k);
  std::vector<double> x(static_cast<std::size_t>(f.N), 0.0);
  const double half = 0.5 * std::abs(r);
  const Rule outer = composite_gauss(breaks_with(-L + half, L - half, q.panel, {}), q.order);

  // integrate the remaining coordinates in index order, splitting at kinks whose partner is already fixed
  std::function<double(std::size_t)> inner = [&](std::size_t level) -> double {
    if (level == others.size()) {
      const double v = f.f(x.data());
      return v * v;
    }
    const int k = others[level];
    std::vector<double> cuts;
    for (const auto& [a, b] : f.kinks) {
      const int p = a == k ? b : (b == k ? a : -1);
      if (p < 0) continue;
      const bool fixed = p == i || p == j ||
                         std::find(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(level), p) !=
                             others.begin() + static_cast<std::ptrdiff_t>(level);
      if (fixed && std::abs(x[static_cast<std::size_t>(p)]) < L) cuts.push_back(x[static_cast<std::size_t>(p)]);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const Rule rule = composite_gauss(breaks_with(-L, L, q.panel, cuts), q.order);
    double s = 0.0;
    for (std::size_t m = 0; m < rule.size(); ++m) {
      x[static_cast<std::size_t>(k)] = rule.x[m];
      s += rule.w[m] * inner(level + 1);
    }
    return s;
  };

  double s = 0.0;
  for (std::size_t m = 0; m < outer.size(); ++m) {
    x[static_cast<std::size_t>(i)] = outer.x[m] - 0.5 * r;
    x[static_cast<std::size_t>(j)] = outer.x[m] + 0.5 * r;
    s += outer.w[m] * inner(0);
  }
  return s;
}

H1Norms h1_norms(const TestFunction& f, const MarginalQuad& q) {
  const int N = f.N;
  const auto pr = pairs(N);
  H1Norms out;
  out.rel_grad2.assign(pr.size(), 0.0);
  std::vector<double> x(static_cast<std::size_t>(N)), g(static_cast<std::size_t>(N));
  std::function<void(int, double)> rec = [&](int k, double w) {
    if (k == N) {
      const double v = f.f(x.data());
      f.grad(x.data(), g.data());
      out.norm2 += w * v * v;
      for (int d = 0; d < N; ++d) out.grad2 += w * g[static_cast<std::size_t>(d)] * g[static_cast<std::size_t>(d)];
      for (std::size_t p = 0; p < pr.size(); ++p) {
        const double d = 0.5 * (g[static_cast<std::size_t>(pr[p].second)] - g[static_cast<std::size_t>(pr[p].first)]);
        out.rel_grad2[p] += w * d * d;
      }
      return;
    }
    std::vector<double> cuts;
    for (const auto& [a, b] : f.kinks) {
      const int p = a == k ? b : (b == k ? a : -1);
      if (p >= 0 && p < k && std::abs(x[static_cast<std::size_t>(p)]) < f.L) cuts.push_back(x[static_cast<std::size_t>(p)]);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const Rule rule = composite_gauss(breaks_with(-f.L, f.L, q.panel, cuts), q.order);
    for (std::size_t m = 0; m < rule.size(); ++m) {
      x[static_cast<std::size_t>(k)] = rule.x[m];
      rec(k + 1, w * rule.w[m]);
    }
  };
  rec(0, 1.0);
  return out;
}

Eigen::VectorXd trace_gamma(const WaveFunction& psi, int i, int j) {
  const int N = psi.N();
  if (i < 0 || j <= i || j >= N) throw DomainError("trace_gamma: need 0 <= i < j < N");
  const std::size_t n = psi.grid.size();
  std::size_t total = 1;
  for (int d = 0; d < N - 1; ++d) total *= n;
  Eigen::VectorXd out(static_cast<Eigen::Index>(total));
  std::vector<double> x(static_cast<std::size_t>(N));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (int d = N; d-- > 0;) {
      if (d == j) continue;
      x[static_cast<std::size_t>(d)] = psi.grid.nodes[rest % n];
      rest /= n;
    }
    x[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(i)];
    out[static_cast<Eigen::Index>(idx)] = psi.fn.f(x.data());
  }
  return out;
}

double trace_norm2(const WaveFunction& psi, int i, int j) {
  return tensor_weights(psi.grid, psi.N() - 1).dot(trace_gamma(psi, i, j).cwiseAbs2());
}

namespace {

double trace_sum(const TestFunction& f) {
  double s = 0.0;
  for (const auto& [i, j] : pairs(f.N)) s += pair_marginal(f, i, j, 0.0);
  return s;
}

FormValue with_refinement(const WaveFunction& psi, double C, double interaction) {
  FormValue out;
  out.value = psi.grad2() + C * psi.norm2() - interaction;
  const WaveFunction fine = psi.refined();
  out.refined = fine.grad2() + C * fine.norm2() - interaction;
  out.under_resolved = std::abs(out.refined - out.value) > 1e-4 * std::max(1.0, std::abs(out.refined));
  return out;
}

}  // namespace

FormValue q_form(const WaveFunction& psi, double alpha, double C) {
  return with_refinement(psi, C, alpha == 0.0 ? 0.0 : alpha * trace_sum(psi.fn));
}

double pair_interaction(const TestFunction& f, const Potential& V, double eps) {
  if (!(eps > 0.0)) throw DomainError("pair_interaction: ε must be positive");
  const Potential Ve = V.scaled(eps);
  const Rule rule = Ve.aux_rule(16, 0.25, 1e-13, true);
  double s = 0.0;
  for (const auto& [i, j] : pairs(f.N))
    for (std::size_t m = 0; m < rule.size(); ++m) s += rule.w[m] * Ve(rule.x[m]) * pair_marginal(f, i, j, rule.x[m]);
  return s;
}

FormValue q_eps_form(const WaveFunction& psi, const Potential& V, double g_eps, double eps, double C) {
  return with_refinement(psi, C, g_eps == 0.0 ? 0.0 : g_eps * pair_interaction(psi.fn, V, eps));
}

double form_gap(const TestFunction& f, const Potential& V, double g_eps, double alpha, double eps) {
  if (!(eps > 0.0)) throw DomainError("form_gap: ε must be positive");
  const Potential Ve = V.scaled(eps);
  const Rule rule = Ve.aux_rule(16, 0.25, 1e-13, true);
  double s = 0.0;
  for (const auto& [i, j] : pairs(f.N)) {
    const double psi0 = pair_marginal(f, i, j, 0.0);
    // -g ∫ V_ε Ψ + α Ψ(0), written as -g ∫ V_ε (Ψ - Ψ(0)) + (α - g ∫V) Ψ(0)
    double d = 0.0;
    for (std::size_t m = 0; m < rule.size(); ++m)
      d += rule.w[m] * Ve(rule.x[m]) * (pair_marginal(f, i, j, rule.x[m]) - psi0);
    s += -g_eps * d + (alpha - g_eps * V.integral()) * psi0;
  }
  return s;
}

FormBoundsReport check_form_bounds(const WaveFunction& psi, const Potential& V, double mu, double tol) {
  if (!(mu > 0.0)) throw DomainError("check_form_bounds: μ must be positive");
  FormBoundsReport rep;
  rep.id = psi.fn.id;
  const H1Norms hn = h1_norms(psi.fn);
  const double nrm = std::sqrt(hn.norm2), gn = std::sqrt(hn.grad2);
  const double c_mu = 1.0 / (4.0 * mu);
  const double L = psi.fn.L;
  std::vector<double> rs;
  for (int k = 1; k <= 200; ++k) {
    const double r = 2.0 * L * k / 201.0;
    rs.push_back(r);
    rs.push_back(-r);
  }
  for (double t = 1e-4; t < 0.05; t *= 2.0) {
    rs.push_back(t);
    rs.push_back(-t);
  }
  auto add = [&](const std::string& name, int i, int j, double lhs, double rhs) {
    InequalityCheck c{name, i, j, lhs, rhs, lhs <= rhs * (1.0 + tol) + 1e-14};
    rep.all_hold = rep.all_hold && c.holds;
    rep.checks.push_back(c);
  };
  const Rule vr = V.aux_rule(16, 0.25, 1e-13, true);
  const auto pr = pairs(psi.N());
  for (std::size_t p = 0; p < pr.size(); ++p) {
    const auto [i, j] = pr[p];
    const double dr = std::sqrt(hn.rel_grad2[p]);
    const double p0 = pair_marginal(psi.fn, i, j, 0.0);
    double sup = p0, hold = 0.0;
    for (double r : rs) {
      const double p = pair_marginal(psi.fn, i, j, r);
      sup = std::max(sup, p);
      hold = std::max(hold, std::abs(p - p0) / std::sqrt(std::abs(r)));
    }
    add("sup_marginal", i, j, sup, dr * nrm);
    add("holder_marginal", i, j, hold, 2.0 * std::pow(dr, 1.5) * std::sqrt(nrm));
    const double gam = std::sqrt(p0);
    add("trace", i, j, gam, mu * gn + c_mu * nrm);
    if (nrm > 0.0) rep.fitted_c_mu = std::max(rep.fitted_c_mu, (gam - mu * gn) / nrm);
    double vint = 0.0;
    for (std::size_t m = 0; m < vr.size(); ++m) vint += vr.w[m] * V(vr.x[m]) * pair_marginal(psi.fn, i, j, vr.x[m]);
    add("potential", i, j, std::abs(vint), V.l1() * gn * nrm);
  }
  return rep;
}

double sufficient_shift(const Potential& V, double g_max, int N) {
  const double P = 0.5 * N * (N - 1);
  const double t = P * std::abs(g_max) * V.l1();
  return 0.25 * t * t;
}

SandwichReport sandwich_check(const std::vector<WaveFunction>& family, const Potential& V, const CouplingSchedule& s,
                              const std::vector<double>& eps, double C, double a) {
  if (!(a > 0.0 && a < 1.0)) throw DomainError("sandwich_check: a must lie in (0,1)");
  SandwichReport rep;
  rep.a = a;
  double gmax = std::abs(s.g);
  for (double e : eps) gmax = std::max(gmax, std::abs(s.g_eps(e)));
  int pmax = 1;
  for (const auto& w : family) pmax = std::max(pmax, w.N() * (w.N() - 1) / 2);
  const double t = pmax * gmax * V.l1();
  // |interaction| <= a‖∇ψ‖² + t²/(4a)‖ψ‖²; the remaining shift is |1 - C| at most
  rep.b_bound = t * t / (4.0 * a) + std::abs(1.0 - C) + a;
  for (const auto& w : family) {
    const H1Norms hn = h1_norms(w.fn);
    const double n2 = hn.norm2, g2 = hn.grad2, h1 = n2 + g2;
    if (n2 == 0.0) continue;
    for (double e : eps) {
      const double q = g2 + C * n2 - s.g_eps(e) * pair_interaction(w.fn, V, e);
      rep.b_fit = std::max(rep.b_fit, ((1.0 - a) * h1 - q) / n2);
      rep.b_fit = std::max(rep.b_fit, (q - (1.0 + a) * h1) / n2);
    }
  }
  rep.holds = rep.b_fit <= rep.b_bound;
  return rep;
}

ScalingCheck scaling_consistency(const TestFunction& f, const Potential& V, double g_eps, double eps, double C) {
  if (f.N != 2) throw DomainError("scaling_consistency: N = 2 only");
  const double L = f.L;
  const MarginalQuad q;
  double g[2], x[2];
  // original coordinates, inner variable split at the diagonal
  const Rule outer = composite_gauss(breaks_with(-L, L, q.panel, {}), q.order);
  double kin = 0.0, mass = 0.0;
  for (std::size_t a = 0; a < outer.size(); ++a) {
    x[0] = outer.x[a];
    const Rule in = composite_gauss(breaks_with(-L, L, q.panel, {x[0]}), q.order);
    for (std::size_t b = 0; b < in.size(); ++b) {
      x[1] = in.x[b];
      const double v = f.f(x);
      f.grad(x, g);
      kin += outer.w[a] * in.w[b] * (g[0] * g[0] + g[1] * g[1]);
      mass += outer.w[a] * in.w[b] * v * v;
    }
  }
  ScalingCheck out;
  out.original = kin + C * mass - g_eps * pair_interaction(f, V, eps);

  // relative coordinates: ∫ 2|∂_r ψ̃|² + ½|∂_R ψ̃|² + C|ψ̃|² - g V_ε(r)|ψ̃|² dr dR
  const Potential Ve = V.scaled(eps);
  std::vector<double> cuts{0.0};
  for (double b : Ve.breakpoints())
    if (std::abs(b) < 2.0 * L) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const Rule rr = composite_gauss(breaks_with(-2.0 * L, 2.0 * L, std::min(q.panel, 0.25 * std::max(eps, 1e-3) * 64.0), cuts),
                                  q.order);
  double rel = 0.0;
  for (std::size_t a = 0; a < rr.size(); ++a) {
    const double r = rr.x[a], vr = Ve(r);
    const double half = 0.5 * std::abs(r);
    if (half >= L) continue;
    const Rule RR = composite_gauss(breaks_with(-L + half, L - half, q.panel, {}), q.order);
    for (std::size_t b = 0; b < RR.size(); ++b) {
      x[0] = RR.x[b] - 0.5 * r;
      x[1] = RR.x[b] + 0.5 * r;
      const double v = f.f(x);
      f.grad(x, g);
      const double dr = 0.5 * (g[1] - g[0]), dR = g[0] + g[1];
      rel += rr.w[a] * RR.w[b] * (2.0 * dr * dr + 0.5 * dR * dR + (C - g_eps * vr) * v * v);
    }
  }
  out.relative = rel;
  out.rel_err = std::abs(out.relative - out.original) / std::max(1e-300, std::abs(out.original));
  return out;
}

}  // namespace contact
