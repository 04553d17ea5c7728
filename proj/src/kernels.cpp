#include "contact/kernels.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "contact/errors.hpp"
#include "contact/parallel.hpp"

namespace contact {

namespace {

constexpr double kPi = std::numbers::pi;

double g1(double lambda, double x) { return std::exp(-std::sqrt(lambda) * std::abs(x)) / (2.0 * std::sqrt(lambda)); }

double g3(double z, double x0, double x1, double x2, double floor = 0.0) {
  const double r = std::max(floor, std::sqrt(x0 * x0 + x1 * x1 + x2 * x2));
  if (r < 1e-8) throw SingularPointError("kernel: G3 argument at the origin");
  return std::exp(-std::sqrt(z) * r) / (4.0 * kPi * r);
}

void check_z(double z, double Q) {
  if (!(z > 0.0)) throw DomainError("kernel: z must be positive");
  if (!(Q >= 0.0)) throw DomainError("kernel: momentum parameter must be nonnegative");
}

std::array<double, 3> x1j(double eps, const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double r = a[0], R = a[1], x = a[2];
  const double rp = b[0], Rp = b[1], xp = b[2];
  return {R - Rp - 0.5 * eps * (r - rp), R + 0.5 * eps * r - xp, x - Rp - 0.5 * eps * rp};
}

std::array<double, 4> xij(double eps, const std::array<double, 4>& a, const std::array<double, 4>& b) {
  const double r = a[0], R = a[1], xi = a[2], xj = a[3];
  const double rp = b[0], Rp = b[1], xip = b[2], xjp = b[3];
  return {R - 0.5 * eps * r - xip, R + 0.5 * eps * r - xjp, xi - Rp + 0.5 * eps * rp, xj - Rp - 0.5 * eps * rp};
}

Rule to_rule(const QuadratureGrid& g) { return g.rule(); }

}  // namespace

std::string to_string(KernelClass c) {
  switch (c) {
    case KernelClass::T: return "T";
    case KernelClass::Phi12: return "phi12";
    case KernelClass::Phi1j: return "phi1j";
    case KernelClass::Phi2j: return "phi2j";
    case KernelClass::Phiij: return "phiij";
    case KernelClass::SchurF: return "F";
    case KernelClass::SchurB: return "B";
  }
  return "?";
}

KernelClass kernel_class_from_string(const std::string& s) {
  if (s == "T") return KernelClass::T;
  if (s == "phi12") return KernelClass::Phi12;
  if (s == "phi1j") return KernelClass::Phi1j;
  if (s == "phi2j") return KernelClass::Phi2j;
  if (s == "phiij") return KernelClass::Phiij;
  if (s == "F") return KernelClass::SchurF;
  if (s == "B") return KernelClass::SchurB;
  throw ConfigError("unknown kernel class: " + s);
}

double t_kernel(double eps, double z, double Q, const Factorization& f, double r, double rp) {
  check_z(z, Q);
  const double v = f.v(r);
  if (v == 0.0) return 0.0;
  return 0.5 * v * g1(0.5 * (z + Q), eps * r - rp);
}

double phi12_kernel(double eps, double z, double Q, const Factorization& f, double r, double rp) {
  check_z(z, Q);
  const double u = f.u(r), v = f.v(rp);
  if (u == 0.0 || v == 0.0) return 0.0;
  return 0.5 * u * g1(0.5 * (z + Q), eps * (r - rp)) * v;
}

double phi1j_kernel(double eps, double z, double Qj, const Factorization& f, const std::array<double, 3>& x,
                    const std::array<double, 3>& xp) {
  check_z(z, Qj);
  const double u = f.u(x[0]), v = f.v(xp[0]);
  if (u == 0.0 || v == 0.0) return 0.0;
  const auto X = x1j(eps, x, xp);
  return u * g3(z + Qj, X[0], X[1], X[2]) * v;
}

double phi2j_kernel(double eps, double z, double Qj, const Factorization& f, const std::array<double, 3>& x,
                    const std::array<double, 3>& xp) {
  return phi1j_kernel(eps, z, Qj, f, {-x[0], x[1], x[2]}, xp);
}

double phiij_kernel(double eps, double z, double Qij, const Factorization& f, const std::array<double, 4>& x,
                    const std::array<double, 4>& xp, const RadialGreen* g4) {
  check_z(z, Qij);
  const double u = f.u(x[0]), v = f.v(xp[0]);
  if (u == 0.0 || v == 0.0) return 0.0;
  const auto X = xij(eps, x, xp);
  const double r = std::sqrt(X[0] * X[0] + X[1] * X[1] + X[2] * X[2] + X[3] * X[3]);
  if (g4) {
    if (g4->dimension() != 4 || std::abs(g4->z() - (z + Qij)) > 1e-14 * (z + Qij))
      throw DomainError("phiij_kernel: tabulated Green function does not match z + Q");
    return u * (*g4)(r) * v;
  }
  return u * green_quad(GreenParams{4, z + Qij}, r) * v;
}

std::size_t ProductGrid::size() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.size();
  return axes.empty() ? 0 : n;
}

void ProductGrid::point(std::size_t idx, double* out) const {
  for (std::size_t k = axes.size(); k-- > 0;) {
    const std::size_t m = axes[k].size();
    out[k] = axes[k].x[idx % m];
    idx /= m;
  }
}

double ProductGrid::weight(std::size_t idx) const {
  double w = 1.0;
  for (std::size_t k = axes.size(); k-- > 0;) {
    const std::size_t m = axes[k].size();
    w *= axes[k].w[idx % m];
    idx /= m;
  }
  return w;
}

Eigen::VectorXd ProductGrid::weights() const {
  Eigen::VectorXd w(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) w[static_cast<Eigen::Index>(i)] = weight(i);
  return w;
}

KernelOperator KernelOperator::adjoint() const {
  KernelOperator out;
  out.M = M.transpose();
  out.target = source;
  out.source = target;
  out.meta = meta;
  return out;
}

KernelOperator discretize(const KernelSpec& spec, const ProductGrid& target, const ProductGrid& source,
                          const DiscretizeOptions& opt) {
  check_z(spec.z, spec.Q);
  const std::size_t dims_expected = [&] {
    switch (spec.cls) {
      case KernelClass::T:
      case KernelClass::Phi12: return std::size_t{1};
      case KernelClass::Phi1j:
      case KernelClass::Phi2j: return std::size_t{3};
      case KernelClass::Phiij: return std::size_t{4};
      case KernelClass::SchurF: return std::size_t{2};
      case KernelClass::SchurB: return std::size_t{3};
    }
    return std::size_t{0};
  }();
  if (target.dims() != dims_expected || source.dims() != dims_expected)
    throw DomainError("discretize: grid dimension does not match the kernel class");
  const std::size_t rows = target.size(), cols = source.size();
  if (static_cast<double>(rows) * static_cast<double>(cols) > static_cast<double>(opt.max_entries))
    throw MemoryBudgetError("discretize: table exceeds the entry budget");

  KernelOperator K;
  K.target = target;
  K.source = source;
  K.meta = {spec.cls, spec.eps, spec.z, spec.Q, spec.V.name()};
  K.M.setZero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));

  const Factorization f = factorize(spec.V);
  const double eps = spec.eps;
  const double zq = spec.z + spec.Q;
  const std::size_t d = dims_expected;

  // u on target r nodes and v on source r nodes, for the classes that carry them
  std::vector<double> ut, vs;
  const bool has_uv = spec.cls != KernelClass::SchurF && spec.cls != KernelClass::SchurB;
  if (has_uv) {
    for (double r : target.axes[0].x) ut.push_back(spec.cls == KernelClass::T ? f.v(r) : f.u(r));
    // T has a spatial source axis and no v factor
    for (double r : source.axes[0].x) vs.push_back(spec.cls == KernelClass::T ? 1.0 : f.v(r));
  }
  std::unique_ptr<RadialGreen> G4;
  if (spec.cls == KernelClass::Phiij || spec.cls == KernelClass::SchurB) G4 = std::make_unique<RadialGreen>(4, zq);

  const std::size_t tr_inner = has_uv ? rows / std::max<std::size_t>(1, target.axes[0].size()) : rows;
  const std::size_t sr_inner = has_uv ? cols / std::max<std::size_t>(1, source.axes[0].size()) : cols;

  parallel_for(rows, opt.jobs, [&](std::size_t i) {
    std::array<double, 4> a{}, b{};
    target.point(i, a.data());
    const double ui = has_uv ? ut[i / tr_inner] : 1.0;
    if (ui == 0.0) return;
    for (std::size_t j = 0; j < cols; ++j) {
      const double vj = has_uv ? vs[j / sr_inner] : 1.0;
      if (vj == 0.0) continue;
      source.point(j, b.data());
      double val = 0.0;
      switch (spec.cls) {
        case KernelClass::T: val = 0.5 * ui * g1(0.5 * zq, eps * a[0] - b[0]); break;
        case KernelClass::Phi12: val = 0.5 * ui * g1(0.5 * zq, eps * (a[0] - b[0])) * vj; break;
        case KernelClass::Phi1j:
        case KernelClass::Phi2j: {
          const double r = spec.cls == KernelClass::Phi2j ? -a[0] : a[0];
          const auto X = x1j(eps, {r, a[1], a[2]}, {b[0], b[1], b[2]});
          val = ui * g3(zq, X[0], X[1], X[2], opt.core_radius) * vj;
          break;
        }
        case KernelClass::Phiij: {
          const auto X = xij(eps, a, b);
          val = ui * (*G4)(std::max(opt.core_radius, std::sqrt(X[0] * X[0] + X[1] * X[1] + X[2] * X[2] + X[3] * X[3]))) * vj;
          break;
        }
        case KernelClass::SchurF: {
          // G3(x - x', x - y', y - x') with target (x, y), source (x', y')
          val = g3(zq, a[0] - b[0], a[0] - b[1], a[1] - b[0], opt.core_radius);
          break;
        }
        case KernelClass::SchurB: {
          // G4(w - x', w - y', x - w', y - w') with target (w, x, y), source (w', x', y')
          const double c0 = a[0] - b[1], c1 = a[0] - b[2], c2 = a[1] - b[0], c3 = a[2] - b[0];
          val = (*G4)(std::max(opt.core_radius, std::sqrt(c0 * c0 + c1 * c1 + c2 * c2 + c3 * c3)));
          break;
        }
      }
      K.M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = val;
    }
  });
  (void)d;
  return K;
}

GridSpec default_grid(KernelClass c) {
  GridSpec g;
  switch (c) {
    case KernelClass::T:
    case KernelClass::Phi12: g.L = 8.0; g.n = 256; g.aux_order = 16; break;
    case KernelClass::Phi1j:
    case KernelClass::Phi2j:
      g.L = 5.0;
      g.n = 24;
      g.aux_nodes = 8;
      g.aux_width = 0.0;
      g.aux_tail = 1e-3;
      break;
    case KernelClass::Phiij:
      g.L = 5.0;
      g.n = 10;
      g.aux_nodes = 4;
      g.aux_width = 0.0;
      g.aux_tail = 1e-2;
      break;
    case KernelClass::SchurF: g.L = 6.0; g.n = 48; break;
    case KernelClass::SchurB: g.L = 6.0; g.n = 16; break;
  }
  return g;
}

std::pair<ProductGrid, ProductGrid> make_grids(KernelClass c, const Potential& V, const GridSpec& g) {
  int order = g.aux_order;
  if (g.aux_nodes > 0) {
    const std::size_t panels = std::max<std::size_t>(1, V.aux_rule(1, g.aux_width, g.aux_tail).size());
    order = std::max(1, static_cast<int>((g.aux_nodes + panels - 1) / panels));
  }
  const Rule aux = V.aux_rule(order, g.aux_width, g.aux_tail);
  const Rule cell = to_rule(QuadratureGrid::midpoint(g.L, g.n));
  const Rule node = to_rule(QuadratureGrid::trapezoid(g.L, g.n + 1));
  switch (c) {
    case KernelClass::T: return {ProductGrid{{aux}}, ProductGrid{{to_rule(QuadratureGrid::trapezoid(g.L, g.n))}}};
    case KernelClass::Phi12: return {ProductGrid{{aux}}, ProductGrid{{aux}}};
    case KernelClass::Phi1j:
    case KernelClass::Phi2j: return {ProductGrid{{aux, cell, cell}}, ProductGrid{{aux, node, node}}};
    case KernelClass::Phiij: return {ProductGrid{{aux, cell, cell, cell}}, ProductGrid{{aux, node, node, node}}};
    case KernelClass::SchurF: return {ProductGrid{{cell, cell}}, ProductGrid{{node, node}}};
    case KernelClass::SchurB: return {ProductGrid{{cell, cell, cell}}, ProductGrid{{node, node, node}}};
  }
  throw DomainError("make_grids: unknown class");
}

double core_radius(KernelClass c, const GridSpec& g) {
  const double h = 2.0 * g.L / g.n;
  switch (c) {
    case KernelClass::T:
    case KernelClass::Phi12: return 0.0;
    case KernelClass::Phi1j:
    case KernelClass::Phi2j:
    case KernelClass::SchurF: return 0.5 * std::sqrt(3.0) * h;
    case KernelClass::Phiij:
    case KernelClass::SchurB: return h;
  }
  return 0.0;
}

double hs_norm(const KernelOperator& K) {
  const Eigen::VectorXd wt = K.target.weights(), ws = K.source.weights();
  return std::sqrt((wt.asDiagonal() * K.M.cwiseAbs2() * ws).sum());
}

OpNormResult op_norm_report(const KernelOperator& K, const OpNormOptions& opt) {
  const Eigen::VectorXd st = K.target.weights().cwiseSqrt();
  const Eigen::VectorXd ss = K.source.weights().cwiseSqrt();
  const Eigen::Index n = K.M.cols();
  OpNormResult out;
  if (n == 0 || K.M.rows() == 0) return out;
  auto apply = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd y = st.cwiseProduct(K.M * ss.cwiseProduct(x));
    return Eigen::VectorXd(ss.cwiseProduct(K.M.transpose() * st.cwiseProduct(y)));
  };
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
  v.normalize();
  const int kmax = static_cast<int>(std::min<Eigen::Index>(opt.max_iter, n));
  Eigen::MatrixXd basis(n, kmax);
  std::vector<double> alpha, beta;
  double theta = 0.0;
  for (int j = 0; j < kmax; ++j) {
    basis.col(j) = v;
    Eigen::VectorXd w = apply(v);
    const double a = v.dot(w);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
    const double b = w.norm();
    const int m = j + 1;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < m; ++k) {
      T(k, k) = alpha[k];
      if (k + 1 < m) T(k, k + 1) = T(k + 1, k) = beta[k];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    theta = es.eigenvalues()[m - 1];
    const double resid = b * std::abs(es.eigenvectors()(m - 1, m - 1));
    out.iterations = m;
    if (theta <= 0.0 && b == 0.0) {
      out.converged = true;
      break;
    }
    if (resid <= opt.tol * std::abs(theta) || b <= 1e-14 * std::max(std::abs(theta), 1e-300)) {
      out.converged = true;
      break;
    }
    beta.push_back(b);
    v = w / b;
  }
  if (!out.converged && out.iterations == n) out.converged = true;  // full Krylov space
  if (!out.converged) throw NonConvergenceError("op_norm: Lanczos did not converge within the iteration cap");
  out.value = std::sqrt(std::max(theta, 0.0));
  return out;
}

double op_norm(const KernelOperator& K, const OpNormOptions& opt) { return op_norm_report(K, opt).value; }

double svd_norm(const KernelOperator& K) {
  if (K.M.rows() > 2500 || K.M.cols() > 2500) throw MemoryBudgetError("svd_norm: table larger than 2500 x 2500");
  const Eigen::VectorXd st = K.target.weights().cwiseSqrt();
  const Eigen::VectorXd ss = K.source.weights().cwiseSqrt();
  const Eigen::MatrixXd B = st.asDiagonal() * K.M * ss.asDiagonal();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(B);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

KernelOperator difference(const KernelOperator& a, const KernelOperator& b) {
  if (a.M.rows() != b.M.rows() || a.M.cols() != b.M.cols()) throw DomainError("difference: shape mismatch");
  KernelOperator out = a;
  out.M -= b.M;
  return out;
}

double green_l2_norm_1d(double lambda) {
  if (!(lambda > 0.0)) throw DomainError("green_l2_norm_1d: λ must be positive");
  return 0.5 * std::pow(lambda, -0.75);
}

double t_norm_bound(const Potential& V, double z) { return 0.5 * std::sqrt(V.l1()) * green_l2_norm_1d(0.5 * z); }
double phi12_norm_bound(const Potential& V, double z) { return V.l1() / (2.0 * std::sqrt(2.0 * z)); }
double phi1j_norm_bound(const Potential& V, double z) { return V.l1() / (2.0 * std::sqrt(z)); }
double phiij_norm_bound(const Potential& V, double z) { return V.l1() / (2.0 * std::sqrt(z)); }

namespace {
double tail_l1(const Potential& V, double k) { return std::max(0.0, V.l1() - V.cut(k).l1()); }
}  // namespace

double t_cutoff_bound(const Potential& V, double k, double z) {
  return 0.5 * std::sqrt(tail_l1(V, k)) * green_l2_norm_1d(0.5 * z);
}
double phi12_cutoff_bound(const Potential& V, double k, double z) {
  return std::sqrt(V.l1() * tail_l1(V, k)) / (2.0 * std::sqrt(z));
}
double phi1j_cutoff_bound(const Potential& V, double k, double z) {
  return std::sqrt(V.l1() * tail_l1(V, k)) / std::sqrt(2.0 * z);
}
double phiij_cutoff_bound(const Potential& V, double k, double z) { return phi1j_cutoff_bound(V, k, z); }

double schur_bound_F(double z) {
  if (!(z > 0.0)) throw DomainError("schur bound: z must be positive");
  return 1.0 / (2.0 * std::sqrt(z));
}
double schur_bound_B(double z) { return schur_bound_F(z); }

}  // namespace contact
