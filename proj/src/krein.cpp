#include "contact/krein.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "contact/errors.hpp"

namespace contact {

namespace {

constexpr double kMinRcond = 1e-14;

Eigen::PartialPivLU<Eigen::MatrixXd> shifted_lu(const Eigen::MatrixXd& H, double z, double* rcond) {
  Eigen::MatrixXd S = H;
  S.diagonal().array() += z;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(S);
  const double rc = lu.rcond();
  if (rcond) *rcond = rc;
  if (!(rc > kMinRcond)) throw NonInvertibleError("resolvent: H + z is numerically singular");
  return lu;
}

double green_half(double z, double d) {  // G^1_{z/2}(d)
  const double k = std::sqrt(0.5 * z);
  return std::exp(-k * std::abs(d)) / (2.0 * k);
}

// ∫ G_λ(a - r) G_λ(b - r) dr / ∫ G_λ² minus 1, as a function of x = sqrt(λ)|a - b|
double conv_ratio_m1(double x) { return (1.0 + x) * std::expm1(-x) + x; }

}  // namespace

void FactoredCoupling::validate(Eigen::Index state_dim) const {
  if (A.cols() != state_dim) throw DomainError("FactoredCoupling: A does not match the state dimension");
  if (J.size() != A.rows()) throw DomainError("FactoredCoupling: J does not match the auxiliary dimension");
  for (Eigen::Index i = 0; i < J.size(); ++i)
    if (std::abs(std::abs(J[i]) - 1.0) > 0.0) throw DomainError("FactoredCoupling: J entries must be ±1");
}

ResolventReport direct_resolvent(const Eigen::MatrixXd& H, double z) {
  if (H.rows() != H.cols()) throw DomainError("direct_resolvent: table must be square");
  ResolventReport out;
  out.z = z;
  out.method = ResolventMethod::Direct;
  auto lu = shifted_lu(H, z, &out.rcond);
  out.R = lu.solve(Eigen::MatrixXd::Identity(H.rows(), H.cols()));
  return out;
}

Eigen::MatrixXd coupled_hamiltonian(const DiscreteHamiltonian& H0, const FactoredCoupling& C) {
  C.validate(H0.H.rows());
  return H0.H - C.g * C.A.transpose() * C.J.asDiagonal() * C.A;
}

Eigen::MatrixXd krein_phi(const DiscreteHamiltonian& H0, const FactoredCoupling& C, double z) {
  C.validate(H0.H.rows());
  auto lu = shifted_lu(H0.H, z, nullptr);
  const Eigen::MatrixXd R0At = lu.solve(C.A.transpose());
  return C.J.asDiagonal() * C.A * R0At;
}

ResolventReport krein_resolvent(const DiscreteHamiltonian& H0, const FactoredCoupling& C, double z) {
  C.validate(H0.H.rows());
  const Eigen::Index n = H0.H.rows();
  auto lu = shifted_lu(H0.H, z, nullptr);
  const Eigen::MatrixXd R0 = lu.solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd X = C.A * R0;  // A R0; R0 A^T = X^T for symmetric H0
  const Eigen::MatrixXd phi = C.J.asDiagonal() * X * C.A.transpose();
  const Eigen::MatrixXd one_minus = Eigen::MatrixXd::Identity(phi.rows(), phi.cols()) - C.g * phi;
  Eigen::PartialPivLU<Eigen::MatrixXd> klu(one_minus);
  ResolventReport out;
  out.z = z;
  out.method = ResolventMethod::Krein;
  out.rcond = klu.rcond();
  if (!(out.rcond > kMinRcond)) throw NonInvertibleError("krein_resolvent: 1 - gφ(z) is singular, z not in the resolvent set");
  out.R = R0 + C.g * X.transpose() * klu.solve(C.J.asDiagonal() * X);
  return out;
}

double relative_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double nb = b.norm();
  return (a - b).norm() / (nb > 0.0 ? nb : 1.0);
}

double second_formula_error(const DiscreteHamiltonian& H0, const FactoredCoupling& C, double z) {
  const Eigen::MatrixXd phi = krein_phi(H0, C, z);
  const Eigen::Index m = phi.rows();
  const Eigen::MatrixXd lhs = (Eigen::MatrixXd::Identity(m, m) - C.g * phi).inverse();
  auto lu = shifted_lu(coupled_hamiltonian(H0, C), z, nullptr);
  const Eigen::MatrixXd rhs =
      Eigen::MatrixXd::Identity(m, m) + C.g * C.J.asDiagonal() * C.A * lu.solve(C.A.transpose());
  return relative_frobenius(rhs, lhs);
}

int krein_det_sign(const DiscreteHamiltonian& H0, const FactoredCoupling& C, double z) {
  const Eigen::MatrixXd phi = krein_phi(H0, C, z);
  const double det = (Eigen::MatrixXd::Identity(phi.rows(), phi.cols()) - C.g * phi).partialPivLu().determinant();
  return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
}

double invertibility_crossing(const DiscreteHamiltonian& H0, const FactoredCoupling& C, double z_lo, double z_hi,
                              double tol) {
  int s_lo = krein_det_sign(H0, C, z_lo);
  const int s_hi = krein_det_sign(H0, C, z_hi);
  if (s_lo == 0) return z_lo;
  if (s_hi == 0) return z_hi;
  if (s_lo == s_hi) throw DomainError("invertibility_crossing: no sign change in the bracket");
  while (z_hi - z_lo > tol * std::max(1.0, std::abs(z_hi))) {
    const double mid = 0.5 * (z_lo + z_hi);
    const int s = krein_det_sign(H0, C, mid);
    if (s == 0) return mid;
    if (s == s_lo) z_lo = mid;
    else z_hi = mid;
  }
  return 0.5 * (z_lo + z_hi);
}

KreinSelfTest krein_selftest(int trials, int max_dim, std::uint64_t seed, double tol) {
  if (max_dim < 4) throw DomainError("krein_selftest: max_dim must be at least 4");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  KreinSelfTest rep;
  for (int t = 0; t < trials; ++t) {
    const int n = 4 + static_cast<int>(unif(rng) * (max_dim - 3));
    const int m = 1 + static_cast<int>(unif(rng) * std::min(6, n));
    Eigen::MatrixXd X(n, n), A(m, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) X(i, j) = normal(rng);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = normal(rng) / std::sqrt(static_cast<double>(n));
    Eigen::VectorXd J(m);
    for (int i = 0; i < m; ++i) J[i] = unif(rng) < 0.5 ? -1.0 : 1.0;
    DiscreteHamiltonian H0{X.transpose() * X / n, "none"};
    FactoredCoupling C{A, J, 0.2 + 1.8 * unif(rng)};
    const Eigen::MatrixXd H = coupled_hamiltonian(H0, C);
    const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H, Eigen::EigenvaluesOnly).eigenvalues()[0];
    const double z = std::max(0.0, -lmin) + 0.5 + 4.5 * unif(rng);
    const ResolventReport k = krein_resolvent(H0, C, z);
    const ResolventReport d = direct_resolvent(H, z);
    const double e1 = relative_frobenius(k.R, d.R);
    const double e2 = second_formula_error(H0, C, z);
    const double e3 = relative_frobenius(k.R, k.R.transpose());
    rep.trials++;
    rep.max_formula_error = std::max(rep.max_formula_error, e1);
    rep.max_second_error = std::max(rep.max_second_error, e2);
    rep.max_symmetry_error = std::max(rep.max_symmetry_error, e3);
    if (e1 <= tol && e2 <= tol && e3 <= tol) rep.passed++;
  }
  return rep;
}

double free_pair_kernel(double z, double r, double rp) { return 0.5 * green_half(z, r - rp); }

double delta_limit_denominator(double alpha, double z) {
  if (!(z > 0.0)) throw DomainError("delta limit: z must be positive");
  return 1.0 - alpha / (2.0 * std::sqrt(2.0 * z));
}

namespace {

// Green function of -2 d²/dr² + z on [-L, L] with Dirichlet walls.
double dirichlet_pair_kernel(double z, double L, double r, double rp) {
  const double k = std::sqrt(0.5 * z);
  const double lo = std::min(r, rp), hi = std::max(r, rp);
  const double a = k * (lo + L), b = k * (L - hi), c = 2.0 * k * L;
  if (a <= 0.0 || b <= 0.0) return 0.0;
  // sinh(a) sinh(b) / sinh(c) in overflow-free form
  const double ratio = std::exp(a + b - c) * (-std::expm1(-2.0 * a)) * (-std::expm1(-2.0 * b)) / (2.0 * (-std::expm1(-2.0 * c)));
  return 0.5 * ratio / k;
}

double base_kernel(double z, double r, double rp, LimitBoundary b, double L) {
  return b == LimitBoundary::FreeSpace ? free_pair_kernel(z, r, rp) : dirichlet_pair_kernel(z, L, r, rp);
}

}  // namespace

double delta_limit_kernel(double alpha, double z, double r, double rp, LimitBoundary b, double L) {
  if (b == LimitBoundary::Dirichlet && !(L > 0.0)) throw DomainError("delta limit: Dirichlet walls need L > 0");
  const double c0 = base_kernel(z, 0.0, 0.0, b, L);
  const double den = 1.0 - alpha * c0;
  if (std::abs(den) < 1e-12) throw PoleError("delta limit: z is the pole of the limit resolvent");
  return base_kernel(z, r, rp, b, L) + alpha / den * base_kernel(z, r, 0.0, b, L) * base_kernel(z, 0.0, rp, b, L);
}

ResolventReport delta_limit_resolvent_n2(double alpha, double z, const std::vector<double>& nodes, LimitBoundary b,
                                         double L) {
  const Eigen::Index n = static_cast<Eigen::Index>(nodes.size());
  ResolventReport out;
  out.z = z;
  out.method = ResolventMethod::Limit;
  out.R.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out.R(i, j) = delta_limit_kernel(alpha, z, nodes[i], nodes[j], b, L);
  out.rcond = std::abs(1.0 - alpha * base_kernel(z, 0.0, 0.0, b, L));
  return out;
}

ResolventReport factored_limit_resolvent_n2(const Potential& V, double g, double z, const std::vector<double>& nodes,
                                            int aux_order) {
  if (!(z > 0.0)) throw DomainError("limit resolvent: z must be positive");
  const Factorization f = factorize(V);
  const Rule aux = V.aux_rule(aux_order, 1.0, 1e-14);
  const Eigen::Index m = static_cast<Eigen::Index>(aux.size());
  const double c0 = free_pair_kernel(z, 0.0, 0.0);
  double coef = 0.0;
  if (m > 0) {
    Eigen::VectorXd u(m), v(m), w(m), J(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      u[k] = f.u(aux.x[k]);
      v[k] = f.v(aux.x[k]);
      w[k] = aux.w[k];
      J[k] = f.J(aux.x[k]);
    }
    // φ_kl = u_k c0 v_l w_l acting on nodal values
    const Eigen::MatrixXd phi = c0 * u * v.cwiseProduct(w).transpose();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd::Identity(m, m) - g * phi);
    if (!(lu.rcond() > kMinRcond)) throw PoleError("limit resolvent: 1 - gφ(z) is singular");
    // S(s, r) = v(s) g0(r), so the correction is coef g0(r) g0(r')
    coef = g * v.cwiseProduct(w).dot(lu.solve(J.cwiseProduct(v)));
  }
  const Eigen::Index n = static_cast<Eigen::Index>(nodes.size());
  ResolventReport out;
  out.z = z;
  out.method = ResolventMethod::Limit;
  out.R.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out.R(i, j) = free_pair_kernel(z, nodes[i], nodes[j]) +
                    coef * free_pair_kernel(z, nodes[i], 0.0) * free_pair_kernel(z, 0.0, nodes[j]);
  return out;
}

double vfree_factor_check(const Potential& V1, double g1, const Potential& V2, double g2, double z,
                          const QuadratureGrid& grid) {
  const ResolventReport a = factored_limit_resolvent_n2(V1, g1, z, grid.nodes);
  const ResolventReport b = factored_limit_resolvent_n2(V2, g2, z, grid.nodes);
  Eigen::VectorXd sw(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) sw[static_cast<Eigen::Index>(i)] = std::sqrt(grid.weights[i]);
  const Eigen::MatrixXd A = sw.asDiagonal() * a.R * sw.asDiagonal();
  const Eigen::MatrixXd B = sw.asDiagonal() * b.R * sw.asDiagonal();
  return relative_frobenius(B, A);
}

namespace {

struct AuxData {
  Rule rule;
  Eigen::VectorXd u, v, J;
  std::vector<Eigen::Index> mirror;
};

AuxData make_aux(const Potential& V, const N2KreinOptions& opt) {
  AuxData a;
  a.rule = V.aux_rule(opt.order, opt.max_width, opt.tail_tol);
  const Factorization f = factorize(V);
  const Eigen::Index m = static_cast<Eigen::Index>(a.rule.size());
  a.u.resize(m);
  a.v.resize(m);
  a.J.resize(m);
  a.mirror.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    a.u[k] = f.u(a.rule.x[k]);
    a.v[k] = f.v(a.rule.x[k]);
    a.J[k] = f.J(a.rule.x[k]);
    a.mirror[k] = m - 1 - k;
    if (std::abs(a.rule.x[k] + a.rule.x[m - 1 - k]) > 1e-12 * (1.0 + std::abs(a.rule.x[k])))
      throw DomainError("n2 Krein: auxiliary rule is not symmetric");
  }
  return a;
}

// Largest |eigenvalue| of G^{1/2} B G^{1/2} for a Gram matrix G and symmetric coefficients B.
double gram_norm(const Eigen::MatrixXd& G, const Eigen::MatrixXd& B) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (G + G.transpose()));
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd S = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  const Eigen::MatrixXd T = S * B * S;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> et(0.5 * (T + T.transpose()), Eigen::EigenvaluesOnly);
  return et.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

N2Distance n2_resolvent_distance(const Potential& V, double g_eps, double eps, double alpha, double z,
                                 const N2KreinOptions& opt) {
  if (!(eps > 0.0)) throw DomainError("n2 distance: ε must be positive");
  if (!(z > 0.0)) throw DomainError("n2 distance: z must be positive");
  const double den = delta_limit_denominator(alpha, z);
  if (std::abs(den) < 1e-12) throw PoleError("n2 distance: z is the pole of the limit resolvent");
  const double beta = alpha / den;
  const AuxData a = make_aux(V, opt);
  const Eigen::Index m = static_cast<Eigen::Index>(a.rule.size());
  const double lam = 0.5 * z, sl = std::sqrt(lam);
  const double gg0 = 1.0 / (4.0 * lam * sl);  // ‖G_λ‖²
  Eigen::VectorXd s(m), w(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    s[k] = a.rule.x[k];
    w[k] = a.rule.w[k];
  }

  // Nyström φ_ε on supp V and the coefficient matrix C = g W (1 - gΦ)^{-1} J
  Eigen::MatrixXd Phi(m, m);
  for (Eigen::Index k = 0; k < m; ++k)
    for (Eigen::Index l = 0; l < m; ++l) Phi(k, l) = 0.5 * a.u[k] * green_half(z, eps * (s[k] - s[l])) * a.v[l] * w[l];
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd::Identity(m, m) - g_eps * Phi);
  if (!(lu.rcond() > kMinRcond)) throw NonInvertibleError("n2 distance: 1 - gφ_ε(z) is singular");
  Eigen::MatrixXd C = g_eps * w.asDiagonal() * lu.solve(Eigen::MatrixXd(a.J.asDiagonal()));
  C = 0.5 * (C + C.transpose()).eval();

  // basis g0 = ½G(r), δt_k = ½ v_k (G(εs_k - r) - G(r))
  const Eigen::VectorXd Cv = C * a.v;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m + 1, m + 1);
  B(0, 0) = a.v.dot(Cv) - beta;
  B.block(0, 1, 1, m) = Cv.transpose();
  B.block(1, 0, m, 1) = Cv;
  B.block(1, 1, m, m) = C;

  auto h = [&](double d) { return conv_ratio_m1(sl * std::abs(d)); };
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m + 1, m + 1), Gm = G;
  G(0, 0) = Gm(0, 0) = 0.25 * gg0;
  for (Eigen::Index k = 0; k < m; ++k) {
    G(0, k + 1) = G(k + 1, 0) = 0.25 * gg0 * a.v[k] * h(eps * s[k]);
    for (Eigen::Index l = 0; l < m; ++l) {
      const double hk = h(eps * s[k]), hl = h(eps * s[l]);
      G(k + 1, l + 1) = 0.25 * gg0 * a.v[k] * a.v[l] * (h(eps * (s[k] - s[l])) - hk - hl);
      // pairing with the reflected δt_l
      Gm(k + 1, l + 1) = 0.25 * gg0 * a.v[k] * a.v[l] * (h(eps * (s[k] + s[l])) - hk - hl);
    }
    Gm(0, k + 1) = Gm(k + 1, 0) = G(0, k + 1);
  }
  const Eigen::MatrixXd Ge = 0.5 * (G + Gm);

  N2Distance out;
  out.aux_nodes = static_cast<int>(m);
  out.full = gram_norm(G, B);
  out.even = gram_norm(Ge, B);
  return out;
}

double n2_ground_energy(const Potential& V, double g_eps, double eps, const N2KreinOptions& opt) {
  if (!(eps > 0.0)) throw DomainError("n2 ground energy: ε must be positive");
  const AuxData a = make_aux(V, opt);
  const Eigen::Index m = static_cast<Eigen::Index>(a.rule.size());
  if (m == 0 || g_eps == 0.0) return 0.0;
  Eigen::VectorXd sw(m);
  for (Eigen::Index k = 0; k < m; ++k) sw[k] = std::sqrt(a.rule.w[k]) * a.v[k];
  auto sign_at = [&](double zeta) {
    Eigen::MatrixXd S(m, m);
    for (Eigen::Index k = 0; k < m; ++k)
      for (Eigen::Index l = 0; l < m; ++l)
        S(k, l) = sw[k] * 0.5 * green_half(zeta, eps * (a.rule.x[k] - a.rule.x[l])) * sw[l];
    const double det = (Eigen::MatrixXd(a.J.asDiagonal()) - g_eps * S).partialPivLu().determinant();
    return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
  };
  int s_inf = 1;
  for (Eigen::Index k = 0; k < m; ++k) s_inf *= a.J[k] < 0.0 ? -1 : 1;
  const double gl1 = std::abs(g_eps) * V.l1();
  double hi = std::max(1e-12, 1.05 * gl1 * gl1 / 8.0);
  const double lo_limit = 1e-12 * std::max(1.0, hi);
  double prev = hi;
  for (double zeta = hi; zeta > lo_limit; zeta *= 0.9) {
    if (sign_at(zeta) != s_inf) {
      double lo = zeta, up = prev;
      for (int it = 0; it < 200 && up - lo > 1e-15 * up; ++it) {
        const double mid = 0.5 * (lo + up);
        if (sign_at(mid) != s_inf) lo = mid;
        else up = mid;
      }
      return -0.5 * (lo + up);
    }
    prev = zeta;
  }
  return 0.0;
}

double resolvent_norm_from_ground(double e0, double z) {
  if (!(z + e0 > 0.0)) throw DomainError("resolvent norm: z lies in the spectrum");
  return 1.0 / (z + e0);
}

double delta_limit_ground_energy(double alpha) { return alpha > 0.0 ? -alpha * alpha / 8.0 : 0.0; }

PropagationCheck resolvent_diff_propagation(const Potential& V, const CouplingSchedule& sched,
                                            const std::vector<double>& eps, double z, double z0,
                                            const N2KreinOptions& opt, double tol) {
  PropagationCheck out;
  const double alpha = sched.alpha(V);
  double C = resolvent_norm_from_ground(delta_limit_ground_energy(alpha), z);
  std::vector<double> base;
  for (double e : eps) {
    const double g = sched.g_eps(e);
    C = std::max(C, resolvent_norm_from_ground(n2_ground_energy(V, g, e, opt), z));
    out.eps.push_back(e);
    out.lhs.push_back(n2_resolvent_distance(V, g, e, alpha, z, opt).even);
    base.push_back(n2_resolvent_distance(V, g, e, alpha, z0, opt).even);
  }
  out.C = C;
  const double f = 1.0 + std::abs(z - z0) * C;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    out.rhs.push_back(f * f * base[i]);
    if (out.lhs[i] > out.rhs[i] * (1.0 + tol) + 1e-14) out.holds = false;
  }
  return out;
}

}  // namespace contact
