#include "contact/pair.hpp"

#include <algorithm>
#include <cmath>

#include "contact/errors.hpp"
#include "contact/quadrature.hpp"

namespace contact {

Mesh1D Mesh1D::uniform(double L, int interior) {
  if (!(L > 0.0) || interior < 3) throw DomainError("Mesh1D: need L > 0 and at least 3 interior nodes");
  Mesh1D m;
  const double h = 2.0 * L / (interior + 1);
  m.x.resize(static_cast<std::size_t>(interior) + 2);
  for (int i = 0; i <= interior + 1; ++i) m.x[i] = -L + h * i;
  m.x.back() = L;
  return m;
}

Mesh1D Mesh1D::graded(double L, double h_min, double h_max, double core, double growth) {
  if (!(L > 0.0) || !(h_min > 0.0) || h_max < h_min || !(growth > 1.0) || core < 0.0)
    throw DomainError("Mesh1D::graded: invalid parameters");
  std::vector<double> half{0.0};
  double h = h_min;
  while (half.back() < L) {
    const double at = half.back();
    if (at >= core) h = std::min(h_max, h * growth);
    half.push_back(at + h);
  }
  half.back() = L;
  if (half.size() > 2 && half[half.size() - 1] - half[half.size() - 2] < 0.5 * h) half.erase(half.end() - 2);
  Mesh1D m;
  for (std::size_t i = half.size(); i-- > 1;) m.x.push_back(-half[i]);
  m.x.insert(m.x.end(), half.begin(), half.end());
  return m;
}

double Mesh1D::max_spacing() const {
  double h = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) h = std::max(h, x[i] - x[i - 1]);
  return h;
}

bool Mesh1D::symmetric(double tol) const {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(x[i] + x[n - 1 - i]) > tol * std::max(1.0, std::abs(x[i]))) return false;
  return true;
}

Eigen::MatrixXd Tridiagonal::dense() const {
  const Eigen::Index n = diag.size();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  M.diagonal() = diag;
  for (Eigen::Index i = 0; i + 1 < n; ++i) M(i, i + 1) = M(i + 1, i) = off[i];
  return M;
}

DiscreteHamiltonian PairHamiltonian::free_part() const {
  Tridiagonal t = H;
  t.diag += g * potential.cwiseQuotient(mass);
  return {t.dense(), "dirichlet"};
}

DiscreteHamiltonian PairHamiltonian::dense() const { return {H.dense(), "dirichlet"}; }

FactoredCoupling PairHamiltonian::coupling() const {
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < potential.size(); ++i)
    if (potential[i] != 0.0) rows.push_back(i);
  FactoredCoupling c;
  c.g = g;
  c.A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), potential.size());
  c.J.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Eigen::Index i = rows[k], kk = static_cast<Eigen::Index>(k);
    c.A(kk, i) = std::sqrt(std::abs(potential[i]) / mass[i]);
    c.J[kk] = potential[i] > 0.0 ? 1.0 : -1.0;
  }
  return c;
}

namespace {

PairHamiltonian assemble(const Mesh1D& mesh, const Eigen::VectorXd& potential, double g) {
  const int n = mesh.interior();
  PairHamiltonian h;
  h.mesh = mesh;
  h.g = g;
  h.potential = potential;
  h.mass.resize(n);
  h.H.diag.resize(n);
  h.H.off.resize(std::max(0, n - 1));
  for (int i = 0; i < n; ++i) {
    const double hl = mesh.x[i + 1] - mesh.x[i], hr = mesh.x[i + 2] - mesh.x[i + 1];
    h.mass[i] = 0.5 * (hl + hr);
    h.H.diag[i] = (2.0 / hl + 2.0 / hr - g * potential[i]) / h.mass[i];
  }
  for (int i = 0; i + 1 < n; ++i) {
    const double hr = mesh.x[i + 2] - mesh.x[i + 1];
    h.H.off[i] = -2.0 / hr / std::sqrt(h.mass[i] * h.mass[i + 1]);
  }
  return h;
}

void check_mesh(const Mesh1D& mesh) {
  if (mesh.x.size() < 5) throw DomainError("pair Hamiltonian: mesh too small");
  for (std::size_t i = 1; i < mesh.x.size(); ++i)
    if (!(mesh.x[i] > mesh.x[i - 1])) throw DomainError("pair Hamiltonian: mesh nodes must increase");
}

}  // namespace

PairHamiltonian build_pair_hamiltonian(const Potential& V, double g_eps, double eps, const Mesh1D& mesh, int order) {
  if (!(eps > 0.0)) throw DomainError("pair Hamiltonian: ε must be positive");
  check_mesh(mesh);
  const Potential Ve = V.scaled(eps);
  const double S = Ve.support_radius();
  const std::vector<double> bps = Ve.breakpoints();
  const int n = mesh.interior();
  Eigen::VectorXd P = Eigen::VectorXd::Zero(n);
  for (std::size_t e = 0; e + 1 < mesh.x.size(); ++e) {
    const double a = mesh.x[e], b = mesh.x[e + 1];
    if (b <= -S || a >= S) continue;
    std::vector<double> br{a};
    for (double c : bps)
      if (c > a && c < b) br.push_back(c);
    br.push_back(b);
    const Rule r = composite_gauss(br, order);
    double left = 0.0, right = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q) {
      const double t = (r.x[q] - a) / (b - a), val = r.w[q] * Ve(r.x[q]);
      left += val * (1.0 - t);
      right += val * t;
    }
    // element e spans interior nodes e-1 (left end) and e (right end)
    if (e >= 1) P[static_cast<Eigen::Index>(e) - 1] += left;
    if (static_cast<int>(e) < n) P[static_cast<Eigen::Index>(e)] += right;
  }
  PairHamiltonian h = assemble(mesh, P, g_eps);
  const double width = 2.0 * Ve.truncation_radius(1e-6);
  double h_loc = 0.0;
  for (std::size_t i = 1; i < mesh.x.size(); ++i)
    if (mesh.x[i] > -0.5 * width && mesh.x[i - 1] < 0.5 * width) h_loc = std::max(h_loc, mesh.x[i] - mesh.x[i - 1]);
  h.under_resolved = h_loc > width / 8.0;
  return h;
}

PairHamiltonian build_delta_hamiltonian(double alpha, const Mesh1D& mesh) {
  check_mesh(mesh);
  const int n = mesh.interior();
  Eigen::VectorXd P = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const double xl = mesh.x[i], xc = mesh.x[i + 1], xr = mesh.x[i + 2];
    if (xl < 0.0 && 0.0 <= xc) P[i] = (0.0 - xl) / (xc - xl);
    else if (xc < 0.0 && 0.0 < xr) P[i] = (xr - 0.0) / (xr - xc);
  }
  return assemble(mesh, P, alpha);
}

Tridiagonal even_sector(const PairHamiltonian& h) {
  if (!h.mesh.symmetric()) throw DomainError("even_sector: mesh is not symmetric");
  const Eigen::Index n = h.H.diag.size();
  Tridiagonal t;
  if (n % 2 == 1) {
    const Eigen::Index c = (n - 1) / 2, m = n - c;
    t.diag = h.H.diag.tail(m);
    t.off = h.H.off.tail(m - 1);
    t.off[0] *= std::sqrt(2.0);
  } else {
    const Eigen::Index c = n / 2, m = n - c;
    t.diag = h.H.diag.tail(m);
    t.diag[0] += h.H.off[c - 1];
    t.off = h.H.off.tail(m - 1);
  }
  return t;
}

std::vector<double> lowest_eigenvalues(const Tridiagonal& t, int k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(t.diag, t.off, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NonConvergenceError("lowest_eigenvalues: tridiagonal solver failed");
  const Eigen::Index m = std::min<Eigen::Index>(k, es.eigenvalues().size());
  return std::vector<double>(es.eigenvalues().data(), es.eigenvalues().data() + m);
}

double ground_energy(const Tridiagonal& t) { return lowest_eigenvalues(t, 1).front(); }

double grid_resolvent_distance(const PairHamiltonian& h, double alpha, double z, GridLimit limit) {
  const Tridiagonal t = even_sector(h);
  const Eigen::Index m = t.diag.size();
  auto resolvent = [z](const Tridiagonal& tt) {
    Eigen::MatrixXd A = tt.dense();
    A.diagonal().array() += z;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success) throw NonInvertibleError("grid resolvent: H + z is singular");
    return Eigen::MatrixXd(ldlt.solve(Eigen::MatrixXd::Identity(tt.diag.size(), tt.diag.size())));
  };
  const Eigen::MatrixXd R = resolvent(t);
  Eigen::MatrixXd K(m, m);
  if (limit == GridLimit::DiscreteDelta) {
    K = resolvent(even_sector(build_delta_hamiltonian(alpha, h.mesh)));
  } else {
    const Eigen::Index n = h.mass.size(), c = n - m;
    const bool centre = n % 2 == 1;
    const LimitBoundary b = limit == GridLimit::FreeSpace ? LimitBoundary::FreeSpace : LimitBoundary::Dirichlet;
    Eigen::VectorXd x(m), mw(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      x[k] = h.mesh.x[static_cast<std::size_t>(c + k + 1)];
      mw[k] = (centre && k == 0 ? 1.0 : 2.0) * h.mass[c + k];
    }
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        K(i, j) = std::sqrt(mw[i] * mw[j]) * 0.5 *
                  (delta_limit_kernel(alpha, z, x[i], x[j], b, h.mesh.L()) +
                   delta_limit_kernel(alpha, z, x[i], -x[j], b, h.mesh.L()));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R - K, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace contact
