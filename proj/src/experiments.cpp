#include "contact/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "contact/errors.hpp"
#include "contact/parallel.hpp"

namespace contact {

std::vector<double> dyadic_eps(int first, int last) {
  if (first > last) throw DomainError("dyadic_eps: need first <= last");
  std::vector<double> out;
  for (int k = first; k <= last; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

void SweepPlan::validate() const {
  if (eps.empty()) throw DomainError("sweep: empty ε list");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw DomainError("sweep: ε must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw DomainError("sweep: ε must be strictly decreasing");
  }
  if (z.empty()) throw DomainError("sweep: empty z list");
  for (double x : z)
    if (!(x > 0.0)) throw DomainError("sweep: z must be positive");
}

RateFitReport fit_rate(const std::vector<double>& eps, const std::vector<double>& error, double s_theory) {
  if (eps.size() != error.size()) throw DomainError("fit_rate: size mismatch");
  if (eps.size() < 4) throw DomainError("fit_rate: need at least 4 samples");
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (!(eps[i] > 0.0) || !(error[i] > 0.0) || !std::isfinite(error[i]))
      throw DomainError("fit_rate: ε and errors must be positive and finite");
  RateFitReport rep;
  rep.eps = eps;
  rep.error = error;
  rep.s_theory = s_theory;
  std::vector<std::size_t> order(eps.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return eps[a] < eps[b]; });
  rep.tail = std::max<std::size_t>(2, eps.size() / 2);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < rep.tail; ++k) {
    const std::size_t i = order[k];
    if (error[i] < 1e-13) throw DegenerateFitError("fit_rate: errors below the numerical floor 1e-13");
    xs.push_back(std::log(eps[i]));
    ys.push_back(std::log(error[i]));
  }
  const double n = static_cast<double>(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) throw DegenerateFitError("fit_rate: ε values coincide");
  rep.slope = (n * sxy - sx * sy) / den;
  rep.intercept = (sy - rep.slope * sx) / n;
  const double mean = sy / n;
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double f = rep.intercept + rep.slope * xs[k];
    ss_res += (ys[k] - f) * (ys[k] - f);
    ss_tot += (ys[k] - mean) * (ys[k] - mean);
  }
  rep.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  rep.converging = rep.slope > 0.05;
  return rep;
}

double theory_rate(const Potential& V, const CouplingSchedule& s, double cap) {
  double out = 0.0;
  for (int k = static_cast<int>(std::floor(cap / 0.05 + 1e-9)); k >= 1; --k) {
    const double t = std::min(cap, 0.05 * k);
    if (V.moment(std::min(t, 1.0)).finite) {
      out = t;
      break;
    }
  }
  if (s.has_rate()) out = std::min(out, s.s_g);
  return out;
}

namespace {

GridSpec refined(GridSpec g) {
  g.n *= 2;
  g.aux_order *= 2;
  if (g.aux_nodes > 0) g.aux_nodes *= 2;
  return g;
}

GridSpec coarsened(GridSpec g) {
  g.n = std::max(8, (2 * g.n) / 3);
  return g;
}

KernelOperator table(const KernelSpec& spec, const std::pair<ProductGrid, ProductGrid>& grids, const GridSpec& g,
                     int jobs) {
  DiscretizeOptions o;
  o.jobs = jobs;
  o.core_radius = core_radius(spec.cls, g);
  return discretize(spec, grids.first, grids.second, o);
}

RateFitReport fit_rows(const std::vector<SweepRow>& rows, double z, bool use_op, double s_theory) {
  std::vector<double> e, err;
  for (const auto& r : rows) {
    if (r.z != z || r.rejected) continue;
    e.push_back(r.eps);
    err.push_back(use_op ? r.error_op : r.error_hs);
  }
  return fit_rate(e, err, s_theory);
}

}  // namespace

SweepResult kernel_convergence_sweep(const SweepPlan& plan, KernelClass cls) {
  plan.validate();
  if (cls == KernelClass::SchurF || cls == KernelClass::SchurB)
    throw DomainError("kernel sweep: Schur operators carry no ε");
  const GridSpec grid = plan.grid.n > 0 ? plan.grid : default_grid(cls);
  const bool one_d = cls == KernelClass::T || cls == KernelClass::Phi12;
  const auto grids = make_grids(cls, plan.V, grid);
  const GridSpec other = one_d ? refined(grid) : coarsened(grid);
  SweepResult res;
  for (double z : plan.z) {
    const KernelOperator K0 = table({cls, 0.0, z, 0.0, plan.V}, grids, grid, plan.jobs);
    std::unique_ptr<KernelOperator> K0o;
    std::pair<ProductGrid, ProductGrid> ogrids;
    if (plan.richardson) {
      ogrids = make_grids(cls, plan.V, other);
      K0o = std::make_unique<KernelOperator>(table({cls, 0.0, z, 0.0, plan.V}, ogrids, other, plan.jobs));
    }
    for (double e : plan.eps) {
      SweepRow row;
      row.target = to_string(cls);
      row.eps = e;
      row.z = z;
      row.grid_n = grid.n;
      row.grid_L = grid.L;
      const KernelOperator D = difference(table({cls, e, z, 0.0, plan.V}, grids, grid, plan.jobs), K0);
      row.error_hs = hs_norm(D);
      if (plan.op_norm) row.error_op = op_norm(D);
      if (plan.richardson) {
        const double eo = hs_norm(difference(table({cls, e, z, 0.0, plan.V}, ogrids, other, plan.jobs), *K0o));
        row.disc_err_est = std::abs(row.error_hs - eo);
        // only the refined pair on 1D grids is a trustworthy estimate
        row.rejected = one_d && row.disc_err_est > 0.1 * row.error_hs;
      }
      res.rows.push_back(row);
    }
    std::vector<double> tail;
    for (const auto& r : res.rows)
      if (r.z == z) tail.push_back(plan.op_norm ? r.error_op : r.error_hs);
    if (tail.size() >= 2 && !(tail[tail.size() - 1] < tail[tail.size() - 2]))
      throw GridResolutionError("kernel sweep: errors at the two smallest ε are not monotone");
    res.fits.push_back(fit_rows(res.rows, z, plan.op_norm, theory_rate(plan.V, {}, one_d ? 1.0 : 0.75)));
  }
  return res;
}

SweepResult resolvent_convergence_sweep_n2(const SweepPlan& plan, const N2KreinOptions& opt) {
  plan.validate();
  const double alpha = plan.schedule.alpha(plan.V);
  SweepResult res;
  for (double z : plan.z) {
    if (alpha > 0.0 && std::abs(z - alpha * alpha / 8.0) < 1e-3 * std::max(1.0, z))
      throw PoleError("resolvent sweep: z is at the pole α²/8 of the limit");
    std::vector<SweepRow> rows(plan.eps.size());
    parallel_for(plan.eps.size(), plan.jobs, [&](std::size_t i) {
      const double e = plan.eps[i];
      const double g = plan.schedule.g_eps(e);
      const N2Distance d = n2_resolvent_distance(plan.V, g, e, alpha, z, opt);
      SweepRow& row = rows[i];
      row.target = "resolvent_n2";
      row.eps = e;
      row.z = z;
      row.error_op = d.even;
      row.grid_n = d.aux_nodes;
      row.grid_L = 0.0;
      if (plan.richardson) {
        N2KreinOptions fine = opt;
        fine.order *= 2;
        row.disc_err_est = std::abs(d.even - n2_resolvent_distance(plan.V, g, e, alpha, z, fine).even);
        row.rejected = row.disc_err_est > 0.1 * d.even;
      }
    });
    res.rows.insert(res.rows.end(), rows.begin(), rows.end());
    res.fits.push_back(fit_rows(res.rows, z, true, theory_rate(plan.V, plan.schedule, 0.95)));
  }
  return res;
}

std::vector<SweepRow> resolvent_grid_crosscheck_n2(const SweepPlan& plan, const Mesh1D& mesh) {
  plan.validate();
  const double alpha = plan.schedule.alpha(plan.V);
  std::vector<SweepRow> out;
  for (double z : plan.z)
    for (double e : plan.eps) {
      const PairHamiltonian h = build_pair_hamiltonian(plan.V, plan.schedule.g_eps(e), e, mesh);
      SweepRow row;
      row.target = "resolvent_n2_grid";
      row.eps = e;
      row.z = z;
      row.error_op = grid_resolvent_distance(h, alpha, z, GridLimit::DiscreteDelta);
      row.grid_n = mesh.interior();
      row.grid_L = mesh.L();
      // spread between the discrete and the sampled Dirichlet limits
      row.disc_err_est = std::abs(row.error_op - grid_resolvent_distance(h, alpha, z, GridLimit::Dirichlet));
      out.push_back(row);
    }
  return out;
}

EigenReport eigenvalue_convergence_n2(const Potential& V, const CouplingSchedule& s, const std::vector<double>& eps,
                                      const Mesh1D& mesh) {
  EigenReport rep;
  rep.reference = delta_limit_ground_energy(s.alpha(V));
  for (double e : eps) {
    const PairHamiltonian h = build_pair_hamiltonian(V, s.g_eps(e), e, mesh);
    const double E = ground_energy(even_sector(h));
    rep.eps.push_back(e);
    rep.energy.push_back(E);
    rep.error.push_back(std::abs(E - rep.reference));
    rep.under_resolved.push_back(h.under_resolved);
    if (rep.error.size() >= 2 && !(rep.error.back() < rep.error[rep.error.size() - 2])) rep.decreasing = false;
  }
  return rep;
}

std::vector<FormConvergence> form_convergence_sweep(const std::vector<TestFunction>& family, const Potential& V,
                                                    const CouplingSchedule& s, const std::vector<double>& eps,
                                                    int jobs) {
  const double alpha = s.alpha(V);
  const double half_moment = V.abs_integral(1.0, 0.5);
  double s_theory = std::isfinite(half_moment) ? 0.5 : kNaN;
  if (s.has_rate() && std::isfinite(s_theory)) s_theory = std::min(s_theory, s.s_g);
  std::vector<FormConvergence> out(family.size());
  parallel_for(family.size(), jobs, [&](std::size_t k) {
    FormConvergence& fc = out[k];
    fc.id = family[k].id;
    for (double e : eps) fc.gap.push_back(std::abs(form_gap(family[k], V, s.g_eps(e), alpha, e)));
    fc.fit = fit_rate(eps, fc.gap, s_theory);
  });
  return out;
}

}  // namespace contact
