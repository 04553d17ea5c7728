#include <cmath>

#include <gtest/gtest.h>

#include "contact/errors.hpp"
#include "contact/experiments.hpp"
#include "contact/forms.hpp"

using namespace contact;

namespace {

const double kTrace = 1.0 / std::sqrt(2.0 * M_PI);  // ‖γ₁₂ψ‖² for the unit Gaussian

TestFunction zero_function() {
  TestFunction f;
  f.id = "zero";
  f.N = 2;
  f.L = 6.0;
  f.f = [](const double*) { return 0.0; };
  f.grad = [](const double*, double* g) { g[0] = g[1] = 0.0; };
  return f;
}

// Narrow Gaussian centred at (2.5, -2.5), far from the diagonal.
TestFunction off_diagonal() {
  TestFunction f;
  f.id = "off_diagonal";
  f.N = 2;
  f.L = 6.0;
  const double s = 0.3;
  f.f = [s](const double* x) {
    const double a = x[0] - 2.5, b = x[1] + 2.5;
    return std::exp(-(a * a + b * b) / (2 * s * s));
  };
  f.grad = [s](const double* x, double* g) {
    const double a = x[0] - 2.5, b = x[1] + 2.5;
    const double e = std::exp(-(a * a + b * b) / (2 * s * s));
    g[0] = -a / (s * s) * e;
    g[1] = -b / (s * s) * e;
  };
  return f;
}

const TestFunction* find(const std::vector<TestFunction>& fam, const std::string& id) {
  for (const auto& f : fam)
    if (f.id == id) return &f;
  return nullptr;
}

}  // namespace

TEST(QForm, GaussianOracles) {
  const WaveFunction G = WaveFunction::sample(gaussian_product(2));
  EXPECT_NEAR(G.norm2(), 1.0, 1e-10);
  EXPECT_NEAR(q_form(G, 0.0, 0.0).value, 1.0, 1e-10);
  EXPECT_NEAR(q_form(G, 1.0, 0.0).value, 1.0 - kTrace, 1e-10);
  EXPECT_NEAR(q_form(G, 1.0, 0.0).value, 0.601057719599, 1e-10);
  EXPECT_NEAR(q_form(G, 0.0, 2.0).value, 3.0, 1e-10);
  EXPECT_FALSE(q_form(G, 1.0, 0.0).under_resolved);
}

TEST(QForm, ZeroFunction) {
  const WaveFunction Z = WaveFunction::sample(zero_function());
  EXPECT_EQ(q_form(Z, 1.0, 1.0).value, 0.0);
  EXPECT_EQ(q_eps_form(Z, Potential::box(), 1.0, 0.1, 1.0).value, 0.0);
}

TEST(Trace, GaussianRestriction) {
  const WaveFunction G = WaveFunction::sample(gaussian_product(2));
  const Eigen::VectorXd t = trace_gamma(G, 0, 1);
  const auto& x = G.grid.nodes;
  ASSERT_EQ(static_cast<std::size_t>(t.size()), x.size());
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(t[i], std::exp(-x[i] * x[i]) / std::sqrt(M_PI), 1e-14);
  EXPECT_NEAR(trace_norm2(G, 0, 1), kTrace, 1e-10);
  EXPECT_NEAR(pair_marginal(G.fn, 0, 1, 0.0), kTrace, 1e-10);
}

TEST(Trace, ExchangeOddVanishes) {
  const auto fam = form_test_family();
  const TestFunction* f = find(fam, "exchange_odd");
  ASSERT_NE(f, nullptr);
  const WaveFunction w = WaveFunction::sample(*f);
  EXPECT_LT(trace_gamma(w, 0, 1).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Family, SizeAndDimensions) {
  const auto fam = form_test_family();
  ASSERT_EQ(fam.size(), 20u);
  int n2 = 0, n3 = 0;
  for (const auto& f : fam) (f.N == 2 ? n2 : n3)++;
  EXPECT_EQ(n2, 14);
  EXPECT_EQ(n3, 6);
  const auto again = form_test_family();
  const double x[3] = {0.3, -0.2, 0.7};
  for (std::size_t k = 0; k < fam.size(); ++k) EXPECT_EQ(fam[k].f(x), again[k].f(x));
}

TEST(H1Norms, Gaussian) {
  const H1Norms n = h1_norms(gaussian_product(2));
  EXPECT_NEAR(n.norm2, 1.0, 1e-10);
  EXPECT_NEAR(n.grad2, 1.0, 1e-10);
  ASSERT_EQ(n.rel_grad2.size(), 1u);
  EXPECT_NEAR(n.rel_grad2[0], 0.25, 1e-10);  // ¼‖(∂₂ - ∂₁)ψ‖² = ¼·1
}

TEST(FormBounds, GaussianBox) {
  const WaveFunction G = WaveFunction::sample(gaussian_product(2));
  const FormBoundsReport r = check_form_bounds(G, Potential::box(), 0.5);
  EXPECT_TRUE(r.all_hold);
  for (const auto& c : r.checks)
    if (c.name == "potential") {
      // ∫ box(r) e^{-r²/2}/√(2π) dr = erf(1/(2√2))
      EXPECT_NEAR(c.lhs, std::erf(0.5 / std::sqrt(2.0)), 1e-10);
      EXPECT_NEAR(c.rhs, 1.0, 1e-10);
    } else if (c.name == "trace") {
      EXPECT_NEAR(c.lhs, std::sqrt(kTrace), 1e-10);
    }
}

TEST(FormBounds, ZeroFunctionAllSidesVanish) {
  const FormBoundsReport r = check_form_bounds(WaveFunction::sample(zero_function()), Potential::box(), 0.5);
  EXPECT_TRUE(r.all_hold);
  for (const auto& c : r.checks) {
    EXPECT_EQ(c.lhs, 0.0);
    EXPECT_EQ(c.rhs, 0.0);
  }
}

TEST(FormBounds, WholeFamilyHolds) {
  for (const Potential& V : {Potential::box(), Potential::cosine_box()})
    for (const auto& f : form_test_family()) {
      const FormBoundsReport r = check_form_bounds(WaveFunction::sample(f), V, 0.5);
      EXPECT_TRUE(r.all_hold) << f.id << " " << V.name();
      EXPECT_LE(r.fitted_c_mu, 0.5 + 1e-9) << f.id;
    }
}

TEST(QEpsForm, NoCouplingIsKinetic) {
  const WaveFunction G = WaveFunction::sample(gaussian_product(2));
  EXPECT_NEAR(q_eps_form(G, Potential::box(), 0.0, 0.1, 0.0).value, q_form(G, 0.0, 0.0).value, 1e-14);
}

TEST(QEpsForm, SupportAwayFromDiagonal) {
  const WaveFunction w = WaveFunction::sample(off_diagonal());
  const double q = q_form(w, 1.0, 0.0).value;
  EXPECT_NEAR(q_eps_form(w, Potential::box(), 1.0, 0.05, 0.0).value, q, 1e-12 * std::abs(q));
}

TEST(QEpsForm, GaussianConvergesToDeltaForm) {
  const TestFunction g = gaussian_product(2);
  std::vector<double> eps = dyadic_eps(2, 7), gap;
  for (double e : eps) gap.push_back(std::abs(form_gap(g, Potential::box(), 1.0, 1.0, e)));
  for (std::size_t i = 1; i < gap.size(); ++i) EXPECT_LT(gap[i], gap[i - 1]);
  EXPECT_GE(fit_rate(eps, gap).slope, 0.45);
  // the gap is q_ε - q with the kinetic parts cancelled
  const WaveFunction w = WaveFunction::sample(g);
  const double direct = q_eps_form(w, Potential::box(), 1.0, 0.25, 0.0).value - q_form(w, 1.0, 0.0).value;
  EXPECT_NEAR(form_gap(g, Potential::box(), 1.0, 1.0, 0.25), direct, 1e-8);
}

TEST(SufficientShift, Formula) {
  EXPECT_NEAR(sufficient_shift(Potential::box(), 2.0, 3), 9.0, 1e-12);
  EXPECT_NEAR(sufficient_shift(Potential::exponential(), 1.0, 2), 1.0, 1e-12);
}

TEST(Sandwich, HoldsOnFamily) {
  std::vector<WaveFunction> ws;
  for (const auto& f : form_test_family())
    if (f.N == 2) ws.push_back(WaveFunction::sample(f));
  const CouplingSchedule s{1.0, 1.0, 0.5};
  const SandwichReport r = sandwich_check(ws, Potential::box(), s, {0.5, 0.25, 0.125}, sufficient_shift(Potential::box(), 2.0, 2));
  EXPECT_TRUE(r.holds);
  EXPECT_LE(r.b_fit, r.b_bound);
}

TEST(Scaling, RelativeCoordinatesAgree) {
  for (const auto& f : form_test_family())
    if (f.N == 2) EXPECT_LE(scaling_consistency(f, Potential::box(), 1.0, 0.05, 1.0).rel_err, 1e-8) << f.id;
  EXPECT_THROW(scaling_consistency(gaussian_product(3), Potential::box(), 1.0, 0.05, 1.0), DomainError);
}
