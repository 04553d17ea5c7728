#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "contact/errors.hpp"
#include "contact/potentials.hpp"

using namespace contact;

TEST(Potential, NormsOfBuiltins) {
  EXPECT_NEAR(Potential::box().l1(), 1.0, 1e-14);
  EXPECT_NEAR(Potential::box().l2(), 1.0, 1e-14);
  EXPECT_NEAR(Potential::exponential().l1(), 2.0, 1e-12);
  EXPECT_NEAR(Potential::heavy_tail(2.2).l1(), 2.0 / 1.2, 1e-8);
  EXPECT_NEAR(Potential::cosine_box().integral(), 0.0, 1e-12);
  EXPECT_NEAR(Potential::cosine_box().l1(), 4.0, 1e-12);
  EXPECT_NEAR(Potential::triangle().l1(), 1.0, 1e-12);
  EXPECT_NEAR(Potential::gaussian(1.0, 1.0).l1(), std::sqrt(M_PI), 1e-10);  // e^{-r²}
  EXPECT_EQ(Potential::zero().l1(), 0.0);
}

TEST(Potential, Evenness) {
  for (const Potential& V : {Potential::box(), Potential::exponential(), Potential::cosine_box(),
                             Potential::table({0.0, 0.3, 1.0}, {1.0, -0.5, 0.0})})
    for (double r : {0.0, 0.1, 0.45, 1.3, 2.9}) EXPECT_EQ(V(r), V(-r));
}

TEST(Scale, Examples) {
  const Potential B = Potential::box();
  const Potential h = scale(B, 0.5);
  EXPECT_DOUBLE_EQ(h(0.2), 2.0);
  EXPECT_DOUBLE_EQ(h(0.3), 0.0);
  EXPECT_NEAR(h.support_radius(), 0.25, 1e-15);
  const Potential one = scale(B, 1.0);
  for (double r : {0.0, 0.3, 0.49, 0.7}) EXPECT_EQ(one(r), B(r));
  const Potential t = scale(B, 0.1);
  EXPECT_NEAR(t.l1(), 1.0, 1e-12);
  EXPECT_NEAR(t.l2() * t.l2(), 10.0, 1e-10);
  EXPECT_THROW(scale(B, 0.0), DomainError);
  EXPECT_THROW(scale(B, -1.0), DomainError);
}

TEST(Scale, L1InvarianceAcrossSweep) {
  for (const Potential& V : {Potential::box(), Potential::triangle(), Potential::exponential(),
                             Potential::cosine_box(), Potential::heavy_tail(3.0)})
    for (double e = 1.0; e > 1e-3; e *= 0.5) EXPECT_NEAR(scale(V, e).l1() / V.l1(), 1.0, 1e-10) << V.name();
}

TEST(Cutoff, Examples) {
  const Potential E = Potential::exponential();
  EXPECT_NEAR(cutoff(E, 60.0).l1(), 2.0, 1e-12);
  EXPECT_NEAR(E.l1() - cutoff(E, 1.0).l1(), 2.0 * std::exp(-1.0), 1e-12);
  EXPECT_LE(cutoff(E, 1.0).support_radius(), 1.0);
  const Potential B = Potential::box();
  const Potential Bk = cutoff(B, 1.0);
  for (double r : {0.0, 0.25, 0.49, 0.51, 2.0}) EXPECT_EQ(Bk(r), B(r));
  EXPECT_NEAR(Bk.l1(), 1.0, 1e-14);
}

TEST(Cutoff, CommutesWithScaling) {
  const Potential E = Potential::exponential();
  for (double e : {0.5, 0.1})
    for (double k : {0.7, 2.0}) {
      const Potential a = cutoff(scale(E, e), e * k), b = scale(cutoff(E, k), e);
      for (double r = 0.0; r < 3.0 * e * k; r += 0.013 * e) EXPECT_NEAR(a(r), b(r), 1e-12 * std::abs(b(r)) + 1e-300);
      EXPECT_NEAR(a.l1(), b.l1(), 1e-12);
    }
}

TEST(Moment, Examples) {
  const Potential B = Potential::box();
  EXPECT_NEAR(moment(B, 0.5).m2s, 0.25, 1e-14);
  EXPECT_NEAR(moment(B, 1.0).m2s, 1.0 / 12.0, 1e-14);
  EXPECT_NEAR(moment(B, 0.5).I, 1.25, 1e-14);
  const MomentReport z = moment(Potential::zero(), 0.7);
  EXPECT_EQ(z.m2s, 0.0);
  EXPECT_EQ(z.I, 0.0);
  EXPECT_THROW(moment(B, 0.0), DomainError);
  EXPECT_THROW(moment(B, 1.5), DomainError);
}

TEST(Moment, HeavyTailDivergence) {
  // ∫ |r|^{2s} (1+|r|)^{-2.2} is finite iff 2s < 1.2
  const Potential H = Potential::heavy_tail(2.2);
  EXPECT_TRUE(moment(H, 0.55).finite);
  EXPECT_FALSE(moment(H, 0.65).finite);
}

TEST(Moment, ScalingLaw) {
  for (const Potential& V : {Potential::box(), Potential::exponential(), Potential::triangle()})
    for (double s : {0.25, 0.5, 1.0})
      for (double e : {0.5, 0.03}) EXPECT_NEAR(moment(scale(V, e), s).m2s / (std::pow(e, 2 * s) * moment(V, s).m2s), 1.0, 1e-8);
}

TEST(Factorize, PointwiseIdentity) {
  const Factorization f = factorize(Potential::cosine_box());
  double worst = 0.0;
  for (double r = -4.0; r <= 4.0; r += 0.01) worst = std::max(worst, std::abs(f.v(r) * f.u(r) - f.V(r)));
  EXPECT_LT(worst, 1e-12);
  EXPECT_EQ(f.J(0.0), 1.0);
  EXPECT_EQ(f.J(2.0), -1.0);
  const Factorization b = factorize(Potential::box());
  for (double r : {0.0, 0.3}) EXPECT_EQ(b.u(r), b.v(r));
  const Factorization n = factorize(Potential::box(-1.0, 1.0));
  EXPECT_DOUBLE_EQ(n.v(0.5), 1.0);
  EXPECT_DOUBLE_EQ(n.u(0.5), -1.0);
  for (double r : {-3.0, 0.2, 2.5}) EXPECT_EQ(f.J(r) * f.J(r), 1.0);
}

TEST(Schedule, RatesAndAlpha) {
  const CouplingSchedule c{2.0, 0.0, 0.0};
  EXPECT_EQ(c.g_eps(0.1), 2.0);
  EXPECT_FALSE(c.has_rate());
  const CouplingSchedule p{1.0, 1.0, 0.5};
  EXPECT_NEAR(p.g_eps(0.25), 1.5, 1e-15);
  EXPECT_TRUE(p.has_rate());
  EXPECT_NEAR(p.alpha(Potential::box()), 1.0, 1e-14);
  for (double e : {1e-2, 1e-4, 1e-6}) EXPECT_LE(std::abs(p.g_eps(e) - p.g), std::sqrt(e) * (1 + 1e-12));
}

TEST(TablePotential, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "contact_potential_test.txt";
  {
    std::ofstream out(path);
    out << "# r V\n0 1\n0.5 1\n0.5000001 0\n2 0\n";
  }
  const Potential T = Potential::from_file(path.string());
  EXPECT_EQ(T.shape(), Shape::Table);
  EXPECT_NEAR(T.l1(), 1.0, 1e-6);
  EXPECT_EQ(T(-0.25), T(0.25));
  std::filesystem::remove(path);
  EXPECT_THROW(Potential::from_file("/nonexistent/contact.txt"), ConfigError);
}

TEST(AuxRule, CoversSupportWithPositiveWeights) {
  const Potential V = scale(Potential::box(), 0.1);
  const Rule r = V.aux_rule(8, 0.25);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_GT(r.w[i], 0.0);
    s += r.w[i] * V(r.x[i]);
  }
  EXPECT_NEAR(s, 1.0, 1e-13);
  const Potential E = Potential::exponential();
  const Rule re = E.aux_rule(16, 1.0, 1e-12);
  double se = 0.0;
  for (std::size_t i = 0; i < re.size(); ++i) se += re.w[i] * E(re.x[i]);
  EXPECT_NEAR(se, 2.0, 1e-10);
}
