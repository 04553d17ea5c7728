#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "contact/errors.hpp"
#include "contact/experiments.hpp"
#include "contact/io.hpp"

using namespace contact;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(FitRate, ExactPowerLaw) {
  const auto eps = dyadic_eps(1, 10);
  std::vector<double> err;
  for (double e : eps) err.push_back(std::pow(e, 0.7));
  const RateFitReport r = fit_rate(eps, err, 0.7);
  EXPECT_NEAR(r.slope, 0.7, 1e-12);
  EXPECT_NEAR(r.r2, 1.0, 1e-12);
  EXPECT_NEAR(r.intercept, 0.0, 1e-10);
  EXPECT_EQ(r.tail, 5u);
  EXPECT_TRUE(r.converging);
  EXPECT_EQ(r.s_theory, 0.7);
}

TEST(FitRate, TailSelectsAsymptoticRate) {
  const auto eps = dyadic_eps(1, 20);
  std::vector<double> err;
  for (double e : eps) err.push_back(3 * e + 100 * e * e);
  EXPECT_NEAR(fit_rate(eps, err).slope, 1.0, 0.01);
}

TEST(FitRate, ConstantErrorsFlagged) {
  const auto eps = dyadic_eps(1, 8);
  const RateFitReport r = fit_rate(eps, std::vector<double>(eps.size(), 0.3));
  EXPECT_NEAR(r.slope, 0.0, 1e-12);
  EXPECT_FALSE(r.converging);
}

TEST(FitRate, Errors) {
  EXPECT_THROW(fit_rate({0.5, 0.25, 0.125}, {1, 0.5, 0.25}), DomainError);
  EXPECT_THROW(fit_rate({0.5, 0.25, 0.125, 0.0625}, {1, 0.5, -0.25, 0.1}), DomainError);
  EXPECT_THROW(fit_rate({0.5, 0.25, 0.125, 0.0625}, {1, 0.5, 1e-14, 1e-15}), DegenerateFitError);
}

TEST(Plan, Validation) {
  EXPECT_EQ(dyadic_eps(3, 5), (std::vector<double>{0.125, 0.0625, 0.03125}));
  SweepPlan p;
  EXPECT_NO_THROW(p.validate());
  p.eps = {0.1, 0.2};
  EXPECT_THROW(p.validate(), DomainError);
  p.eps = {0.2, 0.1};
  p.z = {0.0};
  EXPECT_THROW(p.validate(), DomainError);
}

TEST(TheoryRate, MomentsAndSchedule) {
  EXPECT_NEAR(theory_rate(Potential::box(), {}, 1.0), 1.0, 1e-12);
  EXPECT_NEAR(theory_rate(Potential::heavy_tail(2.2), {}, 1.0), 0.55, 1e-12);
  EXPECT_NEAR(theory_rate(Potential::box(), {1.0, 1.0, 0.5}, 0.95), 0.5, 1e-12);
}

TEST(KernelSweep, Phi12BoxRate) {
  SweepPlan p;
  p.V = Potential::box();
  const SweepResult r = kernel_convergence_sweep(p, KernelClass::Phi12);
  ASSERT_EQ(r.fits.size(), 1u);
  EXPECT_GE(r.fits[0].slope, 0.85);
  EXPECT_LE(r.fits[0].slope, 1.15);
  EXPECT_EQ(r.rows.size(), 10u);
  for (const auto& row : r.rows) {
    EXPECT_GT(row.error_hs, 0.0);
    EXPECT_FALSE(row.rejected);
  }
  // tail-monotone after dropping the two largest ε
  for (std::size_t i = 3; i < r.rows.size(); ++i) EXPECT_LT(r.rows[i].error_hs, r.rows[i - 1].error_hs);
}

TEST(KernelSweep, TBoxRate) {
  SweepPlan p;
  const SweepResult r = kernel_convergence_sweep(p, KernelClass::T);
  EXPECT_GE(r.fits[0].slope, 0.85);
}

TEST(KernelSweep, Phi12HeavyTail) {
  SweepPlan p;
  p.V = Potential::heavy_tail(2.2);
  const SweepResult r = kernel_convergence_sweep(p, KernelClass::Phi12);
  EXPECT_NEAR(r.fits[0].s_theory, 0.55, 1e-12);
  EXPECT_GE(r.fits[0].slope, 0.5);
}

TEST(KernelSweep, SchurClassesRejected) {
  SweepPlan p;
  EXPECT_THROW(kernel_convergence_sweep(p, KernelClass::SchurF), DomainError);
}

TEST(ResolventSweep, RatesAndPole) {
  SweepPlan p;
  p.eps = dyadic_eps(3, 9);
  p.z = {4.0};
  const SweepResult r = resolvent_convergence_sweep_n2(p);
  EXPECT_GE(r.fits[0].slope, 0.8);
  p.schedule = {1.0, 1.0, 0.5};
  const SweepResult s = resolvent_convergence_sweep_n2(p);
  EXPECT_GE(s.fits[0].slope, 0.4);
  EXPECT_LE(s.fits[0].slope, 0.65);
  p.schedule = {1.0, 0.0, 0.0};
  p.z = {0.125};
  EXPECT_THROW(resolvent_convergence_sweep_n2(p), PoleError);
}

TEST(ResolventSweep, DeterministicAcrossJobCounts) {
  SweepPlan p;
  p.eps = dyadic_eps(3, 7);
  p.z = {4.0};
  const auto dir = std::filesystem::temp_directory_path();
  const std::string a = (dir / "contact_sweep_a.csv").string(), b = (dir / "contact_sweep_b.csv").string();
  write_sweep_csv(resolvent_convergence_sweep_n2(p).rows, a);
  p.jobs = 3;
  write_sweep_csv(resolvent_convergence_sweep_n2(p).rows, b);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(slurp(a).substr(0, 63), "target,eps,z,error_hs,error_op,grid_n,grid_L,disc_err_est\nresol");
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST(EigenSweep, AlphaTwoAndRepulsive) {
  const Mesh1D m = Mesh1D::uniform(10.0, 2047);
  const EigenReport r = eigenvalue_convergence_n2(Potential::box(), {2.0, 0.0, 0.0}, dyadic_eps(2, 6), m);
  EXPECT_NEAR(r.reference, -0.5, 1e-12);
  EXPECT_TRUE(r.decreasing);
  EXPECT_LT(r.error.back(), 5e-3);
  const EigenReport rep = eigenvalue_convergence_n2(Potential::box(), {-1.0, 0.0, 0.0}, {0.1, 0.01}, m);
  for (double e : rep.energy) EXPECT_GE(e, 0.0);
}

TEST(FormSweep, SlopesOnSubset) {
  auto fam = form_test_family();
  fam.resize(3);
  const auto out = form_convergence_sweep(fam, Potential::box(), {1.0, 0.0, 0.0}, dyadic_eps(2, 7), 2);
  ASSERT_EQ(out.size(), 3u);
  for (const auto& fc : out) {
    EXPECT_EQ(fc.fit.s_theory, 0.5);
    EXPECT_GE(fc.fit.slope, 0.45) << fc.id;
  }
}

TEST(FormatDouble, RoundTripAndNaN) {
  EXPECT_EQ(format_double(kNaN), "");
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 12345.678}) EXPECT_EQ(std::stod(format_double(x)), x);
}
