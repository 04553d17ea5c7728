#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "contact/errors.hpp"
#include "contact/io.hpp"
#include "contact/kernels.hpp"

using namespace contact;

namespace {

const Factorization kBox = factorize(Potential::box());

KernelOperator build(KernelClass c, double eps, double z, double Q, const Potential& V, const GridSpec& g) {
  const auto [t, s] = make_grids(c, V, g);
  DiscretizeOptions o;
  o.core_radius = core_radius(c, g);
  return discretize({c, eps, z, Q, V}, t, s, o);
}

KernelOperator random_operator(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  KernelOperator K;
  const Rule r = gauss_legendre(n, -1.0, 1.0);
  K.target.axes = {r};
  K.source.axes = {r};
  K.M.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) K.M(i, j) = N(rng);
  return K;
}

}  // namespace

TEST(KernelValues, T) {
  EXPECT_DOUBLE_EQ(t_kernel(0.0, 2.0, 0.0, kBox, 0.0, 0.0), 0.25);
  EXPECT_DOUBLE_EQ(t_kernel(1.0, 2.0, 0.0, kBox, 0.0, 0.0), 0.25);
  EXPECT_EQ(t_kernel(0.5, 2.0, 0.0, kBox, 0.8, 0.1), 0.0);
  EXPECT_THROW(t_kernel(0.0, -1.0, 0.0, kBox, 0.0, 0.0), DomainError);
  EXPECT_THROW(t_kernel(0.0, 1.0, -1.0, kBox, 0.0, 0.0), DomainError);
}

TEST(KernelValues, Phi12) {
  EXPECT_DOUBLE_EQ(phi12_kernel(0.0, 2.0, 0.0, kBox, 0.0, 0.0), 0.25);
  EXPECT_NEAR(phi12_kernel(0.0, 2.0, 2.0, kBox, 0.0, 0.0), 1.0 / (2.0 * std::sqrt(8.0)), 1e-15);
  for (double e : {0.0, 0.3, 1.0})
    for (double r : {-0.4, 0.1})
      for (double rp : {0.2, 0.45}) EXPECT_DOUBLE_EQ(phi12_kernel(e, 1.5, 0.0, kBox, r, rp), phi12_kernel(e, 1.5, 0.0, kBox, rp, r));
}

TEST(KernelValues, Phi1jClosedForm) {
  // X = (1, 1, 1), |X| = √3
  EXPECT_NEAR(phi1j_kernel(0.0, 1.0, 0.0, kBox, {0.0, 1.0, 1.0}, {0.0, 0.0, 0.0}), 0.0081284811, 1e-10);
  EXPECT_EQ(phi1j_kernel(0.0, 1.0, 0.0, kBox, {0.7, 1.0, 1.0}, {0.0, 0.0, 0.0}), 0.0);
  EXPECT_THROW(phi1j_kernel(0.0, 1.0, 0.0, kBox, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}), SingularPointError);
}

TEST(KernelValues, Phi2jIsReflectedPhi1j) {
  const Factorization f = factorize(Potential::cosine_box());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (int k = 0; k < 50; ++k) {
    const std::array<double, 3> x{U(rng), U(rng), U(rng)}, xp{U(rng), U(rng), U(rng)};
    const std::array<double, 3> xr{-x[0], x[1], x[2]};
    EXPECT_DOUBLE_EQ(phi2j_kernel(0.4, 1.0, 0.3, f, x, xp), phi1j_kernel(0.4, 1.0, 0.3, f, xr, xp));
  }
}

TEST(KernelValues, PhiijComposition) {
  const double g = phiij_kernel(0.0, 1.0, 0.0, kBox, {0.0, 1.0, 1.0, 1.0}, {0.0, 0.0, 0.0, 0.0});
  EXPECT_NEAR(g, 0.0017714221, 1e-10);
  EXPECT_NEAR(g, green_quad(GreenParams{4, 1.0}, 2.0), 1e-12);
  const std::array<double, 4> x{0.1, 0.3, -0.7, 1.2}, xp{-0.2, 0.5, 0.4, -0.3};
  EXPECT_NEAR(phiij_kernel(0.2, 1.0, 3.0, kBox, x, xp), phiij_kernel(0.2, 4.0, 0.0, kBox, x, xp), 1e-14);
  const RadialGreen wrong(4, 2.0);
  EXPECT_THROW(phiij_kernel(0.2, 1.0, 0.0, kBox, x, xp, &wrong), DomainError);
}

TEST(Discretize, ZeroPotentialGivesZeroTable) {
  const KernelOperator K = build(KernelClass::T, 0.5, 2.0, 0.0, Potential::zero(), default_grid(KernelClass::T));
  // no support: the auxiliary axis is empty
  EXPECT_EQ(K.M.size(), 0);
  EXPECT_EQ(hs_norm(K), 0.0);
}

TEST(Discretize, Phi12LimitIsRankOne) {
  const KernelOperator K = build(KernelClass::Phi12, 0.0, 2.0, 0.0, Potential::cosine_box(), default_grid(KernelClass::Phi12));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(K.M);
  const auto s = svd.singularValues();
  EXPECT_LT(s(1) / s(0), 1e-12);
}

TEST(Discretize, HsNormOracles) {
  const Potential B = Potential::box();
  // ‖V‖_1 / (2 √(2z)) for the rank-one limit
  EXPECT_NEAR(hs_norm(build(KernelClass::Phi12, 0.0, 2.0, 0.0, B, default_grid(KernelClass::Phi12))), 0.25, 1e-12);
  // ½ ‖v‖ ‖G_{z/2}‖ with ‖G_1‖ = 1/2
  EXPECT_NEAR(hs_norm(build(KernelClass::T, 0.0, 2.0, 0.0, B, default_grid(KernelClass::T))), 0.25, 1e-3);
}

TEST(Discretize, MemoryBudget) {
  const auto [t, s] = make_grids(KernelClass::Phi1j, Potential::box(), default_grid(KernelClass::Phi1j));
  DiscretizeOptions o;
  o.max_entries = 1000;
  EXPECT_THROW(discretize({KernelClass::Phi1j, 0.0, 1.0, 0.0, Potential::box()}, t, s, o), MemoryBudgetError);
}

TEST(Discretize, SelfConvergenceUnderRefinement) {
  GridSpec g = default_grid(KernelClass::T);
  g.n = 128;
  double prev = hs_norm(build(KernelClass::T, 0.5, 2.0, 0.0, Potential::box(), g));
  double last_gap = 1.0;
  for (int n : {256, 512}) {
    g.n = n;
    const double cur = hs_norm(build(KernelClass::T, 0.5, 2.0, 0.0, Potential::box(), g));
    last_gap = std::abs(cur - prev);
    prev = cur;
  }
  EXPECT_LT(last_gap, 1e-4);
}

TEST(Discretize, ParallelFillIsDeterministic) {
  const auto [t, s] = make_grids(KernelClass::Phi1j, Potential::box(), default_grid(KernelClass::Phi1j));
  DiscretizeOptions o1, o3;
  o3.jobs = 3;
  const KernelSpec spec{KernelClass::Phi1j, 0.25, 1.0, 0.0, Potential::box()};
  EXPECT_EQ((discretize(spec, t, s, o1).M - discretize(spec, t, s, o3).M).cwiseAbs().maxCoeff(), 0.0);
}

TEST(OpNorm, RankOneEqualsHs) {
  const KernelOperator K = build(KernelClass::Phi12, 0.0, 2.0, 0.0, Potential::box(), default_grid(KernelClass::Phi12));
  EXPECT_NEAR(op_norm(K), hs_norm(K), 1e-9);
}

TEST(OpNorm, AdjointAndSvdOracle) {
  const KernelOperator K = random_operator(50, 9);
  const double a = op_norm(K), b = op_norm(K.adjoint()), c = svd_norm(K);
  EXPECT_NEAR(a / b, 1.0, 1e-8);
  EXPECT_NEAR(a / c, 1.0, 1e-6);
  EXPECT_LE(a, hs_norm(K));
}

TEST(SchurBounds, Values) {
  EXPECT_DOUBLE_EQ(schur_bound_F(1.0), 0.5);
  EXPECT_DOUBLE_EQ(schur_bound_B(4.0), 0.25);
  EXPECT_THROW(schur_bound_F(0.0), DomainError);
}

TEST(SchurBounds, DiscretizedFRespectsBound) {
  const GridSpec g{6.0, 48};
  const double op = op_norm(build(KernelClass::SchurF, 0.0, 1.0, 0.0, Potential::box(), g));
  EXPECT_GT(op, 0.0);
  EXPECT_LE(op, 0.5 * 1.05);
}

TEST(NormBounds, OneDimensionalClassesAllEps) {
  for (const Potential& V : {Potential::box(), Potential::exponential(), Potential::cosine_box()})
    for (double z : {1.0, 4.0})
      for (double e : {0.0, 0.1, 1.0}) {
        const double t = op_norm(build(KernelClass::T, e, z, 0.0, V, default_grid(KernelClass::T)));
        const double p = op_norm(build(KernelClass::Phi12, e, z, 0.0, V, default_grid(KernelClass::Phi12)));
        EXPECT_LE(t, 1.05 * t_norm_bound(V, z)) << V.name();
        EXPECT_LE(p, 1.05 * phi12_norm_bound(V, z)) << V.name();
      }
}

TEST(NormBounds, MonotoneInMomentum) {
  for (KernelClass c : {KernelClass::T, KernelClass::Phi12}) {
    double prev = INFINITY;
    for (double Q : {0.0, 0.5, 2.0, 8.0}) {
      const double h = hs_norm(build(c, 0.3, 2.0, Q, Potential::exponential(), default_grid(c)));
      EXPECT_LE(h, prev);
      prev = h;
    }
  }
}

TEST(NormBounds, CutoffStability) {
  const Potential E = Potential::exponential();
  for (double k : {0.5, 2.0})
    for (double e : {0.0, 0.1, 1.0})
      for (KernelClass c : {KernelClass::T, KernelClass::Phi12}) {
        const GridSpec g = default_grid(c);
        const auto [t, s] = make_grids(c, E, g);
        const KernelOperator a = discretize({c, e, 2.0, 0.0, E}, t, s);
        const KernelOperator b = discretize({c, e, 2.0, 0.0, cutoff(E, k)}, t, s);
        const double d = op_norm(difference(a, b));
        const double bound = c == KernelClass::T ? t_cutoff_bound(E, k, 2.0) : phi12_cutoff_bound(E, k, 2.0);
        EXPECT_LE(d, 1.05 * bound) << to_string(c) << " k=" << k << " eps=" << e;
      }
}

TEST(KernelIo, BinaryRoundTrip) {
  const KernelOperator K = build(KernelClass::Phi12, 0.25, 2.0, 0.5, Potential::cosine_box(), default_grid(KernelClass::Phi12));
  const auto path = (std::filesystem::temp_directory_path() / "contact_kernel_test.bin").string();
  write_kernel_binary(K, path);
  const KernelOperator R = read_kernel_binary(path);
  std::filesystem::remove(path);
  EXPECT_EQ(R.meta.cls, KernelClass::Phi12);
  EXPECT_EQ(R.meta.eps, 0.25);
  EXPECT_EQ(R.meta.Q, 0.5);
  ASSERT_EQ(R.M.rows(), K.M.rows());
  EXPECT_EQ((R.M - K.M).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(R.target.axes[0].w, K.target.axes[0].w);
}

TEST(KernelClassNames, RoundTrip) {
  for (KernelClass c : {KernelClass::T, KernelClass::Phi12, KernelClass::Phi1j, KernelClass::Phi2j, KernelClass::Phiij,
                        KernelClass::SchurF, KernelClass::SchurB})
    EXPECT_EQ(kernel_class_from_string(to_string(c)), c);
  EXPECT_THROW(kernel_class_from_string("phi99"), ConfigError);
}
