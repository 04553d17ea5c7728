#include <cmath>

#include <gtest/gtest.h>

#include "contact/errors.hpp"
#include "contact/pair.hpp"

using namespace contact;

TEST(Mesh, UniformAndGraded) {
  const Mesh1D m = Mesh1D::uniform(10.0, 2047);
  EXPECT_EQ(m.interior(), 2047);
  EXPECT_DOUBLE_EQ(m.L(), 10.0);
  EXPECT_TRUE(m.symmetric());
  EXPECT_NEAR(m.max_spacing(), 20.0 / 2048, 1e-14);
  const Mesh1D g = Mesh1D::graded(8.0, 0.01, 0.2, 0.5);
  EXPECT_TRUE(g.symmetric());
  EXPECT_LE(g.max_spacing(), 0.2 * 1.5);
  EXPECT_THROW(Mesh1D::uniform(0.0, 10), DomainError);
}

TEST(PairHamiltonian, FreeLaplacianSpectrum) {
  // -2 d²/dr² with the 3-point stencil: λ_k = (8/h²) sin²(kπ/(2(n+1)))
  const int n = 255;
  const Mesh1D m = Mesh1D::uniform(4.0, n);
  const PairHamiltonian h = build_pair_hamiltonian(Potential::box(), 0.0, 0.5, m);
  const double dx = 8.0 / (n + 1);
  const auto ev = lowest_eigenvalues(h.H, 3);
  for (int k = 1; k <= 3; ++k) {
    const double s = std::sin(k * M_PI / (2.0 * (n + 1)));
    EXPECT_NEAR(ev[k - 1], 8.0 / (dx * dx) * s * s, 1e-9);
  }
  EXPECT_EQ(h.potential.sum() * h.g, 0.0);
}

TEST(PairHamiltonian, PotentialMassIsL1) {
  const Mesh1D m = Mesh1D::uniform(6.0, 1023);
  for (double e : {1.0, 0.25, 0.02}) {
    const PairHamiltonian h = build_pair_hamiltonian(Potential::box(), 1.5, e, m);
    EXPECT_NEAR(h.g * h.potential.sum(), 1.5, 1e-12);
    const PairHamiltonian c = build_pair_hamiltonian(Potential::cosine_box(), 1.0, e, m);
    EXPECT_NEAR(c.potential.sum(), 0.0, 1e-12);
  }
}

TEST(PairHamiltonian, BoundStateForAttractiveBox) {
  const PairHamiltonian h = build_pair_hamiltonian(Potential::box(), 2.0, 1.0, Mesh1D::uniform(10.0, 1023));
  EXPECT_LT(ground_energy(even_sector(h)), 0.0);
  EXPECT_FALSE(h.under_resolved);
  const PairHamiltonian fine = build_pair_hamiltonian(Potential::box(), 2.0, 1e-3, Mesh1D::uniform(10.0, 255));
  EXPECT_TRUE(fine.under_resolved);
}

TEST(PairHamiltonian, EvenSectorSpectrumIsSubset) {
  for (int n : {63, 64}) {
    const PairHamiltonian h = build_pair_hamiltonian(Potential::exponential(), 1.0, 0.5, Mesh1D::uniform(5.0, n));
    const Eigen::VectorXd full = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h.H.dense()).eigenvalues();
    for (double e : lowest_eigenvalues(even_sector(h), 4)) {
      double best = INFINITY;
      for (Eigen::Index i = 0; i < full.size(); ++i) best = std::min(best, std::abs(full(i) - e));
      EXPECT_LT(best, 1e-9) << "n=" << n;
    }
  }
}

TEST(PairHamiltonian, RepulsiveHasNoBoundState) {
  const PairHamiltonian h = build_pair_hamiltonian(Potential::box(), -1.0, 0.01, Mesh1D::uniform(10.0, 2047));
  EXPECT_GT(ground_energy(even_sector(h)), 0.0);
}

TEST(PairHamiltonian, CouplingReproducesDense) {
  const PairHamiltonian h = build_pair_hamiltonian(Potential::cosine_box(), 0.8, 0.5, Mesh1D::uniform(4.0, 63));
  const Eigen::MatrixXd H = coupled_hamiltonian(h.free_part(), h.coupling());
  EXPECT_LT((H - h.dense().H).cwiseAbs().maxCoeff(), 1e-12);
  // Krein through the grid coupling agrees with the direct solve
  const ResolventReport k = krein_resolvent(h.free_part(), h.coupling(), 2.0);
  EXPECT_LT(relative_frobenius(k.R, direct_resolvent(H, 2.0).R), 1e-10);
}

TEST(DeltaHamiltonian, GroundEnergy) {
  const PairHamiltonian h = build_delta_hamiltonian(2.0, Mesh1D::uniform(10.0, 2047));
  EXPECT_NEAR(ground_energy(even_sector(h)), -0.5, 5e-4);
}

TEST(GridDistance, DecreasesWithEps) {
  const Mesh1D m = Mesh1D::uniform(10.0, 2047);
  double prev = INFINITY;
  for (double e : {0.25, 0.125, 0.0625}) {
    const double d = grid_resolvent_distance(build_pair_hamiltonian(Potential::box(), 1.0, e, m), 1.0, 4.0,
                                             GridLimit::DiscreteDelta);
    EXPECT_LT(d, prev);
    prev = d;
  }
}
