#include <gtest/gtest.h>

#include <random>

#include "qgeo/states.hpp"

using namespace qgeo;

namespace {

ComplexMatrix random_hermitian_unit_trace(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
  m = (m + m.adjoint()).eval();
  m += (1.0 - m.trace().real()) / d * ComplexMatrix::Identity(d, d);
  return m;
}

}  // namespace

TEST(DensityMatrix, RejectsNonHermitian) {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2) / 2.0;
  m(0, 1) = 0.1;
  try {
    (void)DensityMatrix::from_matrix(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotHermitian);
  }
}

TEST(DensityMatrix, RejectsWrongTraceAndNegativeSpectrum) {
  try {
    (void)DensityMatrix::from_matrix(ComplexMatrix::Identity(2, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotUnitTrace);
  }
  ComplexMatrix m(2, 2);
  m << 1.2, 0.0, 0.0, -0.2;
  try {
    (void)DensityMatrix::from_matrix(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotPSD);
  }
}

TEST(DensityMatrix, SymmetrizesWithinTolerance) {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2) / 2.0;
  m(0, 1) = 1e-12;
  const auto rho = DensityMatrix::from_matrix(m);
  EXPECT_EQ(rho.matrix(), rho.matrix().adjoint());
}

TEST(DensityMatrix, RankClasses) {
  std::mt19937_64 rng(1);
  EXPECT_EQ(rank_class(random_pure_state(3, rng)), RankClass::Pure);
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  EXPECT_EQ(rank_class(DensityMatrix::from_matrix(m)), RankClass::MixedNonFaithful);
  EXPECT_EQ(rank_class(DensityMatrix::maximally_mixed(3)), RankClass::Faithful);
  EXPECT_TRUE(is_pure(random_pure_state(4, rng)));
}

TEST(Bloch, RoundTripAndBall) {
  const BlochVector b{0.3, -0.4, 0.5};
  const auto rho = from_bloch(b);
  const auto back = to_bloch(rho);
  EXPECT_NEAR(back.x, 0.3, 1e-14);
  EXPECT_NEAR(back.y, -0.4, 1e-14);
  EXPECT_NEAR(back.z, 0.5, 1e-14);
  EXPECT_NEAR(rho.matrix()(0, 1).real(), 0.15, 1e-15);
  EXPECT_NEAR(rho.matrix()(0, 1).imag(), 0.2, 1e-15);
  try {
    (void)from_bloch({1.0, 0.5, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::OutOfBall);
  }
  try {
    (void)to_bloch(DensityMatrix::maximally_mixed(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::WrongLevel);
  }
}

TEST(Coords, QubitCoordinatesAreZXY) {
  const auto rho = from_bloch({0.1, 0.2, 0.3});
  const auto c = to_coords(rho);
  ASSERT_EQ(c.xi.size(), 3);
  EXPECT_NEAR(c.xi(0), 0.3, 1e-15);
  EXPECT_NEAR(c.xi(1), 0.1, 1e-15);
  EXPECT_NEAR(c.xi(2), 0.2, 1e-15);
}

TEST(Coords, DiagonalLayout) {
  // rho_kk = (xi_k + 1)/d for k < d, last entry (1 - sum xi)/d.
  RealVector xi = RealVector::Zero(8);
  xi(0) = 0.5;
  xi(1) = -0.25;
  const ComplexMatrix m = from_coords({3, xi});
  EXPECT_NEAR(m(0, 0).real(), 1.5 / 3, 1e-15);
  EXPECT_NEAR(m(1, 1).real(), 0.75 / 3, 1e-15);
  EXPECT_NEAR(m(2, 2).real(), 0.75 / 3, 1e-15);
}

TEST(Coords, RoundTripRandomHermitian) {
  std::mt19937_64 rng(7);
  for (int d = 2; d <= 5; ++d) {
    for (int t = 0; t < 20; ++t) {
      const ComplexMatrix m = random_hermitian_unit_trace(d, rng);
      const auto c = to_coords(m);
      EXPECT_EQ(c.xi.size(), static_cast<Eigen::Index>(d * d - 1));
      EXPECT_LE(max_abs(from_coords(c) - m), 1e-12);
      EXPECT_LE((to_coords(from_coords(c)).xi - c.xi).lpNorm<Eigen::Infinity>(), 1e-12);
    }
  }
}

TEST(Coords, WrongLength) {
  try {
    (void)from_coords({3, RealVector::Zero(3)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::WrongLength);
  }
}

TEST(Coords, PairingIsDerivativeOfTrace) {
  // Tr(G rho(xi)) is affine in xi; its slope along each coordinate is the pairing.
  std::mt19937_64 rng(11);
  for (int d = 2; d <= 4; ++d) {
    const ComplexMatrix g = random_hermitian_unit_trace(d, rng);
    const auto pairing = coordinate_pairing(g);
    const RealVector base = to_coords(DensityMatrix::maximally_mixed(d)).xi;
    for (Eigen::Index k = 0; k < base.size(); ++k) {
      RealVector up = base;
      up(k) += 1.0;
      const double slope = trace_product(g, from_coords({d, up})) - trace_product(g, from_coords({d, base}));
      EXPECT_NEAR(slope, pairing(k), 1e-12) << "d=" << d << " k=" << k;
    }
  }
}

TEST(Dual, RoundTrip) {
  std::mt19937_64 rng(3);
  for (int d = 2; d <= 4; ++d) {
    const auto rho = random_faithful_state(d, rng);
    const auto back = from_dual(to_dual(rho));
    EXPECT_LE(max_abs(back.matrix() - rho.matrix()), 1e-10);
    const auto back_neg = from_dual(to_dual(rho, DualSign::Negative), DualSign::Negative);
    EXPECT_LE(max_abs(back_neg.matrix() - rho.matrix()), 1e-10);
  }
}

TEST(Dual, NeedsFaithful) {
  std::mt19937_64 rng(3);
  try {
    (void)to_dual(random_pure_state(2, rng));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotFaithful);
  }
}

TEST(Mixtures, ShrinkAndEnsureFaithful) {
  std::mt19937_64 rng(5);
  const auto p = random_pure_state(3, rng);
  const auto f = ensure_faithful(p);
  EXPECT_GE(f.min_eigenvalue(), kFaithfulMix / 3.0 * 0.99);
  const auto s = shrink_toward_mixed(p, 0.5);
  EXPECT_NEAR(s.eigenvalues().maxCoeff(), 0.5 + 0.5 / 3.0, 1e-12);
  const std::vector<DensityMatrix> states{p, DensityMatrix::maximally_mixed(3)};
  const std::vector<double> w{0.25, 0.75};
  EXPECT_LE(max_abs(mixture(states, w).matrix() - (0.25 * p.matrix() + 0.25 * ComplexMatrix::Identity(3, 3))),
            1e-15);
}

TEST(Sampling, RandomStatesAreValid) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 50; ++i) {
    const auto f = random_faithful_state(3, rng);
    EXPECT_GT(f.min_eigenvalue(), 0.02 / 3.0 - 1e-12);
    EXPECT_NEAR(random_bloch(rng, 0.7).r(), 0.7, 1e-14);
  }
}
