#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qgeo/metrics.hpp"

using namespace qgeo;

TEST(Divergence, MatchesExternalOracle) {
  const auto s = DensityMatrix::from_matrix(oracle::sigma_fixed());
  const auto r = DensityMatrix::from_matrix(oracle::rho_fixed());
  EXPECT_NEAR(divergence(s, r), oracle::kDivergenceFixed, 1e-12);
  EXPECT_NEAR(entropy(s), oracle::kEntropySigmaFixed, 1e-12);
}

TEST(Divergence, NonNegativeAndZeroOnDiagonal) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const int d = 2 + i % 3;
    const auto a = random_faithful_state(d, rng);
    const auto b = random_faithful_state(d, rng);
    EXPECT_GE(divergence(a, b), -1e-14);
    EXPECT_NEAR(divergence(a, a), 0.0, 1e-12);
  }
}

TEST(Divergence, PureFirstArgumentIsFinite) {
  std::mt19937_64 rng(2);
  const auto p = random_pure_state(3, rng);
  // D(p || I/d) = log d for any pure p.
  EXPECT_NEAR(divergence(p, DensityMatrix::maximally_mixed(3)), std::log(3.0), 1e-12);
}

TEST(Divergence, SecondArgumentMustBeFaithful) {
  std::mt19937_64 rng(2);
  try {
    (void)divergence(DensityMatrix::maximally_mixed(2), random_pure_state(2, rng));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SecondArgNotFaithful);
  }
}

TEST(Divergence, UnitaryInvariance) {
  std::mt19937_64 rng(4);
  const auto a = random_faithful_state(3, rng);
  const auto b = random_faithful_state(3, rng);
  const auto basis = eig_hermitian(random_faithful_state(3, rng).matrix()).vectors;
  const auto ua = DensityMatrix::from_matrix(basis * a.matrix() * basis.adjoint());
  const auto ub = DensityMatrix::from_matrix(basis * b.matrix() * basis.adjoint());
  EXPECT_NEAR(divergence(a, b), divergence(ua, ub), 1e-12);
}

TEST(QubitClosedForm, AgreesWithMatrixDivergence) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const auto a = random_bloch(rng, std::cbrt(u(rng)));
    const auto b = random_bloch(rng, 0.999 * std::cbrt(u(rng)));
    EXPECT_NEAR(divergence_qubit_closed(a, b), divergence(from_bloch(a), from_bloch(b)), 1e-9);
  }
}

TEST(QubitClosedForm, PureFirstArgumentAndCentre) {
  const BlochVector pure{0.0, 0.0, 1.0};
  const BlochVector mixed{0.0, 0.0, 0.5};
  // -S(pure) = 0; D = -(1/2) log((1 - 1/4)/4) - atanh(1/2) / (1/2) * 0.5
  const double expected = -0.5 * std::log(0.75 / 4.0) - std::atanh(0.5);
  EXPECT_NEAR(divergence_qubit_closed(pure, mixed), expected, 1e-14);
  EXPECT_NEAR(divergence_qubit_closed(pure, {0, 0, 0}), std::numbers::ln2, 1e-14);
  try {
    (void)divergence_qubit_closed(mixed, pure);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SiteIsPure);
  }
}

TEST(Bures, MatchesExternalOracle) {
  const auto s = DensityMatrix::from_matrix(oracle::sigma_fixed());
  const auto r = DensityMatrix::from_matrix(oracle::rho_fixed());
  EXPECT_NEAR(bures(s, r), oracle::kBuresFixed, 1e-12);
  EXPECT_NEAR(bures(r, s), oracle::kBuresFixed, 1e-12);
}

TEST(Bures, PureStatesUseOverlapModulus) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 20; ++i) {
    const auto u = random_state_vector(3, rng);
    const auto v = random_state_vector(3, rng);
    const double overlap = std::abs(u.dot(v));
    EXPECT_NEAR(bures(DensityMatrix::from_pure(u), DensityMatrix::from_pure(v)), std::sqrt(1.0 - overlap), 1e-7);
  }
}

TEST(FubiniStudy, OrthogonalAndNonPure) {
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(2);
  Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(2);
  e0(0) = 1.0;
  e1(1) = 1.0;
  EXPECT_NEAR(fubini_study(DensityMatrix::from_pure(e0), DensityMatrix::from_pure(e1)), std::numbers::pi / 2,
              1e-12);
  EXPECT_NEAR(fubini_study(DensityMatrix::from_pure(e0), DensityMatrix::from_pure(e0)), 0.0, 1e-7);
  try {
    (void)fubini_study(DensityMatrix::maximally_mixed(2), DensityMatrix::from_pure(e0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotPure);
  }
}

TEST(Geodesic, AntipodalIsPi) {
  EXPECT_NEAR(geodesic_sphere({0, 0, 1}, {0, 0, -1}), std::numbers::pi, 1e-12);
  try {
    (void)geodesic_sphere({0, 0, 0.5}, {0, 0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotOnSphere);
  }
}

TEST(Euclidean, DimensionMismatch) {
  try {
    (void)euclidean_param({2, RealVector::Zero(3)}, {3, RealVector::Zero(8)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DimMismatch);
  }
}

TEST(Bregman, PhiReproducesDivergence) {
  std::mt19937_64 rng(7);
  for (int d : {2, 3}) {
    for (int i = 0; i < 50; ++i) {
      const auto a = random_faithful_state(d, rng);
      const auto b = random_faithful_state(d, rng);
      EXPECT_NEAR(bregman_phi(to_coords(a), to_coords(b)), divergence(a, b), 1e-9);
    }
  }
}

TEST(Bregman, DualIdentityHoldsForPositiveSign) {
  std::mt19937_64 rng(8);
  for (int d : {2, 3}) {
    for (int i = 0; i < 50; ++i) {
      const auto a = random_faithful_state(d, rng);
      const auto b = random_faithful_state(d, rng);
      EXPECT_NEAR(dual_divergence(to_dual(b), to_dual(a)), divergence(a, b), 1e-9);
    }
  }
}

TEST(Bregman, NegativeSignBreaksDualIdentity) {
  std::mt19937_64 rng(9);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto a = random_faithful_state(3, rng);
    const auto b = random_faithful_state(3, rng);
    const double neg = dual_divergence(to_dual(b, DualSign::Negative), to_dual(a, DualSign::Negative));
    worst = std::max(worst, std::abs(neg - divergence(a, b)));
  }
  EXPECT_GT(worst, 1e-3);
}

TEST(Bregman, GradPsiInvertsGradPhi) {
  std::mt19937_64 rng(10);
  const auto a = random_faithful_state(3, rng);
  EXPECT_LE((grad_psi(grad_phi(to_coords(a))).xi - to_coords(a).xi).lpNorm<Eigen::Infinity>(), 1e-10);
}

TEST(Bregman, GradPhiMatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  for (int d : {2, 3}) {
    for (int i = 0; i < 10; ++i) {
      const auto c = to_coords(random_faithful_state(d, rng, 0.2));
      const RealVector g = grad_phi(c).xihat;
      for (Eigen::Index k = 0; k < c.xi.size(); ++k) {
        const double h = 1e-5;
        GeneralizedCoords up = c;
        GeneralizedCoords dn = c;
        up.xi(k) += h;
        dn.xi(k) -= h;
        const double fd = (phi_potential(up) - phi_potential(dn)) / (2 * h);
        EXPECT_LE(std::abs(fd - g(k)), 1e-5 * std::max(1.0, std::abs(g(k))));
      }
    }
  }
}

TEST(LogDerivative, MatchesFiniteDifferenceOfLog) {
  std::mt19937_64 rng(12);
  const auto a = random_faithful_state(3, rng, 0.3);
  const ComplexMatrix h = random_faithful_state(3, rng).matrix() - a.matrix();
  const LogDerivative dlog(a.spectrum());
  const double t = 1e-6;
  const ComplexMatrix fd = (matrix_log(a.matrix() + t * h) - matrix_log(a.matrix() - t * h)) / (2 * t);
  EXPECT_LE(max_abs(fd - dlog(h)), 1e-7);
}

TEST(LogDerivative, DegenerateSpectrum) {
  const auto mixed = DensityMatrix::maximally_mixed(3);
  const ComplexMatrix h = ComplexMatrix::Identity(3, 3);
  EXPECT_LE(max_abs(LogDerivative(mixed.spectrum())(h) - 3.0 * h), 1e-12);
}

TEST(Distance, BisectorGapIsAntisymmetric) {
  std::mt19937_64 rng(13);
  const auto s1 = random_faithful_state(2, rng);
  const auto s2 = random_faithful_state(2, rng);
  const auto x = random_faithful_state(2, rng);
  for (auto k : {MetricKind::Divergence, MetricKind::DivergenceReversed, MetricKind::DivergenceDual,
                 MetricKind::Bures, MetricKind::EuclideanParam}) {
    EXPECT_NEAR(bisector_gap(k, s1, s2, x), -bisector_gap(k, s2, s1, x), 1e-12) << to_string(k);
  }
}

TEST(Distance, DualKindEqualsPrimalDivergence) {
  std::mt19937_64 rng(14);
  const auto site = random_faithful_state(3, rng);
  const auto x = random_faithful_state(3, rng);
  EXPECT_NEAR(distance(MetricKind::DivergenceDual, site, x), divergence(site, x), 1e-9);
}
