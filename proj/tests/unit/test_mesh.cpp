#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "qgeo/mesh.hpp"

using namespace qgeo;

namespace {

// Signed tuples with sum n^2 <= m^2, in any order.
long signed_ball_count(int d, int m) {
  const int k = 2 * (d - 1);
  long total = 1;
  for (int i = 0; i < k; ++i) total *= (2 * m + 1);
  long count = 0;
  for (long code = 0; code < total; ++code) {
    long rem = code;
    long sq = 0;
    for (int i = 0; i < k; ++i) {
      const long n = rem % (2 * m + 1) - m;
      rem /= (2 * m + 1);
      sq += n * n;
    }
    if (sq <= static_cast<long>(m) * m) ++count;
  }
  return count;
}

}  // namespace

TEST(LinearMesh, MatchesEnumerationOracle) {
  for (auto [d, delta] : {std::pair{2, 1.0}, std::pair{2, 0.5}, std::pair{3, 0.5}}) {
    const MeshSpec spec{d, delta, FeasibilityRule::Linear};
    const auto set = dist_points(spec);
    const int m = static_cast<int>(std::lround(1.0 / delta));
    const auto oracle_vectors = oracle::linear_cube_vectors(d, m, delta);
    ASSERT_EQ(set.points.size(), oracle_vectors.size()) << d << " " << delta;
    for (std::size_t i = 0; i < set.points.size(); ++i) {
      const auto expected = DensityMatrix::from_pure(oracle_vectors[i]);
      EXPECT_EQ(set.points[i].matrix(), expected.matrix()) << i;
    }
  }
}

TEST(LinearMesh, KnownCounts) {
  EXPECT_EQ(dist_points({2, 1.0, FeasibilityRule::Linear}).points.size(), 4U);
  EXPECT_EQ(dist_points({3, 0.5, FeasibilityRule::Linear}).points.size(), 81U);
  EXPECT_EQ(mesh_counters({3, 0.1, FeasibilityRule::Linear}).size(), 14641U);
}

TEST(LinearMesh, NextStateCarries) {
  const auto next = next_state({1, 0}, 0, 1.0);
  ASSERT_TRUE(next.has_value());
  EXPECT_EQ(*next, (Counters{0, 1}));
  EXPECT_FALSE(next_state({1, 1}, 0, 1.0).has_value());
}

TEST(QuadraticMesh, CountsMatchIntegerEnumeration) {
  for (const auto& q : oracle::kQuadraticCounts) {
    const MeshSpec spec{q.dim, q.delta, FeasibilityRule::Quadratic};
    EXPECT_EQ(static_cast<long>(mesh_counters(spec).size()), q.count) << q.dim << " " << q.delta;
  }
  // the frozen counts themselves come from the signed enumeration
  EXPECT_EQ(signed_ball_count(3, 2), 89);
  EXPECT_EQ(signed_ball_count(2, 4), 49);
}

TEST(QuadraticMesh, VectorsAreUnitNorm) {
  const MeshSpec spec{3, 0.5, FeasibilityRule::Quadratic};
  for (const auto& phi : mesh_counters(spec)) {
    EXPECT_NEAR(state_vector(spec, phi).norm(), 1.0, 1e-12);
  }
}

TEST(Mesh, AllPointsPure) {
  for (auto rule : {FeasibilityRule::Linear, FeasibilityRule::Quadratic}) {
    const auto set = dist_points({3, 0.25, rule});
    for (const auto& p : set.points) {
      EXPECT_NEAR(p.eigenvalues().maxCoeff(), 1.0, 1e-10);
      EXPECT_NEAR(p.matrix().trace().real(), 1.0, 1e-12);
    }
  }
}

TEST(Mesh, Deterministic) {
  const MeshSpec spec{3, 0.5, FeasibilityRule::Quadratic};
  const auto a = dist_points(spec);
  const auto b = dist_points(spec);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i].matrix(), b.points[i].matrix());
}

TEST(Mesh, InvalidDelta) {
  for (double delta : {0.0, -0.1, 1.5}) {
    try {
      (void)dist_points({2, delta, FeasibilityRule::Linear});
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::InvalidArgument);
    }
  }
  EXPECT_THROW((void)parse_rule("cubic"), Error);
}
