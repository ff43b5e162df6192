#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "qgeo/capacity.hpp"
#include "qgeo/io.hpp"
#include "qgeo/manifest.hpp"

using namespace qgeo;

TEST(Json, MatrixRoundTripIsExact) {
  std::mt19937_64 rng(1);
  const auto rho = random_faithful_state(3, rng);
  const auto j = io::matrix_to_json(rho.matrix());
  const auto back = io::matrix_from_json(io::Json::parse(j.dump()));
  EXPECT_EQ(back, rho.matrix());
}

TEST(Json, MissingImaginaryPartMeansReal) {
  const auto j = io::Json::parse(R"({"dim": 2, "re": [[0.5, 0], [0, 0.5]]})");
  EXPECT_EQ(io::state_from_json(j).matrix(), DensityMatrix::maximally_mixed(2).matrix());
}

TEST(Json, ParseErrors) {
  for (const char* text : {R"({"re": [[1]]})", R"({"dim": 2, "re": [[1, 0]]})",
                           R"({"dim": 2, "re": [[1, 0], [0]]})", R"({"dim": 2, "re": "x"})"}) {
    try {
      (void)io::matrix_from_json(io::Json::parse(text));
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::Parse) << text;
    }
  }
}

TEST(Json, PointSetRoundTrip) {
  const auto set = dist_points({2, 0.5, FeasibilityRule::Quadratic});
  const auto back = io::pointset_from_json(io::Json::parse(io::pointset_to_json(set).dump()));
  ASSERT_EQ(back.points.size(), set.points.size());
  ASSERT_TRUE(back.mesh.has_value());
  EXPECT_EQ(back.mesh->rule, FeasibilityRule::Quadratic);
  EXPECT_EQ(back.mesh->delta, 0.5);
  for (std::size_t i = 0; i < set.points.size(); ++i) EXPECT_EQ(back.points[i].matrix(), set.points[i].matrix());
}

TEST(Json, ChannelRoundTripAndCompletion) {
  const auto g = gamma5();
  const auto back = io::channel_from_json(io::channel_to_json(g));
  ASSERT_EQ(back.kraus().size(), g.kraus().size());
  for (std::size_t k = 0; k < g.kraus().size(); ++k) EXPECT_EQ(back.kraus()[k], g.kraus()[k]);

  io::Json partial = io::channel_to_json(g);
  partial["kraus"].erase(2);
  partial["complete_last"] = true;
  const auto completed = io::channel_from_json(partial);
  ASSERT_EQ(completed.kraus().size(), 3U);
  EXPECT_LE(max_abs(completed.kraus()[2] - g.kraus()[2]), 1e-12);
}

TEST(Json, BallAndCapacityRoundTrip) {
  const auto r = holevo_capacity(identity_channel(2), {2, 0.5, FeasibilityRule::Linear});
  const auto j = io::capacity_to_json(r);
  EXPECT_FALSE(j.dump().find("wall") != std::string::npos);
  const auto back = io::capacity_from_json(io::Json::parse(j.dump()));
  EXPECT_EQ(back.capacity_nats, r.capacity_nats);
  EXPECT_EQ(back.center.matrix(), r.center.matrix());
  ASSERT_EQ(back.support.size(), r.support.size());
  for (std::size_t i = 0; i < r.support.size(); ++i) {
    EXPECT_EQ(back.support[i].weight, r.support[i].weight);
    EXPECT_EQ(back.support[i].mesh_index, r.support[i].mesh_index);
  }

  const DivergenceBall ball{r.center, r.capacity_nats, {0, 3}};
  const auto b2 = io::ball_from_json(io::ball_to_json(ball));
  EXPECT_EQ(b2.radius, ball.radius);
  EXPECT_EQ(b2.support, ball.support);
}

TEST(Csv, WitnessHeaderAndRows) {
  CoincidenceReport rep;
  rep.metrics = {{BisectorKind::Euclid, 1.0}, {BisectorKind::Bures, 1.0}};
  rep.witnesses.push_back({0, 1, 2, 1, -0.5, 0.25});
  std::ostringstream os;
  io::write_witness_csv(os, rep);
  const auto text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "site_a,site_b,sample,metric_ref,metric_other,gap_ref,gap_other");
  EXPECT_NE(text.find("0,1,2,euclid,bures,-0.5,0.25"), std::string::npos);
}

TEST(Csv, FieldColumns) {
  const std::vector<DensityMatrix> sites{from_bloch({0, 0, 1}), from_bloch({0, 0, -1})};
  const auto grid = bisector_field_sample({{BisectorKind::Euclid, 1.0}}, sites, 5);
  std::ostringstream os;
  io::write_field_csv(os, grid);
  const auto text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "x1,xd,xd1,gap_euclid");
  std::ostringstream svg;
  io::write_field_svg(svg, grid);
  EXPECT_NE(svg.str().find("<svg"), std::string::npos);
}

TEST(Manifest, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Manifest, RoundTrip) {
  RunManifest m;
  m.command_line = {"qgeo", "capacity", "--delta", "0.4"};
  m.seed = 42;
  m.wall_seconds = 1.5;
  m.host = "box";
  m.add_input("channel", "{}");
  const auto back = manifest_from_json(io::Json::parse(manifest_to_json(m).dump()));
  EXPECT_EQ(back.command_line, m.command_line);
  EXPECT_EQ(back.seed, 42U);
  EXPECT_EQ(back.tool_version, kToolVersion);
  EXPECT_EQ(back.input_digests, m.input_digests);
  EXPECT_EQ(back.host, "box");
}
