#include <gtest/gtest.h>

#include <cmath>

#include "wsntrack/network.hpp"

using namespace wsntrack;

namespace {

DeploymentParams grid_params(int n) {
  DeploymentParams p;
  p.bounds = {10, 10};
  p.node_count = n;
  p.layout = Layout::Grid;
  return p;
}

Deployment line_of(std::vector<Point2> pts, double tx_range, double sensing = 10.0) {
  Deployment d;
  d.bounds = {100, 100};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    SensorNode n;
    n.id = static_cast<int>(i);
    n.position = pts[i];
    n.tx_range = tx_range;
    n.sensing_range = sensing;
    d.nodes.push_back(n);
  }
  d.rebuild_adjacency();
  return d;
}

}  // namespace

TEST(Deploy, SingleGridNodeAtCenter) {
  Rng rng(1);
  const auto d = deploy(grid_params(1), rng);
  ASSERT_EQ(d.nodes.size(), 1u);
  EXPECT_EQ(d.nodes[0].position, (Point2{5, 5}));
}

TEST(Deploy, FourGridNodesAtCellCenters) {
  Rng rng(1);
  const auto d = deploy(grid_params(4), rng);
  const std::vector<Point2> expect{{2.5, 2.5}, {7.5, 2.5}, {2.5, 7.5}, {7.5, 7.5}};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(d.nodes[i].position, expect[i]);
}

TEST(Deploy, UniformIsDeterministicAndInBounds) {
  DeploymentParams p;
  p.node_count = 300;
  Rng a(17, stream::kDeploy), b(17, stream::kDeploy);
  const auto da = deploy(p, a);
  const auto db = deploy(p, b);
  for (std::size_t i = 0; i < da.nodes.size(); ++i) {
    EXPECT_EQ(da.nodes[i].position, db.nodes[i].position);
    EXPECT_TRUE(p.bounds.contains(da.nodes[i].position));
    EXPECT_DOUBLE_EQ(da.nodes[i].interested_range, 7.0);
  }
}

TEST(Deploy, RejectsBadParams) {
  Rng rng(1);
  auto p = grid_params(0);
  EXPECT_THROW(deploy(p, rng), Error);
  p = grid_params(4);
  p.interested_fraction = 1.5;
  EXPECT_THROW(deploy(p, rng), Error);
}

TEST(MeasureRange, InsideOutsideAndDead) {
  auto d = line_of({{0, 0}}, 25.0);
  Rng rng(1);
  EnergyModel e;
  EnergyMeter m;
  auto o = measure_range(d.nodes[0], {3, 4}, 0.0, rng, e, m);
  ASSERT_TRUE(o);
  EXPECT_DOUBLE_EQ(o->range, 5.0);
  EXPECT_DOUBLE_EQ(m.total, e.e_sense);
  EXPECT_FALSE(measure_range(d.nodes[0], {30, 0}, 0.0, rng, e, m));
  EXPECT_DOUBLE_EQ(m.total, e.e_sense);
  EXPECT_TRUE(measure_range(d.nodes[0], {10, 0}, 0.0, rng, e, m));  // boundary counts
  kill(d.nodes[0]);
  try {
    measure_range(d.nodes[0], {3, 4}, 0.0, rng, e, m);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::NodeDead);
  }
}

TEST(MeasureRange, NoiseIsUnbiased) {
  auto d = line_of({{0, 0}}, 25.0);
  d.nodes[0].battery = 1e9;
  Rng rng(2024);
  EnergyModel e;
  EnergyMeter m;
  double sum = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) sum += measure_range(d.nodes[0], {3, 4}, 0.1, rng, e, m)->range;
  EXPECT_NEAR(sum / n, 5.0, 0.01);
}

TEST(Signal, InverseSquareNormalized) {
  auto d = line_of({{0, 0}}, 25.0);
  EXPECT_DOUBLE_EQ(signal_strength(d.nodes[0], {10, 0}), 1.0);
  EXPECT_DOUBLE_EQ(signal_strength(d.nodes[0], {5, 0}), 4.0);
  EXPECT_THROW(signal_strength(d.nodes[0], {11, 0}), Error);
  EXPECT_DOUBLE_EQ(signal_at_distance(10.0, 0.0), 100.0 / kSignalEpsilon);
}

TEST(Neighbors, TxRangeAndLiveness) {
  auto d = line_of({{0, 0}, {1, 0}, {2, 0}}, 1.5);
  EXPECT_EQ(neighbors(d, 1), (std::vector<int>{0, 2}));
  EXPECT_EQ(neighbors(d, 0), (std::vector<int>{1}));
  kill(d.nodes[2]);
  EXPECT_EQ(neighbors(d, 1), (std::vector<int>{0}));
  EXPECT_TRUE(neighbors(d, 2).empty());
  EXPECT_THROW(neighbors(d, 3), Error);
}

TEST(Charge, DrawsAndKills) {
  SensorNode n;
  n.battery = 5.0;
  EXPECT_DOUBLE_EQ(charge(n, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(n.battery, 3.0);
  EXPECT_TRUE(n.alive);
  n.battery = 1.0;
  EXPECT_DOUBLE_EQ(charge(n, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(n.battery, 0.0);
  EXPECT_FALSE(n.alive);
  EXPECT_DOUBLE_EQ(charge(n, 2.0), 0.0);
}

TEST(InjectFailure, ProbabilityOneKillsAll) {
  auto d = line_of({{0, 0}, {1, 0}, {2, 0}}, 1.5);
  d.nodes[0].roles[0].role = Role::Master;
  Rng rng(1);
  EXPECT_EQ(inject_failure(d, 1.0, rng), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(d.alive_count(), 0u);
  EXPECT_TRUE(d.nodes[0].roles.empty());
  EXPECT_TRUE(inject_failure(d, 1.0, rng).empty());
}

TEST(InjectFailure, ProbabilityZeroKillsNone) {
  auto d = line_of({{0, 0}, {1, 0}}, 1.5);
  Rng rng(1);
  EXPECT_TRUE(inject_failure(d, 0.0, rng).empty());
  inject_failure(d, 1);
  EXPECT_FALSE(d.nodes[1].alive);
}
