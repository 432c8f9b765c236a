#include <gtest/gtest.h>

#include "wsntrack/active_update.hpp"

using namespace wsntrack;

namespace {

Deployment make(std::vector<Point2> pts, double tx_range) {
  Deployment d;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    SensorNode n;
    n.id = static_cast<int>(i);
    n.position = pts[i];
    n.tx_range = tx_range;
    d.nodes.push_back(n);
  }
  d.sink = {1000, 1000};
  d.sink_range = 1.0;
  d.rebuild_adjacency();
  return d;
}

// One gossip round: deliver last tick's tables, then rebroadcast changes.
std::int64_t round(Deployment& d, Radio& radio, std::int64_t t, bool piggyback = true) {
  EnergyModel e;
  EnergyMeter m;
  const auto got = radio.deliver(d, e, m);
  if (piggyback) merge_deliveries(d, got, nullptr);
  return piggyback ? distribute_all(d, t, radio, e, m) : 0;
}

}  // namespace

TEST(Collect, IncrementsSequence) {
  auto d = make({{0, 0}}, 10);
  EnergyModel e;
  EnergyMeter m;
  collect_value(d.nodes[0], 3, 1.5, e, m);
  collect_value(d.nodes[0], 4, 2.5, e, m);
  const auto& own = d.nodes[0].table.entries.at(0);
  EXPECT_EQ(own.seq, 2);
  EXPECT_DOUBLE_EQ(own.value, 2.5);
  EXPECT_EQ(own.origin_tick, 4);
  EXPECT_TRUE(d.nodes[0].table.changed);
  EXPECT_DOUBLE_EQ(m.total, 2 * e.e_sense);
}

TEST(Collect, DeadNodeThrows) {
  auto d = make({{0, 0}}, 10);
  kill(d.nodes[0]);
  EnergyModel e;
  EnergyMeter m;
  try {
    collect_value(d.nodes[0], 0, 1.0, e, m);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::NodeDead);
  }
}

TEST(Distribute, ReachesEveryNeighbor) {
  auto d = make({{0, 0}, {1, 0}, {0, 1}, {-1, 0}}, 1.5);
  EnergyModel e;
  EnergyMeter m;
  Radio radio;
  collect_value(d.nodes[0], 0, 7.0, e, m);
  EXPECT_TRUE(distribute(d, 0, 0, radio, e, m));
  EXPECT_FALSE(distribute(d, 0, 0, radio, e, m));  // unchanged now
  const auto got = radio.deliver(d, e, m);
  EXPECT_EQ(got.size(), 3u);
  merge_deliveries(d, got, nullptr);
  for (int i = 1; i < 4; ++i) EXPECT_TRUE(d.nodes[static_cast<std::size_t>(i)].table.covers(0, 1));
}

TEST(Distribute, IsolatedNodeReachesNobody) {
  auto d = make({{0, 0}, {50, 0}}, 10);
  EnergyModel e;
  EnergyMeter m;
  Radio radio;
  collect_value(d.nodes[0], 0, 7.0, e, m);
  EXPECT_TRUE(distribute(d, 0, 0, radio, e, m));
  EXPECT_TRUE(radio.deliver(d, e, m).empty());
}

TEST(Merge, InsertsNewerAndIgnoresStale) {
  DataTable mine;
  mine.entries[0] = {1.0, 5, 0};
  mine.entries[2] = {2.0, 3, 0};
  DataTable in;
  in.entries[0] = {9.0, 9, 0};   // receiver's own entry, never overwritten
  in.entries[1] = {3.0, 1, 0};   // new
  in.entries[2] = {4.0, 2, 0};   // stale
  EXPECT_TRUE(merge(0, mine, in));
  EXPECT_EQ(mine.entries.at(0).seq, 5);
  EXPECT_EQ(mine.entries.at(1).seq, 1);
  EXPECT_EQ(mine.entries.at(2).seq, 3);
  EXPECT_TRUE(mine.changed);
  mine.changed = false;
  EXPECT_FALSE(merge(0, mine, in));
  EXPECT_FALSE(mine.changed);
}

TEST(Gossip, LineConvergesInDiameterRounds) {
  auto d = make({{0, 0}, {1, 0}, {2, 0}}, 1.2);
  EnergyModel e;
  EnergyMeter m;
  Radio radio;
  for (auto& n : d.nodes) collect_value(n, 0, n.id, e, m);
  distribute_all(d, 0, radio, e, m);
  round(d, radio, 1);
  round(d, radio, 2);
  for (const auto& n : d.nodes) EXPECT_EQ(n.table.size(), 3u);
  // The last round's rebroadcasts change nothing and traffic stops.
  round(d, radio, 3);
  EXPECT_EQ(radio.pending(), 0u);
}

TEST(Sink, FlushIsIdempotent) {
  auto d = make({{0, 0}}, 10);
  d.sink = {0, 0.5};
  EnergyModel e;
  EnergyMeter m;
  Radio radio;
  Sink sink;
  collect_value(d.nodes[0], 0, 1.0, e, m);
  EXPECT_EQ(flush_to_sink(d, 0, sink, radio, e, m), 1);
  EXPECT_EQ(flush_to_sink(d, 0, sink, radio, e, m), 0);
  EXPECT_EQ(sink.received.size(), 1u);
  EXPECT_EQ(sink.reports, 2);
  d.sink = {100, 100};
  EXPECT_THROW(flush_to_sink(d, 0, sink, radio, e, m), Error);
}

// Two nodes, no sink contact. The originator dies either after or before its
// first broadcast.
TEST(Loss, TwoNodeTrace) {
  for (bool piggyback : {true, false})
    for (bool kill_after_broadcast : {true, false}) {
      auto d = make({{0, 0}, {1, 0}}, 2.0);
      EnergyModel e;
      EnergyMeter m;
      Radio radio;
      Sink sink;
      GossipLedger ledger;
      collect_value(d.nodes[0], 0, 1.0, e, m);
      ledger.produced(0, 1, 0);
      if (!kill_after_broadcast) kill(d.nodes[0]);
      if (piggyback && d.nodes[0].alive) distribute(d, 0, 0, radio, e, m);
      if (kill_after_broadcast) kill(d.nodes[0]);
      const auto got = radio.deliver(d, e, m);
      if (piggyback) merge_deliveries(d, got, &ledger);
      const auto s = ledger.stats(d, sink);
      const bool expect_lost = !(piggyback && kill_after_broadcast);
      EXPECT_EQ(s.entries_lost, expect_lost ? 1 : 0) << piggyback << kill_after_broadcast;
      EXPECT_EQ(ledger.lost_after_replication(d, sink), 0);
    }
}
