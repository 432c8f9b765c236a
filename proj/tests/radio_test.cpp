#include <gtest/gtest.h>

#include "wsntrack/radio.hpp"

using namespace wsntrack;

namespace {

Deployment three_in_line() {
  Deployment d;
  for (int i = 0; i < 3; ++i) {
    SensorNode n;
    n.id = i;
    n.position = {10.0 * i, 0};
    n.tx_range = 15.0;
    d.nodes.push_back(n);
  }
  d.sink = {0, 5};
  d.sink_range = 6.0;
  d.rebuild_adjacency();
  return d;
}

}  // namespace

TEST(Radio, BroadcastDeliversNextTickToNeighbors) {
  auto d = three_in_line();
  Radio radio;
  EnergyModel e;
  EnergyMeter m;
  Message msg;
  msg.kind = MessageKind::ElectionBid;
  msg.from = 1;
  ASSERT_TRUE(radio.send(d, msg, e, m));
  EXPECT_DOUBLE_EQ(m.total, e.tx_cost(15.0));
  EXPECT_EQ(radio.pending(), 1u);
  const auto got = radio.deliver(d, e, m);
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0].receiver, 0);
  EXPECT_EQ(got[1].receiver, 2);
  EXPECT_DOUBLE_EQ(m.total, e.tx_cost(15.0) + 2 * e.e_rx);
  EXPECT_EQ(radio.sent(MessageKind::ElectionBid), 1);
  EXPECT_TRUE(radio.deliver(d, e, m).empty());
}

TEST(Radio, UnicastChargesDistanceAndSkipsDead) {
  auto d = three_in_line();
  Radio radio;
  EnergyModel e;
  EnergyMeter m;
  Message msg;
  msg.kind = MessageKind::SlaveInvite;
  msg.from = 0;
  msg.to = 1;
  radio.send(d, msg, e, m);
  EXPECT_DOUBLE_EQ(m.total, e.tx_cost(10.0));
  kill(d.nodes[1]);
  EXPECT_TRUE(radio.deliver(d, e, m).empty());
}

TEST(Radio, DeadSenderSendsNothing) {
  auto d = three_in_line();
  kill(d.nodes[0]);
  Radio radio;
  EnergyModel e;
  EnergyMeter m;
  Message msg;
  msg.from = 0;
  EXPECT_FALSE(radio.send(d, msg, e, m));
  EXPECT_EQ(radio.total_sent(), 0);
  EXPECT_DOUBLE_EQ(m.total, 0.0);
}

TEST(Radio, SinkHopRequiresRange) {
  auto d = three_in_line();
  Radio radio;
  EnergyModel e;
  EnergyMeter m;
  EXPECT_TRUE(radio.send_to_sink(d, 0, MessageKind::SinkReport, e, m));
  EXPECT_DOUBLE_EQ(m.total, e.tx_cost(5.0));
  EXPECT_FALSE(radio.send_to_sink(d, 2, MessageKind::SinkReport, e, m));
  EXPECT_EQ(radio.sent(MessageKind::SinkReport), 1);
}
