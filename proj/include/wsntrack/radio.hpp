#pragma once

// Protocol messages and the synchronous radio: anything sent in tick T is
// delivered in tick T+1. Broadcasts charge the sender once and every alive
// receiver within the sender's radio disc.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "wsntrack/data_table.hpp"
#include "wsntrack/geometry.hpp"
#include "wsntrack/network.hpp"

namespace wsntrack {

enum class MessageKind { ElectionBid, SlaveInvite, SlaveAccept, Inhibit, Handover, TableDistribute, SinkReport };
inline constexpr std::size_t kMessageKinds = 7;

inline std::string_view to_string(MessageKind k) {
  switch (k) {
    case MessageKind::ElectionBid: return "ElectionBid";
    case MessageKind::SlaveInvite: return "SlaveInvite";
    case MessageKind::SlaveAccept: return "SlaveAccept";
    case MessageKind::Inhibit: return "Inhibit";
    case MessageKind::Handover: return "Handover";
    case MessageKind::TableDistribute: return "TableDistribute";
    case MessageKind::SinkReport: return "SinkReport";
  }
  return "?";
}

inline constexpr int kBroadcast = -1;
inline constexpr int kSinkAddress = -2;

struct BidPayload {
  double signal = 0.0;
};

struct InvitePayload {
  std::optional<Point2> fix;
  Point2 predicted;
  DataTable snapshot;
};

struct AcceptPayload {
  std::optional<RangeObservation> measurement;
};

// ttl == 0 releases: receivers drop inhibition and master awareness.
struct InhibitPayload {
  int ttl = 0;
  Point2 predicted;
  std::vector<int> team;  // master's current slaves; never inhibited
};

struct HandoverPayload {
  int successor = -1;
  std::vector<int> team;  // slaves for the successor
  Point2 fix;
  Point2 prev_fix;
  Point2 predicted;
  int ttl = 0;
  DataTable snapshot;
};

struct TablePayload {
  DataTable table;
};

struct SinkReportPayload {
  DataTable table;
  std::optional<Point2> fix;
  std::optional<RangeObservation> measurement;
};

using Payload = std::variant<BidPayload, InvitePayload, AcceptPayload, InhibitPayload, HandoverPayload, TablePayload,
                             SinkReportPayload>;

struct Message {
  MessageKind kind = MessageKind::ElectionBid;
  int from = 0;
  int to = kBroadcast;
  int target_id = -1;
  std::int64_t sent_tick = 0;
  Payload payload;
};

struct Delivery {
  int receiver = 0;
  const Message* message = nullptr;
};

using MessageCounts = std::array<std::int64_t, kMessageKinds>;

class Radio {
 public:
  // Queues a message for next-tick delivery and charges the sender. A dead
  // sender transmits nothing.
  bool send(Deployment& dep, Message msg, const EnergyModel& energy, EnergyMeter& meter) {
    auto& sender = dep.node(msg.from);
    if (!sender.alive) return false;
    double d = sender.tx_range;
    if (msg.to >= 0) d = std::min(d, distance(sender.position, dep.node(msg.to).position));
    meter.add(charge(sender, energy.tx_cost(d)));
    ++sent_[static_cast<std::size_t>(msg.kind)];
    queued_.push_back(std::move(msg));
    return true;
  }

  // One hop to the sink, delivered within the tick. Returns false if the
  // sender is dead or not within sink range.
  bool send_to_sink(Deployment& dep, int from, MessageKind kind, const EnergyModel& energy, EnergyMeter& meter) {
    auto& sender = dep.node(from);
    if (!sender.alive || !dep.in_sink_range(sender)) return false;
    meter.add(charge(sender, energy.tx_cost(distance(sender.position, dep.sink))));
    ++sent_[static_cast<std::size_t>(kind)];
    return true;
  }

  // Relay hop between two nodes that completes within the tick.
  bool relay(Deployment& dep, int from, int to, MessageKind kind, const EnergyModel& energy, EnergyMeter& meter) {
    auto& a = dep.node(from);
    auto& b = dep.node(to);
    if (!a.alive) return false;
    meter.add(charge(a, energy.tx_cost(distance(a.position, b.position))));
    ++sent_[static_cast<std::size_t>(kind)];
    if (!b.alive) return false;
    meter.add(charge(b, energy.e_rx));
    return true;
  }

  // Moves last tick's traffic into the delivery buffer, charging each alive
  // receiver. Deliveries are ordered by (receiver id, queue order).
  std::vector<Delivery> deliver(Deployment& dep, const EnergyModel& energy, EnergyMeter& meter) {
    in_air_ = std::move(queued_);
    queued_.clear();
    std::vector<Delivery> out;
    for (const auto& m : in_air_) {
      const auto& sender = dep.node(m.from);
      if (m.to == kBroadcast) {
        for (int r : dep.adjacency[static_cast<std::size_t>(m.from)]) {
          auto& rn = dep.node(r);
          if (!rn.alive) continue;
          meter.add(charge(rn, energy.e_rx));
          if (rn.alive) out.push_back({r, &m});
        }
      } else if (m.to >= 0) {
        auto& rn = dep.node(m.to);
        if (!rn.alive || distance(sender.position, rn.position) > sender.tx_range) continue;
        meter.add(charge(rn, energy.e_rx));
        if (rn.alive) out.push_back({m.to, &m});
      }
    }
    std::stable_sort(out.begin(), out.end(), [](const Delivery& a, const Delivery& b) { return a.receiver < b.receiver; });
    ++deliveries_;
    return out;
  }

  const MessageCounts& sent() const { return sent_; }
  std::int64_t sent(MessageKind k) const { return sent_[static_cast<std::size_t>(k)]; }
  std::int64_t total_sent() const {
    std::int64_t t = 0;
    for (auto c : sent_) t += c;
    return t;
  }
  void reset_counts() { sent_.fill(0); }
  std::size_t pending() const { return queued_.size(); }

 private:
  std::vector<Message> queued_;
  std::vector<Message> in_air_;
  MessageCounts sent_{};
  std::int64_t deliveries_ = 0;
};

}  // namespace wsntrack
