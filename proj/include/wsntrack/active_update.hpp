#pragma once

// Active Update: every sensor keeps a table of (sensor id -> latest value),
// rebroadcasts it to its radio neighbors whenever it changes, and flushes it
// to the sink when in range. Measurements of other sensors ride along
// (piggyback), so a reading survives its originator's death once any
// neighbor has heard it.
//
// Entries carry a per-originator sequence number; merges keep the highest
// sequence and a node's own entry is only ever written by the node itself.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wsntrack/data_table.hpp"
#include "wsntrack/error.hpp"
#include "wsntrack/network.hpp"
#include "wsntrack/radio.hpp"

namespace wsntrack {

struct GossipStats {
  std::int64_t rounds_to_convergence = -1;  // ticks from last collect to quiescence; -1 if never quiescent
  std::int64_t messages_sent = 0;
  std::int64_t entries_produced = 0;
  std::int64_t entries_delivered_to_sink = 0;
  std::int64_t entries_lost = 0;
};

// Records a fresh own measurement: own seq + 1, table marked changed.
inline void collect_value(SensorNode& node, std::int64_t tick, double value, const EnergyModel& energy,
                          EnergyMeter& meter) {
  if (!node.alive) throw Error(ErrorCode::NodeDead, "collect_value on node " + std::to_string(node.id));
  auto& own = node.table.entries[node.id];
  own.value = value;
  own.seq += 1;
  own.origin_tick = tick;
  node.table.changed = true;
  meter.add(charge(node, energy.e_sense));
}

// Broadcasts the full table if it changed since the last broadcast. An
// unchanged table sends nothing, which is what stops re-flooding.
inline bool distribute(Deployment& dep, int node_id, std::int64_t tick, Radio& radio, const EnergyModel& energy,
                       EnergyMeter& meter) {
  auto& node = dep.node(node_id);
  if (!node.alive) throw Error(ErrorCode::NodeDead, "distribute on node " + std::to_string(node_id));
  if (!node.table.changed) return false;
  node.table.changed = false;
  Message m;
  m.kind = MessageKind::TableDistribute;
  m.from = node_id;
  m.to = kBroadcast;
  m.sent_tick = tick;
  m.payload = TablePayload{node.table};
  return radio.send(dep, std::move(m), energy, meter);
}

// Merges `incoming` into the receiver's table; returns true if anything changed.
inline bool merge(int receiver_id, DataTable& receiver, const DataTable& incoming) {
  bool modified = false;
  for (const auto& [id, entry] : incoming.entries) {
    if (id == receiver_id) continue;
    auto it = receiver.entries.find(id);
    if (it == receiver.entries.end()) {
      receiver.entries.emplace(id, entry);
      modified = true;
    } else if (entry.seq > it->second.seq) {
      it->second = entry;
      modified = true;
    }
  }
  if (modified) receiver.changed = true;
  return modified;
}

// The pick-up station: keeps the union of every (id, seq) it has received and
// the newest entry per originator.
struct Sink {
  std::set<std::pair<int, std::int64_t>> received;
  DataTable latest;
  std::int64_t reports = 0;

  std::int64_t absorb(const DataTable& t) {
    std::int64_t fresh = 0;
    for (const auto& [id, e] : t.entries) {
      if (received.emplace(id, e.seq).second) ++fresh;
      auto it = latest.entries.find(id);
      if (it == latest.entries.end() || e.seq > it->second.seq) latest.entries[id] = e;
    }
    return fresh;
  }
};

// Sends the node's whole table to the sink. The table is kept, so the node
// stays a replica. Returns the number of entries new to the sink.
inline std::int64_t flush_to_sink(Deployment& dep, int node_id, Sink& sink, Radio& radio, const EnergyModel& energy,
                                  EnergyMeter& meter) {
  auto& node = dep.node(node_id);
  if (!node.alive) throw Error(ErrorCode::NodeDead, "flush_to_sink on node " + std::to_string(node_id));
  if (!dep.in_sink_range(node)) throw Error(ErrorCode::OutOfSinkRange, "node " + std::to_string(node_id));
  if (!radio.send_to_sink(dep, node_id, MessageKind::SinkReport, energy, meter)) return 0;
  ++sink.reports;
  return sink.absorb(node.table);
}

// Bookkeeping of every produced entry, for loss accounting at the horizon.
class GossipLedger {
 public:
  struct Produced {
    int origin = 0;
    std::int64_t seq = 0;
    std::int64_t tick = 0;
    bool replicated = false;  // a broadcast carrying it reached >= 1 alive neighbor
  };

  void produced(int origin, std::int64_t seq, std::int64_t tick) {
    index_[{origin, seq}] = entries_.size();
    entries_.push_back({origin, seq, tick, false});
    last_collect_tick_ = tick;
  }

  // Called for each delivered TableDistribute from its originator.
  void on_delivery(int sender, const DataTable& table) {
    auto own = table.entries.find(sender);
    if (own == table.entries.end()) return;
    // Every own seq up to the carried one is subsumed by the carried value.
    for (auto it = index_.lower_bound({sender, 0}); it != index_.end() && it->first.first == sender; ++it) {
      if (it->first.second > own->second.seq) break;
      entries_[it->second].replicated = true;
    }
  }

  const std::vector<Produced>& entries() const { return entries_; }
  std::int64_t last_collect_tick() const { return last_collect_tick_; }

  // An entry is lost when its originator is dead and neither the sink nor any
  // surviving node holds that value or a newer one from the same originator.
  bool is_lost(const Produced& p, const Deployment& dep, const Sink& sink) const {
    if (dep.node(p.origin).alive) return false;
    if (sink.latest.covers(p.origin, p.seq)) return false;
    for (const auto& n : dep.nodes)
      if (n.alive && n.table.covers(p.origin, p.seq)) return false;
    return true;
  }

  GossipStats stats(const Deployment& dep, const Sink& sink) const {
    GossipStats s;
    s.entries_produced = static_cast<std::int64_t>(entries_.size());
    for (const auto& p : entries_) {
      if (sink.received.count({p.origin, p.seq})) ++s.entries_delivered_to_sink;
      else if (is_lost(p, dep, sink)) ++s.entries_lost;
    }
    return s;
  }

  // Lost entries among those that had completed a broadcast round.
  std::int64_t lost_after_replication(const Deployment& dep, const Sink& sink) const {
    std::int64_t lost = 0;
    for (const auto& p : entries_)
      if (p.replicated && !sink.received.count({p.origin, p.seq}) && is_lost(p, dep, sink)) ++lost;
    return lost;
  }

 private:
  std::vector<Produced> entries_;
  std::map<std::pair<int, std::int64_t>, std::size_t> index_;
  std::int64_t last_collect_tick_ = -1;
};

// Delivery-phase helper: merges every delivered table in (receiver, queue)
// order and informs the ledger about originator broadcasts.
inline void merge_deliveries(Deployment& dep, const std::vector<Delivery>& deliveries, GossipLedger* ledger) {
  for (const auto& d : deliveries) {
    if (d.message->kind != MessageKind::TableDistribute) continue;
    const auto& table = std::get<TablePayload>(d.message->payload).table;
    auto& rn = dep.node(d.receiver);
    if (!rn.alive) continue;
    merge(rn.id, rn.table, table);
    if (ledger) ledger->on_delivery(d.message->from, table);
  }
}

// Broadcast phase for every alive node with a changed table; returns the
// number of broadcasts sent.
inline std::int64_t distribute_all(Deployment& dep, std::int64_t tick, Radio& radio, const EnergyModel& energy,
                                   EnergyMeter& meter) {
  std::int64_t sent = 0;
  for (auto& n : dep.nodes)
    if (n.alive && n.table.changed && distribute(dep, n.id, tick, radio, energy, meter)) ++sent;
  return sent;
}

}  // namespace wsntrack
