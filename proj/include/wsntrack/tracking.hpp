#pragma once

// Per-target master/slave tracking protocol.
//
// A target with no master triggers an election: every covering sensor that
// has not overheard a live master broadcasts a bid carrying its signal
// strength, and one tick later the strongest bidder (lowest id on ties)
// takes the master role. The master invites the next-nearest sensors as
// slaves and broadcasts an inhibit notice that puts every other covering
// sensor to sleep for this target. Each tick the team ranges the target and
// the master trilaterates. When the fix leaves the master's interested disc
// (or the signal drops below the handover threshold) the master hands the
// track, its memory and a pre-selected team around the predicted position to
// the sensor nearest that prediction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "wsntrack/active_update.hpp"
#include "wsntrack/geometry.hpp"
#include "wsntrack/mobility.hpp"
#include "wsntrack/network.hpp"
#include "wsntrack/radio.hpp"
#include "wsntrack/rng.hpp"
#include "wsntrack/roles.hpp"

namespace wsntrack {

struct ProtocolParams {
  int slaves_per_target = 2;
  int inhibit_ttl = 5;
  // Unset: the signal at the interested-area boundary, which makes both
  // handover triggers coincide.
  std::optional<double> handover_threshold;
  int report_interval = 5;
  double noise_sigma = 0.0;
  int master_timeout = 2;
  bool merge_snapshots = true;  // invites and handovers carry the master's table
  // Fixes whose RMS range residual exceeds this are treated as degenerate
  // geometry. Unset: 1 m + 4 sigma.
  std::optional<double> max_residual;
  // Teams whose anchor spread falls below this fraction of the sensing range
  // are passed over when a better-conditioned team is available.
  double min_spread_fraction = 0.25;

  double residual_gate() const { return max_residual.value_or(1.0 + 4.0 * noise_sigma); }
};

struct TrackRecord {
  int target_id = 0;
  std::int64_t tick = 0;
  std::optional<Point2> estimated;
  Point2 true_pos;
  double residual = 0.0;
  int master_id = -1;
  std::vector<int> slave_ids;
  std::size_t anchors_used = 0;
  bool degraded = false;  // fewer slaves than requested
  bool handover = false;

  bool loss() const { return !estimated.has_value(); }
  double error() const { return estimated ? distance(*estimated, true_pos) : 0.0; }
};

struct TargetTruth {
  int id = 0;
  Point2 position;
};

// A range reading fed into the Active Update tables.
struct Participation {
  int node = 0;
  double value = 0.0;
};

// Per-tick observations the engine aggregates into metrics and invariant checks.
struct TickObservations {
  std::set<int> active_nodes;            // nodes that ranged any target
  std::map<int, int> sensing_per_target;  // target -> nodes that ranged it
  std::vector<Participation> participation;
  std::int64_t no_successor = 0;
  std::int64_t no_coverage = 0;
  std::int64_t handovers = 0;
  std::int64_t sink_reports_delivered = 0;
};

struct Bid {
  int id = 0;
  double signal = 0.0;
};

// Strongest signal wins; ties go to the lowest id. Returns -1 for no bids.
inline int election_winner(std::span<const Bid> bids) {
  const Bid* best = nullptr;
  for (const auto& b : bids)
    if (!best || b.signal > best->signal || (b.signal == best->signal && b.id < best->id)) best = &b;
  return best ? best->id : -1;
}

// Bids ordered strongest first (ties by id).
inline std::vector<Bid> rank_bids(std::vector<Bid> bids) {
  std::sort(bids.begin(), bids.end(), [](const Bid& a, const Bid& b) {
    if (a.signal != b.signal) return a.signal > b.signal;
    return a.id < b.id;
  });
  return bids;
}

inline std::vector<int> covering_nodes(const Deployment& dep, const Point2& p) {
  std::vector<int> out;
  for (const auto& n : dep.nodes)
    if (n.alive && n.covers(p)) out.push_back(n.id);
  return out;
}

// The k ids nearest to p (fewer if fewer ids), via nearest-site ranking.
inline std::vector<int> nearest_of(const Deployment& dep, std::span<const int> ids, const Point2& p, std::size_t k) {
  std::vector<Site> sites;
  sites.reserve(ids.size());
  for (int id : ids) sites.push_back({id, dep.node(id).position});
  return rank_sites(sites, p, std::min(k, sites.size()));
}

// Smallest singular value of the circle-difference matrix for these anchors
// (first one is the reference). The linearized solve amplifies range noise by
// roughly range / spread.
inline double anchor_spread(std::span<const Point2> anchors) {
  if (anchors.size() < 3) return 0.0;
  double a = 0.0, b = 0.0, c = 0.0;
  for (std::size_t i = 1; i < anchors.size(); ++i) {
    const double dx = anchors[i].x - anchors[0].x;
    const double dy = anchors[i].y - anchors[0].y;
    a += dx * dx;
    b += dx * dy;
    c += dy * dy;
  }
  const double half_tr = (a + c) / 2.0;
  const double disc = std::sqrt(std::max(0.0, half_tr * half_tr - (a * c - b * b)));
  return std::sqrt(std::max(0.0, half_tr - disc));
}

// Picks k of `ranked` (best first) to work with `lead`. The first team in
// rank order whose spread reaches min_spread wins; failing that, the team
// with the largest spread.
inline std::vector<int> select_team(const Deployment& dep, int lead, std::span<const int> ranked, std::size_t k,
                                    double min_spread) {
  if (ranked.size() <= k) return {ranked.begin(), ranked.end()};
  const std::size_t m = std::min<std::size_t>(ranked.size(), 8);
  std::vector<std::vector<std::size_t>> combos;
  std::vector<std::size_t> idx(k);
  auto gen = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
    if (depth == k) {
      combos.push_back(idx);
      return;
    }
    for (std::size_t i = start; i < m; ++i) {
      idx[depth] = i;
      self(self, i + 1, depth + 1);
    }
  };
  gen(gen, 0, 0);
  std::stable_sort(combos.begin(), combos.end(), [](const auto& x, const auto& y) {
    const auto sx = std::accumulate(x.begin(), x.end(), std::size_t{0});
    const auto sy = std::accumulate(y.begin(), y.end(), std::size_t{0});
    return sx < sy;
  });
  const std::vector<std::size_t>* best = nullptr;
  double best_spread = -1.0;
  std::vector<Point2> pts;
  for (const auto& cmb : combos) {
    pts.assign(1, dep.node(lead).position);
    for (auto i : cmb) pts.push_back(dep.node(ranked[i]).position);
    const double sp = anchor_spread(pts);
    if (sp >= min_spread) {
      best = &cmb;
      break;
    }
    if (sp > best_spread) {
      best_spread = sp;
      best = &cmb;
    }
  }
  std::vector<int> out;
  for (auto i : *best) out.push_back(ranked[i]);
  return out;
}

// Samples of the first reading's range circle that agree with every other
// reading to within tol and lie in the field: a coarse target region for ticks
// that produced no fix.
inline std::vector<Point2> consistent_region(std::span<const RangeObservation> readings, double tol,
                                             const FieldBounds& bounds, int samples = 72) {
  std::vector<Point2> out;
  if (readings.empty()) return out;
  const auto& r0 = readings.front();
  for (int i = 0; i < samples; ++i) {
    const double a = 2.0 * std::numbers::pi * i / samples;
    const Point2 p{r0.anchor.x + r0.range * std::cos(a), r0.anchor.y + r0.range * std::sin(a)};
    if (!bounds.contains(p)) continue;
    bool ok = true;
    for (std::size_t j = 1; j < readings.size() && ok; ++j)
      ok = std::abs(distance(p, readings[j].anchor) - readings[j].range) <= tol;
    if (ok) out.push_back(p);
  }
  return out;
}

inline double default_handover_threshold(const SensorNode& n) {
  return signal_at_distance(n.sensing_range, n.interested_range);
}

inline bool handover_due(const SensorNode& master, const Point2& fix, double threshold) {
  const double d = distance(master.position, fix);
  if (d > master.interested_range) return true;
  return signal_at_distance(master.sensing_range, d) < threshold;
}

// Greedy geographic forwarding: each hop goes to the alive neighbor closest
// to the sink, provided it is strictly closer than the current holder.
inline bool forward_to_sink(Deployment& dep, int from, Radio& radio, const EnergyModel& energy, EnergyMeter& meter) {
  int cur = from;
  for (std::size_t hops = 0; hops <= dep.nodes.size(); ++hops) {
    auto& node = dep.node(cur);
    if (!node.alive) return false;
    if (dep.in_sink_range(node)) return radio.send_to_sink(dep, cur, MessageKind::SinkReport, energy, meter);
    double best = distance(node.position, dep.sink);
    int next = -1;
    for (int nb : neighbors(dep, cur)) {
      const double d = distance(dep.node(nb).position, dep.sink);
      if (d < best) {
        best = d;
        next = nb;
      }
    }
    if (next < 0) return false;
    if (!radio.relay(dep, cur, next, MessageKind::SinkReport, energy, meter)) return false;
    cur = next;
  }
  return false;
}

inline const RoleState* role_for(const SensorNode& n, int target) {
  auto it = n.roles.find(target);
  return it == n.roles.end() ? nullptr : &it->second;
}

inline bool has_role(const SensorNode& n, int target, Role r) {
  const auto* rs = role_for(n, target);
  return rs && rs->role == r;
}

// Fix from the collected observations: closed form for exactly three, least
// squares beyond. Degenerate anchor sets yield no fix.
// Near-collinear anchors pass the exact degeneracy test but mirror noise into
// large errors; their fits are inconsistent with the ranges, which the
// residual gate catches.
inline std::optional<FixResult> solve_fix(std::span<const RangeObservation> obs,
                                          double max_residual = std::numeric_limits<double>::infinity()) {
  if (obs.size() < 3) return std::nullopt;
  try {
    auto fix = obs.size() == 3 ? trilaterate(obs) : trilaterate_ls(obs);
    if (!(fix.residual <= max_residual)) return std::nullopt;
    return fix;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegenerateGeometry || e.code() == ErrorCode::DuplicateAnchor) return std::nullopt;
    throw;
  }
}

class TrackingProtocol {
 public:
  TrackingProtocol(ProtocolParams params, EnergyModel energy, FieldBounds bounds)
      : params_(params), energy_(energy), bounds_(bounds) {}

  const ProtocolParams& params() const { return params_; }

  // Delivery phase: protocol messages, in (receiver id, send order).
  void handle_deliveries(Deployment& dep, const std::vector<Delivery>& deliveries, std::int64_t tick) {
    for (const auto& d : deliveries) {
      auto& r = dep.node(d.receiver);
      if (!r.alive) continue;
      const Message& m = *d.message;
      switch (m.kind) {
        case MessageKind::ElectionBid: on_bid(r, m); break;
        case MessageKind::Inhibit: on_inhibit(r, m, tick); break;
        case MessageKind::SlaveInvite: on_invite(r, m, tick); break;
        case MessageKind::Handover: on_handover(r, m, tick); break;
        default: break;
      }
    }
  }

  // Protocol phase for one target.
  TrackRecord track(Deployment& dep, const TargetTruth& target, std::int64_t tick, Radio& radio, Rng& noise,
                    EnergyMeter& meter, TickObservations& obs) {
    TrackRecord rec;
    rec.target_id = target.id;
    rec.tick = tick;
    rec.true_pos = target.position;

    int master = -1;
    for (const auto& n : dep.nodes)
      if (n.alive && has_role(n, target.id, Role::Master)) {
        master = n.id;
        break;
      }
    if (master < 0) {
      elect(dep, target, tick, radio, meter, obs);
      return rec;
    }
    run_master(dep, master, target, tick, radio, noise, meter, obs, rec);
    return rec;
  }

  // Timer phase: inhibit expiry, slave master-loss timeout, awareness expiry.
  void expire(Deployment& dep, std::int64_t tick) {
    for (auto& n : dep.nodes) {
      if (!n.alive) continue;
      for (auto it = n.roles.begin(); it != n.roles.end();) {
        auto& rs = it->second;
        bool drop = false;
        if (rs.role == Role::Inhibited) {
          drop = --rs.inhibit_ttl <= 0;
        } else if (rs.role == Role::Slave) {
          drop = tick - rs.last_master_heard >= params_.master_timeout;
          if (drop) n.awareness.erase(it->first);
        } else if (rs.role == Role::Idle) {
          drop = true;
        }
        it = drop ? n.roles.erase(it) : std::next(it);
      }
      std::erase_if(n.awareness, [&](const auto& kv) { return kv.second.valid_until <= tick; });
    }
  }

 private:
  double threshold_for(const SensorNode& n) const {
    return params_.handover_threshold.value_or(default_handover_threshold(n));
  }

  double min_spread(const SensorNode& n) const { return params_.min_spread_fraction * n.sensing_range; }

  std::size_t team_size() const { return static_cast<std::size_t>(std::max(0, params_.slaves_per_target)); }

  bool knows_live_master(const SensorNode& n, int target, std::int64_t tick) const {
    auto it = n.awareness.find(target);
    return it != n.awareness.end() && it->second.valid_until >= tick;
  }

  void make_inhibited(SensorNode& r, int target, int ttl) {
    RoleState rs;
    rs.role = Role::Inhibited;
    rs.target_id = target;
    rs.inhibit_ttl = ttl;
    r.roles[target] = rs;
  }

  void make_slave(SensorNode& r, int target, int master, std::int64_t tick) {
    RoleState rs;
    rs.role = Role::Slave;
    rs.target_id = target;
    rs.master_id = master;
    rs.last_master_heard = tick;
    r.roles[target] = rs;
  }

  void on_bid(SensorNode& r, const Message& m) {
    auto it = r.roles.find(m.target_id);
    if (it == r.roles.end() || it->second.role != Role::Electing) return;
    it->second.bids.emplace_back(m.from, std::get<BidPayload>(m.payload).signal);
  }

  void on_inhibit(SensorNode& r, const Message& m, std::int64_t tick) {
    const auto& p = std::get<InhibitPayload>(m.payload);
    const int t = m.target_id;
    auto it = r.roles.find(t);
    if (p.ttl == 0) {
      auto aw = r.awareness.find(t);
      if (aw != r.awareness.end() && aw->second.master_id == m.from) r.awareness.erase(aw);
      if (it != r.roles.end() &&
          (it->second.role == Role::Inhibited || (it->second.role == Role::Slave && it->second.master_id == m.from)))
        r.roles.erase(it);
      return;
    }
    const bool in_team = std::find(p.team.begin(), p.team.end(), r.id) != p.team.end();
    if (it != r.roles.end() && it->second.role == Role::Master) {
      // Two claimants that hear each other: the lower id keeps the track.
      if (m.from < r.id) {
        r.roles.erase(it);
        r.awareness[t] = {m.from, tick + p.ttl};
      }
      return;
    }
    r.awareness[t] = {m.from, tick + p.ttl};
    if (in_team) {
      if (it != r.roles.end() && it->second.role == Role::Slave && it->second.master_id == m.from)
        it->second.last_master_heard = tick;
      else
        make_slave(r, t, m.from, tick);
      return;
    }
    if (it != r.roles.end()) {
      switch (it->second.role) {
        case Role::Slave:  // dismissed from the team
        case Role::Electing:
          make_inhibited(r, t, p.ttl);
          break;
        case Role::Inhibited:
          it->second.inhibit_ttl = p.ttl;
          break;
        default:
          break;
      }
      return;
    }
    // Once the master has a fix the notice carries its prediction; sensors
    // whose disc covers that point stop sensing this target.
    if (has_prediction(m) && r.covers(p.predicted)) make_inhibited(r, t, p.ttl);
  }

  static bool has_prediction(const Message& m) {
    const auto& p = std::get<InhibitPayload>(m.payload);
    return std::isfinite(p.predicted.x) && std::isfinite(p.predicted.y);
  }

  void on_invite(SensorNode& r, const Message& m, std::int64_t tick) {
    const auto& p = std::get<InvitePayload>(m.payload);
    make_slave(r, m.target_id, m.from, tick);
    r.awareness[m.target_id] = {m.from, tick + params_.inhibit_ttl};
    if (params_.merge_snapshots) merge(r.id, r.table, p.snapshot);
  }

  void on_handover(SensorNode& r, const Message& m, std::int64_t tick) {
    const auto& p = std::get<HandoverPayload>(m.payload);
    const int t = m.target_id;
    const bool in_team = std::find(p.team.begin(), p.team.end(), r.id) != p.team.end();
    if (r.id == p.successor) {
      RoleState rs;
      rs.role = Role::Master;
      rs.target_id = t;
      rs.fix = p.fix;
      rs.prev_fix = p.prev_fix;
      rs.last_report_tick = tick - 1;
      r.roles[t] = rs;
      r.awareness.erase(t);
      if (params_.merge_snapshots) merge(r.id, r.table, p.snapshot);
      return;
    }
    auto it = r.roles.find(t);
    if (it != r.roles.end() && it->second.role == Role::Master) return;
    r.awareness[t] = {p.successor, tick + p.ttl};
    if (in_team) {
      make_slave(r, t, p.successor, tick);
      if (params_.merge_snapshots) merge(r.id, r.table, p.snapshot);
      return;
    }
    if (it != r.roles.end() || r.covers(p.predicted)) {
      if (r.covers(p.predicted))
        make_inhibited(r, t, p.ttl);
      else
        r.roles.erase(t);
    }
  }

  void broadcast_inhibit(Deployment& dep, int from, int target, std::int64_t tick, int ttl,
                         std::optional<Point2> predicted, std::vector<int> team, Radio& radio, EnergyMeter& meter) {
    Message m;
    m.kind = MessageKind::Inhibit;
    m.from = from;
    m.to = kBroadcast;
    m.target_id = target;
    m.sent_tick = tick;
    InhibitPayload p;
    p.ttl = ttl;
    p.predicted = predicted.value_or(Point2{std::nan(""), std::nan("")});
    p.team = std::move(team);
    m.payload = std::move(p);
    radio.send(dep, std::move(m), energy_, meter);
  }

  void send_invite(Deployment& dep, int from, int to, int target, std::int64_t tick, std::optional<Point2> fix,
                   Point2 predicted, Radio& radio, EnergyMeter& meter) {
    Message m;
    m.kind = MessageKind::SlaveInvite;
    m.from = from;
    m.to = to;
    m.target_id = target;
    m.sent_tick = tick;
    InvitePayload p;
    p.fix = fix;
    p.predicted = predicted;
    if (params_.merge_snapshots) p.snapshot = dep.node(from).table;
    m.payload = std::move(p);
    radio.send(dep, std::move(m), energy_, meter);
  }

  // Decides last tick's election (if any), then lets uninformed covering
  // sensors bid.
  void elect(Deployment& dep, const TargetTruth& target, std::int64_t tick, Radio& radio, EnergyMeter& meter,
             TickObservations& obs) {
    const int t = target.id;
    std::vector<int> electors;
    for (const auto& n : dep.nodes)
      if (n.alive && has_role(n, t, Role::Electing)) electors.push_back(n.id);

    for (int e : electors) {
      auto& node = dep.node(e);
      auto& rs = node.roles[t];
      std::vector<Bid> bids{{e, rs.bid_signal}};
      for (const auto& [id, s] : rs.bids) bids.push_back({id, s});
      const int winner = election_winner(bids);
      if (winner != e) {
        node.roles.erase(t);
        node.awareness[t] = {winner, tick + params_.inhibit_ttl};
        continue;
      }
      RoleState ms;
      ms.role = Role::Master;
      ms.target_id = t;
      ms.election_round = rs.election_round + 1;
      ms.last_report_tick = tick - 1;
      std::vector<Bid> others;
      for (const auto& b : bids)
        if (b.id != e && dep.node(b.id).alive) others.push_back(b);
      others = rank_bids(std::move(others));
      std::vector<int> ranked;
      for (const auto& b : others) ranked.push_back(b.id);
      const auto team = select_team(dep, e, ranked, team_size(), min_spread(node));
      node.roles[t] = ms;
      node.awareness.erase(t);
      for (int s : team) send_invite(dep, e, s, t, tick, std::nullopt, node.position, radio, meter);
      broadcast_inhibit(dep, e, t, tick, params_.inhibit_ttl, std::nullopt, team, radio, meter);
    }

    bool any_cover = false;
    for (auto& n : dep.nodes) {
      if (!n.alive || !n.covers(target.position)) continue;
      any_cover = true;
      if (n.roles.count(t) || knows_live_master(n, t, tick)) continue;
      RoleState rs;
      rs.role = Role::Electing;
      rs.target_id = t;
      rs.bid_signal = signal_strength(n, target.position);
      n.roles[t] = rs;
      Message m;
      m.kind = MessageKind::ElectionBid;
      m.from = n.id;
      m.to = kBroadcast;
      m.target_id = t;
      m.sent_tick = tick;
      m.payload = BidPayload{rs.bid_signal};
      radio.send(dep, std::move(m), energy_, meter);
    }
    if (!any_cover) ++obs.no_coverage;
  }

  void run_master(Deployment& dep, int master, const TargetTruth& target, std::int64_t tick, Radio& radio, Rng& noise,
                  EnergyMeter& meter, TickObservations& obs, TrackRecord& rec) {
    const int t = target.id;
    auto& m = dep.node(master);
    std::vector<int> slaves;
    for (const auto& n : dep.nodes)
      if (n.alive && n.id != master) {
        const auto* rs = role_for(n, t);
        if (rs && rs->role == Role::Slave && rs->master_id == master) slaves.push_back(n.id);
      }

    rec.master_id = master;
    rec.slave_ids = slaves;
    rec.degraded = slaves.size() < team_size();

    std::vector<RangeObservation> readings;
    std::vector<int> reported;
    auto sensed = [&](int id, const RangeObservation& o) {
      obs.active_nodes.insert(id);
      ++obs.sensing_per_target[t];
      obs.participation.push_back({id, o.range});
    };
    const auto own = measure_range(m, target.position, params_.noise_sigma, noise, energy_, meter);
    if (own) {
      sensed(master, *own);
      readings.push_back(*own);
    }
    for (int s : slaves) {
      auto& sn = dep.node(s);
      if (!sn.alive) continue;
      auto o = measure_range(sn, target.position, params_.noise_sigma, noise, energy_, meter);
      if (!o) continue;
      sensed(s, *o);
      if (radio.relay(dep, s, master, MessageKind::SlaveAccept, energy_, meter)) {
        readings.push_back(*o);
        reported.push_back(s);
      }
    }
    if (!m.alive) return;

    auto& ms = m.roles[t];
    if (auto fix = solve_fix(readings, params_.residual_gate())) {
      rec.estimated = bounds_.clamp(fix->position);
      rec.residual = fix->residual;
      rec.anchors_used = fix->anchors_used;
      ms.prev_fix = ms.fix;
      ms.fix = rec.estimated;
    } else {
      rec.anchors_used = readings.size();
      ms.prev_fix.reset();
    }

    Point2 predicted = m.position;
    if (ms.fix) predicted = ms.prev_fix ? predict_linear(*ms.prev_fix, *ms.fix, bounds_) : *ms.fix;
    std::vector<Point2> region;
    if (!rec.estimated && own) {
      region = consistent_region(readings, 3.0 * params_.noise_sigma + 0.5, bounds_);
      if (!region.empty() && ms.fix) {
        // Keep the arc nearest the last fix.
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& q : region) nearest = std::min(nearest, distance(q, *ms.fix));
        std::erase_if(region, [&](const Point2& q) { return distance(q, *ms.fix) > nearest + 4.0; });
      }
      if (!region.empty()) {
        predicted = {0.0, 0.0};
        for (const auto& q : region) predicted = {predicted.x + q.x, predicted.y + q.y};
        predicted = {predicted.x / region.size(), predicted.y / region.size()};
      }
    }

    if (rec.estimated && tick - ms.last_report_tick >= params_.report_interval) {
      ms.last_report_tick = tick;
      if (forward_to_sink(dep, master, radio, energy_, meter)) ++obs.sink_reports_delivered;
      if (!m.alive) return;
    }

    const bool lost = !own;
    if (lost && !rec.estimated) {
      // The master no longer senses the target and has nothing fresh to
      // predict from: release so covering nodes can re-elect.
      broadcast_inhibit(dep, master, t, tick, 0, std::nullopt, {}, radio, meter);
      m.roles.erase(t);
      return;
    }
    const bool due = rec.estimated && handover_due(m, *rec.estimated, threshold_for(m));
    if (lost || due) {
      if (try_handover(dep, master, t, tick, predicted, lost, radio, meter)) {
        rec.handover = true;
        ++obs.handovers;
        return;
      }
      if (lost) {
        // Nobody to hand to and the master itself lost the target: release.
        broadcast_inhibit(dep, master, t, tick, 0, std::nullopt, {}, radio, meter);
        m.roles.erase(t);
        return;
      }
      ++obs.no_successor;
    }
    maintain_team(dep, master, t, tick, predicted, region, slaves, reported, radio, meter);
  }

  std::vector<int> candidates_around(const Deployment& dep, int master, const Point2& p) const {
    std::vector<int> out;
    for (int nb : neighbors(dep, master))
      if (dep.node(nb).covers(p)) out.push_back(nb);
    return out;
  }

  // Team candidates: those holding p inside their interested area when there
  // are enough of them, since they keep coverage longer as the target moves.
  std::vector<int> team_pool(const Deployment& dep, std::vector<int> cands, const Point2& p) const {
    std::vector<int> core;
    for (int c : cands)
      if (dep.node(c).in_interested_area(p)) core.push_back(c);
    return core.size() >= team_size() ? core : cands;
  }

  bool try_handover(Deployment& dep, int master, int t, std::int64_t tick, const Point2& predicted, bool lost,
                    Radio& radio, EnergyMeter& meter) {
    auto& m = dep.node(master);
    auto cands = candidates_around(dep, master, predicted);
    if (cands.empty()) return false;
    const int succ = nearest_of(dep, cands, predicted, 1).front();
    if (!lost && distance(dep.node(succ).position, predicted) >= distance(m.position, predicted)) return false;

    const auto& sn = dep.node(succ);
    std::vector<int> pool;
    for (int c : cands)
      if (c != succ && distance(dep.node(c).position, sn.position) <= sn.tx_range) pool.push_back(c);
    if (!lost && m.covers(predicted) && distance(m.position, sn.position) <= sn.tx_range) pool.push_back(master);
    pool = team_pool(dep, std::move(pool), predicted);
    const auto ranked = nearest_of(dep, pool, predicted, pool.size());
    const auto team = select_team(dep, succ, ranked, team_size(), min_spread(sn));

    const auto& ms = m.roles[t];
    Message msg;
    msg.kind = MessageKind::Handover;
    msg.from = master;
    msg.to = kBroadcast;
    msg.target_id = t;
    msg.sent_tick = tick;
    HandoverPayload p;
    p.successor = succ;
    p.team = team;
    p.fix = ms.fix.value_or(predicted);
    p.prev_fix = ms.prev_fix.value_or(p.fix);
    p.predicted = predicted;
    p.ttl = params_.inhibit_ttl;
    if (params_.merge_snapshots) p.snapshot = m.table;
    msg.payload = std::move(p);
    radio.send(dep, std::move(msg), energy_, meter);

    if (std::find(team.begin(), team.end(), master) != team.end())
      make_slave(m, t, succ, tick);
    else
      m.roles.erase(t);
    m.awareness[t] = {succ, tick + params_.inhibit_ttl};
    return true;
  }

  // Neighbors covering the most of a coarse target region, best first.
  std::vector<int> region_candidates(const Deployment& dep, int master, std::span<const Point2> region) const {
    std::vector<std::pair<int, int>> scored;  // (-covered, id)
    int best = 0;
    for (int nb : neighbors(dep, master)) {
      const auto& n = dep.node(nb);
      const int c = static_cast<int>(std::count_if(region.begin(), region.end(), [&](const Point2& q) { return n.covers(q); }));
      if (c == 0) continue;
      best = std::max(best, c);
      scored.emplace_back(-c, nb);
    }
    std::sort(scored.begin(), scored.end());
    std::vector<int> out;
    for (const auto& [neg, id] : scored)
      if (-neg * 2 >= best) out.push_back(id);
    return out;
  }

  void maintain_team(Deployment& dep, int master, int t, std::int64_t tick, const Point2& predicted,
                     std::span<const Point2> region, const std::vector<int>& slaves, const std::vector<int>& reported, Radio& radio,
                     EnergyMeter& meter) {
    std::vector<int> ranked;
    std::vector<int> covering;
    if (!region.empty()) {
      ranked = region_candidates(dep, master, region);
      covering = ranked;
    } else {
      covering = candidates_around(dep, master, predicted);
      const auto cands = team_pool(dep, covering, predicted);
      ranked = nearest_of(dep, cands, predicted, cands.size());
    }
    // Keep the current team while every member reported, it still covers the
    // prediction, is as full as coverage allows, and stays well conditioned.
    const auto& mn = dep.node(master);
    bool keep = slaves.size() == std::min(team_size(), covering.size()) && reported.size() == slaves.size();
    std::vector<Point2> pts{mn.position};
    for (int s : slaves) {
      keep = keep && std::find(covering.begin(), covering.end(), s) != covering.end();
      pts.push_back(dep.node(s).position);
    }
    keep = keep && (pts.size() < 3 || anchor_spread(pts) >= min_spread(mn));
    const auto desired = keep ? slaves : select_team(dep, master, ranked, team_size(), min_spread(mn));
    const auto& ms = mn.roles.at(t);
    for (int id : desired)
      if (std::find(slaves.begin(), slaves.end(), id) == slaves.end())
        send_invite(dep, master, id, t, tick, ms.fix, predicted, radio, meter);
    broadcast_inhibit(dep, master, t, tick, params_.inhibit_ttl, predicted, desired, radio, meter);
  }

  ProtocolParams params_;
  EnergyModel energy_;
  FieldBounds bounds_;
};

// All-awake comparator: every covering sensor ranges the target each tick and
// forwards its reading to the sink, which fuses whatever arrives.
inline TrackRecord track_all_awake(Deployment& dep, const TargetTruth& target, std::int64_t tick,
                                   const ProtocolParams& params, Radio& radio, Rng& noise, const EnergyModel& energy,
                                   const FieldBounds& bounds, EnergyMeter& meter, TickObservations& obs) {
  const double noise_sigma = params.noise_sigma;
  TrackRecord rec;
  rec.target_id = target.id;
  rec.tick = tick;
  rec.true_pos = target.position;
  std::vector<RangeObservation> arrived;
  bool any_cover = false;
  for (auto& n : dep.nodes) {
    if (!n.alive) continue;
    auto o = measure_range(n, target.position, noise_sigma, noise, energy, meter);
    if (!o) continue;
    any_cover = true;
    obs.active_nodes.insert(n.id);
    ++obs.sensing_per_target[target.id];
    obs.participation.push_back({n.id, o->range});
    if (forward_to_sink(dep, n.id, radio, energy, meter)) {
      arrived.push_back(*o);
      rec.slave_ids.push_back(n.id);
      ++obs.sink_reports_delivered;
    }
  }
  if (!any_cover) ++obs.no_coverage;
  if (auto fix = solve_fix(arrived, params.residual_gate())) {
    rec.estimated = bounds.clamp(fix->position);
    rec.residual = fix->residual;
    rec.anchors_used = fix->anchors_used;
  } else {
    rec.anchors_used = arrived.size();
  }
  return rec;
}

}  // namespace wsntrack
