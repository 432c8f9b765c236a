#pragma once

// Deterministic synchronous-round simulator. Each tick runs, in order:
//   1. delivery of last tick's messages (table merges, protocol messages)
//   2. target motion
//   3. tracking protocol (elect, recruit, fix, hand over, timers)
//   4. Active Update (collect, distribute, sink flush)
//   5. failure injection
//   6. idle/sleep charges and metrics capture

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "wsntrack/active_update.hpp"
#include "wsntrack/assignment.hpp"
#include "wsntrack/mobility.hpp"
#include "wsntrack/network.hpp"
#include "wsntrack/radio.hpp"
#include "wsntrack/rng.hpp"
#include "wsntrack/tracking.hpp"

namespace wsntrack {

struct TargetConfig {
  MobilityModel model = MobilityModel::Linear;
  Point2 start{50.0, 50.0};
  Velocity velocity;  // Linear
  RandomWaypointParams rwp;
  GaussMarkovParams gm;
};

struct FailureEvent {
  std::int64_t tick = 0;
  int node = 0;
};

enum class GossipSources { Participants, All };

struct ScenarioConfig {
  std::uint64_t seed = 1;
  std::int64_t horizon = 100;
  DeploymentParams deployment;
  EnergyModel energy;
  std::vector<TargetConfig> targets;
  ProtocolParams protocol;
  double failure_p = 0.0;         // per node per tick
  double failure_fraction = 0.0;  // scheduled: this fraction of nodes dies at uniform random ticks
  std::vector<FailureEvent> failure_schedule;
  bool baseline_all_awake = false;
  bool piggyback = true;
  int gossip_interval = 10;
  GossipSources gossip_sources = GossipSources::Participants;
  int replications = 1;
  bool check_invariants = true;

  void validate() const {
    wsntrack::validate(deployment);
    if (deployment.node_count < 1) throw Error(ErrorCode::InvalidConfig, "nodes.count must be >= 1");
    energy.validate();
    if (horizon < 1) throw Error(ErrorCode::InvalidConfig, "horizon must be >= 1");
    // Every pair of sensors covering a common point must hear each other, so
    // elections and inhibit notices reach all contenders in one hop.
    if (deployment.tx_range < 2.0 * deployment.sensing_range)
      throw Error(ErrorCode::InvalidConfig, "tx_range must be >= 2 * sensing_range");
    if (protocol.slaves_per_target < 2 || protocol.slaves_per_target > 3)
      throw Error(ErrorCode::InvalidConfig, "slaves_per_target must be 2 or 3");
    if (protocol.inhibit_ttl < 1) throw Error(ErrorCode::InvalidConfig, "inhibit_ttl must be >= 1");
    if (protocol.report_interval < 1) throw Error(ErrorCode::InvalidConfig, "report_interval must be >= 1");
    if (protocol.noise_sigma < 0.0) throw Error(ErrorCode::InvalidConfig, "noise_sigma must be >= 0");
    if (gossip_interval < 1) throw Error(ErrorCode::InvalidConfig, "gossip_interval must be >= 1");
    if (failure_p < 0.0 || failure_p > 1.0) throw Error(ErrorCode::InvalidConfig, "failure.p must lie in [0, 1]");
    if (failure_fraction < 0.0 || failure_fraction > 1.0)
      throw Error(ErrorCode::InvalidConfig, "failure.fraction must lie in [0, 1]");
    if (replications < 1) throw Error(ErrorCode::InvalidConfig, "replications must be >= 1");
    for (const auto& f : failure_schedule)
      if (f.node < 0 || f.node >= deployment.node_count || f.tick < 0)
        throw Error(ErrorCode::InvalidConfig, "failure.schedule entry out of range");
    for (const auto& t : targets) {
      if (!deployment.bounds.contains(t.start)) throw Error(ErrorCode::InvalidConfig, "target start outside field");
      if (t.model == MobilityModel::RandomWaypoint &&
          (t.rwp.speed_min <= 0.0 || t.rwp.speed_max < t.rwp.speed_min || t.rwp.pause_min < 0 ||
           t.rwp.pause_max < t.rwp.pause_min))
        throw Error(ErrorCode::InvalidConfig, "invalid random waypoint parameters");
      if (t.model == MobilityModel::GaussMarkov && (t.gm.alpha < 0.0 || t.gm.alpha > 1.0))
        throw Error(ErrorCode::InvalidConfig, "gauss-markov alpha must lie in [0, 1]");
    }
  }
};

struct TickMetrics {
  std::int64_t tick = 0;
  std::vector<std::optional<double>> target_error;  // per target; nullopt = tracking loss
  std::int64_t active_sensors = 0;
  MessageCounts messages{};
  double energy_tick = 0.0;
  double energy_cum = 0.0;
  std::int64_t alive = 0;
  std::int64_t master_violations = 0;      // targets with > 1 master at end of tick
  std::int64_t inhibition_violations = 0;  // targets ranged by > 1 + slaves_per_target sensors under a master
};

struct RunSummary {
  double mean_error = 0.0;
  double max_error = 0.0;
  std::int64_t fixes = 0;
  std::int64_t target_ticks = 0;
  double loss_fraction = 0.0;
  double total_energy = 0.0;
  double initial_battery = 0.0;
  double final_battery = 0.0;
  std::int64_t first_death_tick = -1;
  std::int64_t half_death_tick = -1;
  GossipStats gossip;
  std::int64_t lost_after_replication = 0;
  std::int64_t messages_total = 0;
  std::int64_t handovers = 0;
  std::int64_t no_successor_ticks = 0;
  std::int64_t no_coverage_ticks = 0;
  std::int64_t master_violations = 0;
  std::int64_t inhibition_violations = 0;
  std::int64_t sink_reports = 0;
};

struct RunResult {
  std::vector<TickMetrics> metrics;
  std::vector<TrackRecord> records;
  RunSummary summary;
};

inline std::size_t kind_index(MessageKind k) { return static_cast<std::size_t>(k); }

// Recomputes the error/loss/energy aggregates of a summary from its rows.
inline void aggregate_metrics(const std::vector<TickMetrics>& rows, RunSummary& s) {
  double sum = 0.0;
  s.fixes = 0;
  s.target_ticks = 0;
  s.max_error = 0.0;
  s.total_energy = 0.0;
  s.messages_total = 0;
  s.master_violations = 0;
  s.inhibition_violations = 0;
  for (const auto& m : rows) {
    for (const auto& e : m.target_error) {
      ++s.target_ticks;
      if (!e) continue;
      ++s.fixes;
      sum += *e;
      s.max_error = std::max(s.max_error, *e);
    }
    s.total_energy += m.energy_tick;
    for (auto c : m.messages) s.messages_total += c;
    s.master_violations += m.master_violations;
    s.inhibition_violations += m.inhibition_violations;
  }
  s.mean_error = s.fixes ? sum / static_cast<double>(s.fixes) : 0.0;
  s.loss_fraction =
      s.target_ticks ? static_cast<double>(s.target_ticks - s.fixes) / static_cast<double>(s.target_ticks) : 0.0;
}

class Simulation {
 public:
  explicit Simulation(ScenarioConfig config)
      : cfg_(std::move(config)),
        protocol_(protocol_params(cfg_), cfg_.energy, cfg_.deployment.bounds),
        noise_(cfg_.seed, stream::kNoise),
        failure_rng_(cfg_.seed, stream::kFailure),
        value_rng_(cfg_.seed, stream::kGossipValue) {
    cfg_.validate();
    Rng deploy_rng(cfg_.seed, stream::kDeploy);
    dep_ = deploy(cfg_.deployment, deploy_rng);
    for (std::size_t i = 0; i < cfg_.targets.size(); ++i) {
      target_rngs_.emplace_back(cfg_.seed, stream::kTargetBase + i);
      targets_.push_back(initial_state(cfg_.targets[i], cfg_.deployment.bounds, target_rngs_.back()));
    }
    schedule_ = cfg_.failure_schedule;
    if (cfg_.failure_fraction > 0.0) {
      Rng srng(cfg_.seed, stream::kFailureSchedule);
      std::vector<int> ids(dep_.nodes.size());
      std::iota(ids.begin(), ids.end(), 0);
      std::shuffle(ids.begin(), ids.end(), srng.engine());
      const auto count = static_cast<std::size_t>(std::llround(cfg_.failure_fraction * static_cast<double>(ids.size())));
      for (std::size_t i = 0; i < count && i < ids.size(); ++i)
        schedule_.push_back({srng.uniform_int(1, std::max<std::int64_t>(1, cfg_.horizon - 1)), ids[i]});
    }
    std::stable_sort(schedule_.begin(), schedule_.end(), [](const auto& a, const auto& b) { return a.tick < b.tick; });
    flushed_.assign(dep_.nodes.size(), {});
    for (const auto& n : dep_.nodes) initial_battery_ += n.battery;
  }

  static ProtocolParams protocol_params(const ScenarioConfig& c) {
    ProtocolParams p = c.protocol;
    p.merge_snapshots = c.piggyback;
    return p;
  }

  const Deployment& deployment() const { return dep_; }
  Deployment& deployment() { return dep_; }
  const Sink& sink() const { return sink_; }
  const GossipLedger& ledger() const { return ledger_; }
  const ScenarioConfig& config() const { return cfg_; }
  std::int64_t tick() const { return tick_; }

  // Advances one tick and returns its metrics row; track records are appended.
  TickMetrics step(std::vector<TrackRecord>& records) {
    const std::int64_t t = tick_;
    meter_.start_tick();
    radio_.reset_counts();

    // 1. delivery
    const auto deliveries = radio_.deliver(dep_, cfg_.energy, meter_);
    if (cfg_.piggyback) merge_deliveries(dep_, deliveries, &ledger_);
    if (!cfg_.baseline_all_awake) protocol_.handle_deliveries(dep_, deliveries, t);

    // 2. motion
    if (t > 0)
      for (std::size_t i = 0; i < targets_.size(); ++i)
        targets_[i] = wsntrack::step(targets_[i], cfg_.deployment.bounds, target_rngs_[i]);

    // 3. protocol
    TickObservations obs;
    TickMetrics row;
    row.tick = t;
    std::vector<int> had_master(targets_.size(), -1);
    for (std::size_t i = 0; i < targets_.size(); ++i) {
      const TargetTruth truth{static_cast<int>(i), targets_[i].position};
      TrackRecord rec = cfg_.baseline_all_awake
                            ? track_all_awake(dep_, truth, t, cfg_.protocol, radio_, noise_, cfg_.energy,
                                              cfg_.deployment.bounds, meter_, obs)
                            : protocol_.track(dep_, truth, t, radio_, noise_, meter_, obs);
      had_master[i] = rec.master_id;
      row.target_error.push_back(rec.estimated ? std::optional<double>(rec.error()) : std::nullopt);
      records.push_back(std::move(rec));
    }
    if (!cfg_.baseline_all_awake) protocol_.expire(dep_, t);

    // 4. Active Update
    gossip_phase(t, obs);

    // 5. failures
    while (next_failure_ < schedule_.size() && schedule_[next_failure_].tick <= t) {
      inject_failure(dep_, schedule_[next_failure_].node);
      ++next_failure_;
    }
    if (cfg_.failure_p > 0.0) inject_failure(dep_, cfg_.failure_p, failure_rng_);

    // 6. accounting
    for (auto& n : dep_.nodes) {
      if (!n.alive) continue;
      meter_.add(charge(n, asleep(n) ? cfg_.energy.e_sleep : cfg_.energy.e_idle));
    }
    row.active_sensors = static_cast<std::int64_t>(obs.active_nodes.size());
    row.messages = radio_.sent();
    row.energy_tick = meter_.tick;
    row.energy_cum = meter_.total;
    row.alive = static_cast<std::int64_t>(dep_.alive_count());
    if (cfg_.check_invariants && !cfg_.baseline_all_awake) {
      for (std::size_t i = 0; i < targets_.size(); ++i) {
        int masters = 0;
        for (const auto& n : dep_.nodes)
          if (n.alive && has_role(n, static_cast<int>(i), Role::Master)) ++masters;
        if (masters > 1) ++row.master_violations;
        const auto it = obs.sensing_per_target.find(static_cast<int>(i));
        const int sensing = it == obs.sensing_per_target.end() ? 0 : it->second;
        if (had_master[i] >= 0 && sensing > 1 + cfg_.protocol.slaves_per_target) ++row.inhibition_violations;
      }
    }
    handovers_ += obs.handovers;
    no_successor_ += obs.no_successor;
    no_coverage_ += obs.no_coverage;
    sink_reports_ += obs.sink_reports_delivered;
    const auto dead = static_cast<std::int64_t>(dep_.nodes.size()) - row.alive;
    if (dead >= 1 && first_death_ < 0) first_death_ = t;
    if (2 * dead >= static_cast<std::int64_t>(dep_.nodes.size()) && half_death_ < 0) half_death_ = t;
    if (row.messages[kind_index(MessageKind::TableDistribute)] > 0) last_distribute_tick_ = t;
    ++tick_;
    return row;
  }

  RunResult run() {
    RunResult out;
    out.metrics.reserve(static_cast<std::size_t>(cfg_.horizon));
    for (std::int64_t i = 0; i < cfg_.horizon; ++i) out.metrics.push_back(step(out.records));
    out.summary = summarize(out.metrics);
    return out;
  }

  RunSummary summarize(const std::vector<TickMetrics>& rows) const {
    RunSummary s;
    aggregate_metrics(rows, s);
    s.initial_battery = initial_battery_;
    for (const auto& n : dep_.nodes) s.final_battery += n.battery;
    s.first_death_tick = first_death_;
    s.half_death_tick = half_death_;
    s.gossip = ledger_.stats(dep_, sink_);
    s.gossip.messages_sent = gossip_messages_;
    if (ledger_.last_collect_tick() >= 0 && last_distribute_tick_ < tick_ - 1)
      s.gossip.rounds_to_convergence = std::max<std::int64_t>(0, last_distribute_tick_ - ledger_.last_collect_tick());
    s.lost_after_replication = ledger_.lost_after_replication(dep_, sink_);
    s.handovers = handovers_;
    s.no_successor_ticks = no_successor_;
    s.no_coverage_ticks = no_coverage_;
    s.sink_reports = sink_reports_;
    return s;
  }

  const MobilityState& target(std::size_t i) const { return targets_[i]; }

 private:
  static MobilityState initial_state(const TargetConfig& tc, const FieldBounds& bounds, Rng& rng) {
    switch (tc.model) {
      case MobilityModel::Linear:
        return make_linear(tc.start, tc.velocity);
      case MobilityModel::GaussMarkov:
        return make_gauss_markov(tc.start, tc.gm);
      case MobilityModel::RandomWaypoint:
        break;
    }
    return start_random_waypoint(tc.start, tc.rwp, bounds, rng);
  }

  bool asleep(const SensorNode& n) const {
    if (cfg_.baseline_all_awake || n.roles.empty()) return false;
    return std::all_of(n.roles.begin(), n.roles.end(), [](const auto& kv) { return kv.second.role == Role::Inhibited; });
  }

  void gossip_phase(std::int64_t t, const TickObservations& obs) {
    if (t % cfg_.gossip_interval == 0) {
      std::map<int, double> values;
      if (cfg_.gossip_sources == GossipSources::All) {
        for (const auto& n : dep_.nodes)
          if (n.alive) values[n.id] = value_rng_.uniform01();
      } else {
        for (const auto& p : obs.participation) values[p.node] = p.value;
      }
      for (const auto& [id, v] : values) {
        auto& n = dep_.node(id);
        if (!n.alive) continue;
        collect_value(n, t, v, cfg_.energy, meter_);
        if (!n.alive) continue;
        ledger_.produced(id, n.table.entries[id].seq, t);
      }
    }
    if (cfg_.piggyback) gossip_messages_ += distribute_all(dep_, t, radio_, cfg_.energy, meter_);
    // Sink-range nodes flush whenever their table holds something they have
    // not flushed before.
    for (auto& n : dep_.nodes) {
      if (!n.alive || !dep_.in_sink_range(n)) continue;
      auto& seen = flushed_[static_cast<std::size_t>(n.id)];
      bool fresh = false;
      for (const auto& [id, e] : n.table.entries) {
        auto it = seen.find(id);
        if (it == seen.end() || it->second < e.seq) {
          fresh = true;
          seen[id] = e.seq;
        }
      }
      if (!fresh) continue;
      if (!cfg_.piggyback) n.table.changed = false;
      flush_to_sink(dep_, n.id, sink_, radio_, cfg_.energy, meter_);
      ++gossip_messages_;
    }
  }

  ScenarioConfig cfg_;
  Deployment dep_;
  TrackingProtocol protocol_;
  Radio radio_;
  EnergyMeter meter_;
  Sink sink_;
  GossipLedger ledger_;
  Rng noise_;
  Rng failure_rng_;
  Rng value_rng_;
  std::vector<Rng> target_rngs_;
  std::vector<MobilityState> targets_;
  std::vector<FailureEvent> schedule_;
  std::size_t next_failure_ = 0;
  std::vector<std::map<int, std::int64_t>> flushed_;  // per node: id -> highest seq flushed
  std::int64_t tick_ = 0;
  double initial_battery_ = 0.0;
  std::int64_t first_death_ = -1;
  std::int64_t half_death_ = -1;
  std::int64_t last_distribute_tick_ = -1;
  std::int64_t gossip_messages_ = 0;
  std::int64_t handovers_ = 0;
  std::int64_t no_successor_ = 0;
  std::int64_t no_coverage_ = 0;
  std::int64_t sink_reports_ = 0;
};

inline RunResult run(const ScenarioConfig& config) { return Simulation(config).run(); }

// ---------------------------------------------------------------------------
// Paired comparisons

enum class CompareMode { Baseline, Anchors34, Piggyback };

struct PairedRun {
  std::uint64_t seed = 0;
  RunSummary a;
  RunSummary b;
};

struct MeanInterval {
  double mean = 0.0;
  double half_width = 0.0;  // 95% normal approximation
  double lower() const { return mean - half_width; }
  double upper() const { return mean + half_width; }
};

inline MeanInterval mean_interval(const std::vector<double>& xs) {
  MeanInterval mi;
  if (xs.empty()) return mi;
  const double n = static_cast<double>(xs.size());
  mi.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - mi.mean) * (x - mi.mean);
    mi.half_width = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return mi;
}

struct ComparisonResult {
  CompareMode mode = CompareMode::Baseline;
  std::vector<PairedRun> runs;
  MeanInterval energy_delta;  // b - a
  MeanInterval error_delta;   // b - a
  double energy_ratio = 0.0;  // sum(b) / sum(a)
  double error_ratio = 0.0;
};

inline std::pair<ScenarioConfig, ScenarioConfig> comparison_variants(const ScenarioConfig& base, CompareMode mode) {
  ScenarioConfig a = base;
  ScenarioConfig b = base;
  switch (mode) {
    case CompareMode::Baseline:
      a.baseline_all_awake = false;
      b.baseline_all_awake = true;
      break;
    case CompareMode::Anchors34:
      a.protocol.slaves_per_target = 2;
      b.protocol.slaves_per_target = 3;
      break;
    case CompareMode::Piggyback:
      a.piggyback = true;
      b.piggyback = false;
      break;
  }
  return {a, b};
}

// Runs both variants on seeds seed, seed+1, ... (config.replications of them).
// Replications are independent and run concurrently; results are ordered by seed.
inline ComparisonResult run_comparison(const ScenarioConfig& config, CompareMode mode) {
  config.validate();
  const auto [va, vb] = comparison_variants(config, mode);
  std::vector<std::future<PairedRun>> jobs;
  for (int r = 0; r < config.replications; ++r) {
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(r);
    jobs.push_back(std::async(std::launch::async, [seed, va, vb]() {
      ScenarioConfig ca = va;
      ScenarioConfig cb = vb;
      ca.seed = cb.seed = seed;
      return PairedRun{seed, run(ca).summary, run(cb).summary};
    }));
  }
  ComparisonResult out;
  out.mode = mode;
  std::vector<double> de, dr;
  double ea = 0.0, eb = 0.0, ra = 0.0, rb = 0.0;
  for (auto& j : jobs) {
    out.runs.push_back(j.get());
    const auto& p = out.runs.back();
    de.push_back(p.b.total_energy - p.a.total_energy);
    dr.push_back(p.b.mean_error - p.a.mean_error);
    ea += p.a.total_energy;
    eb += p.b.total_energy;
    ra += p.a.mean_error;
    rb += p.b.mean_error;
  }
  out.energy_delta = mean_interval(de);
  out.error_delta = mean_interval(dr);
  out.energy_ratio = ea > 0.0 ? eb / ea : 0.0;
  out.error_ratio = ra > 0.0 ? rb / ra : 0.0;
  return out;
}

// Runs the scenario with piggyback gossip and with direct-to-sink-only
// reporting on the same seed; returns (piggyback, direct) gossip stats.
inline std::pair<GossipStats, GossipStats> measure_loss(const ScenarioConfig& config) {
  auto [a, b] = comparison_variants(config, CompareMode::Piggyback);
  return {run(a).summary.gossip, run(b).summary.gossip};
}

// ---------------------------------------------------------------------------
// Assignment feasibility sweep

struct PhaseParams {
  FieldBounds field;
  int targets = 1;
  int per_target = 3;
  double sensing_range = 10.0;
  std::vector<double> densities;  // sensors per m^2
  int trials = 100;
  std::uint64_t seed = 1;
};

struct PhasePoint {
  double density = 0.0;
  double probability = 0.0;
  int trials = 0;
};

// Targets are drawn before sensors, so trials sharing an Rng seed see nested
// sensor sets as density grows.
inline bool assignment_trial(const PhaseParams& p, double density, Rng& rng) {
  const auto n = static_cast<std::size_t>(std::llround(density * p.field.width * p.field.height));
  std::vector<Point2> targets(static_cast<std::size_t>(p.targets));
  for (auto& t : targets) t = {rng.uniform(0.0, p.field.width), rng.uniform(0.0, p.field.height)};
  std::vector<SensorDisc> sensors(n);
  for (auto& s : sensors) s = {{rng.uniform(0.0, p.field.width), rng.uniform(0.0, p.field.height)}, p.sensing_range};
  return assign_targets(sensors, targets, p.per_target).has_value();
}

inline std::vector<PhasePoint> phase_transition_curve(const PhaseParams& p) {
  if (p.trials < 1) throw Error(ErrorCode::InvalidConfig, "trials must be >= 1");
  std::vector<std::future<PhasePoint>> jobs;
  for (std::size_t i = 0; i < p.densities.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, [&p, i]() {
      const double density = p.densities[i];
      int ok = 0;
      for (int trial = 0; trial < p.trials; ++trial) {
        Rng rng(p.seed, static_cast<std::uint64_t>(trial));
        if (assignment_trial(p, density, rng)) ++ok;
      }
      return PhasePoint{density, static_cast<double>(ok) / p.trials, p.trials};
    }));
  }
  std::vector<PhasePoint> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace wsntrack
