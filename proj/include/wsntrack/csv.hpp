#pragma once

// CSV and summary writers. Numbers use 9 significant digits via to_chars, so
// output is independent of the process locale.

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <system_error>

#include "wsntrack/engine.hpp"

namespace wsntrack {

inline std::string fmt(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 9);
  if (ec != std::errc()) return "nan";
  return std::string(buf, p);
}

inline std::string join_ids(const std::vector<int>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(ids[i]);
  }
  return out;
}

inline constexpr const char* kTraceHeader =
    "tick,target_id,true_x,true_y,est_x,est_y,error,residual,master_id,slave_ids,anchors_used,loss_flag";
inline constexpr const char* kMetricsHeader =
    "tick,active_sensors,msgs_election,msgs_invite,msgs_inhibit,msgs_handover,msgs_table,msgs_sink,energy_tick,"
    "energy_cum,alive";

inline void write_trace(std::ostream& os, const std::vector<TrackRecord>& records) {
  os << kTraceHeader << '\n';
  for (const auto& r : records) {
    os << r.tick << ',' << r.target_id << ',' << fmt(r.true_pos.x) << ',' << fmt(r.true_pos.y) << ',';
    if (r.estimated)
      os << fmt(r.estimated->x) << ',' << fmt(r.estimated->y) << ',' << fmt(r.error()) << ',' << fmt(r.residual);
    else
      os << ",,,";
    os << ',' << r.master_id << ',' << join_ids(r.slave_ids) << ',' << r.anchors_used << ',' << (r.loss() ? 1 : 0)
       << '\n';
  }
}

inline void write_metrics(std::ostream& os, const std::vector<TickMetrics>& rows) {
  os << kMetricsHeader << '\n';
  for (const auto& m : rows) {
    const auto c = [&](MessageKind k) { return m.messages[static_cast<std::size_t>(k)]; };
    os << m.tick << ',' << m.active_sensors << ',' << c(MessageKind::ElectionBid) << ','
       << c(MessageKind::SlaveInvite) + c(MessageKind::SlaveAccept) << ',' << c(MessageKind::Inhibit) << ','
       << c(MessageKind::Handover) << ',' << c(MessageKind::TableDistribute) << ',' << c(MessageKind::SinkReport) << ','
       << fmt(m.energy_tick) << ',' << fmt(m.energy_cum) << ',' << m.alive << '\n';
  }
}

inline void write_summary(std::ostream& os, const RunSummary& s, const std::string& prefix = "") {
  const auto kv = [&](const char* k, const std::string& v) { os << prefix << k << '=' << v << '\n'; };
  kv("mean_error", fmt(s.mean_error));
  kv("max_error", fmt(s.max_error));
  kv("fixes", std::to_string(s.fixes));
  kv("target_ticks", std::to_string(s.target_ticks));
  kv("loss_fraction", fmt(s.loss_fraction));
  kv("total_energy", fmt(s.total_energy));
  kv("initial_battery", fmt(s.initial_battery));
  kv("final_battery", fmt(s.final_battery));
  kv("first_death_tick", std::to_string(s.first_death_tick));
  kv("half_death_tick", std::to_string(s.half_death_tick));
  kv("messages_total", std::to_string(s.messages_total));
  kv("handovers", std::to_string(s.handovers));
  kv("no_successor_ticks", std::to_string(s.no_successor_ticks));
  kv("no_coverage_ticks", std::to_string(s.no_coverage_ticks));
  kv("sink_reports", std::to_string(s.sink_reports));
  kv("master_violations", std::to_string(s.master_violations));
  kv("inhibition_violations", std::to_string(s.inhibition_violations));
  kv("gossip.rounds_to_convergence", std::to_string(s.gossip.rounds_to_convergence));
  kv("gossip.messages_sent", std::to_string(s.gossip.messages_sent));
  kv("gossip.entries_produced", std::to_string(s.gossip.entries_produced));
  kv("gossip.entries_delivered_to_sink", std::to_string(s.gossip.entries_delivered_to_sink));
  kv("gossip.entries_lost", std::to_string(s.gossip.entries_lost));
  kv("gossip.lost_after_replication", std::to_string(s.lost_after_replication));
}

inline constexpr const char* kComparisonHeader =
    "seed,a_energy,b_energy,energy_delta,a_mean_error,b_mean_error,error_delta,a_loss_fraction,b_loss_fraction,"
    "a_entries_lost,b_entries_lost";

inline void write_comparison(std::ostream& os, const ComparisonResult& r) {
  os << kComparisonHeader << '\n';
  for (const auto& p : r.runs) {
    os << p.seed << ',' << fmt(p.a.total_energy) << ',' << fmt(p.b.total_energy) << ','
       << fmt(p.b.total_energy - p.a.total_energy) << ',' << fmt(p.a.mean_error) << ',' << fmt(p.b.mean_error) << ','
       << fmt(p.b.mean_error - p.a.mean_error) << ',' << fmt(p.a.loss_fraction) << ',' << fmt(p.b.loss_fraction)
       << ',' << p.a.gossip.entries_lost << ',' << p.b.gossip.entries_lost << '\n';
  }
}

inline void write_comparison_summary(std::ostream& os, const ComparisonResult& r) {
  os << "replications=" << r.runs.size() << '\n';
  os << "energy_delta_mean=" << fmt(r.energy_delta.mean) << '\n';
  os << "energy_delta_ci95=" << fmt(r.energy_delta.lower()) << ':' << fmt(r.energy_delta.upper()) << '\n';
  os << "error_delta_mean=" << fmt(r.error_delta.mean) << '\n';
  os << "error_delta_ci95=" << fmt(r.error_delta.lower()) << ':' << fmt(r.error_delta.upper()) << '\n';
  os << "energy_ratio=" << fmt(r.energy_ratio) << '\n';
  os << "error_ratio=" << fmt(r.error_ratio) << '\n';
}

inline void write_phase(std::ostream& os, const std::vector<PhasePoint>& pts) {
  os << "density,probability,trials\n";
  for (const auto& p : pts) os << fmt(p.density) << ',' << fmt(p.probability) << ',' << p.trials << '\n';
}

}  // namespace wsntrack
