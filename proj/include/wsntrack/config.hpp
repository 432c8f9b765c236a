#pragma once

// Line-oriented scenario files:
//
//   # comment
//   seed = 7
//   nodes.count = 200
//   target.0.model = rwp
//
// Keys are documented in docs/config.md. Unknown keys and malformed lines are
// errors that name the offending line.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wsntrack/engine.hpp"
#include "wsntrack/error.hpp"

namespace wsntrack {

class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& what)
      : Error(ErrorCode::ConfigParse, line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw std::invalid_argument("expected a number, got '" + std::string(v) + "'");
  return out;
}

template <typename Int>
Int parse_int(std::string_view v) {
  Int out = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw std::invalid_argument("expected an integer, got '" + std::string(v) + "'");
  return out;
}

inline bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("expected a boolean, got '" + std::string(v) + "'");
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(sep, start);
    const auto piece = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!piece.empty()) out.push_back(piece);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline MobilityModel parse_model(std::string_view v) {
  if (v == "rwp" || v == "random_waypoint") return MobilityModel::RandomWaypoint;
  if (v == "gm" || v == "gauss_markov") return MobilityModel::GaussMarkov;
  if (v == "linear") return MobilityModel::Linear;
  throw std::invalid_argument("unknown mobility model '" + std::string(v) + "'");
}

inline void set_target_key(ScenarioConfig& c, std::string_view rest, std::string_view v) {
  const auto dot = rest.find('.');
  if (dot == std::string_view::npos) throw std::invalid_argument("expected target.<index>.<field>");
  const auto idx = parse_int<int>(rest.substr(0, dot));
  if (idx < 0 || idx > 1000) throw std::invalid_argument("target index out of range");
  if (static_cast<std::size_t>(idx) >= c.targets.size()) c.targets.resize(static_cast<std::size_t>(idx) + 1);
  auto& t = c.targets[static_cast<std::size_t>(idx)];
  const auto f = rest.substr(dot + 1);
  if (f == "model") t.model = parse_model(v);
  else if (f == "x") t.start.x = parse_double(v);
  else if (f == "y") t.start.y = parse_double(v);
  else if (f == "vx") t.velocity.vx = parse_double(v);
  else if (f == "vy") t.velocity.vy = parse_double(v);
  else if (f == "speed_min") t.rwp.speed_min = parse_double(v);
  else if (f == "speed_max") t.rwp.speed_max = parse_double(v);
  else if (f == "pause_min") t.rwp.pause_min = parse_int<int>(v);
  else if (f == "pause_max") t.rwp.pause_max = parse_int<int>(v);
  else if (f == "alpha") t.gm.alpha = parse_double(v);
  else if (f == "mean_speed") t.gm.mean_speed = t.gm.speed = parse_double(v);
  else if (f == "mean_direction") t.gm.mean_direction = t.gm.direction = parse_double(v);
  else if (f == "sigma_speed") t.gm.sigma_speed = parse_double(v);
  else if (f == "sigma_direction") t.gm.sigma_direction = parse_double(v);
  else throw std::invalid_argument("unknown target field '" + std::string(f) + "'");
}

}  // namespace detail

// Applies one key; throws std::invalid_argument on unknown keys or bad values.
inline void set_config_key(ScenarioConfig& c, std::string_view key, std::string_view v) {
  using namespace detail;
  auto& d = c.deployment;
  auto& e = c.energy;
  auto& p = c.protocol;
  if (key.starts_with("target.")) return set_target_key(c, key.substr(7), v);
  if (key == "seed") c.seed = parse_int<std::uint64_t>(v);
  else if (key == "horizon") c.horizon = parse_int<std::int64_t>(v);
  else if (key == "field.width") d.bounds.width = parse_double(v);
  else if (key == "field.height") d.bounds.height = parse_double(v);
  else if (key == "nodes.count") d.node_count = parse_int<int>(v);
  else if (key == "nodes.layout") {
    if (v == "uniform") d.layout = Layout::UniformRandom;
    else if (v == "grid") d.layout = Layout::Grid;
    else throw std::invalid_argument("nodes.layout must be uniform or grid");
  } else if (key == "sensing_range") d.sensing_range = parse_double(v);
  else if (key == "interested_fraction") d.interested_fraction = parse_double(v);
  else if (key == "tx_range") d.tx_range = parse_double(v);
  else if (key == "sink.x") d.sink.x = parse_double(v);
  else if (key == "sink.y") d.sink.y = parse_double(v);
  else if (key == "sink.range") d.sink_range = parse_double(v);
  else if (key == "energy.battery") d.battery = parse_double(v);
  else if (key == "energy.sense") e.e_sense = parse_double(v);
  else if (key == "energy.tx_fixed") e.e_tx_fixed = parse_double(v);
  else if (key == "energy.tx_dist") e.e_tx_dist = parse_double(v);
  else if (key == "energy.rx") e.e_rx = parse_double(v);
  else if (key == "energy.idle") e.e_idle = parse_double(v);
  else if (key == "energy.sleep") e.e_sleep = parse_double(v);
  else if (key == "noise_sigma") p.noise_sigma = parse_double(v);
  else if (key == "slaves_per_target") p.slaves_per_target = parse_int<int>(v);
  else if (key == "inhibit_ttl") p.inhibit_ttl = parse_int<int>(v);
  else if (key == "handover_threshold") p.handover_threshold = parse_double(v);
  else if (key == "report_interval") p.report_interval = parse_int<int>(v);
  else if (key == "max_residual") p.max_residual = parse_double(v);
  else if (key == "master_timeout") p.master_timeout = parse_int<int>(v);
  else if (key == "gossip.interval") c.gossip_interval = parse_int<int>(v);
  else if (key == "gossip.sources") {
    if (v == "participants") c.gossip_sources = GossipSources::Participants;
    else if (v == "all") c.gossip_sources = GossipSources::All;
    else throw std::invalid_argument("gossip.sources must be participants or all");
  } else if (key == "failure.p") c.failure_p = parse_double(v);
  else if (key == "failure.fraction") c.failure_fraction = parse_double(v);
  else if (key == "failure.schedule") {
    c.failure_schedule.clear();
    for (auto item : split(v, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string_view::npos) throw std::invalid_argument("failure.schedule expects tick:node pairs");
      c.failure_schedule.push_back({parse_int<std::int64_t>(trim(item.substr(0, colon))),
                                    parse_int<int>(trim(item.substr(colon + 1)))});
    }
  } else if (key == "mode.baseline_all_awake") c.baseline_all_awake = parse_bool(v);
  else if (key == "mode.piggyback") c.piggyback = parse_bool(v);
  else if (key == "replications") c.replications = parse_int<int>(v);
  else if (key == "invariants.check") c.check_invariants = parse_bool(v);
  else throw std::invalid_argument("unknown key '" + std::string(key) + "'");
}

// Applies a "key=value" override (line 0 in error messages).
inline void apply_override(ScenarioConfig& c, std::string_view kv) {
  const auto eq = kv.find('=');
  if (eq == std::string_view::npos) throw ConfigError(0, "override '" + std::string(kv) + "' is not key=value");
  try {
    set_config_key(c, detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)));
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(0, "override '" + std::string(kv) + "': " + ex.what());
  }
}

// Sink defaults to the field center with a reach of one radio hop, unless
// the file sets it.
inline ScenarioConfig default_config() {
  ScenarioConfig c;
  c.deployment.sink = {c.deployment.bounds.width / 2.0, c.deployment.bounds.height / 2.0};
  c.deployment.sink_range = c.deployment.tx_range;
  return c;
}

inline ScenarioConfig parse_config(std::istream& in) {
  ScenarioConfig c = default_config();
  bool sink_x = false, sink_y = false, sink_range = false;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line, "expected 'key = value'");
    const auto key = detail::trim(s.substr(0, eq));
    const auto value = detail::trim(s.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(line, "empty key or value");
    for (char ch : key)
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '_'))
        throw ConfigError(line, "malformed key '" + std::string(key) + "'");
    try {
      set_config_key(c, key, value);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(line, ex.what());
    }
    sink_x |= key == "sink.x";
    sink_y |= key == "sink.y";
    sink_range |= key == "sink.range";
  }
  if (!sink_x) c.deployment.sink.x = c.deployment.bounds.width / 2.0;
  if (!sink_y) c.deployment.sink.y = c.deployment.bounds.height / 2.0;
  if (!sink_range) c.deployment.sink_range = c.deployment.tx_range;
  return c;
}

inline ScenarioConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config '" + path + "'");
  return parse_config(in);
}

}  // namespace wsntrack
