#pragma once

// Sensor field: deployment, isotropic sensing and radio discs, noisy ranging,
// neighbor tables, battery accounting and failure injection.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wsntrack/data_table.hpp"
#include "wsntrack/error.hpp"
#include "wsntrack/geometry.hpp"
#include "wsntrack/mobility.hpp"
#include "wsntrack/rng.hpp"
#include "wsntrack/roles.hpp"

namespace wsntrack {

struct EnergyModel {
  double e_sense = 1.0;
  double e_tx_fixed = 2.0;
  double e_tx_dist = 0.01;  // per m^2
  double e_rx = 1.0;
  double e_idle = 0.1;
  double e_sleep = 0.01;

  double tx_cost(double d) const { return e_tx_fixed + e_tx_dist * d * d; }

  void validate() const {
    for (double c : {e_sense, e_tx_fixed, e_tx_dist, e_rx, e_idle, e_sleep})
      if (!(c >= 0.0)) throw Error(ErrorCode::InvalidConfig, "energy coefficients must be >= 0");
    if (!(e_sleep < e_idle)) throw Error(ErrorCode::InvalidConfig, "energy.sleep must be < energy.idle");
  }
};

// Running energy account: draw this tick and since the start of the run.
struct EnergyMeter {
  double tick = 0.0;
  double total = 0.0;

  void add(double drawn) {
    tick += drawn;
    total += drawn;
  }
  void start_tick() { tick = 0.0; }
};

struct SensorNode {
  int id = 0;
  Point2 position;
  double sensing_range = 10.0;
  double interested_range = 7.0;  // inner "interested" disc; the rest of the sensing disc is the supportive annulus
  double tx_range = 25.0;
  double battery = 10000.0;
  bool alive = true;
  RoleMap roles;
  std::map<int, MasterAwareness> awareness;
  DataTable table;

  bool covers(const Point2& p) const { return distance_sq(position, p) <= sensing_range * sensing_range; }
  bool in_interested_area(const Point2& p) const { return distance(position, p) <= interested_range; }
};

enum class Layout { UniformRandom, Grid };

struct DeploymentParams {
  FieldBounds bounds;
  int node_count = 100;
  Layout layout = Layout::UniformRandom;
  double sensing_range = 10.0;
  double interested_fraction = 0.7;
  double tx_range = 25.0;
  Point2 sink{50.0, 50.0};
  double sink_range = 25.0;
  double battery = 10000.0;
};

struct Deployment {
  std::vector<SensorNode> nodes;
  FieldBounds bounds;
  Layout layout = Layout::UniformRandom;
  Point2 sink;
  double sink_range = 0.0;
  // Static radio adjacency (ids within tx_range, ascending); liveness is
  // filtered at query time.
  std::vector<std::vector<int>> adjacency;

  SensorNode& node(int id) {
    if (id < 0 || static_cast<std::size_t>(id) >= nodes.size())
      throw Error(ErrorCode::UnknownNode, "node " + std::to_string(id));
    return nodes[static_cast<std::size_t>(id)];
  }
  const SensorNode& node(int id) const { return const_cast<Deployment*>(this)->node(id); }

  std::size_t alive_count() const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const auto& n) { return n.alive; }));
  }

  bool in_sink_range(const SensorNode& n) const { return distance(n.position, sink) <= sink_range; }

  void rebuild_adjacency() {
    adjacency.assign(nodes.size(), {});
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (std::size_t j = 0; j < nodes.size(); ++j)
        if (i != j && distance(nodes[i].position, nodes[j].position) <= nodes[i].tx_range)
          adjacency[i].push_back(static_cast<int>(j));
  }
};

inline void validate(const DeploymentParams& p) {
  if (p.node_count < 0) throw Error(ErrorCode::InvalidConfig, "node count must be >= 0");
  if (!(p.bounds.width > 0.0) || !(p.bounds.height > 0.0)) throw Error(ErrorCode::InvalidConfig, "field extents must be > 0");
  if (!(p.sensing_range > 0.0) || !(p.tx_range > 0.0) || !(p.sink_range > 0.0))
    throw Error(ErrorCode::InvalidConfig, "ranges must be > 0");
  if (!(p.interested_fraction > 0.0) || p.interested_fraction > 1.0)
    throw Error(ErrorCode::InvalidConfig, "interested_fraction must lie in (0, 1]");
  if (!(p.battery >= 0.0)) throw Error(ErrorCode::InvalidConfig, "battery must be >= 0");
}

inline Deployment deploy(const DeploymentParams& p, Rng& rng) {
  validate(p);
  if (p.node_count < 1) throw Error(ErrorCode::InvalidConfig, "node count must be >= 1");
  Deployment d;
  d.bounds = p.bounds;
  d.layout = p.layout;
  d.sink = p.sink;
  d.sink_range = p.sink_range;
  d.nodes.reserve(static_cast<std::size_t>(p.node_count));

  const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(p.node_count))));
  for (int i = 0; i < p.node_count; ++i) {
    SensorNode n;
    n.id = i;
    if (p.layout == Layout::Grid) {
      const double cw = p.bounds.width / side;
      const double ch = p.bounds.height / side;
      n.position = {(i % side + 0.5) * cw, (i / side + 0.5) * ch};
    } else {
      n.position = {rng.uniform(0.0, p.bounds.width), rng.uniform(0.0, p.bounds.height)};
    }
    n.sensing_range = p.sensing_range;
    n.interested_range = p.interested_fraction * p.sensing_range;
    n.tx_range = p.tx_range;
    n.battery = p.battery;
    d.nodes.push_back(std::move(n));
  }
  d.rebuild_adjacency();
  return d;
}

inline void kill(SensorNode& node) {
  node.alive = false;
  node.roles.clear();
  node.awareness.clear();
}

// Draws up to `amount` from the battery and returns what was actually drawn.
// A node whose battery reaches zero dies.
inline double charge(SensorNode& node, double amount) {
  if (!node.alive || amount <= 0.0) return 0.0;
  const double drawn = std::min(amount, node.battery);
  node.battery -= drawn;
  if (node.battery <= 0.0) {
    node.battery = 0.0;
    kill(node);
  }
  return drawn;
}

// Noisy range to the target, or nullopt if the target is outside the sensing
// disc. A successful measurement charges e_sense.
inline std::optional<RangeObservation> measure_range(SensorNode& node, const Point2& target, double noise_sigma, Rng& rng,
                                                     const EnergyModel& energy, EnergyMeter& meter) {
  if (!node.alive) throw Error(ErrorCode::NodeDead, "node " + std::to_string(node.id));
  const double d = distance(node.position, target);
  if (d > node.sensing_range) return std::nullopt;
  double r = d;
  if (noise_sigma > 0.0) r = std::max(0.0, d + noise_sigma * rng.normal());
  meter.add(charge(node, energy.e_sense));
  return RangeObservation{node.position, r, noise_sigma};
}

inline constexpr double kSignalEpsilon = 1e-6;  // m^2

// Inverse-square received signal, normalized to 1 at the sensing boundary.
inline double signal_at_distance(double sensing_range, double d) {
  return sensing_range * sensing_range / std::max(d * d, kSignalEpsilon);
}

inline double signal_strength(const SensorNode& node, const Point2& target) {
  if (!node.alive) throw Error(ErrorCode::NodeDead, "node " + std::to_string(node.id));
  const double d = distance(node.position, target);
  if (d > node.sensing_range) throw Error(ErrorCode::OutOfRange, "target outside sensing range");
  return signal_at_distance(node.sensing_range, d);
}

inline std::vector<int> neighbors(const Deployment& d, int node_id) {
  const auto& self = d.node(node_id);
  std::vector<int> out;
  if (!self.alive) return out;
  for (int j : d.adjacency[static_cast<std::size_t>(node_id)])
    if (d.nodes[static_cast<std::size_t>(j)].alive) out.push_back(j);
  return out;
}

// Kills one node immediately.
inline void inject_failure(Deployment& d, int node_id) { kill(d.node(node_id)); }

// Kills each alive node independently with probability p; returns the ids killed.
inline std::vector<int> inject_failure(Deployment& d, double p, Rng& rng) {
  std::vector<int> killed;
  for (auto& n : d.nodes) {
    if (!n.alive) continue;
    if (rng.bernoulli(p)) {
      kill(n);
      killed.push_back(n.id);
    }
  }
  return killed;
}

}  // namespace wsntrack
