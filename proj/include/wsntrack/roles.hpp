#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "wsntrack/geometry.hpp"

namespace wsntrack {

enum class Role { Idle, Electing, Master, Slave, Inhibited };

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::Idle: return "Idle";
    case Role::Electing: return "Electing";
    case Role::Master: return "Master";
    case Role::Slave: return "Slave";
    case Role::Inhibited: return "Inhibited";
  }
  return "?";
}

// A node's role with respect to one target.
struct RoleState {
  Role role = Role::Idle;
  std::optional<int> target_id;
  int inhibit_ttl = 0;
  int election_round = 0;
  int master_id = -1;                   // Slave: whom to report to
  std::int64_t last_master_heard = -1;  // tick of the last traffic from master_id
  double bid_signal = 0.0;              // Electing: the signal this node bid with
  std::vector<std::pair<int, double>> bids;  // Electing: bids heard this round, (id, signal)

  // Master-side track memory; carried to the successor on handover.
  std::optional<Point2> fix;
  std::optional<Point2> prev_fix;
  std::int64_t last_report_tick = -1;
};

// What a node has overheard about a target's current master. A node that
// knows a live master exists never starts a competing election.
struct MasterAwareness {
  int master_id = -1;
  std::int64_t valid_until = -1;  // inclusive tick
};

// Roles are per target: one sensor may be Master for one target and Slave or
// Inhibited for another at the same time.
using RoleMap = std::map<int, RoleState>;

}  // namespace wsntrack
