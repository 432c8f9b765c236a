#pragma once

#include <cstdint>
#include <map>

namespace wsntrack {

struct TableEntry {
  double value = 0.0;
  std::int64_t seq = 0;
  std::int64_t origin_tick = 0;

  friend bool operator==(const TableEntry&, const TableEntry&) = default;
};

// Per-node piggyback table: one entry per originating sensor id, plus the
// flag recording whether the table changed since the owner last broadcast it.
struct DataTable {
  std::map<int, TableEntry> entries;
  bool changed = false;

  std::size_t size() const { return entries.size(); }

  // True if this table holds `id` at sequence `seq` or newer.
  bool covers(int id, std::int64_t seq) const {
    auto it = entries.find(id);
    return it != entries.end() && it->second.seq >= seq;
  }
};

}  // namespace wsntrack
