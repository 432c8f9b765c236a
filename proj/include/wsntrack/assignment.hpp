#pragma once

// k-target / m-sensor assignment: can every target get `per_target` distinct
// sensors that each cover it? Solved as maximum bipartite matching between
// target demand units and sensors (capacity 1).

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "wsntrack/geometry.hpp"

namespace wsntrack {

// Kuhn's augmenting-path matching; left vertices are matched one at a time.
class BipartiteMatcher {
 public:
  BipartiteMatcher(int left, int right)
      : adj_(static_cast<std::size_t>(left)), match_left_(static_cast<std::size_t>(left), -1),
        match_right_(static_cast<std::size_t>(right), -1), seen_(static_cast<std::size_t>(right), 0) {}

  void add_edge(int l, int r) { adj_[static_cast<std::size_t>(l)].push_back(r); }

  int solve() {
    int matched = 0;
    for (int l = 0; l < static_cast<int>(adj_.size()); ++l) {
      ++stamp_;
      if (augment(l)) ++matched;
    }
    return matched;
  }

  int mate_of_left(int l) const { return match_left_[static_cast<std::size_t>(l)]; }

 private:
  bool augment(int l) {
    for (int r : adj_[static_cast<std::size_t>(l)]) {
      auto& s = seen_[static_cast<std::size_t>(r)];
      if (s == stamp_) continue;
      s = stamp_;
      const int other = match_right_[static_cast<std::size_t>(r)];
      if (other < 0 || augment(other)) {
        match_left_[static_cast<std::size_t>(l)] = r;
        match_right_[static_cast<std::size_t>(r)] = l;
        return true;
      }
    }
    return false;
  }

  std::vector<std::vector<int>> adj_;
  std::vector<int> match_left_;
  std::vector<int> match_right_;
  std::vector<int> seen_;
  int stamp_ = 0;
};

struct SensorDisc {
  Point2 position;
  double range = 0.0;
};

// result[i] lists the sensor indices assigned to target i, ascending.
using Assignment = std::vector<std::vector<int>>;

inline std::optional<Assignment> assign_targets(std::span<const SensorDisc> sensors, std::span<const Point2> targets,
                                                int per_target) {
  const int k = static_cast<int>(targets.size());
  const int demand = k * per_target;
  if (demand == 0) return Assignment(targets.size());
  if (static_cast<int>(sensors.size()) < demand) return std::nullopt;

  BipartiteMatcher matcher(demand, static_cast<int>(sensors.size()));
  for (int t = 0; t < k; ++t)
    for (int s = 0; s < static_cast<int>(sensors.size()); ++s) {
      const auto& sd = sensors[static_cast<std::size_t>(s)];
      if (distance(sd.position, targets[static_cast<std::size_t>(t)]) <= sd.range)
        for (int c = 0; c < per_target; ++c) matcher.add_edge(t * per_target + c, s);
    }
  if (matcher.solve() < demand) return std::nullopt;

  Assignment out(targets.size());
  for (int l = 0; l < demand; ++l) out[static_cast<std::size_t>(l / per_target)].push_back(matcher.mate_of_left(l));
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

}  // namespace wsntrack
