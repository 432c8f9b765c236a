#include <gtest/gtest.h>

#include <set>

#include "wsntrack/assignment.hpp"
#include "wsntrack/rng.hpp"

using namespace wsntrack;

namespace {

bool covers(const SensorDisc& s, const Point2& t) { return distance(s.position, t) <= s.range; }

// Tries every labelling of sensors with a target index or "unused".
bool exhaustive(const std::vector<SensorDisc>& sensors, const std::vector<Point2>& targets, int per) {
  const std::size_t n = sensors.size();
  const std::size_t k = targets.size();
  std::vector<std::size_t> label(n, 0);
  while (true) {
    std::vector<int> count(k, 0);
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      if (label[i] > 0) {
        ok = covers(sensors[i], targets[label[i] - 1]);
        ++count[label[i] - 1];
      }
    if (ok)
      for (int c : count) ok = ok && c >= per;
    if (ok) return true;
    std::size_t i = 0;
    while (i < n && ++label[i] > k) label[i++] = 0;
    if (i == n) return k == 0 || per == 0;
  }
}

void check_valid(const Assignment& a, const std::vector<SensorDisc>& sensors, const std::vector<Point2>& targets,
                 int per) {
  std::set<int> used;
  for (std::size_t t = 0; t < a.size(); ++t) {
    EXPECT_EQ(a[t].size(), static_cast<std::size_t>(per));
    for (int s : a[t]) {
      EXPECT_TRUE(covers(sensors[static_cast<std::size_t>(s)], targets[t]));
      EXPECT_TRUE(used.insert(s).second);
    }
  }
}

}  // namespace

TEST(Assign, InfeasibleWhenTooFewSensors) {
  const std::vector<SensorDisc> sensors{{{0, 0}, 10}, {{1, 0}, 10}, {{2, 0}, 10}};
  const std::vector<Point2> targets{{1, 1}, {1, 2}};
  EXPECT_FALSE(assign_targets(sensors, targets, 2));
  const auto one = assign_targets(sensors, std::span(targets).first(1), 2);
  ASSERT_TRUE(one);
  EXPECT_EQ((*one)[0], (std::vector<int>{0, 1}));
}

TEST(Assign, NoTargetsIsTrivial) {
  const std::vector<SensorDisc> none;
  const std::vector<Point2> targets;
  EXPECT_TRUE(assign_targets(none, targets, 3));
}

TEST(Assign, NeedsAugmentingPath) {
  // Greedy would give sensor 0 to target 0 and strand target 1.
  const std::vector<SensorDisc> sensors{{{0, 0}, 5}, {{-6, 0}, 5}, {{6, 0}, 5}};
  const std::vector<Point2> targets{{-3, 0}, {3, 0}};
  const auto a = assign_targets(sensors, targets, 1);
  ASSERT_TRUE(a);
  check_valid(*a, sensors, targets, 1);
}

TEST(Assign, MatchesExhaustiveEnumeration) {
  Rng rng(8);
  int feasible = 0;
  for (int inst = 0; inst < 600; ++inst) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(0, 8));
    const auto k = static_cast<std::size_t>(rng.uniform_int(1, 3));
    const int per = static_cast<int>(rng.uniform_int(1, 3));
    std::vector<SensorDisc> sensors(n);
    for (auto& s : sensors) s = {{rng.uniform(0, 20), rng.uniform(0, 20)}, 8.0};
    std::vector<Point2> targets(k);
    for (auto& t : targets) t = {rng.uniform(0, 20), rng.uniform(0, 20)};
    const auto got = assign_targets(sensors, targets, per);
    ASSERT_EQ(got.has_value(), exhaustive(sensors, targets, per)) << "instance " << inst;
    if (got) {
      check_valid(*got, sensors, targets, per);
      ++feasible;
    }
  }
  EXPECT_GT(feasible, 50);
}
