#pragma once

// Target motion models (Random Waypoint, Gauss-Markov, straight line) and the
// constant-velocity predictor used for anticipatory wake-up.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <variant>

#include "wsntrack/geometry.hpp"
#include "wsntrack/rng.hpp"

namespace wsntrack {

struct FieldBounds {
  double width = 100.0;
  double height = 100.0;

  bool contains(const Point2& p) const { return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height; }
  Point2 clamp(const Point2& p) const { return {std::clamp(p.x, 0.0, width), std::clamp(p.y, 0.0, height)}; }
};

struct Velocity {
  double vx = 0.0;
  double vy = 0.0;
};

enum class MobilityModel { RandomWaypoint, GaussMarkov, Linear };

struct RandomWaypointParams {
  Point2 waypoint;
  double speed = 0.0;
  int pause_ticks_remaining = 0;
  double speed_min = 0.5;
  double speed_max = 2.0;
  int pause_min = 0;
  int pause_max = 5;
};

struct GaussMarkovParams {
  double alpha = 0.75;
  double mean_speed = 1.0;
  double mean_direction = 0.0;  // radians
  double sigma_speed = 0.2;
  double sigma_direction = 0.2;
  // Current speed and heading; the velocity vector is derived from these.
  double speed = 1.0;
  double direction = 0.0;
};

struct LinearParams {};

struct MobilityState {
  MobilityModel model = MobilityModel::Linear;
  Point2 position;
  Velocity velocity;
  std::variant<RandomWaypointParams, GaussMarkovParams, LinearParams> params = LinearParams{};
};

namespace detail {

// Reflects a coordinate into [0, extent]; flips the velocity component for
// every wall bounce. Handles displacements larger than the field.
inline double reflect_axis(double x, double extent, double& v) {
  if (extent <= 0.0) return 0.0;
  const double period = 2.0 * extent;
  double m = std::fmod(x, period);
  if (m < 0.0) m += period;
  const long bounces = static_cast<long>(std::floor(x / extent));
  if (bounces % 2 != 0) v = -v;
  return m <= extent ? m : period - m;
}

inline Point2 reflect(const Point2& p, const FieldBounds& bounds, Velocity& v) {
  Point2 out = p;
  if (p.x < 0.0 || p.x > bounds.width) out.x = reflect_axis(p.x, bounds.width, v.vx);
  if (p.y < 0.0 || p.y > bounds.height) out.y = reflect_axis(p.y, bounds.height, v.vy);
  return bounds.clamp(out);
}

inline void step_rwp(MobilityState& s, RandomWaypointParams& rwp, const FieldBounds& bounds, Rng& rng) {
  if (rwp.pause_ticks_remaining > 0) {
    --rwp.pause_ticks_remaining;
    s.velocity = {};
    if (rwp.pause_ticks_remaining == 0) {
      rwp.waypoint = {rng.uniform(0.0, bounds.width), rng.uniform(0.0, bounds.height)};
      rwp.speed = rng.uniform(rwp.speed_min, rwp.speed_max);
    }
    return;
  }
  const double d = distance(s.position, rwp.waypoint);
  if (d <= rwp.speed) {
    s.velocity = {rwp.waypoint.x - s.position.x, rwp.waypoint.y - s.position.y};
    s.position = bounds.clamp(rwp.waypoint);
    rwp.pause_ticks_remaining = static_cast<int>(rng.uniform_int(rwp.pause_min, rwp.pause_max));
    if (rwp.pause_ticks_remaining == 0) {
      rwp.waypoint = {rng.uniform(0.0, bounds.width), rng.uniform(0.0, bounds.height)};
      rwp.speed = rng.uniform(rwp.speed_min, rwp.speed_max);
    }
    return;
  }
  s.velocity = {(rwp.waypoint.x - s.position.x) / d * rwp.speed, (rwp.waypoint.y - s.position.y) / d * rwp.speed};
  s.position = bounds.clamp({s.position.x + s.velocity.vx, s.position.y + s.velocity.vy});
}

inline void step_gm(MobilityState& s, GaussMarkovParams& gm, const FieldBounds& bounds, Rng& rng) {
  const double a = gm.alpha;
  const double memory = std::sqrt(std::max(0.0, 1.0 - a * a));
  const double g1 = rng.normal();
  const double g2 = rng.normal();
  gm.speed = a * gm.speed + (1.0 - a) * gm.mean_speed + memory * gm.sigma_speed * g1;
  gm.direction = a * gm.direction + (1.0 - a) * gm.mean_direction + memory * gm.sigma_direction * g2;
  if (gm.speed < 0.0) gm.speed = 0.0;

  Velocity v{gm.speed * std::cos(gm.direction), gm.speed * std::sin(gm.direction)};
  const Point2 next{s.position.x + v.vx, s.position.y + v.vy};
  const Velocity before = v;
  s.position = reflect(next, bounds, v);
  s.velocity = v;
  // A wall bounce mirrors the heading; the mean heading mirrors with it so
  // the drift term does not push the target straight back into the wall.
  if ((before.vx != v.vx) || (before.vy != v.vy)) {
    const double heading = std::atan2(v.vy, v.vx);
    const double mean_heading_vx = std::cos(gm.mean_direction) * (before.vx != v.vx ? -1.0 : 1.0);
    const double mean_heading_vy = std::sin(gm.mean_direction) * (before.vy != v.vy ? -1.0 : 1.0);
    gm.direction = heading;
    gm.mean_direction = std::atan2(mean_heading_vy, mean_heading_vx);
  }
}

inline void step_linear(MobilityState& s, const FieldBounds& bounds) {
  Velocity v = s.velocity;
  s.position = reflect({s.position.x + v.vx, s.position.y + v.vy}, bounds, v);
  s.velocity = v;
}

}  // namespace detail

// Advances the state by exactly one tick. Positions always stay in bounds.
inline MobilityState step(MobilityState state, const FieldBounds& bounds, Rng& rng) {
  switch (state.model) {
    case MobilityModel::RandomWaypoint:
      detail::step_rwp(state, std::get<RandomWaypointParams>(state.params), bounds, rng);
      break;
    case MobilityModel::GaussMarkov:
      detail::step_gm(state, std::get<GaussMarkovParams>(state.params), bounds, rng);
      break;
    case MobilityModel::Linear:
      detail::step_linear(state, bounds);
      break;
  }
  return state;
}

// Constant-velocity extrapolation 2*curr - prev, clamped to the field.
inline Point2 predict_linear(const Point2& prev_fix, const Point2& curr_fix, const FieldBounds& bounds) {
  return bounds.clamp({2.0 * curr_fix.x - prev_fix.x, 2.0 * curr_fix.y - prev_fix.y});
}

inline MobilityState make_linear(Point2 start, Velocity v) {
  return {MobilityModel::Linear, start, v, LinearParams{}};
}

inline MobilityState make_random_waypoint(Point2 start, RandomWaypointParams p) {
  return {MobilityModel::RandomWaypoint, start, {}, p};
}

// Seeds a Random Waypoint state with its first waypoint and speed.
inline MobilityState start_random_waypoint(Point2 start, RandomWaypointParams p, const FieldBounds& bounds, Rng& rng) {
  p.waypoint = {rng.uniform(0.0, bounds.width), rng.uniform(0.0, bounds.height)};
  p.speed = rng.uniform(p.speed_min, p.speed_max);
  p.pause_ticks_remaining = 0;
  return make_random_waypoint(start, p);
}

inline MobilityState make_gauss_markov(Point2 start, GaussMarkovParams p) {
  MobilityState s{MobilityModel::GaussMarkov, start, {p.speed * std::cos(p.direction), p.speed * std::sin(p.direction)}, p};
  return s;
}

}  // namespace wsntrack
