#pragma once

// 2D geometry kernel: distances, range-based trilateration and nearest-site
// (Voronoi cell) queries.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "wsntrack/error.hpp"

namespace wsntrack {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline bool is_finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

struct RangeObservation {
  Point2 anchor;
  double range = 0.0;        // meters, >= 0
  double noise_sigma = 0.0;  // metadata only
};

struct FixResult {
  Point2 position;
  double residual = 0.0;  // RMS of |dist(position, anchor_i) - range_i|
  std::size_t anchors_used = 0;
};

struct Site {
  int id = 0;
  Point2 pos;
};

inline double distance_sq(const Point2& a, const Point2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

namespace detail {

// Relative tolerances for anchor validation. The collinearity test compares
// |det| of the scaled 2x2 normal system against kCollinearTol * scale^2.
inline constexpr double kCollinearTol = 1e-9;
inline constexpr double kDuplicateTol = 1e-9;

inline double rms_residual(const Point2& p, std::span<const RangeObservation> obs) {
  double acc = 0.0;
  for (const auto& o : obs) {
    const double e = distance(p, o.anchor) - o.range;
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(obs.size()));
}

inline double max_pairwise_distance(std::span<const RangeObservation> obs) {
  double scale = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i)
    for (std::size_t j = i + 1; j < obs.size(); ++j)
      scale = std::max(scale, distance(obs[i].anchor, obs[j].anchor));
  return scale;
}

inline void check_anchors(std::span<const RangeObservation> obs, double scale) {
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (!is_finite(obs[i].anchor) || !std::isfinite(obs[i].range) || obs[i].range < 0.0)
      throw Error(ErrorCode::DegenerateGeometry, "non-finite anchor or negative range");
    for (std::size_t j = i + 1; j < obs.size(); ++j)
      if (distance(obs[i].anchor, obs[j].anchor) <= kDuplicateTol * std::max(1.0, scale))
        throw Error(ErrorCode::DuplicateAnchor, "two anchors coincide");
  }
}

// Row i of the circle-difference system relative to anchor 0:
//   2(x_i - x_0) x + 2(y_i - y_0) y = r_0^2 - r_i^2 + |a_i|^2 - |a_0|^2
// Anchors are translated so anchor 0 sits at the origin, which keeps the
// right-hand side well conditioned for fields far from the origin.
struct LinearRow {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

inline LinearRow difference_row(const RangeObservation& ref, const RangeObservation& o) {
  const double ax = o.anchor.x - ref.anchor.x;
  const double ay = o.anchor.y - ref.anchor.y;
  return {2.0 * ax, 2.0 * ay, ref.range * ref.range - o.range * o.range + ax * ax + ay * ay};
}

}  // namespace detail

// Closed-form fix from exactly three range observations.
inline FixResult trilaterate(std::span<const RangeObservation> obs) {
  if (obs.size() != 3) throw Error(ErrorCode::TooFewObservations, "trilaterate needs exactly 3 observations");
  const double scale = detail::max_pairwise_distance(obs);
  detail::check_anchors(obs, scale);

  const auto r1 = detail::difference_row(obs[0], obs[1]);
  const auto r2 = detail::difference_row(obs[0], obs[2]);
  const double det = r1.a * r2.b - r1.b * r2.a;
  // The row coefficients carry a factor 2 each, hence the 4.
  if (std::abs(det) < detail::kCollinearTol * 4.0 * scale * scale)
    throw Error(ErrorCode::DegenerateGeometry, "anchors are collinear");

  const double dx = (r1.c * r2.b - r1.b * r2.c) / det;
  const double dy = (r1.a * r2.c - r1.c * r2.a) / det;
  FixResult fix;
  fix.position = {obs[0].anchor.x + dx, obs[0].anchor.y + dy};
  fix.residual = detail::rms_residual(fix.position, obs);
  fix.anchors_used = 3;
  return fix;
}

// Least-squares fix over N >= 3 observations via the normal equations of the
// N-1 circle-difference rows.
inline FixResult trilaterate_ls(std::span<const RangeObservation> obs) {
  if (obs.size() < 3) throw Error(ErrorCode::TooFewObservations, "trilaterate_ls needs at least 3 observations");
  const double scale = detail::max_pairwise_distance(obs);
  detail::check_anchors(obs, scale);

  double saa = 0.0, sab = 0.0, sbb = 0.0, sac = 0.0, sbc = 0.0;
  for (std::size_t i = 1; i < obs.size(); ++i) {
    const auto r = detail::difference_row(obs[0], obs[i]);
    saa += r.a * r.a;
    sab += r.a * r.b;
    sbb += r.b * r.b;
    sac += r.a * r.c;
    sbc += r.b * r.c;
  }
  const double det = saa * sbb - sab * sab;
  // The normal matrix scales as (2 * scale)^2 per entry, so det ~ scale^4.
  const double norm = 4.0 * scale * scale;
  if (std::abs(det) < detail::kCollinearTol * norm * norm)
    throw Error(ErrorCode::DegenerateGeometry, "anchors are collinear");

  const double dx = (sac * sbb - sab * sbc) / det;
  const double dy = (saa * sbc - sab * sac) / det;
  FixResult fix;
  fix.position = {obs[0].anchor.x + dx, obs[0].anchor.y + dy};
  fix.residual = detail::rms_residual(fix.position, obs);
  fix.anchors_used = obs.size();
  return fix;
}

// Orders by (distance, id); the tie-break by smallest id makes every
// downstream choice deterministic.
inline bool closer(const Site& a, const Site& b, const Point2& query) {
  const double da = distance_sq(a.pos, query);
  const double db = distance_sq(b.pos, query);
  if (da != db) return da < db;
  return a.id < b.id;
}

inline int nearest_site(std::span<const Site> sites, const Point2& query) {
  if (sites.empty()) throw Error(ErrorCode::EmptySiteList, "nearest_site on empty site list");
  const Site* best = &sites[0];
  for (const auto& s : sites)
    if (closer(s, *best, query)) best = &s;
  return best->id;
}

inline std::vector<int> rank_sites(std::span<const Site> sites, const Point2& query, std::size_t k) {
  if (k == 0) return {};
  if (sites.empty()) throw Error(ErrorCode::EmptySiteList, "rank_sites on empty site list");
  if (k > sites.size()) throw Error(ErrorCode::KTooLarge, "k exceeds number of sites");
  std::vector<Site> sorted(sites.begin(), sites.end());
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end(),
                    [&](const Site& a, const Site& b) { return closer(a, b, query); });
  std::vector<int> ids;
  ids.reserve(k);
  for (std::size_t i = 0; i < k; ++i) ids.push_back(sorted[i].id);
  return ids;
}

}  // namespace wsntrack
