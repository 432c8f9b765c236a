#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "wsntrack/geometry.hpp"
#include "wsntrack/rng.hpp"

using namespace wsntrack;

namespace {

std::vector<RangeObservation> exact_ranges(const std::vector<Point2>& anchors, Point2 p) {
  std::vector<RangeObservation> obs;
  for (const auto& a : anchors) obs.push_back({a, distance(a, p), 0.0});
  return obs;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::ConfigParse;
}

}  // namespace

TEST(Distance, PythagoreanTriple) {
  EXPECT_DOUBLE_EQ(distance({1, 1}, {-2, 5}), 5.0);
  EXPECT_DOUBLE_EQ(distance({3, 3}, {3, 3}), 0.0);
}

TEST(Trilaterate, AnchorAtTarget) {
  const std::vector<RangeObservation> obs{{{0, 0}, 0}, {{2, 0}, 2}, {{0, 2}, 2}};
  const auto fix = trilaterate(obs);
  EXPECT_NEAR(fix.position.x, 0.0, 1e-12);
  EXPECT_NEAR(fix.position.y, 0.0, 1e-12);
  EXPECT_EQ(fix.anchors_used, 3u);
}

TEST(Trilaterate, RecoversInteriorPoint) {
  const auto obs = exact_ranges({{0, 0}, {10, 0}, {0, 10}}, {3, 4});
  const auto fix = trilaterate(obs);
  EXPECT_NEAR(fix.position.x, 3.0, 1e-9);
  EXPECT_NEAR(fix.position.y, 4.0, 1e-9);
  EXPECT_NEAR(fix.residual, 0.0, 1e-9);
}

TEST(Trilaterate, FarFromOrigin) {
  const auto obs = exact_ranges({{1e6, 1e6}, {1e6 + 7, 1e6}, {1e6, 1e6 + 9}}, {1e6 + 2, 1e6 + 3});
  const auto fix = trilaterate(obs);
  EXPECT_NEAR(fix.position.x, 1e6 + 2, 1e-6);
  EXPECT_NEAR(fix.position.y, 1e6 + 3, 1e-6);
}

TEST(Trilaterate, CollinearIsDegenerate) {
  const std::vector<RangeObservation> obs{{{0, 0}, 1}, {{1, 0}, 1}, {{2, 0}, 1}};
  EXPECT_EQ(code_of([&] { trilaterate(obs); }), ErrorCode::DegenerateGeometry);
  EXPECT_EQ(code_of([&] { trilaterate_ls(obs); }), ErrorCode::DegenerateGeometry);
}

TEST(Trilaterate, CollinearAtSmallScale) {
  const std::vector<RangeObservation> obs{{{0, 0}, 1e-3}, {{1e-3, 0}, 1e-3}, {{2e-3, 0}, 1e-3}};
  EXPECT_EQ(code_of([&] { trilaterate(obs); }), ErrorCode::DegenerateGeometry);
}

TEST(Trilaterate, InputErrors) {
  const std::vector<RangeObservation> two{{{0, 0}, 1}, {{1, 0}, 1}};
  EXPECT_EQ(code_of([&] { trilaterate(two); }), ErrorCode::TooFewObservations);
  EXPECT_EQ(code_of([&] { trilaterate_ls(two); }), ErrorCode::TooFewObservations);
  const std::vector<RangeObservation> dup{{{0, 0}, 1}, {{0, 0}, 1}, {{0, 1}, 1}};
  EXPECT_EQ(code_of([&] { trilaterate(dup); }), ErrorCode::DuplicateAnchor);
  const std::vector<RangeObservation> neg{{{0, 0}, -1}, {{1, 0}, 1}, {{0, 1}, 1}};
  EXPECT_EQ(code_of([&] { trilaterate(neg); }), ErrorCode::DegenerateGeometry);
  const std::vector<RangeObservation> four{{{0, 0}, 1}, {{1, 0}, 1}, {{0, 1}, 1}, {{1, 1}, 1}};
  EXPECT_EQ(code_of([&] { trilaterate(four); }), ErrorCode::TooFewObservations);
}

TEST(TrilaterateLs, UnitSquareCenter) {
  const double r = std::sqrt(0.5);
  const std::vector<RangeObservation> obs{{{0, 0}, r}, {{1, 0}, r}, {{0, 1}, r}, {{1, 1}, r}};
  const auto fix = trilaterate_ls(obs);
  EXPECT_NEAR(fix.position.x, 0.5, 1e-12);
  EXPECT_NEAR(fix.position.y, 0.5, 1e-12);
  EXPECT_EQ(fix.anchors_used, 4u);
}

TEST(TrilaterateLs, ThreeAnchorsMatchClosedForm) {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const Point2 p{rng.uniform(0, 50), rng.uniform(0, 50)};
    std::vector<RangeObservation> obs;
    for (int j = 0; j < 3; ++j) {
      const Point2 a{rng.uniform(0, 50), rng.uniform(0, 50)};
      obs.push_back({a, std::max(0.0, distance(a, p) + rng.normal(0.0, 0.5)), 0.5});
    }
    const auto& a0 = obs[0].anchor;
    const auto& a1 = obs[1].anchor;
    const auto& a2 = obs[2].anchor;
    if (std::abs((a1.x - a0.x) * (a2.y - a0.y) - (a2.x - a0.x) * (a1.y - a0.y)) < 50.0) continue;
    const auto a = trilaterate(obs);
    const auto b = trilaterate_ls(obs);
    EXPECT_NEAR(a.position.x, b.position.x, 1e-9);
    EXPECT_NEAR(a.position.y, b.position.y, 1e-9);
  }
}

// The circle-difference solution minimizes the squared linear residuals; the
// grid oracle minimizes the same objective independently.
TEST(TrilaterateLs, MatchesGridSearchOnPerturbedRanges) {
  const std::vector<Point2> anchors{{0, 0}, {10, 0}, {0, 10}, {10, 10}};
  auto obs = exact_ranges(anchors, {4, 3});
  for (auto& o : obs) o.range += 0.1;
  const auto fix = trilaterate_ls(obs);
  const auto objective = [&](Point2 p) {
    double s = 0.0;
    for (std::size_t i = 1; i < obs.size(); ++i) {
      const auto row = detail::difference_row(obs[0], obs[i]);
      const double e = row.a * (p.x - obs[0].anchor.x) + row.b * (p.y - obs[0].anchor.y) - row.c;
      s += e * e;
    }
    return s;
  };
  const double pitch = 0.001;
  Point2 best{};
  double best_v = 1e300;
  for (double x = 3.0; x <= 5.0; x += pitch)
    for (double y = 2.0; y <= 4.0; y += pitch)
      if (const double v = objective({x, y}); v < best_v) {
        best_v = v;
        best = {x, y};
      }
  EXPECT_NEAR(fix.position.x, best.x, pitch);
  EXPECT_NEAR(fix.position.y, best.y, pitch);
  EXPECT_NEAR(fix.position.x, 4.0, 0.2);
  EXPECT_NEAR(fix.position.y, 3.0, 0.2);
}

TEST(TrilaterateLs, ExtraExactAnchorsKeepResidualZero) {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const Point2 p{rng.uniform(0, 100), rng.uniform(0, 100)};
    std::vector<Point2> anchors;
    for (int j = 0; j < 6; ++j) anchors.push_back({rng.uniform(0, 100), rng.uniform(0, 100)});
    double prev = 1e300;
    for (std::size_t n = 3; n <= anchors.size(); ++n) {
      const std::vector<Point2> sub(anchors.begin(), anchors.begin() + static_cast<std::ptrdiff_t>(n));
      try {
        const auto fix = trilaterate_ls(exact_ranges(sub, p));
        EXPECT_LT(fix.residual, 1e-6);
        EXPECT_LE(fix.residual, std::max(prev, 1e-6));
        prev = fix.residual;
      } catch (const Error&) {
      }
    }
  }
}

TEST(NearestSite, Examples) {
  const std::vector<Site> sites{{0, {0, 0}}, {1, {10, 0}}, {2, {0, 10}}};
  EXPECT_EQ(nearest_site(sites, {1, 1}), 0);
  EXPECT_EQ(nearest_site(sites, {9, 1}), 1);
  EXPECT_EQ(nearest_site(sites, {5, 0}), 0);  // tie with site 1
  const std::vector<Site> reversed{{7, {10, 0}}, {3, {0, 0}}};
  EXPECT_EQ(nearest_site(reversed, {5, 0}), 3);
}

TEST(NearestSite, EmptyAndK) {
  const std::vector<Site> none;
  EXPECT_EQ(code_of([&] { nearest_site(none, {0, 0}); }), ErrorCode::EmptySiteList);
  const std::vector<Site> sites{{0, {0, 0}}, {1, {3, 0}}, {2, {1, 0}}};
  EXPECT_TRUE(rank_sites(sites, {0, 0}, 0).empty());
  EXPECT_EQ(rank_sites(sites, {0, 0}, 3), (std::vector<int>{0, 2, 1}));
  EXPECT_EQ(code_of([&] { rank_sites(sites, {0, 0}, 4); }), ErrorCode::KTooLarge);
}

TEST(RankSites, MatchesBruteForceSort) {
  Rng rng(99);
  std::vector<Site> sites;
  for (int i = 0; i < 40; ++i) sites.push_back({i, {std::round(rng.uniform(0, 20)), std::round(rng.uniform(0, 20))}});
  for (int q = 0; q < 500; ++q) {
    const Point2 query{std::round(rng.uniform(0, 20)), std::round(rng.uniform(0, 20))};
    std::vector<std::pair<double, int>> brute;
    for (const auto& s : sites) brute.push_back({distance_sq(s.pos, query), s.id});
    std::sort(brute.begin(), brute.end());
    const auto got = rank_sites(sites, query, 5);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(got[i], brute[i].second);
    EXPECT_EQ(nearest_site(sites, query), brute[0].second);
  }
}
