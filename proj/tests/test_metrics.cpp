#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "toponav/metrics.hpp"

using namespace toponav;
using Catch::Approx;

namespace {

std::vector<Vec2> random_path(std::mt19937_64& rng, int max_len) {
  std::uniform_int_distribution<int> len(1, max_len);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  std::vector<Vec2> p;
  for (int i = len(rng); i > 0; --i) p.push_back({coord(rng), coord(rng)});
  return p;
}

}  // namespace

TEST_CASE("dtw of identical paths is zero") {
  const std::vector<Vec2> p{{0.0, 0.0}, {1.0, 0.0}, {2.0, 1.0}};
  REQUIRE(dtw(p, p) == 0.0);
}

TEST_CASE("dtw of singletons is the point distance") {
  REQUIRE(dtw({{0.0, 0.0}}, {{3.0, 4.0}}) == 5.0);
}

TEST_CASE("dtw rejects empty paths") {
  REQUIRE_THROWS_AS(dtw({}, {{1.0, 1.0}}), std::invalid_argument);
  REQUIRE_THROWS_AS(dtw({{1.0, 1.0}}, {}), std::invalid_argument);
}

TEST_CASE("dtw equals exhaustive alignment enumeration") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 80; ++trial) {
    const auto p = random_path(rng, 7);
    const auto r = random_path(rng, 7);
    REQUIRE(dtw(p, r) == oracles::brute_dtw(p, r));
  }
}

TEST_CASE("dtw is symmetric") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = random_path(rng, 6);
    const auto r = random_path(rng, 6);
    REQUIRE(dtw(p, r) == Approx(dtw(r, p)).margin(1e-12));
  }
}

TEST_CASE("ndtw is one for identical paths and e^-1 for the unit case") {
  const std::vector<Vec2> p{{0.0, 0.0}, {2.0, 0.0}, {4.0, 1.0}};
  REQUIRE(ndtw(p, p) == 1.0);
  REQUIRE(ndtw({{0.0, 0.0}}, {{3.0, 0.0}}) == Approx(std::exp(-1.0)));
}

TEST_CASE("ndtw strictly decreases as a point drifts from the reference") {
  const std::vector<Vec2> r{{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}};
  double prev = 1.0;
  for (int k = 1; k <= 10; ++k) {
    const std::vector<Vec2> p{{0.0, 0.0}, {1.0, 0.2 * k}, {2.0, 0.0}};
    const double v = ndtw(p, r);
    REQUIRE(v < prev);
    prev = v;
  }
}

TEST_CASE("an exact shortest-path walk scores SR 1 and SPL 1") {
  const auto g = fixtures::empty_world(10.0, 10.0);
  const Vec2 start{2.0, 2.0}, goal{6.0, 2.0};
  std::vector<Vec2> walk;
  for (int i = 0; i <= 16; ++i) walk.push_back({2.0 + 0.25 * i, 2.0});
  TraceStats stats;
  stats.actions = 16;
  const auto res = episode_metrics(walk, g, start, goal, {start, goal}, stats);
  REQUIRE(res.sr == 1);
  REQUIRE(res.osr == 1);
  REQUIRE(res.ne == Approx(0.0).margin(1e-9));
  REQUIRE(res.spl == Approx(1.0).margin(1e-9));
  REQUIRE(res.tl == Approx(4.0).margin(1e-9));
  REQUIRE(res.sdtw == res.sr * res.ndtw);
}

TEST_CASE("a trace that never nears the goal scores zero everywhere") {
  const auto g = fixtures::empty_world(12.0, 12.0);
  const Vec2 start{1.0, 1.0}, goal{10.0, 10.0};
  const std::vector<Vec2> walk{{1.0, 1.0}, {2.0, 1.0}, {2.0, 2.0}};
  const auto res = episode_metrics(walk, g, start, goal, {start, goal}, {});
  REQUIRE(res.sr == 0);
  REQUIRE(res.osr == 0);
  REQUIRE(res.spl == 0.0);
  REQUIRE(res.sdtw == 0.0);
  REQUIRE(res.ndtw > 0.0);
}

TEST_CASE("success with twice the shortest length halves SPL") {
  const auto g = fixtures::empty_world(10.0, 10.0);
  const Vec2 start{2.0, 2.0}, goal{4.0, 2.0};
  // detour: up 1, across 2, down 1 -> TL 4, shortest 2
  const std::vector<Vec2> walk{{2.0, 2.0}, {2.0, 3.0}, {4.0, 3.0}, {4.0, 2.0}};
  const auto res = episode_metrics(walk, g, start, goal, {start, goal}, {});
  REQUIRE(res.sr == 1);
  REQUIRE(res.tl == Approx(4.0));
  REQUIRE(res.spl == Approx(0.5).margin(0.02));  // geodesic snaps to cell centers
}

TEST_CASE("metric ranges and identities hold on random episodes") {
  const auto g = fixtures::empty_world(12.0, 12.0);
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> coord(1.0, 11.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Vec2> walk{{coord(rng), coord(rng)}};
    for (int i = 0; i < 12; ++i) {
      Vec2 next = walk.back() + Vec2{coord(rng) * 0.1 - 0.55, coord(rng) * 0.1 - 0.55};
      next.x = std::clamp(next.x, 0.5, 11.5);
      next.y = std::clamp(next.y, 0.5, 11.5);
      walk.push_back(next);
    }
    const Vec2 goal{coord(rng), coord(rng)};
    const std::vector<Vec2> ref{walk.front(), goal};
    const auto res = episode_metrics(walk, g, walk.front(), goal, ref, {});
    REQUIRE(res.spl <= res.sr);
    REQUIRE(res.sr <= res.osr);
    REQUIRE(res.ndtw >= 0.0);
    REQUIRE(res.ndtw <= 1.0);
    REQUIRE(res.sdtw == res.sr * res.ndtw);
    REQUIRE(res.spl >= 0.0);
    REQUIRE(res.spl <= 1.0);
  }
}

TEST_CASE("trajectory length is invariant to resampling a straight trace") {
  const auto g = fixtures::empty_world(10.0, 10.0);
  const Vec2 start{2.0, 2.0}, goal{6.0, 2.0};
  std::vector<Vec2> coarse, fine;
  for (int i = 0; i <= 16; ++i) coarse.push_back({2.0 + 0.25 * i, 2.0});
  for (int i = 0; i <= 80; ++i) fine.push_back({2.0 + 0.05 * i, 2.0});
  const auto a = episode_metrics(coarse, g, start, goal, {start, goal}, {});
  const auto b = episode_metrics(fine, g, start, goal, {start, goal}, {});
  REQUIRE(std::fabs(a.tl - b.tl) < 1e-9);
}

TEST_CASE("geodesic NE sees walls, the euclidean variant does not") {
  const auto g = fixtures::two_rooms();
  const Vec2 start{2.0, 1.0}, goal{8.0, 1.0};
  const std::vector<Vec2> walk{start, {4.0, 1.0}};  // still in the first room
  const auto geo = episode_metrics(walk, g, start, goal, {start, goal}, {}, 3.0,
                                   DistanceMode::Geodesic);
  const auto euc = episode_metrics(walk, g, start, goal, {start, goal}, {}, 3.0,
                                   DistanceMode::Euclidean);
  REQUIRE(geo.ne > euc.ne + 1.0);  // wall detour through the door
  REQUIRE(euc.ne == Approx(4.0));
  REQUIRE(geo.sr == 0);
}

TEST_CASE("subgoal navigation error averages over plan executions") {
  const auto g = fixtures::empty_world(10.0, 10.0);
  TraceStats stats;
  stats.subgoal_pairs.push_back({{2.0, 2.0}, {2.0, 2.0}});
  stats.subgoal_pairs.push_back({{2.0, 2.0}, {3.0, 2.0}});
  const std::vector<Vec2> walk{{2.0, 2.0}, {2.1, 2.0}};
  const auto res = episode_metrics(walk, g, {2.0, 2.0}, {2.5, 2.0}, walk, stats);
  REQUIRE(res.sg_ne == Approx(0.5).margin(0.05));  // mean of ~0 and ~1, grid-snapped
}
