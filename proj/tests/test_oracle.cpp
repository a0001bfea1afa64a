#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "vnrrt/error.hpp"
#include "vnrrt/oracle.hpp"

using namespace vnrrt;
using oracles::repeat;
using oracles::walk;

namespace {

void check_valid_path(const GridMap& m, const GridPath& p, CellIndex s, CellIndex g) {
  REQUIRE_FALSE(p.cells.empty());
  CHECK(p.cells.front() == s);
  CHECK(p.cells.back() == g);
  OctileCost sum;
  for (std::size_t i = 1; i < p.cells.size(); ++i) {
    const int dx = p.cells[i].x - p.cells[i - 1].x;
    const int dy = p.cells[i].y - p.cells[i - 1].y;
    REQUIRE(std::max(std::abs(dx), std::abs(dy)) == 1);
    CHECK(oracles::step_ok(m, p.cells[i - 1].x, p.cells[i - 1].y, dx, dy));
    sum = sum + (dx != 0 && dy != 0 ? OctileCost{0, 1} : OctileCost{1, 0});
  }
  CHECK(sum == p.steps);
  CHECK(p.cost == p.steps.value());
}

std::vector<std::size_t> interior(const VertexSet& v) {
  return {v.path_indices.begin() + 1, v.path_indices.end() - 1};
}

}  // namespace

TEST_CASE("octile cost compares exactly") {
  CHECK(OctileCost{3, 0} < OctileCost{0, 3});
  CHECK(OctileCost{1, 1} < OctileCost{0, 2});
  CHECK(OctileCost{0, 2} < OctileCost{3, 0});  // 2.828 < 3
  CHECK(OctileCost{7, 5} < OctileCost{0, 10});  // 14.07 < 14.14
  CHECK(OctileCost{14, 0} < OctileCost{0, 10});
  CHECK(OctileCost{0, 10} < OctileCost{15, 0});
  CHECK((OctileCost{2, 3} <=> OctileCost{2, 3}) == std::strong_ordering::equal);
  CHECK(octile_distance({0, 0}, {3, 5}) == OctileCost{2, 3});
  CHECK(octile_distance({4, 1}, {0, 0}) == OctileCost{3, 1});
}

TEST_CASE("astar on an empty map") {
  const auto m = GridMap::empty(8, 8, {0, 0}, {7, 7});
  const auto col = astar(m, {0, 0}, {0, 5});
  CHECK(col.cost == 5.0);
  CHECK(col.cells.size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(col.cells[static_cast<std::size_t>(i)] == CellIndex{0, i});

  const auto diag = astar(m, {0, 0}, {3, 3});
  CHECK(diag.cost == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(diag.steps == OctileCost{0, 3});

  const auto self = astar(m, {2, 2}, {2, 2});
  CHECK(self.cells.size() == 1);
  CHECK(self.cost == 0.0);
}

TEST_CASE("astar is deterministic on ties") {
  const auto m = GridMap::empty(12, 12, {0, 0}, {11, 11});
  const auto a = astar(m, {1, 2}, {9, 5});
  const auto b = astar(m, {1, 2}, {9, 5});
  CHECK(a.cells == b.cells);
}

TEST_CASE("astar refuses to cut corners and reports unreachable goals") {
  std::vector<std::uint8_t> obs(64, 0);
  obs[1] = 1;
  obs[8] = 1;
  const auto sealed = GridMap::from_obstacles(8, 8, obs, {0, 0}, {5, 5});
  CHECK_THROWS_AS(astar(sealed), NoPath);

  std::vector<std::uint8_t> wall(64, 0);
  for (int y = 0; y < 8; ++y) wall[static_cast<std::size_t>(y * 8 + 4)] = 1;
  CHECK_THROWS_AS(astar(GridMap::from_obstacles(8, 8, wall, {0, 0}, {7, 7})), NoPath);
  CHECK_THROWS_AS(astar(GridMap::empty(8, 8, {0, 0}, {7, 7}), {0, 0}, {9, 9}), NoPath);
}

TEST_CASE("astar matches Dijkstra, is symmetric, and returns valid paths") {
  std::mt19937_64 rng(2024);
  int solvable = 0;
  for (int t = 0; t < 60; ++t) {
    const auto m = oracles::random_grid(20, 20, 0.3, rng);
    const auto ref = oracles::dijkstra(m, m.start(), m.goal());
    CHECK(ref.reachable == oracles::flood_fill_connected(m, m.start(), m.goal()));
    if (!ref.reachable) {
      CHECK_THROWS_AS(astar(m), NoPath);
      continue;
    }
    ++solvable;
    const auto p = astar(m);
    check_valid_path(m, p, m.start(), m.goal());
    CHECK(p.steps == OctileCost{ref.straight, ref.diagonal});
    const auto back = astar(m, m.goal(), m.start());
    CHECK(back.steps == p.steps);
  }
  CHECK(solvable > 20);
}

TEST_CASE("straight lines have no interior vertices") {
  const auto column = walk({0, 0}, repeat({{0, 1}}, 5));
  const auto v = extract_vertices(column);
  CHECK(v.vertices == std::vector<CellIndex>{{0, 0}, {0, 5}});
  CHECK(v.path_indices == std::vector<std::size_t>{0, 5});

  for (const auto& unit : std::vector<std::vector<std::pair<int, int>>>{
           {{1, 0}}, {{0, -1}}, {{1, 1}}, {{-1, 1}}, {{1, 0}, {1, 1}}, {{1, 1}, {1, 0}},
           {{0, 1}, {1, 1}}, {{-1, 0}, {-1, -1}}}) {
    for (int reps = 1; reps <= 10; ++reps) {
      const auto p = walk({20, 20}, repeat(unit, reps));
      CAPTURE(reps);
      CHECK(interior(extract_vertices(p)).empty());
    }
  }
  // The 22.5 degree staircase of 9 cells.
  const auto stair = walk({0, 0}, repeat({{1, 0}, {1, 1}}, 4));
  REQUIRE(stair.size() == 9);
  CHECK(extract_vertices(stair).vertices == std::vector<CellIndex>{{0, 0}, {8, 4}});
}

TEST_CASE("corners") {
  const auto L = walk({0, 0}, oracles::repeat({{1, 0}}, 4));
  auto path = L;
  for (auto c : walk(L.back(), repeat({{0, -1}}, 4))) {
    if (!(c == path.back())) path.push_back(c);
  }
  const auto v = extract_vertices(path);
  CHECK(interior(v) == std::vector<std::size_t>{4});
  CHECK(v.vertices[1] == CellIndex{4, 0});

  auto z = walk({0, 0}, repeat({{1, 0}}, 4));
  for (auto [dx, dy] : repeat({{0, 1}}, 4)) z.push_back({z.back().x + dx, z.back().y + dy});
  for (auto [dx, dy] : repeat({{1, 0}}, 4)) z.push_back({z.back().x + dx, z.back().y + dy});
  CHECK(interior(extract_vertices(z)) == std::vector<std::size_t>{4, 8});
}

TEST_CASE("vertex extraction matches the brute-force definition on random walks") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dir(-1, 1);
  for (int t = 0; t < 500; ++t) {
    std::vector<std::pair<int, int>> moves;
    const int len = 1 + static_cast<int>(rng() % 30);
    for (int i = 0; i < len; ++i) {
      int dx = dir(rng), dy = dir(rng);
      if (dx == 0 && dy == 0) dx = 1;
      moves.emplace_back(dx, dy);
    }
    const auto p = walk({50, 50}, moves);
    const auto v = extract_vertices(p);
    CHECK(v.path_indices == oracles::brute_force_vertices(p));
    CHECK(v.vertices.size() <= p.size());
    CHECK(v.vertices.front() == p.front());
    CHECK(v.vertices.back() == p.back());
    for (std::size_t i = 0; i < v.vertices.size(); ++i) {
      CHECK(v.vertices[i] == p[v.path_indices[i]]);
      if (i > 0) CHECK(v.path_indices[i] > v.path_indices[i - 1]);
    }
  }
}

TEST_CASE("vertex polyline stays within one cell of straight paths") {
  const std::vector<std::vector<std::pair<int, int>>> units{{{0, 1}}, {{1, 1}}, {{1, 0}, {1, 1}}};
  for (const auto& unit : units) {
    const auto p = walk({0, 0}, repeat(unit, 8));
    const auto v = extract_vertices(p);
    for (std::size_t s = 1; s < v.vertices.size(); ++s) {
      const auto a = v.vertices[s - 1], b = v.vertices[s];
      for (int i = 0; i <= 1000; ++i) {
        const double t = i / 1000.0;
        const int x = static_cast<int>(std::lround(a.x + (b.x - a.x) * t));
        const int y = static_cast<int>(std::lround(a.y + (b.y - a.y) * t));
        int best = 1 << 30;
        for (const auto& c : p) best = std::min(best, std::max(std::abs(c.x - x), std::abs(c.y - y)));
        CHECK(best <= 1);
      }
    }
  }
}

TEST_CASE("astar paths on generated maps yield consistent vertex sets") {
  MapGenConfig cfg;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    cfg.seed = seed;
    const auto m = generate_map(cfg);
    const auto p = astar(m);
    const auto v = extract_vertices(p.cells);
    CHECK(v.path_indices == oracles::brute_force_vertices(p.cells));
    CHECK(v.vertices.size() >= 2);
  }
}
