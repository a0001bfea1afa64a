#include "vnrrt/oracle.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <queue>

#include "vnrrt/error.hpp"

namespace vnrrt {

std::strong_ordering operator<=>(OctileCost a, OctileCost b) noexcept {
  // Compare da against db * sqrt(2) where a - b = da + (-db) * sqrt(2).
  const std::int64_t da = a.straight - b.straight;
  const std::int64_t db = b.diagonal - a.diagonal;
  if (da == 0 && db == 0) return std::strong_ordering::equal;
  if (da >= 0 && db <= 0) return std::strong_ordering::greater;
  if (da <= 0 && db >= 0) return std::strong_ordering::less;
  const std::int64_t lhs = da * da;
  const std::int64_t rhs = 2 * db * db;
  if (da > 0) return lhs < rhs ? std::strong_ordering::less : std::strong_ordering::greater;
  return lhs > rhs ? std::strong_ordering::less : std::strong_ordering::greater;
}

OctileCost octile_distance(CellIndex a, CellIndex b) noexcept {
  const std::int64_t dx = std::abs(a.x - b.x);
  const std::int64_t dy = std::abs(a.y - b.y);
  return {std::max(dx, dy) - std::min(dx, dy), std::min(dx, dy)};
}

namespace {

struct OpenEntry {
  OctileCost f;
  OctileCost g;
  CellIndex cell;
};

// priority_queue pops the "largest"; this orders the preferred entry last.
struct WorseEntry {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const noexcept {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    if (a.cell.y != b.cell.y) return a.cell.y > b.cell.y;
    return a.cell.x > b.cell.x;
  }
};

}  // namespace

GridPath astar(const GridMap& map, CellIndex start, CellIndex goal) {
  if (map.blocked(start) || map.blocked(goal)) {
    throw NoPath("start or goal is blocked or out of bounds");
  }
  const std::size_t n = map.cells().size();
  std::vector<OctileCost> g(n);
  std::vector<std::uint8_t> reached(n, 0);
  std::vector<std::uint8_t> closed(n, 0);
  std::vector<std::size_t> parent(n, std::numeric_limits<std::size_t>::max());

  std::priority_queue<OpenEntry, std::vector<OpenEntry>, WorseEntry> open;
  g[map.index(start)] = {};
  reached[map.index(start)] = 1;
  open.push({octile_distance(start, goal), {}, start});

  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    const std::size_t ci = map.index(top.cell);
    if (closed[ci] || top.g != g[ci]) continue;
    closed[ci] = 1;

    if (top.cell == goal) {
      GridPath path;
      path.steps = top.g;
      path.cost = top.g.value();
      for (std::size_t i = ci;; i = parent[i]) {
        path.cells.push_back({static_cast<int>(i % static_cast<std::size_t>(map.width())),
                              static_cast<int>(i / static_cast<std::size_t>(map.width()))});
        if (i == map.index(start)) break;
      }
      std::reverse(path.cells.begin(), path.cells.end());
      return path;
    }

    for_each_move(map, top.cell, [&](CellIndex nb, bool diagonal) {
      const std::size_t ni = map.index(nb);
      if (closed[ni]) return;
      const OctileCost step = diagonal ? OctileCost{0, 1} : OctileCost{1, 0};
      const OctileCost cand = top.g + step;
      if (reached[ni] && !(cand < g[ni])) return;
      reached[ni] = 1;
      g[ni] = cand;
      parent[ni] = ci;
      open.push({cand + octile_distance(nb, goal), cand, nb});
    });
  }
  throw NoPath("goal (" + std::to_string(goal.x) + ", " + std::to_string(goal.y) +
               ") is unreachable from start (" + std::to_string(start.x) + ", " +
               std::to_string(start.y) + ")");
}

bool direction_changes(std::span<const CellIndex> path, std::size_t i, int scale) {
  const auto k = static_cast<std::size_t>(scale);
  if (i < k || i + k >= path.size()) return false;
  const CellIndex& prev = path[i - k];
  const CellIndex& here = path[i];
  const CellIndex& next = path[i + k];
  const long bx = here.x - prev.x;
  const long by = here.y - prev.y;
  const long fx = next.x - here.x;
  const long fy = next.y - here.y;
  const long cross = bx * fy - by * fx;
  const long dot = bx * fx + by * fy;
  return !(cross == 0 && dot > 0);
}

VertexSet extract_vertices(std::span<const CellIndex> path) {
  VertexSet out;
  if (path.empty()) return out;
  const std::size_t last = path.size() - 1;
  out.vertices.push_back(path.front());
  out.path_indices.push_back(0);
  for (std::size_t i = 1; i < last; ++i) {
    bool turning = true;
    for (int k = 1; k <= kVertexScales && turning; ++k) turning = direction_changes(path, i, k);
    if (turning) {
      out.vertices.push_back(path[i]);
      out.path_indices.push_back(i);
    }
  }
  if (last > 0) {
    out.vertices.push_back(path.back());
    out.path_indices.push_back(last);
  }
  return out;
}

}  // namespace vnrrt
