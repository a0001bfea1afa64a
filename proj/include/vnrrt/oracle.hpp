#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vnrrt/gridmap.hpp"

namespace vnrrt {

inline constexpr double kSqrt2 = 1.4142135623730951;

/// Path cost as `straight + diagonal * sqrt(2)`. Comparisons are exact integer
/// arithmetic, so A* ties never depend on floating-point rounding.
struct OctileCost {
  std::int64_t straight = 0;
  std::int64_t diagonal = 0;

  double value() const noexcept {
    return static_cast<double>(straight) + static_cast<double>(diagonal) * kSqrt2;
  }

  OctileCost operator+(OctileCost o) const noexcept {
    return {straight + o.straight, diagonal + o.diagonal};
  }

  friend bool operator==(OctileCost, OctileCost) = default;
  friend std::strong_ordering operator<=>(OctileCost a, OctileCost b) noexcept;
};

/// Admissible, consistent heuristic for 8-connected motion.
OctileCost octile_distance(CellIndex a, CellIndex b) noexcept;

struct GridPath {
  std::vector<CellIndex> cells;
  OctileCost steps;
  double cost = 0.0;  // steps.value()
};

/// Minimum-cost 8-connected path. Among equal f the deeper node (larger g)
/// expands first, then smaller (y, x). Throws NoPath.
GridPath astar(const GridMap& map, CellIndex start, CellIndex goal);
inline GridPath astar(const GridMap& map) { return astar(map, map.start(), map.goal()); }

struct VertexSet {
  std::vector<CellIndex> vertices;
  std::vector<std::size_t> path_indices;  // positions of the vertices in the source path
};

inline constexpr int kVertexScales = 3;

/// True when the chord of `scale` steps leading into path[i] and the chord of
/// `scale` steps leading out of it are not the same direction. Returns false
/// when either chord would run past an end of the path.
bool direction_changes(std::span<const CellIndex> path, std::size_t i, int scale);

/// Turning points of a grid path: both endpoints plus every interior cell whose
/// direction changes at all scales 1..kVertexScales. Requires >= 2 cells.
VertexSet extract_vertices(std::span<const CellIndex> path);

}  // namespace vnrrt
