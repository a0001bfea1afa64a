#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vnrrt/geometry.hpp"

namespace vnrrt {

enum class CellClass : std::uint8_t { Free = 0, Obstacle = 1, Start = 2, Goal = 3 };

struct CellIndex {
  int x = 0;  // column
  int y = 0;  // row, 0 = top

  friend constexpr bool operator==(const CellIndex&, const CellIndex&) = default;
  friend constexpr auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

inline ContinuousPoint cell_center(CellIndex c) { return {c.x + 0.5, c.y + 0.5}; }

/// Occupancy grid with exactly one Start and one Goal cell. The start/goal
/// fields are authoritative for planning; the cell classes mirror them for
/// rendering and dataset export.
class GridMap {
 public:
  /// Builds a map from raw classes; start and goal are located from the
  /// unique Start/Goal cells. Throws InvalidConfig on any invariant breach.
  GridMap(int width, int height, std::vector<CellClass> cells);

  /// Obstacle-free map with the given endpoints stamped.
  static GridMap empty(int width, int height, CellIndex start, CellIndex goal);

  /// Obstacle layer with new endpoints. Old Start/Goal cells revert to Free.
  static GridMap from_obstacles(int width, int height, std::span<const std::uint8_t> obstacle,
                                CellIndex start, CellIndex goal);

  GridMap with_endpoints(CellIndex start, CellIndex goal) const;

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  CellIndex start() const noexcept { return start_; }
  CellIndex goal() const noexcept { return goal_; }
  std::span<const CellClass> cells() const noexcept { return cells_; }

  bool in_bounds(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  bool in_bounds(CellIndex c) const noexcept { return in_bounds(c.x, c.y); }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }
  std::size_t index(CellIndex c) const noexcept { return index(c.x, c.y); }

  CellClass at(int x, int y) const { return cells_[index(x, y)]; }
  CellClass at(CellIndex c) const { return at(c.x, c.y); }

  /// Out-of-bounds cells count as blocked.
  bool blocked(int x, int y) const noexcept {
    return !in_bounds(x, y) || cells_[index(x, y)] == CellClass::Obstacle;
  }
  bool blocked(CellIndex c) const noexcept { return blocked(c.x, c.y); }

  std::size_t count(CellClass cls) const;

  friend bool operator==(const GridMap&, const GridMap&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<CellClass> cells_;
  CellIndex start_;
  CellIndex goal_;
};

inline constexpr std::array<std::array<int, 2>, 8> kNeighborOffsets{{
    {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

/// Visits the 8-connected moves out of `c`. A diagonal move is refused only
/// when both orthogonal cells it passes between are blocked.
template <class Fn>
void for_each_move(const GridMap& map, CellIndex c, Fn&& fn) {
  for (const auto& [dx, dy] : kNeighborOffsets) {
    const CellIndex n{c.x + dx, c.y + dy};
    if (map.blocked(n)) continue;
    const bool diagonal = dx != 0 && dy != 0;
    if (diagonal && map.blocked(c.x + dx, c.y) && map.blocked(c.x, c.y + dy)) continue;
    fn(n, diagonal);
  }
}

/// Connected-component label per cell (-1 for obstacles) under for_each_move.
std::vector<int> label_components(const GridMap& map);

bool connected(const GridMap& map, CellIndex a, CellIndex b);

// ---------------------------------------------------------------------------
// Procedural generation

enum class ShapeKind { Triangle, Circle, Square, Bar, UShape };

std::string_view shape_name(ShapeKind kind);
ShapeKind parse_shape(std::string_view name);

struct MapGenConfig {
  int width = 200;
  int height = 200;
  int min_obstacles = 5;
  int max_obstacles = 15;
  std::vector<ShapeKind> shapes{ShapeKind::Triangle, ShapeKind::Circle, ShapeKind::Square,
                                ShapeKind::Bar, ShapeKind::UShape};
  double min_size = 10.0;
  double max_size = 40.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One placed obstacle. Non-circular shapes are unions of convex polygons
/// (counter-clockwise, world coordinates); circles use `radius`.
struct Obstacle {
  ShapeKind shape = ShapeKind::Square;
  ContinuousPoint center;
  double size = 0.0;
  double rotation = 0.0;  // radians
  double radius = 0.0;
  std::vector<std::vector<ContinuousPoint>> parts;
};

/// Pixels whose centers fall inside the obstacle, clipped to the map.
std::vector<CellIndex> rasterize(const Obstacle& obstacle, int width, int height);

struct GeneratedMap {
  GridMap map;
  std::vector<Obstacle> obstacles;
};

inline constexpr int kGenerationAttempts = 64;

GeneratedMap generate_map_layout(const MapGenConfig& cfg);
GridMap generate_map(const MapGenConfig& cfg);

/// Batch generation; map i uses seed combine_seed(cfg.seed, i). Parallel over
/// maps with OpenMP; the serial variant is the reference.
std::vector<GridMap> generate_maps(const MapGenConfig& cfg, int count);
std::vector<GridMap> generate_maps_serial(const MapGenConfig& cfg, int count);

using StartGoalPair = std::pair<CellIndex, CellIndex>;

/// n_starts x n_goals cross product of distinct, mutually reachable free
/// cells, start-major.
std::vector<StartGoalPair> sample_start_goal_pairs(const GridMap& map, int n_starts, int n_goals,
                                                   std::uint64_t seed);

// ---------------------------------------------------------------------------
// VMAP1 text format

std::string write_map(const GridMap& map);
GridMap read_map(std::string_view text);

void save_map(const GridMap& map, const std::string& path);
GridMap load_map(const std::string& path);

}  // namespace vnrrt
