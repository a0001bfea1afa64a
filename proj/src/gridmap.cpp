#include "vnrrt/gridmap.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <exception>
#include <numbers>
#include <optional>
#include <queue>
#include <sstream>

#include "vnrrt/error.hpp"
#include "vnrrt/random.hpp"

namespace vnrrt {

namespace {

std::string cell_str(CellIndex c) {
  return "(" + std::to_string(c.x) + ", " + std::to_string(c.y) + ")";
}

}  // namespace

GridMap::GridMap(int width, int height, std::vector<CellClass> cells)
    : width_(width), height_(height), cells_(std::move(cells)) {
  if (width < 1 || height < 1) throw InvalidConfig("map dimensions must be positive");
  if (cells_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw InvalidConfig("cell array length does not match width x height");
  }
  int starts = 0;
  int goals = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const auto cls = cells_[index(x, y)];
      if (static_cast<std::uint8_t>(cls) > 3) throw InvalidConfig("invalid cell class");
      if (cls == CellClass::Start) {
        start_ = {x, y};
        ++starts;
      } else if (cls == CellClass::Goal) {
        goal_ = {x, y};
        ++goals;
      }
    }
  }
  if (starts != 1 || goals != 1) {
    throw InvalidConfig("map must contain exactly one start and one goal cell");
  }
}

GridMap GridMap::empty(int width, int height, CellIndex start, CellIndex goal) {
  std::vector<std::uint8_t> none(static_cast<std::size_t>(std::max(width, 0)) *
                                 static_cast<std::size_t>(std::max(height, 0)));
  return from_obstacles(width, height, none, start, goal);
}

GridMap GridMap::from_obstacles(int width, int height, std::span<const std::uint8_t> obstacle,
                                CellIndex start, CellIndex goal) {
  if (width < 1 || height < 1) throw InvalidConfig("map dimensions must be positive");
  const auto in = [&](CellIndex c) { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; };
  if (!in(start) || !in(goal)) throw InvalidConfig("start/goal out of bounds");
  if (start == goal) throw InvalidConfig("start and goal must differ");
  std::vector<CellClass> cells(obstacle.size());
  for (std::size_t i = 0; i < obstacle.size(); ++i) {
    cells[i] = obstacle[i] ? CellClass::Obstacle : CellClass::Free;
  }
  const auto at = [&](CellIndex c) -> CellClass& {
    return cells[static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width) +
                 static_cast<std::size_t>(c.x)];
  };
  if (at(start) == CellClass::Obstacle) throw InvalidConfig("start " + cell_str(start) + " is inside an obstacle");
  if (at(goal) == CellClass::Obstacle) throw InvalidConfig("goal " + cell_str(goal) + " is inside an obstacle");
  at(start) = CellClass::Start;
  at(goal) = CellClass::Goal;
  return GridMap(width, height, std::move(cells));
}

GridMap GridMap::with_endpoints(CellIndex start, CellIndex goal) const {
  std::vector<std::uint8_t> obstacle(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) obstacle[i] = cells_[i] == CellClass::Obstacle;
  return from_obstacles(width_, height_, obstacle, start, goal);
}

std::size_t GridMap::count(CellClass cls) const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), cls));
}

std::vector<int> label_components(const GridMap& map) {
  std::vector<int> label(map.cells().size(), -1);
  std::vector<CellIndex> stack;
  int next = 0;
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (map.blocked(x, y) || label[map.index(x, y)] >= 0) continue;
      label[map.index(x, y)] = next;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const CellIndex c = stack.back();
        stack.pop_back();
        for_each_move(map, c, [&](CellIndex n, bool) {
          auto& l = label[map.index(n)];
          if (l < 0) {
            l = next;
            stack.push_back(n);
          }
        });
      }
      ++next;
    }
  }
  return label;
}

bool connected(const GridMap& map, CellIndex a, CellIndex b) {
  if (map.blocked(a) || map.blocked(b)) return false;
  if (a == b) return true;
  std::vector<std::uint8_t> seen(map.cells().size(), 0);
  std::queue<CellIndex> frontier;
  frontier.push(a);
  seen[map.index(a)] = 1;
  while (!frontier.empty()) {
    const CellIndex c = frontier.front();
    frontier.pop();
    bool found = false;
    for_each_move(map, c, [&](CellIndex n, bool) {
      if (seen[map.index(n)]) return;
      seen[map.index(n)] = 1;
      if (n == b) found = true;
      frontier.push(n);
    });
    if (found) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------

std::string_view shape_name(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Triangle: return "triangle";
    case ShapeKind::Circle: return "circle";
    case ShapeKind::Square: return "square";
    case ShapeKind::Bar: return "bar";
    case ShapeKind::UShape: return "u_shape";
  }
  return "?";
}

ShapeKind parse_shape(std::string_view name) {
  for (auto k : {ShapeKind::Triangle, ShapeKind::Circle, ShapeKind::Square, ShapeKind::Bar,
                 ShapeKind::UShape}) {
    if (shape_name(k) == name) return k;
  }
  throw InvalidConfig("unknown obstacle shape '" + std::string(name) + "'");
}

void MapGenConfig::validate() const {
  if (width < 8 || height < 8) throw InvalidConfig("generated maps must be at least 8x8");
  if (min_obstacles < 0 || max_obstacles < min_obstacles) {
    throw InvalidConfig("obstacle count range must be nonempty with min >= 0");
  }
  if (shapes.empty()) throw InvalidConfig("shape set must be nonempty");
  if (!(min_size > 0.0) || !(max_size >= min_size) || !std::isfinite(max_size)) {
    throw InvalidConfig("obstacle size range must be positive and nonempty");
  }
}

namespace {

using Polygon = std::vector<ContinuousPoint>;

Polygon rect(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

double signed_area2(const Polygon& p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& u = p[i];
    const auto& v = p[(i + 1) % p.size()];
    a += u.x * v.y - v.x * u.y;
  }
  return a;
}

// Boundary counts as inside.
bool inside_convex(const Polygon& p, ContinuousPoint q) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& u = p[i];
    const auto& v = p[(i + 1) % p.size()];
    if ((v.x - u.x) * (q.y - u.y) - (v.y - u.y) * (q.x - u.x) < 0.0) return false;
  }
  return true;
}

Obstacle make_obstacle(ShapeKind shape, ContinuousPoint center, double size, double rotation,
                       Rng& rng) {
  Obstacle ob;
  ob.shape = shape;
  ob.center = center;
  ob.size = size;
  ob.rotation = rotation;
  const double h = size / 2.0;
  std::vector<Polygon> local;
  switch (shape) {
    case ShapeKind::Circle:
      ob.radius = h;
      return ob;
    case ShapeKind::Square:
      local.push_back(rect(-h, -h, h, h));
      break;
    case ShapeKind::Bar: {
      const double aspect = std::uniform_real_distribution<double>(4.0, 6.0)(rng);
      const double thickness = std::max(2.0, size / aspect);
      const double length = std::max(size, 4.0 * thickness);
      local.push_back(rect(-length / 2, -thickness / 2, length / 2, thickness / 2));
      break;
    }
    case ShapeKind::UShape: {
      const double t = std::max(2.0, size / 6.0);
      local.push_back(rect(-h, -h, -h + t, h));
      local.push_back(rect(h - t, -h, h, h));
      local.push_back(rect(-h, h - t, h, h));
      break;
    }
    case ShapeKind::Triangle: {
      std::uniform_real_distribution<double> coord(-h, h);
      Polygon tri;
      for (int attempt = 0; attempt < 16; ++attempt) {
        tri = {{coord(rng), coord(rng)}, {coord(rng), coord(rng)}, {coord(rng), coord(rng)}};
        if (std::abs(signed_area2(tri)) / 2.0 >= size * size / 8.0) break;
        tri.clear();
      }
      if (tri.empty()) tri = {{-h, h}, {h, h}, {0.0, -h}};
      local.push_back(std::move(tri));
      break;
    }
  }
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  for (auto& poly : local) {
    if (signed_area2(poly) < 0.0) std::reverse(poly.begin(), poly.end());
    for (auto& p : poly) {
      p = {center.x + c * p.x - s * p.y, center.y + s * p.x + c * p.y};
    }
    ob.parts.push_back(std::move(poly));
  }
  return ob;
}

}  // namespace

std::vector<CellIndex> rasterize(const Obstacle& obstacle, int width, int height) {
  double x0 = obstacle.center.x - obstacle.radius;
  double x1 = obstacle.center.x + obstacle.radius;
  double y0 = obstacle.center.y - obstacle.radius;
  double y1 = obstacle.center.y + obstacle.radius;
  for (const auto& poly : obstacle.parts) {
    for (const auto& p : poly) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
  }
  const int cx0 = std::max(0, static_cast<int>(std::floor(x0 - 0.5)));
  const int cx1 = std::min(width - 1, static_cast<int>(std::ceil(x1)));
  const int cy0 = std::max(0, static_cast<int>(std::floor(y0 - 0.5)));
  const int cy1 = std::min(height - 1, static_cast<int>(std::ceil(y1)));

  std::vector<CellIndex> out;
  const double r2 = obstacle.radius * obstacle.radius;
  for (int y = cy0; y <= cy1; ++y) {
    for (int x = cx0; x <= cx1; ++x) {
      const ContinuousPoint q{x + 0.5, y + 0.5};
      bool hit = obstacle.shape == ShapeKind::Circle && squared_distance(q, obstacle.center) <= r2;
      for (const auto& poly : obstacle.parts) {
        if (hit) break;
        hit = inside_convex(poly, q);
      }
      if (hit) out.push_back({x, y});
    }
  }
  return out;
}

GeneratedMap generate_map_layout(const MapGenConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const std::size_t n_cells =
      static_cast<std::size_t>(cfg.width) * static_cast<std::size_t>(cfg.height);

  for (int attempt = 0; attempt < kGenerationAttempts; ++attempt) {
    const int count = std::uniform_int_distribution<int>(cfg.min_obstacles, cfg.max_obstacles)(rng);
    std::vector<Obstacle> obstacles;
    std::vector<std::uint8_t> grid(n_cells, 0);
    for (int i = 0; i < count; ++i) {
      const auto shape =
          cfg.shapes[std::uniform_int_distribution<std::size_t>(0, cfg.shapes.size() - 1)(rng)];
      const double size = std::uniform_real_distribution<double>(cfg.min_size, cfg.max_size)(rng);
      const double cx = std::uniform_real_distribution<double>(0.0, cfg.width)(rng);
      const double cy = std::uniform_real_distribution<double>(0.0, cfg.height)(rng);
      const double rot = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
      obstacles.push_back(make_obstacle(shape, {cx, cy}, size, rot, rng));
      for (const auto& c : rasterize(obstacles.back(), cfg.width, cfg.height)) {
        grid[static_cast<std::size_t>(c.y) * cfg.width + c.x] = 1;
      }
    }

    std::vector<CellIndex> free;
    for (int y = 0; y < cfg.height; ++y) {
      for (int x = 0; x < cfg.width; ++x) {
        if (!grid[static_cast<std::size_t>(y) * cfg.width + x]) free.push_back({x, y});
      }
    }
    if (free.size() < 2) continue;

    std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
    for (int endpoint_try = 0; endpoint_try < 8; ++endpoint_try) {
      const CellIndex start = free[pick(rng)];
      CellIndex goal = free[pick(rng)];
      while (goal == start) goal = free[pick(rng)];
      auto map = GridMap::from_obstacles(cfg.width, cfg.height, grid, start, goal);
      if (connected(map, start, goal)) return {std::move(map), std::move(obstacles)};
    }
  }
  throw GenerationFailed("no connected start/goal configuration after " +
                         std::to_string(kGenerationAttempts) +
                         " attempts; obstacle configuration is too dense");
}

GridMap generate_map(const MapGenConfig& cfg) { return generate_map_layout(cfg).map; }

namespace {

MapGenConfig nth_config(const MapGenConfig& cfg, int i) {
  MapGenConfig c = cfg;
  c.seed = combine_seed(cfg.seed, static_cast<std::uint64_t>(i));
  return c;
}

}  // namespace

std::vector<GridMap> generate_maps_serial(const MapGenConfig& cfg, int count) {
  std::vector<GridMap> maps;
  maps.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) maps.push_back(generate_map(nth_config(cfg, i)));
  return maps;
}

std::vector<GridMap> generate_maps(const MapGenConfig& cfg, int count) {
  cfg.validate();
  if (count <= 0) return {};
  std::vector<std::optional<GridMap>> slots(static_cast<std::size_t>(count));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) {
    try {
      slots[static_cast<std::size_t>(i)].emplace(generate_map(nth_config(cfg, i)));
    } catch (...) {
#pragma omp critical(vnrrt_generate_maps)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<GridMap> maps;
  maps.reserve(slots.size());
  for (auto& s : slots) maps.push_back(std::move(*s));
  return maps;
}

std::vector<StartGoalPair> sample_start_goal_pairs(const GridMap& map, int n_starts, int n_goals,
                                                   std::uint64_t seed) {
  if (n_starts < 1 || n_goals < 1) throw InvalidConfig("n_starts and n_goals must be positive");
  const auto need = static_cast<std::size_t>(n_starts) + static_cast<std::size_t>(n_goals);
  const auto labels = label_components(map);
  std::vector<CellIndex> free;
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (!map.blocked(x, y)) free.push_back({x, y});
    }
  }
  if (free.size() < need) {
    throw InsufficientFreeSpace("map has " + std::to_string(free.size()) + " free cells, " +
                                std::to_string(need) + " required");
  }

  Rng rng(seed);
  for (int attempt = 0; attempt < kGenerationAttempts; ++attempt) {
    // Rejection sampling of disconnected pairs reduces to drawing every cell
    // from the component of the first one.
    const CellIndex anchor = free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
    const int comp = labels[map.index(anchor)];
    std::vector<CellIndex> pool;
    for (const auto& c : free) {
      if (labels[map.index(c)] == comp) pool.push_back(c);
    }
    if (pool.size() < need) continue;
    for (std::size_t i = 0; i < need; ++i) {
      const auto j = std::uniform_int_distribution<std::size_t>(i, pool.size() - 1)(rng);
      std::swap(pool[i], pool[j]);
    }
    std::vector<StartGoalPair> pairs;
    pairs.reserve(static_cast<std::size_t>(n_starts) * static_cast<std::size_t>(n_goals));
    for (int s = 0; s < n_starts; ++s) {
      for (int g = 0; g < n_goals; ++g) {
        pairs.emplace_back(pool[static_cast<std::size_t>(s)],
                           pool[static_cast<std::size_t>(n_starts + g)]);
      }
    }
    return pairs;
  }
  throw InsufficientFreeSpace("no connected region holds " + std::to_string(need) +
                              " distinct free cells");
}

// ---------------------------------------------------------------------------

std::string write_map(const GridMap& map) {
  std::string out = "VMAP1\n" + std::to_string(map.width()) + " " + std::to_string(map.height()) + "\n";
  out.reserve(out.size() + map.cells().size() + static_cast<std::size_t>(map.height()));
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      out.push_back(static_cast<char>('0' + static_cast<int>(map.at(x, y))));
    }
    out.push_back('\n');
  }
  return out;
}

namespace {

int parse_dim(std::string_view field, int line, int column) {
  int value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError("expected a decimal dimension, got '" + std::string(field) + "'", line, column);
  }
  if (value < 1) throw ParseError("dimension must be positive", line, column);
  return value;
}

}  // namespace

GridMap read_map(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }

  if (lines.empty() || lines[0] != "VMAP1") throw ParseError("missing VMAP1 magic", 1, 1);
  if (lines.size() < 2) throw ParseError("missing dimension line", 2, 1);
  const auto dims = lines[1];
  const auto sp = dims.find(' ');
  if (sp == std::string_view::npos) throw ParseError("expected '<width> <height>'", 2, 1);
  const int width = parse_dim(dims.substr(0, sp), 2, 1);
  const int height = parse_dim(dims.substr(sp + 1), 2, static_cast<int>(sp) + 2);

  if (lines.size() < static_cast<std::size_t>(height) + 2) {
    throw ParseError("expected " + std::to_string(height) + " rows",
                     static_cast<int>(lines.size()) + 1, 1);
  }
  for (std::size_t i = static_cast<std::size_t>(height) + 2; i < lines.size(); ++i) {
    if (!lines[i].empty()) throw ParseError("trailing content after last row", static_cast<int>(i) + 1, 1);
  }

  std::vector<CellClass> cells;
  cells.reserve(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  int starts = 0;
  int goals = 0;
  for (int y = 0; y < height; ++y) {
    const auto row = lines[static_cast<std::size_t>(y) + 2];
    const int line_no = y + 3;
    for (int x = 0; x < width; ++x) {
      if (static_cast<std::size_t>(x) >= row.size()) {
        throw ParseError("row shorter than width " + std::to_string(width), line_no, x + 1);
      }
      const char ch = row[static_cast<std::size_t>(x)];
      if (ch < '0' || ch > '3') {
        throw ParseError(std::string("invalid cell character '") + ch + "'", line_no, x + 1);
      }
      if (ch == '2' && ++starts > 1) throw ParseError("more than one start cell", line_no, x + 1);
      if (ch == '3' && ++goals > 1) throw ParseError("more than one goal cell", line_no, x + 1);
      cells.push_back(static_cast<CellClass>(ch - '0'));
    }
    if (row.size() > static_cast<std::size_t>(width)) {
      throw ParseError("row longer than width " + std::to_string(width), line_no, width + 1);
    }
  }
  if (starts != 1) throw ParseError("map has no start cell", height + 3, 1);
  if (goals != 1) throw ParseError("map has no goal cell", height + 3, 1);
  return GridMap(width, height, std::move(cells));
}

void save_map(const GridMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << write_map(map);
  if (!out) throw IoError("failed writing '" + path + "'");
}

GridMap load_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open map file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_map(buf.str());
}

}  // namespace vnrrt
