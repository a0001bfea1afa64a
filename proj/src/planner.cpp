#include "vnrrt/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "vnrrt/error.hpp"
#include "vnrrt/random.hpp"

namespace vnrrt {

namespace {

// Interval of pixel indices whose closed extent [i, i+1] meets [lo, hi].
std::pair<int, int> touched(double lo, double hi, int count) {
  const int first = std::max(0, static_cast<int>(std::ceil(lo)) - 1);
  const int last = std::min(count - 1, static_cast<int>(std::floor(hi)));
  return {first, last};
}

}  // namespace

bool obstacle_free(const GridMap& map, ContinuousPoint a, ContinuousPoint b) {
  const double xmin = std::min(a.x, b.x);
  const double xmax = std::max(a.x, b.x);
  const auto y_at = [&](double x) {
    if (x == a.x) return a.y;
    if (x == b.x) return b.y;
    return a.y + (x - a.x) * (b.y - a.y) / (b.x - a.x);
  };
  const auto [c0, c1] = touched(xmin, xmax, map.width());
  for (int col = c0; col <= c1; ++col) {
    const double lo = std::max(xmin, static_cast<double>(col));
    const double hi = std::min(xmax, static_cast<double>(col + 1));
    if (lo > hi) continue;
    double y0, y1;
    if (a.x == b.x) {
      y0 = std::min(a.y, b.y);
      y1 = std::max(a.y, b.y);
    } else {
      y0 = y_at(lo);
      y1 = y_at(hi);
      if (y0 > y1) std::swap(y0, y1);
    }
    const auto [r0, r1] = touched(y0, y1, map.height());
    for (int row = r0; row <= r1; ++row) {
      if (map.at(col, row) == CellClass::Obstacle) return false;
    }
  }
  return true;
}

ContinuousPoint steer(ContinuousPoint from, ContinuousPoint to, double step) {
  const double d = distance(from, to);
  if (d <= step) return to;
  const double s = step / d;
  return {from.x + (to.x - from.x) * s, from.y + (to.y - from.y) * s};
}

// ---------------------------------------------------------------------------

Tree::Tree(ContinuousPoint root, double width, double height, double bucket_size)
    : bucket_size_(bucket_size),
      cols_(std::max(1, static_cast<int>(std::ceil(width / bucket_size)))),
      rows_(std::max(1, static_cast<int>(std::ceil(height / bucket_size)))),
      buckets_(static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_)) {
  nodes_.push_back({root, kNoNode, 0.0, {}});
  buckets_[bucket_of(root)].push_back(0);
}

std::pair<int, int> Tree::bucket_coords(ContinuousPoint p) const {
  const int c = std::clamp(static_cast<int>(std::floor(p.x / bucket_size_)), 0, cols_ - 1);
  const int r = std::clamp(static_cast<int>(std::floor(p.y / bucket_size_)), 0, rows_ - 1);
  return {c, r};
}

std::size_t Tree::bucket_of(ContinuousPoint p) const {
  const auto [c, r] = bucket_coords(p);
  return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
}

NodeId Tree::add(ContinuousPoint p, NodeId parent) {
  const auto id = static_cast<NodeId>(nodes_.size());
  auto& par = nodes_[static_cast<std::size_t>(parent)];
  const double cost = par.cost + distance(par.point, p);
  par.children.push_back(id);
  nodes_.push_back({p, parent, cost, {}});
  buckets_[bucket_of(p)].push_back(id);
  return id;
}

void Tree::reparent(NodeId child, NodeId new_parent) {
  auto& old_children = nodes_[static_cast<std::size_t>(nodes_[static_cast<std::size_t>(child)].parent)].children;
  old_children.erase(std::find(old_children.begin(), old_children.end(), child));
  nodes_[static_cast<std::size_t>(new_parent)].children.push_back(child);
  nodes_[static_cast<std::size_t>(child)].parent = new_parent;

  std::vector<NodeId> stack{child};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    auto& n = nodes_[static_cast<std::size_t>(id)];
    const auto& par = nodes_[static_cast<std::size_t>(n.parent)];
    n.cost = par.cost + distance(par.point, n.point);
    stack.insert(stack.end(), n.children.begin(), n.children.end());
  }
}

NodeId Tree::nearest(ContinuousPoint q) const {
  const auto [qc, qr] = bucket_coords(q);
  NodeId best = kNoNode;
  double best_d2 = std::numeric_limits<double>::infinity();
  const auto consider = [&](int c, int r) {
    if (c < 0 || r < 0 || c >= cols_ || r >= rows_) return;
    for (NodeId id : buckets_[static_cast<std::size_t>(r) * cols_ + c]) {
      const double d2 = squared_distance(q, nodes_[static_cast<std::size_t>(id)].point);
      if (d2 < best_d2 || (d2 == best_d2 && id < best)) {
        best_d2 = d2;
        best = id;
      }
    }
  };
  const int max_ring = std::max(cols_, rows_);
  for (int ring = 0; ring <= max_ring; ++ring) {
    if (ring == 0) {
      consider(qc, qr);
    } else {
      for (int d = -ring; d <= ring; ++d) {
        consider(qc + d, qr - ring);
        consider(qc + d, qr + ring);
      }
      for (int d = -ring + 1; d <= ring - 1; ++d) {
        consider(qc - ring, qr + d);
        consider(qc + ring, qr + d);
      }
    }
    // Everything outside the scanned block is at least ring * bucket away.
    const double reach = ring * bucket_size_;
    if (best != kNoNode && best_d2 < reach * reach) break;
  }
  return best;
}

std::vector<NodeId> Tree::near(ContinuousPoint q, double radius) const {
  std::vector<NodeId> out;
  const auto [c0, r0] = bucket_coords({q.x - radius, q.y - radius});
  const auto [c1, r1] = bucket_coords({q.x + radius, q.y + radius});
  const double r2 = radius * radius;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      for (NodeId id : buckets_[static_cast<std::size_t>(r) * cols_ + c]) {
        if (squared_distance(q, nodes_[static_cast<std::size_t>(id)].point) <= r2) out.push_back(id);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ContinuousPoint> Tree::path_to(NodeId id) const {
  std::vector<ContinuousPoint> pts;
  for (NodeId n = id; n != kNoNode; n = nodes_[static_cast<std::size_t>(n)].parent) {
    pts.push_back(nodes_[static_cast<std::size_t>(n)].point);
  }
  std::reverse(pts.begin(), pts.end());
  return pts;
}

NodeId extend_and_rewire(Tree& tree, const GridMap& map, ContinuousPoint x_new, double radius) {
  auto candidates = tree.near(x_new, radius);
  const NodeId closest = tree.nearest(x_new);
  if (!std::binary_search(candidates.begin(), candidates.end(), closest)) {
    candidates.insert(std::lower_bound(candidates.begin(), candidates.end(), closest), closest);
  }

  NodeId parent = kNoNode;
  double parent_cost = std::numeric_limits<double>::infinity();
  for (NodeId id : candidates) {
    const auto& n = tree.node(id);
    const double c = n.cost + distance(n.point, x_new);
    if (c < parent_cost && obstacle_free(map, n.point, x_new)) {
      parent = id;
      parent_cost = c;
    }
  }
  if (parent == kNoNode) throw NoValidParent("no collision-free parent for the new vertex");

  const NodeId added = tree.add(x_new, parent);
  for (NodeId id : candidates) {
    if (id == parent) continue;
    const double via = tree.node(added).cost + distance(x_new, tree.node(id).point);
    if (via < tree.node(id).cost - kRewireEpsilon && obstacle_free(map, x_new, tree.node(id).point)) {
      tree.reparent(id, added);
    }
  }
  return added;
}

// ---------------------------------------------------------------------------

void PlannerConfig::validate() const {
  if (!(steer_step > 0.0)) throw InvalidConfig("steer step must be > 0");
  if (!(goal_radius > 0.0)) throw InvalidConfig("goal radius must be > 0");
  if (max_iterations < 0) throw InvalidConfig("max_iterations must be >= 0");
  if (rewire_gamma && !(*rewire_gamma >= 0.0)) throw InvalidConfig("rewire gamma must be >= 0");
  if (!(guided_mix >= 0.0 && guided_mix <= 1.0)) throw InvalidConfig("guided_mix must lie in [0, 1]");
  if (termination.kind == Termination::Kind::Optimal) {
    if (!(termination.epsilon >= 0.0)) throw InvalidConfig("epsilon must be >= 0");
    if (!(termination.reference_cost > 0.0)) throw InvalidConfig("optimal termination needs a positive reference cost");
  }
}

double rrt_star_gamma(const GridMap& map) {
  const auto free_area = static_cast<double>(map.cells().size() - map.count(CellClass::Obstacle));
  return 2.0 * std::sqrt(1.5) * std::sqrt(free_area / std::numbers::pi);
}

std::string_view status_name(PlanStatus s) {
  return s == PlanStatus::Solved ? "Solved" : "IterationBudgetExhausted";
}

PlanResult plan(const GridMap& map, const PlannerConfig& config, const GuidanceMap* guidance,
                const PlanObserver& observer) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  PlanResult result;

  std::optional<GuidanceSampler> sampler;
  if (config.guided_mix > 0.0) {
    if (guidance == nullptr) throw InvalidConfig("guided_mix > 0 requires a guidance map");
    if (guidance->width() != map.width() || guidance->height() != map.height()) {
      throw InvalidConfig("guidance raster dimensions do not match the map");
    }
    if (config.mask) {
      try {
        sampler.emplace(apply_mask(*guidance, *config.mask));
      } catch (const AllMasked&) {
        result.mask_fell_back = true;
        sampler.emplace(*guidance);
      }
    } else {
      sampler.emplace(*guidance);
    }
  }

  const ContinuousPoint start = cell_center(map.start());
  const ContinuousPoint goal = cell_center(map.goal());
  const double width = map.width();
  const double height = map.height();
  Tree tree(start, width, height, std::max(config.steer_step, 1.0));
  Rng rng(config.seed);
  NodeId goal_node = kNoNode;
  const double gamma = config.rewire_gamma.value_or(rrt_star_gamma(map));

  const auto best_cost = [&]() -> std::optional<double> {
    if (goal_node == kNoNode) return std::nullopt;
    return tree.node(goal_node).cost;
  };

  for (int it = 1; it <= config.max_iterations; ++it) {
    result.iterations_used = it;
    const double u = uniform01(rng);
    ContinuousPoint q;
    if (sampler && u < config.guided_mix) {
      q = sampler->sample(rng);
    } else {
      q = {uniform01(rng) * width, uniform01(rng) * height};
    }

    const NodeId closest = tree.nearest(q);
    const ContinuousPoint x_new = steer(tree.node(closest).point, q, config.steer_step);
    NodeId added = kNoNode;
    if (obstacle_free(map, tree.node(closest).point, x_new)) {
      const double n = static_cast<double>(tree.size());
      const double radius =
          n > 1.0 ? std::min(gamma * std::sqrt(std::log(n) / n), config.steer_step) : 0.0;
      added = extend_and_rewire(tree, map, x_new, radius);

      if (distance(x_new, goal) <= config.goal_radius && obstacle_free(map, x_new, goal)) {
        if (goal_node == kNoNode) {
          goal_node = tree.add(goal, added);
          result.iterations_to_first_solution = it;
        } else if (added != goal_node) {
          const double via = tree.node(added).cost + distance(x_new, goal);
          if (via < tree.node(goal_node).cost - kRewireEpsilon) tree.reparent(goal_node, added);
        }
      }
    }

    if (observer) observer(PlanStep{it, tree, added, best_cost()});
    if (goal_node != kNoNode && config.termination.satisfied(tree.node(goal_node).cost)) {
      result.status = PlanStatus::Solved;
      break;
    }
  }

  if (goal_node != kNoNode) {
    result.best_cost = tree.node(goal_node).cost;
    result.best_path = tree.path_to(goal_node);
  }
  result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

nlohmann::json to_json(const PlanResult& result, bool include_timing) {
  nlohmann::json j;
  j["status"] = status_name(result.status);
  j["best_cost"] = result.best_cost ? nlohmann::json(*result.best_cost) : nlohmann::json(nullptr);
  j["iterations_used"] = result.iterations_used;
  j["iterations_to_first_solution"] = result.iterations_to_first_solution
                                          ? nlohmann::json(*result.iterations_to_first_solution)
                                          : nlohmann::json(nullptr);
  j["wall_time_s"] = include_timing ? nlohmann::json(result.wall_time_s) : nlohmann::json(nullptr);
  auto path = nlohmann::json::array();
  for (const auto& p : result.best_path) path.push_back({p.x, p.y});
  j["path"] = std::move(path);
  if (result.mask_fell_back) j["mask_fell_back"] = true;
  return j;
}

}  // namespace vnrrt
