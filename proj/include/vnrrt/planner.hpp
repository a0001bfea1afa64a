#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vnrrt/geometry.hpp"
#include "vnrrt/gridmap.hpp"
#include "vnrrt/guidance.hpp"

namespace vnrrt {

/// True iff no Obstacle pixel's closed unit square touches the segment [a, b]
/// (supercover). Endpoints must lie within [0, width] x [0, height].
bool obstacle_free(const GridMap& map, ContinuousPoint a, ContinuousPoint b);

/// `to` if within `step` of `from`, else the point `step` along the way.
ContinuousPoint steer(ContinuousPoint from, ContinuousPoint to, double step);

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

struct TreeNode {
  ContinuousPoint point;
  NodeId parent = kNoNode;
  double cost = 0.0;  // cost-to-come from the root
  std::vector<NodeId> children;
};

/// RRT* search tree with a uniform bucket grid for proximity queries.
/// Invariant: cost(child) == cost(parent) + |child - parent| for every edge.
class Tree {
 public:
  Tree(ContinuousPoint root, double width, double height, double bucket_size = 10.0);

  NodeId add(ContinuousPoint p, NodeId parent);
  /// Moves `child` under `new_parent` and recomputes the costs of its subtree.
  void reparent(NodeId child, NodeId new_parent);

  /// Closest node to q; ties go to the smallest id.
  NodeId nearest(ContinuousPoint q) const;
  /// Nodes within `radius` of q (inclusive), ascending id.
  std::vector<NodeId> near(ContinuousPoint q, double radius) const;

  const TreeNode& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
  std::span<const TreeNode> nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  static constexpr NodeId root() noexcept { return 0; }

  /// Root-to-node waypoints.
  std::vector<ContinuousPoint> path_to(NodeId id) const;

 private:
  std::size_t bucket_of(ContinuousPoint p) const;
  std::pair<int, int> bucket_coords(ContinuousPoint p) const;

  std::vector<TreeNode> nodes_;
  double bucket_size_;
  int cols_;
  int rows_;
  std::vector<std::vector<NodeId>> buckets_;
};

inline constexpr double kRewireEpsilon = 1e-9;

/// Adds x_new under the cheapest collision-free neighbor within `radius`
/// (the nearest node is always a candidate), then re-parents every neighbor
/// whose cost-to-come drops by more than kRewireEpsilon. Returns the new id.
/// Throws NoValidParent.
NodeId extend_and_rewire(Tree& tree, const GridMap& map, ContinuousPoint x_new, double radius);

struct Termination {
  enum class Kind { Initial, Optimal };

  Kind kind = Kind::Initial;
  double epsilon = 0.02;
  double reference_cost = 0.0;

  static Termination initial() { return {}; }
  static Termination optimal(double epsilon, double reference_cost) {
    return {Kind::Optimal, epsilon, reference_cost};
  }

  bool satisfied(double best_cost) const {
    return kind == Kind::Initial || best_cost <= (1.0 + epsilon) * reference_cost;
  }
};

struct PlannerConfig {
  double steer_step = 10.0;    // eta
  double goal_radius = 5.0;    // delta
  int max_iterations = 100000;
  /// Rewire radius constant; unset means rrt_star_gamma(map).
  std::optional<double> rewire_gamma;
  double guided_mix = 0.5;     // probability of drawing from the guidance map
  Termination termination;
  std::uint64_t seed = 0;
  std::optional<MaskThreshold> mask;

  void validate() const;
};

enum class PlanStatus { Solved, IterationBudgetExhausted };

std::string_view status_name(PlanStatus s);

struct PlanResult {
  PlanStatus status = PlanStatus::IterationBudgetExhausted;
  std::vector<ContinuousPoint> best_path;  // empty if no solution was found
  std::optional<double> best_cost;
  int iterations_used = 0;
  std::optional<int> iterations_to_first_solution;
  double wall_time_s = 0.0;
  bool mask_fell_back = false;  // masking removed everything; unmasked map used
};

struct PlanStep {
  int iteration;
  const Tree& tree;
  NodeId added;  // kNoNode when the iteration was rejected
  std::optional<double> best_cost;
};

using PlanObserver = std::function<void(const PlanStep&)>;

/// 2 * sqrt(1 + 1/2) * sqrt(free_area / pi): the planar RRT* lower bound on
/// gamma for asymptotic optimality.
double rrt_star_gamma(const GridMap& map);

/// RRT* when guided_mix == 0, otherwise the mixed sampler: each iteration
/// draws from `guidance` with probability guided_mix and uniformly otherwise.
/// Start and goal are the centers of the map's start/goal cells.
PlanResult plan(const GridMap& map, const PlannerConfig& config,
                const GuidanceMap* guidance = nullptr, const PlanObserver& observer = {});

nlohmann::json to_json(const PlanResult& result, bool include_timing = true);

}  // namespace vnrrt
