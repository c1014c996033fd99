// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "simjoin/core.hpp"
#include "simjoin/range_counter.hpp"
#include "simjoin/session.hpp"

namespace simjoin {

/// Closed axis-aligned box; sides may be infinite.
struct Rect {
  std::vector<KeyInterval> sides;  // only lo/hi are used; always closed
  std::size_t dim() const noexcept { return sides.size(); }
  bool contains(std::span<const double> p) const noexcept;
  bool empty() const noexcept;
};

Rect make_rect(std::vector<double> lo, std::vector<double> hi);

/// Which rectangle endpoints are free per axis in containment mode. A side
/// that is not free must be the matching infinity for every rectangle.
struct RectShape {
  std::vector<bool> has_lo;
  std::vector<bool> has_hi;

  static RectShape bounded(std::size_t d);
  std::size_t dim() const noexcept { return has_lo.size(); }
  std::size_t key_dims() const noexcept;
};

/// Centers x on one axis for which a node with interval `node` is canonical
/// for the ball [x - r, x + r]; `parent` is absent for a level-tree root.
std::optional<KeyInterval> center_region(KeyInterval node, std::optional<KeyInterval> parent, double r);

/// Exact join between a dynamic point set A and a dynamic set B of query
/// boxes. In hypercube mode every b is a point and its box is the closed
/// l-infinity ball of radius r around it; in containment mode every b
/// carries its own box.
class RangeTreeJoin {
 public:
  using NodeId = std::uint32_t;
  static constexpr NodeId kNil = std::numeric_limits<NodeId>::max();
  static constexpr PointId kSentinel = std::numeric_limits<PointId>::max();

  struct NodeView {
    NodeId id;
    NodeId parent;     // within its level tree
    NodeId owner;      // node of the previous level holding this tree
    NodeId left;
    NodeId right;
    std::size_t level;
    double lo;
    double hi;
    std::uint32_t live;
    std::uint64_t beta;
    bool active;
    bool leaf;
    PointId point;  // leaves only; kSentinel for the infinite guards
  };

  static RangeTreeJoin hypercube(std::size_t d, double r, double alpha = 0.29);
  static RangeTreeJoin containment(RectShape shape, double alpha = 0.29);

  RangeTreeJoin(RangeTreeJoin&&) noexcept = default;
  RangeTreeJoin& operator=(RangeTreeJoin&&) noexcept = default;

  void build(std::span<const Point> a, std::span<const Point> b);
  void build(std::span<const Point> a, std::span<const std::pair<PointId, Rect>> b);
  void insert_a(const Point& p);
  void erase_a(PointId id);
  /// Hypercube mode.
  void insert_b(const Point& q);
  /// Containment mode.
  void insert_b(PointId id, const Rect& rect);
  void erase_b(PointId id);

  void enumerate(EnumerationSession& session) const;

  std::size_t dim() const noexcept { return d_; }
  bool hypercube_mode() const noexcept { return hypercube_; }
  double r() const noexcept { return r_; }
  std::size_t size_a() const noexcept { return a_.size(); }
  std::size_t size_b() const noexcept { return b_keys_.size(); }

  /// Level-d nodes canonical for the box of b.
  std::vector<NodeId> canonical_nodes(const Rect& query) const;
  std::vector<NodeId> canonical_nodes_for_center(std::span<const double> x) const;
  /// Region of Z-keys for which node u is canonical; nullopt when empty.
  std::optional<KeyBox> canonical_rect(NodeId u) const;
  /// Z-key of a hypercube center or a containment rectangle.
  std::vector<double> key_of(const Rect& rect) const;

  NodeView node(NodeId u) const;
  std::vector<NodeId> last_level_nodes() const;
  std::vector<NodeId> active_nodes() const { return {active_.begin(), active_.end()}; }
  std::vector<PointId> points_under(NodeId u) const;

  std::uint64_t last_update_work() const noexcept { return last_work_; }
  std::uint64_t rebuilt_nodes() const noexcept { return rebuilt_; }
  std::size_t node_count() const noexcept { return nodes_.size() - free_.size(); }

 private:
  struct Node {
    NodeId parent = kNil;
    NodeId owner = kNil;
    NodeId left = kNil;
    NodeId right = kNil;
    NodeId secondary = kNil;
    NodeId first_leaf = kNil;
    NodeId last_leaf = kNil;
    NodeId prev_leaf = kNil;
    NodeId next_leaf = kNil;
    double lo = 0;
    double hi = 0;
    PointId id = 0;
    std::uint32_t weight = 0;
    std::uint32_t live = 0;
    std::uint64_t beta = 0;
    std::uint8_t level = 0;
    bool active = false;
    bool leaf() const noexcept { return left == kNil; }
  };

  struct LeafKey {
    double value;
    PointId id;
  };

  /// Per-axis view of a query: either a center (hypercube) or a box side.
  struct Probe {
    const double* center = nullptr;
    const Rect* rect = nullptr;
  };

  RangeTreeJoin(std::size_t d, bool hypercube, double r, RectShape shape, double alpha);
  void check_rect(const Rect& rect) const;

  bool contained(std::size_t axis, double lo, double hi, const Probe& q) const noexcept;
  bool missed(std::size_t axis, double lo, double hi, const Probe& q) const noexcept;
  void canonical_walk(NodeId v, const Probe& q, std::vector<NodeId>& out, std::uint64_t& work) const;
  bool axis_region(std::size_t axis, const Node& u, const Node* parent, KeyBox& box) const;

  static bool key_less(const LeafKey& x, const LeafKey& y) noexcept {
    return x.value < y.value || (x.value == y.value && x.id < y.id);
  }
  LeafKey key_of_leaf(const Node& n) const noexcept { return {n.lo, n.id}; }
  LeafKey point_key(PointId id, std::size_t level) const;
  double coord(PointId id, std::size_t level) const { return a_.at(id)[level]; }
  bool unbalanced(std::uint32_t child, std::uint32_t total) const noexcept;

  NodeId alloc();
  void destroy(NodeId v);
  NodeId build_tree(std::size_t level, NodeId owner, std::span<const LeafKey> leaves);
  NodeId build_level(std::size_t level, NodeId owner, std::vector<PointId> ids);
  std::vector<LeafKey> leaves_of(NodeId v) const;
  void replace(NodeId v, std::vector<LeafKey> leaves);
  void register_nodes(NodeId v);
  void refresh_activity(NodeId u);

  bool interval_shrinks(NodeId c, const LeafKey& key) const;
  void reset_tree(std::vector<PointId> ids);
  void tree_insert(NodeId root, std::size_t level, PointId id);
  void tree_erase(NodeId root, std::size_t level, PointId id);
  void adjust_beta(const Probe& q, int delta);

  std::size_t d_;
  bool hypercube_;
  double r_;
  RectShape shape_;
  double alpha_;
  RangeCounter z_;
  std::vector<Node> nodes_;
  std::vector<NodeId> free_;
  NodeId root_ = kNil;
  std::set<NodeId> active_;
  std::unordered_map<PointId, std::vector<double>> a_;
  std::unordered_map<PointId, Rect> b_rects_;  // containment mode
  std::unordered_map<PointId, std::vector<double>> b_keys_;
  std::uint64_t last_work_ = 0;
  std::uint64_t rebuilt_ = 0;
  std::vector<std::size_t> key_offset_;
};

}  // namespace simjoin
