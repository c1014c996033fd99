// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "simjoin/core.hpp"
#include "simjoin/session.hpp"

namespace simjoin {

/// Variable-threshold approximate join. A quadtree over A and B, a
/// well-separated pair decomposition of its nodes (separation eps / 2), and
/// the pairs ordered by cell distance. enumerate(r) reports every pair
/// within r and nothing beyond (1 + eps) r.
///
/// Leaves hold one distinct location (coincident points share a leaf) and
/// are boxed by that location, so two leaves are always separated. Each
/// leaf also carries a self pair with distance 0 for its coincident A x B.
class WspdJoin {
 public:
  using NodeId = std::uint32_t;
  using PairId = std::uint32_t;
  static constexpr NodeId kNil = 0xffffffffU;

  WspdJoin(std::size_t d, MetricKind metric, double eps, int depth_cap = 64);

  void build(std::span<const Point> a, std::span<const Point> b);
  void insert_a(const Point& p) { insert(p, Side::A); }
  void insert_b(const Point& q) { insert(q, Side::B); }
  void erase_a(PointId id) { erase(id, Side::A); }
  void erase_b(PointId id) { erase(id, Side::B); }
  void enumerate(double r, EnumerationSession& session) const;

  std::size_t dim() const noexcept { return d_; }
  double eps() const noexcept { return eps_; }
  MetricKind metric() const noexcept { return metric_; }

  struct Box {
    std::vector<double> lo;
    std::vector<double> hi;
  };
  struct PairView {
    NodeId u;
    NodeId v;
    double delta;
    bool self;
    bool productive;
  };
  std::vector<PairView> pairs() const;
  Box box(NodeId u) const;
  std::vector<PointId> points_under(NodeId u, Side side) const;
  int depth(NodeId u) const { return nodes_.at(u).depth; }
  bool is_leaf(NodeId u) const { return nodes_.at(u).leaf; }
  NodeId root() const noexcept { return root_; }
  std::size_t node_count() const noexcept { return nodes_.size() - free_nodes_.size(); }
  std::size_t pair_count() const noexcept { return pairs_.size() - free_pairs_.size(); }
  std::size_t productive_pairs() const noexcept { return z_.size(); }

  /// Pairs removed plus pairs created by the last update.
  std::uint64_t last_update_pairs() const noexcept { return last_pairs_; }
  std::uint64_t last_update_work() const noexcept { return last_work_; }
  std::uint64_t rebuilds() const noexcept { return rebuilds_; }

  /// Geometry-level identity of the pair set: (depth, cell corner) for
  /// internal nodes, location for leaves. Two indexes with the same root
  /// cell and points produce equal signatures.
  std::vector<std::string> signature() const;
  /// Fresh index over the current points with the same root cell.
  WspdJoin rebuilt() const;

 private:
  struct Node {
    std::vector<double> lo;  // cell corner
    double side = 0;
    int depth = 0;
    NodeId parent = kNil;
    std::uint32_t slot = 0;
    std::vector<std::pair<std::uint32_t, NodeId>> children;  // sorted by slot
    bool leaf = false;
    std::vector<double> loc;
    std::vector<PointId> pts[2];
    std::size_t cnt[2] = {0, 0};
    NodeId first[2] = {kNil, kNil};
    NodeId last[2] = {kNil, kNil};
    NodeId prev[2] = {kNil, kNil};
    NodeId next[2] = {kNil, kNil};
    bool linked[2] = {false, false};
    std::vector<PairId> pairs;
  };
  struct Pair {
    NodeId u = kNil;
    NodeId v = kNil;
    double delta = 0;
    std::uint64_t seq = 0;
    bool productive = false;
    bool live = false;
  };
  struct Loc {
    NodeId leaf;
    std::size_t slot;
  };
  using ZKey = std::tuple<double, std::uint64_t, PairId>;

  void insert(const Point& p, Side side);
  void erase(PointId id, Side side);
  void check(const Point& p) const;
  void reset_root(std::span<const std::vector<double>> pts);
  bool in_root(std::span<const double> p) const;
  void rebuild_with(const std::vector<double>* extra);
  void insert_point(PointId id, const std::vector<double>& p, Side side, bool pairs_on);

  NodeId new_node(NodeId parent, std::uint32_t slot);
  void free_node(NodeId u);
  std::uint32_t child_slot(NodeId u, std::span<const double> p) const;
  NodeId child_at(NodeId u, std::uint32_t slot) const;
  void attach(NodeId parent, std::uint32_t slot, NodeId child);
  void detach(NodeId parent, NodeId child);
  int split_depth(NodeId leaf, std::span<const double> p) const;

  void link(NodeId leaf, int s);
  void unlink(NodeId leaf, int s);
  void refresh_leaf(NodeId leaf);
  void refresh_up(NodeId u);

  double diam(NodeId u) const;
  double gap(NodeId u, NodeId v) const;
  bool separated(NodeId u, NodeId v) const;
  void gen(NodeId u, NodeId v);
  void add_pair(NodeId u, NodeId v, double delta);
  void kill_pair(PairId id);
  void set_productive(PairId id);
  void subtree(NodeId u, std::vector<NodeId>& out) const;
  void drop_pairs(const std::vector<NodeId>& nodes);
  void regenerate(NodeId w);
  std::vector<NodeId> frontier(NodeId w) const;
  void refresh_pairs_on_path(NodeId leaf);
  void build_pairs();

  std::size_t d_;
  MetricKind metric_;
  double eps_;
  double sep_;
  int depth_cap_;
  std::vector<double> root_lo_;
  double root_side_ = 0;
  bool has_root_cell_ = false;

  std::vector<Node> nodes_;
  std::vector<NodeId> free_nodes_;
  NodeId root_ = kNil;
  NodeId head_[2] = {kNil, kNil};
  std::vector<Pair> pairs_;
  std::vector<PairId> free_pairs_;
  std::uint64_t seq_ = 0;
  std::set<ZKey> z_;
  std::unordered_map<PointId, Loc> locs_[2];
  std::unordered_map<PointId, std::vector<double>> coords_[2];

  std::uint64_t last_pairs_ = 0;
  std::uint64_t last_work_ = 0;
  std::uint64_t rebuilds_ = 0;
};

}  // namespace simjoin
