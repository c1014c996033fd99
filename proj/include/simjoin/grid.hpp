// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <unordered_map>
#include <vector>

#include "simjoin/core.hpp"
#include "simjoin/session.hpp"

namespace simjoin {

using CellKey = std::vector<std::int64_t>;

/// Uniform grid anchored at the origin. The cell side makes every cell's
/// diameter at most eps * r / 2 under the chosen metric.
class GridGeometry {
 public:
  GridGeometry(std::size_t d, MetricKind metric, double r, double eps);

  static double cell_side(std::size_t d, MetricKind metric, double r, double eps);

  std::size_t dim() const noexcept { return d_; }
  MetricKind metric() const noexcept { return metric_; }
  double r() const noexcept { return r_; }
  double eps() const noexcept { return eps_; }
  double side() const noexcept { return side_; }
  /// Half-width of the offset box scanned for neighbours: ceil(r / side) + 1.
  std::int64_t reach() const noexcept { return reach_; }

  CellKey cell_of(std::span<const double> p) const;
  double cell_distance(const CellKey& c, const CellKey& e) const;
  bool near(const CellKey& c, const CellKey& e) const;
  /// Offsets o with cell_distance(c, c + o) <= r, in lexicographic order.
  const std::vector<CellKey>& offsets() const noexcept { return offsets_; }
  std::vector<CellKey> neighbors(const CellKey& c) const;
  /// Deterministic bound (2 ceil(r/side) + 3)^d on the neighbour count.
  double neighbor_box_bound() const;

 private:
  double gap(std::int64_t delta) const noexcept;

  std::size_t d_;
  MetricKind metric_;
  double r_;
  double eps_;
  double side_;
  std::int64_t reach_;
  std::vector<CellKey> offsets_;
};

struct GridOptions {
  bool constant_delay = false;  // keep per-cell lists of B-bearing neighbours
};

/// Fixed-threshold approximate join: reports every pair within r and
/// nothing beyond (1 + eps) r.
class GridJoin {
 public:
  GridJoin(std::size_t d, MetricKind metric, double r, double eps, GridOptions options = {});

  void build(std::span<const Point> a, std::span<const Point> b);
  void insert_a(const Point& p);
  void erase_a(PointId id);
  void insert_b(const Point& q);
  void erase_b(PointId id);
  void enumerate(EnumerationSession& session) const;

  const GridGeometry& geometry() const noexcept { return geo_; }
  std::size_t nonempty_cells() const noexcept { return cells_.size(); }
  std::size_t active_cells() const noexcept { return active_.size(); }
  std::uint64_t last_update_work() const noexcept { return last_work_; }

  struct CellView {
    CellKey key;
    std::vector<PointId> a;
    std::vector<PointId> b;
    std::uint64_t m;
    bool active;
  };
  std::vector<CellView> cells() const;
  CellKey cell_of_a(PointId id) const;

 private:
  struct Cell {
    std::vector<PointId> a;
    std::vector<PointId> b;
    std::uint64_t m = 0;
    bool active = false;
    std::vector<const CellKey*> b_near;  // constant-delay mode only
  };
  using Dir = std::map<CellKey, Cell>;
  struct Loc {
    const CellKey* key;
    std::size_t slot;
  };

  void check(const Point& p) const;
  /// Existing non-empty cells within r of c; scans whichever of the offset
  /// box and the directory is smaller unless `box_only`.
  template <typename D, typename F>
  static void for_each_near(D& dir, const GridGeometry& geo, const CellKey& c, std::uint64_t& work, F&& f,
                            bool box_only = false);
  /// Finds or creates the cell; a created cell gets its counter by a scan
  /// unless the caller folds that into its own pass.
  std::pair<Dir::iterator, bool> open_cell(const CellKey& key, bool scan);
  void close_if_empty(Dir::iterator it);
  void refresh(Dir::iterator it);
  static void remove_slot(std::vector<PointId>& v, std::size_t slot,
                          std::unordered_map<PointId, Loc>& locs);

  GridGeometry geo_;
  GridOptions options_;
  Dir cells_;
  struct KeyLess {
    bool operator()(const CellKey* x, const CellKey* y) const { return *x < *y; }
  };
  std::set<const CellKey*, KeyLess> active_;
  std::unordered_map<PointId, Loc> a_locs_;
  std::unordered_map<PointId, Loc> b_locs_;
  std::size_t b_cells_ = 0;
  std::uint64_t last_work_ = 0;
};

}  // namespace simjoin
