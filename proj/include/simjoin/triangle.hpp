// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

#include "simjoin/grid.hpp"

namespace simjoin {

/// Fixed-threshold approximate triangle join over A, B and S: reports every
/// triple with all three distances within r, and nothing with a distance
/// beyond (1 + eps) r.
///
/// m_c counts the (b, s) pairs whose cells are pairwise within r of each
/// other and of c. A cell is active when it holds an A point and m_c > 0.
class TriangleJoin {
 public:
  TriangleJoin(std::size_t d, MetricKind metric, double r, double eps);

  void build(std::span<const Point> a, std::span<const Point> b, std::span<const Point> s);
  void insert(Side side, const Point& p);
  void erase(Side side, PointId id);
  void enumerate(EnumerationSession& session) const;

  const GridGeometry& geometry() const noexcept { return geo_; }
  std::size_t nonempty_cells() const noexcept { return cells_.size(); }
  std::size_t active_cells() const noexcept { return active_.size(); }
  std::uint64_t last_update_work() const noexcept { return last_work_; }
  /// Non-empty cells within r of both c and c1, in key order.
  std::vector<CellKey> lens(const CellKey& c, const CellKey& c1) const;

  struct CellView {
    CellKey key;
    std::vector<PointId> pts[3];
    std::uint64_t m;
    bool active;
  };
  std::vector<CellView> cells() const;

 private:
  struct Cell {
    std::vector<PointId> pts[3];
    std::uint64_t m = 0;
    bool active = false;
  };
  using Dir = std::map<CellKey, Cell>;
  struct Loc {
    const CellKey* key;
    std::size_t slot;
  };

  void check(const Point& p) const;
  std::vector<Dir::iterator> near_cells(const CellKey& c, std::uint64_t& work);
  std::vector<Dir::const_iterator> near_cells(const CellKey& c, std::uint64_t& work) const;
  std::uint64_t count_m(const std::vector<Dir::iterator>& nc);
  void refresh(Dir::iterator it);

  GridGeometry geo_;
  Dir cells_;
  struct KeyLess {
    bool operator()(const CellKey* x, const CellKey* y) const { return *x < *y; }
  };
  std::set<const CellKey*, KeyLess> active_;
  std::unordered_map<PointId, Loc> locs_[3];
  std::uint64_t last_work_ = 0;
};

}  // namespace simjoin
