// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "simjoin/core.hpp"

namespace simjoin {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Interval on the extended real line with independently open or closed ends.
struct KeyInterval {
  double lo = -kInf;
  double hi = kInf;
  bool lo_open = false;
  bool hi_open = false;

  static KeyInterval closed(double lo, double hi) { return {lo, hi, false, false}; }

  bool contains(double v) const noexcept {
    return (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
  }
  bool empty() const noexcept { return lo > hi || (lo == hi && (lo_open || hi_open)); }
  /// [a, b] is contained in this interval.
  bool covers(double a, double b) const noexcept { return contains(a) && contains(b); }
  /// [a, b] does not meet this interval.
  bool misses(double a, double b) const noexcept {
    return (hi_open ? a >= hi : a > hi) || (lo_open ? b <= lo : b < lo);
  }
};

using KeyBox = std::vector<KeyInterval>;

bool box_contains(const KeyBox& box, std::span<const double> key) noexcept;

/// Dynamic orthogonal range tree over k-dimensional keys supporting range
/// counting and range reporting. Levels 0..k-2 are weight-balanced binary
/// trees rebuilt partially on imbalance; the last level of every node is a
/// sorted array so each canonical node reports a contiguous run.
class RangeCounter {
 public:
  struct Entry {
    double value;
    PointId id;
  };

  explicit RangeCounter(std::size_t dims, double alpha = 0.29);

  std::size_t dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return keys_.size(); }
  bool contains(PointId id) const { return keys_.count(id) != 0; }
  const std::vector<double>& key(PointId id) const;

  void insert(PointId id, std::vector<double> key);
  void erase(PointId id);
  void clear();

  /// Number of keys inside `box`. `work` accumulates node visits.
  std::uint64_t count(const KeyBox& box, std::uint64_t& work) const;

  /// Appends one contiguous run per canonical node; together the runs hold
  /// exactly the keys inside `box`, each once.
  void report(const KeyBox& box, std::vector<std::span<const Entry>>& runs,
              std::uint64_t& work) const;

 private:
  using Idx = std::uint32_t;
  static constexpr Idx kNil = std::numeric_limits<Idx>::max();

  struct Node {
    Idx left = kNil;
    Idx right = kNil;
    Idx secondary = kNil;
    double lo = 0;
    double hi = 0;
    double split_value = 0;  // max key of the left subtree
    PointId split_id = 0;
    PointId leaf_id = 0;
    std::uint32_t weight = 0;
    std::vector<Entry> last;  // populated on level dims-2
    bool leaf() const noexcept { return left == kNil; }
  };

  double coord(PointId id, std::size_t level) const { return keys_.at(id)[level]; }
  bool goes_left(const Node& n, PointId id, std::size_t level) const;

  Idx alloc();
  void free_subtree(Idx idx);
  Idx build(std::size_t level, std::vector<PointId>& ids);
  void collect(Idx idx, std::vector<PointId>& out) const;
  void sort_level(std::vector<PointId>& ids, std::size_t level) const;
  void insert_at(Idx& slot, std::size_t level, PointId id);
  void erase_at(Idx& slot, std::size_t level, PointId id);
  void last_insert(std::vector<Entry>& last, PointId id);
  void last_erase(std::vector<Entry>& last, PointId id);
  bool unbalanced(std::uint32_t child, std::uint32_t total) const noexcept;

  std::uint64_t count_at(Idx idx, std::size_t level, const KeyBox& box, std::uint64_t& work) const;
  void report_at(Idx idx, std::size_t level, const KeyBox& box,
                 std::vector<std::span<const Entry>>& runs, std::uint64_t& work) const;
  std::span<const Entry> last_range(const std::vector<Entry>& last, const KeyInterval& iv) const;

  std::size_t dims_;
  double alpha_;
  std::vector<Node> nodes_;
  std::vector<Idx> free_;
  Idx root_ = kNil;
  std::vector<Entry> flat_;  // dims == 1
  std::unordered_map<PointId, std::vector<double>> keys_;
};

}  // namespace simjoin
