// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#include "simjoin/range_counter.hpp"

#include <algorithm>

namespace simjoin {

bool box_contains(const KeyBox& box, std::span<const double> key) noexcept {
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (!box[i].contains(key[i])) return false;
  }
  return true;
}

RangeCounter::RangeCounter(std::size_t dims, double alpha) : dims_(dims), alpha_(alpha) {
  if (dims == 0) throw config_error("range counter needs at least one key dimension");
}

const std::vector<double>& RangeCounter::key(PointId id) const {
  auto it = keys_.find(id);
  if (it == keys_.end()) throw not_found("unknown key id " + std::to_string(id));
  return it->second;
}

void RangeCounter::clear() {
  nodes_.clear();
  free_.clear();
  root_ = kNil;
  flat_.clear();
  keys_.clear();
}

bool RangeCounter::unbalanced(std::uint32_t child, std::uint32_t total) const noexcept {
  const std::uint32_t other = total - child;
  const double floor = alpha_ * total;
  return total >= 3 && (child < floor || other < floor);
}

bool RangeCounter::goes_left(const Node& n, PointId id, std::size_t level) const {
  const double v = coord(id, level);
  return v < n.split_value || (v == n.split_value && id <= n.split_id);
}

RangeCounter::Idx RangeCounter::alloc() {
  if (!free_.empty()) {
    const Idx idx = free_.back();
    free_.pop_back();
    nodes_[idx] = Node{};
    return idx;
  }
  nodes_.emplace_back();
  return static_cast<Idx>(nodes_.size() - 1);
}

void RangeCounter::free_subtree(Idx idx) {
  if (idx == kNil) return;
  free_subtree(nodes_[idx].left);
  free_subtree(nodes_[idx].right);
  free_subtree(nodes_[idx].secondary);
  nodes_[idx].last.clear();
  nodes_[idx].last.shrink_to_fit();
  free_.push_back(idx);
}

void RangeCounter::sort_level(std::vector<PointId>& ids, std::size_t level) const {
  std::sort(ids.begin(), ids.end(), [&](PointId x, PointId y) {
    const double vx = coord(x, level);
    const double vy = coord(y, level);
    return vx < vy || (vx == vy && x < y);
  });
}

RangeCounter::Idx RangeCounter::build(std::size_t level, std::vector<PointId>& ids) {
  // `ids` arrives sorted by this level's coordinate.
  const Idx idx = alloc();
  {
    Node& n = nodes_[idx];
    n.weight = static_cast<std::uint32_t>(ids.size());
    n.lo = coord(ids.front(), level);
    n.hi = coord(ids.back(), level);
  }
  if (level + 2 == dims_) {
    std::vector<Entry> last;
    last.reserve(ids.size());
    for (PointId id : ids) last.push_back({coord(id, level + 1), id});
    std::sort(last.begin(), last.end(), [](const Entry& x, const Entry& y) {
      return x.value < y.value || (x.value == y.value && x.id < y.id);
    });
    nodes_[idx].last = std::move(last);
  } else {
    std::vector<PointId> next = ids;
    sort_level(next, level + 1);
    const Idx sec = build(level + 1, next);
    nodes_[idx].secondary = sec;
  }
  if (ids.size() == 1) {
    nodes_[idx].leaf_id = ids.front();
    return idx;
  }
  const std::size_t half = ids.size() / 2;
  std::vector<PointId> left(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(half));
  std::vector<PointId> right(ids.begin() + static_cast<std::ptrdiff_t>(half), ids.end());
  const Idx l = build(level, left);
  const Idx r = build(level, right);
  Node& n = nodes_[idx];
  n.left = l;
  n.right = r;
  n.split_id = left.back();
  n.split_value = coord(left.back(), level);
  return idx;
}

void RangeCounter::collect(Idx idx, std::vector<PointId>& out) const {
  const Node& n = nodes_[idx];
  if (n.leaf()) {
    out.push_back(n.leaf_id);
    return;
  }
  collect(n.left, out);
  collect(n.right, out);
}

void RangeCounter::last_insert(std::vector<Entry>& last, PointId id) {
  const Entry e{coord(id, dims_ - 1), id};
  auto it = std::lower_bound(last.begin(), last.end(), e, [](const Entry& x, const Entry& y) {
    return x.value < y.value || (x.value == y.value && x.id < y.id);
  });
  last.insert(it, e);
}

void RangeCounter::last_erase(std::vector<Entry>& last, PointId id) {
  const Entry e{coord(id, dims_ - 1), id};
  auto it = std::lower_bound(last.begin(), last.end(), e, [](const Entry& x, const Entry& y) {
    return x.value < y.value || (x.value == y.value && x.id < y.id);
  });
  last.erase(it);
}

void RangeCounter::insert_at(Idx& slot, std::size_t level, PointId id) {
  if (slot == kNil) {
    std::vector<PointId> one{id};
    slot = build(level, one);
    return;
  }
  const Idx idx = slot;
  if (nodes_[idx].leaf()) {
    std::vector<PointId> ids{nodes_[idx].leaf_id, id};
    sort_level(ids, level);
    free_subtree(idx);
    slot = build(level, ids);
    return;
  }
  const bool left = goes_left(nodes_[idx], id, level);
  const Idx child = left ? nodes_[idx].left : nodes_[idx].right;
  if (unbalanced(nodes_[child].weight + 1, nodes_[idx].weight + 1)) {
    std::vector<PointId> ids;
    collect(idx, ids);
    ids.push_back(id);
    sort_level(ids, level);
    free_subtree(idx);
    slot = build(level, ids);
    return;
  }
  const double v = coord(id, level);
  {
    Node& n = nodes_[idx];
    ++n.weight;
    n.lo = std::min(n.lo, v);
    n.hi = std::max(n.hi, v);
  }
  if (level + 2 == dims_) {
    last_insert(nodes_[idx].last, id);
  } else {
    Idx sec = nodes_[idx].secondary;
    insert_at(sec, level + 1, id);
    nodes_[idx].secondary = sec;
  }
  Idx c = child;
  insert_at(c, level, id);
  if (left) {
    nodes_[idx].left = c;
  } else {
    nodes_[idx].right = c;
  }
}

void RangeCounter::erase_at(Idx& slot, std::size_t level, PointId id) {
  const Idx idx = slot;
  if (nodes_[idx].leaf()) {
    free_subtree(idx);
    slot = kNil;
    return;
  }
  const bool left = goes_left(nodes_[idx], id, level);
  const Idx child = left ? nodes_[idx].left : nodes_[idx].right;
  const Idx sibling = left ? nodes_[idx].right : nodes_[idx].left;
  if (nodes_[child].leaf()) {
    nodes_[idx].right = kNil;
    nodes_[idx].left = kNil;
    free_subtree(child);
    free_subtree(idx);
    slot = sibling;
    return;
  }
  if (unbalanced(nodes_[child].weight - 1, nodes_[idx].weight - 1)) {
    std::vector<PointId> ids;
    collect(idx, ids);
    ids.erase(std::find(ids.begin(), ids.end(), id));
    free_subtree(idx);
    slot = build(level, ids);
    return;
  }
  --nodes_[idx].weight;
  if (level + 2 == dims_) {
    last_erase(nodes_[idx].last, id);
  } else {
    Idx sec = nodes_[idx].secondary;
    erase_at(sec, level + 1, id);
    nodes_[idx].secondary = sec;
  }
  Idx c = child;
  erase_at(c, level, id);
  Node& n = nodes_[idx];
  if (left) {
    n.left = c;
  } else {
    n.right = c;
  }
  n.lo = nodes_[n.left].lo;
  n.hi = nodes_[n.right].hi;
}

void RangeCounter::insert(PointId id, std::vector<double> key) {
  if (key.size() != dims_) throw invalid_input("key dimension mismatch");
  if (!keys_.emplace(id, std::move(key)).second) {
    throw invalid_input("duplicate key id " + std::to_string(id));
  }
  if (dims_ == 1) {
    last_insert(flat_, id);
    return;
  }
  insert_at(root_, 0, id);
}

void RangeCounter::erase(PointId id) {
  if (!contains(id)) throw not_found("unknown key id " + std::to_string(id));
  if (dims_ == 1) {
    last_erase(flat_, id);
  } else {
    erase_at(root_, 0, id);
  }
  keys_.erase(id);
}

std::span<const RangeCounter::Entry> RangeCounter::last_range(const std::vector<Entry>& last,
                                                             const KeyInterval& iv) const {
  auto first = std::partition_point(last.begin(), last.end(), [&](const Entry& e) {
    return iv.lo_open ? e.value <= iv.lo : e.value < iv.lo;
  });
  auto end = std::partition_point(first, last.end(), [&](const Entry& e) {
    return iv.hi_open ? e.value < iv.hi : e.value <= iv.hi;
  });
  if (first >= end) return {};
  return {&*first, static_cast<std::size_t>(end - first)};
}

std::uint64_t RangeCounter::count_at(Idx idx, std::size_t level, const KeyBox& box,
                                     std::uint64_t& work) const {
  if (idx == kNil) return 0;
  ++work;
  const Node& n = nodes_[idx];
  const KeyInterval& iv = box[level];
  if (iv.misses(n.lo, n.hi)) return 0;
  if (iv.covers(n.lo, n.hi)) {
    if (level + 2 == dims_) return last_range(n.last, box[level + 1]).size();
    return count_at(n.secondary, level + 1, box, work);
  }
  if (n.leaf()) return 0;
  return count_at(n.left, level, box, work) + count_at(n.right, level, box, work);
}

void RangeCounter::report_at(Idx idx, std::size_t level, const KeyBox& box,
                             std::vector<std::span<const Entry>>& runs,
                             std::uint64_t& work) const {
  if (idx == kNil) return;
  ++work;
  const Node& n = nodes_[idx];
  const KeyInterval& iv = box[level];
  if (iv.misses(n.lo, n.hi)) return;
  if (iv.covers(n.lo, n.hi)) {
    if (level + 2 == dims_) {
      auto run = last_range(n.last, box[level + 1]);
      if (!run.empty()) runs.push_back(run);
      return;
    }
    report_at(n.secondary, level + 1, box, runs, work);
    return;
  }
  if (n.leaf()) return;
  report_at(n.left, level, box, runs, work);
  report_at(n.right, level, box, runs, work);
}

std::uint64_t RangeCounter::count(const KeyBox& box, std::uint64_t& work) const {
  if (box.size() != dims_) throw invalid_input("query box dimension mismatch");
  for (const auto& iv : box) {
    if (iv.empty()) return 0;
  }
  if (dims_ == 1) {
    ++work;
    return last_range(flat_, box[0]).size();
  }
  return count_at(root_, 0, box, work);
}

void RangeCounter::report(const KeyBox& box, std::vector<std::span<const Entry>>& runs,
                          std::uint64_t& work) const {
  if (box.size() != dims_) throw invalid_input("query box dimension mismatch");
  for (const auto& iv : box) {
    if (iv.empty()) return;
  }
  if (dims_ == 1) {
    ++work;
    auto run = last_range(flat_, box[0]);
    if (!run.empty()) runs.push_back(run);
    return;
  }
  report_at(root_, 0, box, runs, work);
}

}  // namespace simjoin
