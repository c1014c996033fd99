// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#include "simjoin/rangetree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace simjoin {

bool Rect::contains(std::span<const double> p) const noexcept {
  for (std::size_t i = 0; i < sides.size(); ++i) {
    if (!(sides[i].lo <= p[i] && p[i] <= sides[i].hi)) return false;
  }
  return true;
}

bool Rect::empty() const noexcept {
  for (const auto& s : sides) {
    if (s.lo > s.hi) return true;
  }
  return false;
}

Rect make_rect(std::vector<double> lo, std::vector<double> hi) {
  if (lo.size() != hi.size() || lo.empty()) throw invalid_input("rectangle bounds must have equal nonzero length");
  Rect rect;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (std::isnan(lo[i]) || std::isnan(hi[i])) throw invalid_input("rectangle bound is NaN");
    if (lo[i] > hi[i]) throw invalid_input("malformed rectangle: lo > hi on axis " + std::to_string(i));
    rect.sides.push_back(KeyInterval::closed(lo[i], hi[i]));
  }
  return rect;
}

RectShape RectShape::bounded(std::size_t d) {
  return {std::vector<bool>(d, true), std::vector<bool>(d, true)};
}

std::size_t RectShape::key_dims() const noexcept {
  std::size_t k = 0;
  for (std::size_t i = 0; i < has_lo.size(); ++i) k += (has_lo[i] ? 1 : 0) + (has_hi[i] ? 1 : 0);
  return k;
}

std::optional<KeyInterval> center_region(KeyInterval node, std::optional<KeyInterval> parent, double r) {
  const double c1 = node.hi - r;
  const double c2 = node.lo + r;
  if (!(c1 <= c2)) return std::nullopt;
  KeyInterval iv = KeyInterval::closed(c1, c2);
  if (parent) {
    const double p1 = parent->hi - r;
    const double p2 = parent->lo + r;
    if (p1 <= p2) {
      if (p1 == c1 && p2 == c2) return std::nullopt;
      if (p2 == c2) {
        iv.hi = p1;
        iv.hi_open = true;
      } else if (p1 == c1) {
        iv.lo = p2;
        iv.lo_open = true;
      } else {
        throw std::logic_error("child interval shares no endpoint with its parent");
      }
    }
  }
  if (iv.empty()) return std::nullopt;
  return iv;
}

namespace {

std::size_t checked_key_dims(bool hypercube, std::size_t d, const RectShape& shape) {
  if (d == 0) throw config_error("dimension must be at least 1");
  if (hypercube) return d;
  if (shape.has_lo.size() != d || shape.has_hi.size() != d) throw config_error("rectangle shape size mismatch");
  const std::size_t k = shape.key_dims();
  if (k == 0) throw config_error("rectangle shape has no free endpoint");
  return k;
}

}  // namespace

RangeTreeJoin::RangeTreeJoin(std::size_t d, bool hypercube, double r, RectShape shape, double alpha)
    : d_(d),
      hypercube_(hypercube),
      r_(r),
      shape_(std::move(shape)),
      alpha_(alpha),
      z_(checked_key_dims(hypercube, d, shape_), alpha) {
  if (hypercube && (!(r > 0) || !std::isfinite(r))) throw config_error("threshold r must be positive and finite");
  if (!hypercube) {
    std::size_t off = 0;
    for (std::size_t i = 0; i < d; ++i) {
      key_offset_.push_back(off);
      off += (shape_.has_lo[i] ? 1 : 0) + (shape_.has_hi[i] ? 1 : 0);
    }
  }
  reset_tree({});
}

RangeTreeJoin RangeTreeJoin::hypercube(std::size_t d, double r, double alpha) {
  return RangeTreeJoin(d, true, r, {}, alpha);
}

RangeTreeJoin RangeTreeJoin::containment(RectShape shape, double alpha) {
  const std::size_t d = shape.dim();
  return RangeTreeJoin(d, false, 0.0, std::move(shape), alpha);
}

// ---- query predicates ------------------------------------------------------

bool RangeTreeJoin::contained(std::size_t axis, double lo, double hi, const Probe& q) const noexcept {
  if (q.center) {
    const double x = q.center[axis];
    return x >= hi - r_ && x <= lo + r_;
  }
  const KeyInterval& s = q.rect->sides[axis];
  return s.lo <= lo && s.hi >= hi;
}

bool RangeTreeJoin::missed(std::size_t axis, double lo, double hi, const Probe& q) const noexcept {
  if (q.center) {
    const double x = q.center[axis];
    return x < lo - r_ || x > hi + r_;
  }
  const KeyInterval& s = q.rect->sides[axis];
  return s.hi < lo || s.lo > hi;
}

void RangeTreeJoin::canonical_walk(NodeId v, const Probe& q, std::vector<NodeId>& out,
                                   std::uint64_t& work) const {
  ++work;
  const Node& n = nodes_[v];
  const std::size_t level = n.level;
  if (missed(level, n.lo, n.hi, q)) return;
  if (contained(level, n.lo, n.hi, q)) {
    if (level + 1 == d_) {
      out.push_back(v);
    } else {
      canonical_walk(n.secondary, q, out, work);
    }
    return;
  }
  if (n.leaf()) return;
  canonical_walk(n.left, q, out, work);
  canonical_walk(n.right, q, out, work);
}

std::vector<RangeTreeJoin::NodeId> RangeTreeJoin::canonical_nodes(const Rect& query) const {
  if (query.dim() != d_) throw invalid_input("query dimension mismatch");
  std::vector<NodeId> out;
  std::uint64_t work = 0;
  Probe q;
  q.rect = &query;
  canonical_walk(root_, q, out, work);
  return out;
}

std::vector<RangeTreeJoin::NodeId> RangeTreeJoin::canonical_nodes_for_center(std::span<const double> x) const {
  if (!hypercube_) throw config_error("center queries need hypercube mode");
  if (x.size() != d_) throw invalid_input("query dimension mismatch");
  std::vector<NodeId> out;
  std::uint64_t work = 0;
  Probe q;
  q.center = x.data();
  canonical_walk(root_, q, out, work);
  return out;
}

bool RangeTreeJoin::axis_region(std::size_t axis, const Node& u, const Node* parent, KeyBox& box) const {
  if (hypercube_) {
    std::optional<KeyInterval> p;
    if (parent) p = KeyInterval::closed(parent->lo, parent->hi);
    auto iv = center_region(KeyInterval::closed(u.lo, u.hi), p, r_);
    if (!iv) return false;
    box[axis] = *iv;
    return true;
  }

  KeyInterval lo_iv = KeyInterval::closed(-kInf, u.lo);
  KeyInterval hi_iv = KeyInterval::closed(u.hi, kInf);
  if (parent) {
    const bool shared_lo = parent->lo == u.lo;
    const bool shared_hi = parent->hi == u.hi;
    if (shared_lo && shared_hi) return false;
    if (shared_lo) {
      hi_iv.hi = parent->hi;
      hi_iv.hi_open = true;
    } else if (shared_hi) {
      lo_iv.lo = parent->lo;
      lo_iv.lo_open = true;
    } else {
      throw std::logic_error("child interval shares no endpoint with its parent");
    }
  }
  std::size_t off = key_offset_[axis];
  if (shape_.has_lo[axis]) {
    if (lo_iv.empty()) return false;
    box[off++] = lo_iv;
  } else if (!lo_iv.contains(-kInf)) {
    return false;
  }
  if (shape_.has_hi[axis]) {
    if (hi_iv.empty()) return false;
    box[off] = hi_iv;
  } else if (!hi_iv.contains(kInf)) {
    return false;
  }
  return true;
}

std::optional<KeyBox> RangeTreeJoin::canonical_rect(NodeId u) const {
  if (std::size_t{nodes_.at(u).level} + 1 != d_) throw invalid_input("canonical_rect needs a last-level node");
  KeyBox box(z_.dims());
  NodeId x = u;
  for (std::size_t level = d_; level-- > 0;) {
    const Node& n = nodes_[x];
    const Node* parent = n.parent == kNil ? nullptr : &nodes_[n.parent];
    if (!axis_region(level, n, parent, box)) return std::nullopt;
    x = n.owner;
  }
  return box;
}

std::vector<double> RangeTreeJoin::key_of(const Rect& rect) const {
  if (hypercube_) throw config_error("rectangle keys need containment mode");
  std::vector<double> key;
  key.reserve(z_.dims());
  for (std::size_t i = 0; i < d_; ++i) {
    if (shape_.has_lo[i]) key.push_back(rect.sides[i].lo);
    if (shape_.has_hi[i]) key.push_back(rect.sides[i].hi);
  }
  return key;
}

// ---- storage ---------------------------------------------------------------

RangeTreeJoin::LeafKey RangeTreeJoin::point_key(PointId id, std::size_t level) const {
  return {coord(id, level), id};
}

bool RangeTreeJoin::unbalanced(std::uint32_t child, std::uint32_t total) const noexcept {
  const double floor = alpha_ * total;
  return total >= 3 && (child < floor || total - child < floor);
}

RangeTreeJoin::NodeId RangeTreeJoin::alloc() {
  if (!free_.empty()) {
    const NodeId v = free_.back();
    free_.pop_back();
    nodes_[v] = Node{};
    return v;
  }
  if (nodes_.size() >= kNil) throw std::length_error("range tree node arena exhausted");
  nodes_.emplace_back();
  return static_cast<NodeId>(nodes_.size() - 1);
}

void RangeTreeJoin::destroy(NodeId v) {
  std::vector<NodeId> stack{v};
  while (!stack.empty()) {
    const NodeId x = stack.back();
    stack.pop_back();
    Node& n = nodes_[x];
    if (n.active) active_.erase(x);
    if (n.left != kNil) stack.push_back(n.left);
    if (n.right != kNil) stack.push_back(n.right);
    if (n.secondary != kNil) stack.push_back(n.secondary);
    n = Node{};
    free_.push_back(x);
  }
}

RangeTreeJoin::NodeId RangeTreeJoin::build_tree(std::size_t level, NodeId owner,
                                                std::span<const LeafKey> leaves) {
  const NodeId v = alloc();
  {
    Node& n = nodes_[v];
    n.level = static_cast<std::uint8_t>(level);
    n.owner = owner;
    n.lo = leaves.front().value;
    n.hi = leaves.back().value;
    n.weight = static_cast<std::uint32_t>(leaves.size());
    n.live = static_cast<std::uint32_t>(
        std::count_if(leaves.begin(), leaves.end(), [](const LeafKey& k) { return k.id != kSentinel; }));
  }
  if (leaves.size() == 1) {
    Node& n = nodes_[v];
    n.id = leaves.front().id;
    n.first_leaf = v;
    n.last_leaf = v;
  } else {
    const std::size_t half = leaves.size() / 2;
    const NodeId l = build_tree(level, owner, leaves.first(half));
    const NodeId r = build_tree(level, owner, leaves.subspan(half));
    nodes_[l].parent = v;
    nodes_[r].parent = v;
    const NodeId lmax = nodes_[l].last_leaf;
    const NodeId rmin = nodes_[r].first_leaf;
    nodes_[lmax].next_leaf = rmin;
    nodes_[rmin].prev_leaf = lmax;
    Node& n = nodes_[v];
    n.left = l;
    n.right = r;
    n.first_leaf = nodes_[l].first_leaf;
    n.last_leaf = nodes_[r].last_leaf;
  }
  if (level + 1 < d_) {
    std::vector<PointId> ids;
    ids.reserve(leaves.size());
    for (const LeafKey& k : leaves) {
      if (k.id != kSentinel) ids.push_back(k.id);
    }
    const NodeId sec = build_level(level + 1, v, std::move(ids));
    nodes_[v].secondary = sec;
  }
  return v;
}

RangeTreeJoin::NodeId RangeTreeJoin::build_level(std::size_t level, NodeId owner, std::vector<PointId> ids) {
  std::vector<LeafKey> leaves;
  leaves.reserve(ids.size() + 2);
  leaves.push_back({-kInf, kSentinel});
  for (PointId id : ids) leaves.push_back(point_key(id, level));
  leaves.push_back({kInf, kSentinel});
  std::sort(leaves.begin() + 1, leaves.end() - 1, key_less);
  const NodeId root = build_tree(level, owner, leaves);
  nodes_[root].parent = kNil;
  return root;
}

std::vector<RangeTreeJoin::LeafKey> RangeTreeJoin::leaves_of(NodeId v) const {
  std::vector<LeafKey> out;
  out.reserve(nodes_[v].weight);
  const NodeId last = nodes_[v].last_leaf;
  for (NodeId x = nodes_[v].first_leaf;; x = nodes_[x].next_leaf) {
    out.push_back(key_of_leaf(nodes_[x]));
    if (x == last) break;
  }
  return out;
}

void RangeTreeJoin::register_nodes(NodeId v) {
  std::vector<NodeId> stack{v};
  while (!stack.empty()) {
    const NodeId x = stack.back();
    stack.pop_back();
    ++last_work_;
    const Node& n = nodes_[x];
    if (n.left != kNil) stack.push_back(n.left);
    if (n.right != kNil) stack.push_back(n.right);
    if (n.secondary != kNil) stack.push_back(n.secondary);
    if (std::size_t{n.level} + 1 != d_) continue;
    std::uint64_t beta = 0;
    if (z_.size() > 0) {
      if (auto box = canonical_rect(x)) beta = z_.count(*box, last_work_);
    }
    nodes_[x].beta = beta;
    refresh_activity(x);
  }
}

void RangeTreeJoin::refresh_activity(NodeId u) {
  Node& n = nodes_[u];
  const bool want = n.live > 0 && n.beta > 0;
  if (want == n.active) return;
  n.active = want;
  if (want) {
    active_.insert(u);
  } else {
    active_.erase(u);
  }
}

void RangeTreeJoin::replace(NodeId v, std::vector<LeafKey> leaves) {
  const Node old = nodes_[v];
  const NodeId prev = nodes_[old.first_leaf].prev_leaf;
  const NodeId next = nodes_[old.last_leaf].next_leaf;
  const bool is_left = old.parent != kNil && nodes_[old.parent].left == v;
  destroy(v);
  const NodeId nv = build_tree(old.level, old.owner, leaves);
  nodes_[nv].parent = old.parent;
  if (old.parent == kNil) {
    if (old.owner == kNil) {
      root_ = nv;
    } else {
      nodes_[old.owner].secondary = nv;
    }
  } else if (is_left) {
    nodes_[old.parent].left = nv;
  } else {
    nodes_[old.parent].right = nv;
  }
  const NodeId first = nodes_[nv].first_leaf;
  const NodeId last = nodes_[nv].last_leaf;
  nodes_[first].prev_leaf = prev;
  if (prev != kNil) nodes_[prev].next_leaf = first;
  nodes_[last].next_leaf = next;
  if (next != kNil) nodes_[next].prev_leaf = last;
  for (NodeId p = old.parent; p != kNil; p = nodes_[p].parent) {
    nodes_[p].first_leaf = nodes_[nodes_[p].left].first_leaf;
    nodes_[p].last_leaf = nodes_[nodes_[p].right].last_leaf;
  }
  rebuilt_ += leaves.size();
  last_work_ += leaves.size();
  register_nodes(nv);
}

void RangeTreeJoin::reset_tree(std::vector<PointId> ids) {
  nodes_.clear();
  free_.clear();
  active_.clear();
  root_ = build_level(0, kNil, std::move(ids));
  register_nodes(root_);
}

// ---- updates -----------------------------------------------------------------

bool RangeTreeJoin::interval_shrinks(NodeId c, const LeafKey& key) const {
  const Node& n = nodes_[c];
  const Node& first = nodes_[n.first_leaf];
  if (first.id == key.id && first.lo == key.value) return nodes_[first.next_leaf].lo > key.value;
  const Node& last = nodes_[n.last_leaf];
  if (last.id == key.id && last.lo == key.value) return nodes_[last.prev_leaf].lo < key.value;
  return false;
}

void RangeTreeJoin::tree_insert(NodeId root, std::size_t level, PointId id) {
  const LeafKey key = point_key(id, level);
  NodeId v = root;
  while (true) {
    ++last_work_;
    if (nodes_[v].leaf()) {
      std::vector<LeafKey> leaves{key_of_leaf(nodes_[v]), key};
      std::sort(leaves.begin(), leaves.end(), key_less);
      replace(v, std::move(leaves));
      return;
    }
    const NodeId l = nodes_[v].left;
    const NodeId r = nodes_[v].right;
    const LeafKey lmax = key_of_leaf(nodes_[nodes_[l].last_leaf]);
    const LeafKey rmin = key_of_leaf(nodes_[nodes_[r].first_leaf]);
    NodeId c;
    bool grows = false;
    if (key_less(key, lmax)) {
      c = l;
    } else if (key_less(rmin, key)) {
      c = r;
    } else if (key.value <= nodes_[l].hi) {
      c = l;
    } else if (key.value >= nodes_[r].lo) {
      c = r;
    } else {
      c = nodes_[l].weight <= nodes_[r].weight ? l : r;
      grows = true;
    }
    if (unbalanced(nodes_[c].weight + 1, nodes_[v].weight + 1)) {
      auto leaves = leaves_of(v);
      leaves.insert(std::upper_bound(leaves.begin(), leaves.end(), key, key_less), key);
      replace(v, std::move(leaves));
      return;
    }
    ++nodes_[v].weight;
    ++nodes_[v].live;
    if (level + 1 < d_) {
      tree_insert(nodes_[v].secondary, level + 1, id);
    } else {
      refresh_activity(v);
    }
    if (grows) {
      auto leaves = leaves_of(c);
      leaves.insert(std::upper_bound(leaves.begin(), leaves.end(), key, key_less), key);
      replace(c, std::move(leaves));
      return;
    }
    v = c;
  }
}

void RangeTreeJoin::tree_erase(NodeId root, std::size_t level, PointId id) {
  const LeafKey key = point_key(id, level);
  auto without = [&](NodeId x) {
    auto leaves = leaves_of(x);
    leaves.erase(std::find_if(leaves.begin(), leaves.end(), [&](const LeafKey& k) {
      return k.id == key.id && k.value == key.value;
    }));
    return leaves;
  };
  NodeId v = root;
  while (true) {
    ++last_work_;
    const NodeId l = nodes_[v].left;
    const NodeId r = nodes_[v].right;
    const LeafKey lmax = key_of_leaf(nodes_[nodes_[l].last_leaf]);
    const NodeId c = key_less(lmax, key) ? r : l;
    if (nodes_[c].leaf() || unbalanced(nodes_[c].weight - 1, nodes_[v].weight - 1)) {
      replace(v, without(v));
      return;
    }
    const bool shrinks = interval_shrinks(c, key);
    --nodes_[v].weight;
    --nodes_[v].live;
    if (level + 1 < d_) {
      tree_erase(nodes_[v].secondary, level + 1, id);
    } else {
      refresh_activity(v);
    }
    if (shrinks) {
      replace(c, without(c));
      return;
    }
    v = c;
  }
}

void RangeTreeJoin::adjust_beta(const Probe& q, int delta) {
  std::vector<NodeId> nodes;
  canonical_walk(root_, q, nodes, last_work_);
  for (NodeId u : nodes) {
    Node& n = nodes_[u];
    if (delta < 0 && n.beta == 0) throw std::logic_error("canonical counter underflow");
    n.beta = delta > 0 ? n.beta + 1 : n.beta - 1;
    refresh_activity(u);
  }
}

void RangeTreeJoin::check_rect(const Rect& rect) const {
  if (rect.dim() != d_) throw invalid_input("rectangle dimension mismatch");
  for (std::size_t i = 0; i < d_; ++i) {
    const KeyInterval& s = rect.sides[i];
    if (std::isnan(s.lo) || std::isnan(s.hi)) throw invalid_input("rectangle bound is NaN");
    if (s.lo > s.hi) throw invalid_input("malformed rectangle: lo > hi on axis " + std::to_string(i));
    if (!shape_.has_lo[i] && s.lo != -kInf) throw invalid_input("rectangle lower side must be unbounded on axis " + std::to_string(i));
    if (!shape_.has_hi[i] && s.hi != kInf) throw invalid_input("rectangle upper side must be unbounded on axis " + std::to_string(i));
  }
}

void RangeTreeJoin::build(std::span<const Point> a, std::span<const Point> b) {
  if (!hypercube_) throw config_error("point queries need hypercube mode");
  z_.clear();
  b_keys_.clear();
  a_.clear();
  for (const Point& q : b) {
    if (q.is_binary() || q.dim() != d_) throw invalid_input("B point dimension mismatch");
    if (b_keys_.count(q.id)) throw invalid_input("duplicate B id " + std::to_string(q.id));
    b_keys_[q.id] = q.coords;
    z_.insert(q.id, q.coords);
  }
  std::vector<PointId> ids;
  for (const Point& p : a) {
    if (p.is_binary() || p.dim() != d_) throw invalid_input("A point dimension mismatch");
    if (!a_.emplace(p.id, p.coords).second) throw invalid_input("duplicate A id " + std::to_string(p.id));
    ids.push_back(p.id);
  }
  last_work_ = 0;
  reset_tree(std::move(ids));
}

void RangeTreeJoin::build(std::span<const Point> a, std::span<const std::pair<PointId, Rect>> b) {
  if (hypercube_) throw config_error("rectangle queries need containment mode");
  z_.clear();
  b_keys_.clear();
  b_rects_.clear();
  a_.clear();
  for (const auto& [id, rect] : b) {
    check_rect(rect);
    if (b_rects_.count(id)) throw invalid_input("duplicate B id " + std::to_string(id));
    b_rects_[id] = rect;
    b_keys_[id] = key_of(rect);
    z_.insert(id, b_keys_[id]);
  }
  std::vector<PointId> ids;
  for (const Point& p : a) {
    if (p.is_binary() || p.dim() != d_) throw invalid_input("A point dimension mismatch");
    if (!a_.emplace(p.id, p.coords).second) throw invalid_input("duplicate A id " + std::to_string(p.id));
    ids.push_back(p.id);
  }
  last_work_ = 0;
  reset_tree(std::move(ids));
}

void RangeTreeJoin::insert_a(const Point& p) {
  if (p.is_binary() || p.dim() != d_) throw invalid_input("A point dimension mismatch");
  if (!a_.emplace(p.id, p.coords).second) throw invalid_input("duplicate A id " + std::to_string(p.id));
  last_work_ = 0;
  tree_insert(root_, 0, p.id);
}

void RangeTreeJoin::erase_a(PointId id) {
  if (!a_.count(id)) throw not_found("unknown A id " + std::to_string(id));
  last_work_ = 0;
  tree_erase(root_, 0, id);
  a_.erase(id);
}

void RangeTreeJoin::insert_b(const Point& q) {
  if (!hypercube_) throw config_error("point queries need hypercube mode");
  if (q.is_binary() || q.dim() != d_) throw invalid_input("B point dimension mismatch");
  if (b_keys_.count(q.id)) throw invalid_input("duplicate B id " + std::to_string(q.id));
  last_work_ = 0;
  b_keys_[q.id] = q.coords;
  z_.insert(q.id, q.coords);
  Probe probe;
  probe.center = b_keys_[q.id].data();
  adjust_beta(probe, +1);
}

void RangeTreeJoin::insert_b(PointId id, const Rect& rect) {
  if (hypercube_) throw config_error("rectangle queries need containment mode");
  check_rect(rect);
  if (b_rects_.count(id)) throw invalid_input("duplicate B id " + std::to_string(id));
  last_work_ = 0;
  b_rects_[id] = rect;
  b_keys_[id] = key_of(rect);
  z_.insert(id, b_keys_[id]);
  Probe probe;
  probe.rect = &b_rects_[id];
  adjust_beta(probe, +1);
}

void RangeTreeJoin::erase_b(PointId id) {
  auto it = b_keys_.find(id);
  if (it == b_keys_.end()) throw not_found("unknown B id " + std::to_string(id));
  last_work_ = 0;
  Probe probe;
  if (hypercube_) {
    probe.center = it->second.data();
  } else {
    probe.rect = &b_rects_.at(id);
  }
  adjust_beta(probe, -1);
  z_.erase(id);
  b_keys_.erase(it);
  b_rects_.erase(id);
}

// ---- enumeration & introspection --------------------------------------------

void RangeTreeJoin::enumerate(EnumerationSession& session) const {
  std::vector<std::span<const RangeCounter::Entry>> runs;
  for (NodeId u : active_) {
    session.work();
    auto box = canonical_rect(u);
    if (!box) throw std::logic_error("active node with empty canonical region");
    runs.clear();
    std::uint64_t work = 0;
    z_.report(*box, runs, work);
    session.work(work);
    const Node& n = nodes_[u];
    for (NodeId x = n.first_leaf;; x = nodes_[x].next_leaf) {
      session.work();
      const PointId a = nodes_[x].id;
      if (a != kSentinel) {
        for (const auto& run : runs) {
          for (const auto& e : run) session.emit(a, e.id);
        }
      }
      if (x == n.last_leaf) break;
    }
  }
}

RangeTreeJoin::NodeView RangeTreeJoin::node(NodeId u) const {
  const Node& n = nodes_.at(u);
  return {u, n.parent, n.owner, n.left, n.right, n.level, n.lo, n.hi, n.live, n.beta, n.active,
          n.leaf(), n.leaf() ? n.id : kSentinel};
}

std::vector<RangeTreeJoin::NodeId> RangeTreeJoin::last_level_nodes() const {
  std::vector<NodeId> out;
  std::vector<NodeId> stack{root_};
  while (!stack.empty()) {
    const NodeId x = stack.back();
    stack.pop_back();
    const Node& n = nodes_[x];
    if (std::size_t{n.level} + 1 == d_) out.push_back(x);
    if (n.left != kNil) stack.push_back(n.left);
    if (n.right != kNil) stack.push_back(n.right);
    if (n.secondary != kNil) stack.push_back(n.secondary);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<PointId> RangeTreeJoin::points_under(NodeId u) const {
  std::vector<PointId> out;
  const Node& n = nodes_.at(u);
  for (NodeId x = n.first_leaf;; x = nodes_[x].next_leaf) {
    if (nodes_[x].id != kSentinel) out.push_back(nodes_[x].id);
    if (x == n.last_leaf) break;
  }
  return out;
}

}  // namespace simjoin
