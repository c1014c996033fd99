// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#include "simjoin/wspd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace simjoin {

namespace {

int idx(Side s) { return s == Side::A ? 0 : 1; }

// Scaled so tiny gaps do not underflow to zero.
double combine(MetricKind metric, const std::vector<double>& g) {
  double m = 0;
  for (double x : g) m = std::max(m, x);
  if (metric == MetricKind::Linf || m == 0) return m;
  double s = 0;
  if (metric == MetricKind::L1) {
    for (double x : g) s += x;
    return s;
  }
  for (double x : g) s += (x / m) * (x / m);
  return m * std::sqrt(s);
}

std::string hexd(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

}  // namespace

WspdJoin::WspdJoin(std::size_t d, MetricKind metric, double eps, int depth_cap)
    : d_(d), metric_(metric), eps_(eps), sep_(eps / 2), depth_cap_(depth_cap) {
  if (d == 0 || d > 16) throw config_error("wspd index supports 1 <= d <= 16");
  if (metric == MetricKind::Hamming) throw config_error("wspd index needs a real-valued metric");
  if (!(eps > 0) || !(eps < 1)) throw config_error("wspd index needs 0 < eps < 1");
  if (depth_cap < 1) throw config_error("depth cap must be positive");
}

void WspdJoin::check(const Point& p) const {
  if (p.is_binary() || p.dim() != d_) throw invalid_input("point dimension mismatch");
  for (double x : p.coords) {
    if (!std::isfinite(x)) throw invalid_input("non-finite coordinate");
  }
}

void WspdJoin::reset_root(std::span<const std::vector<double>> pts) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> mn(d_, inf), mx(d_, -inf);
  for (const auto& p : pts) {
    for (std::size_t i = 0; i < d_; ++i) {
      mn[i] = std::min(mn[i], p[i]);
      mx[i] = std::max(mx[i], p[i]);
    }
  }
  double span = 0;
  for (std::size_t i = 0; i < d_; ++i) span = std::max(span, mx[i] - mn[i]);
  if (!(span > 0)) span = 1;
  root_side_ = 2 * span;
  root_lo_.assign(d_, 0);
  for (std::size_t i = 0; i < d_; ++i) root_lo_[i] = pts.empty() ? -span : (mn[i] + mx[i]) / 2 - span;
  has_root_cell_ = true;
}

bool WspdJoin::in_root(std::span<const double> p) const {
  if (!has_root_cell_) return false;
  for (std::size_t i = 0; i < d_; ++i) {
    if (!(p[i] >= root_lo_[i] && p[i] < root_lo_[i] + root_side_)) return false;
  }
  return true;
}

// --- tree plumbing --------------------------------------------------------

WspdJoin::NodeId WspdJoin::new_node(NodeId parent, std::uint32_t slot) {
  NodeId id;
  if (!free_nodes_.empty()) {
    id = free_nodes_.back();
    free_nodes_.pop_back();
    nodes_[id] = Node{};
  } else {
    id = static_cast<NodeId>(nodes_.size());
    nodes_.emplace_back();
  }
  Node n;
  n.parent = parent;
  n.slot = slot;
  if (parent == kNil) {
    n.lo = root_lo_;
    n.side = root_side_;
  } else {
    const Node& p = nodes_[parent];
    const double half = p.side / 2;
    n.lo = p.lo;
    for (std::size_t i = 0; i < d_; ++i) {
      if ((slot >> i) & 1U) n.lo[i] = p.lo[i] + half;
    }
    n.side = half;
    n.depth = p.depth + 1;
  }
  nodes_[id] = std::move(n);
  return id;
}

void WspdJoin::free_node(NodeId u) {
  nodes_[u] = Node{};
  free_nodes_.push_back(u);
}

std::uint32_t WspdJoin::child_slot(NodeId u, std::span<const double> p) const {
  const Node& n = nodes_[u];
  const double half = n.side / 2;
  std::uint32_t s = 0;
  for (std::size_t i = 0; i < d_; ++i) {
    if (p[i] >= n.lo[i] + half) s |= 1U << i;
  }
  return s;
}

WspdJoin::NodeId WspdJoin::child_at(NodeId u, std::uint32_t slot) const {
  for (const auto& [s, c] : nodes_[u].children) {
    if (s == slot) return c;
  }
  return kNil;
}

void WspdJoin::attach(NodeId parent, std::uint32_t slot, NodeId child) {
  auto& ch = nodes_[parent].children;
  auto it = std::lower_bound(ch.begin(), ch.end(), std::make_pair(slot, NodeId{0}));
  ch.insert(it, {slot, child});
}

void WspdJoin::detach(NodeId parent, NodeId child) {
  auto& ch = nodes_[parent].children;
  ch.erase(std::find_if(ch.begin(), ch.end(), [&](const auto& e) { return e.second == child; }));
}

int WspdJoin::split_depth(NodeId leaf, std::span<const double> p) const {
  const Node& n = nodes_[leaf];
  std::vector<double> lo = n.lo;
  double side = n.side;
  int depth = n.depth;
  while (true) {
    if (depth + 1 > depth_cap_) return depth + 1;
    const double half = side / 2;
    std::uint32_t sp = 0, sq = 0;
    for (std::size_t i = 0; i < d_; ++i) {
      const double mid = lo[i] + half;
      if (p[i] >= mid) sp |= 1U << i;
      if (n.loc[i] >= mid) sq |= 1U << i;
    }
    ++depth;
    if (sp != sq) return depth;
    for (std::size_t i = 0; i < d_; ++i) {
      if ((sp >> i) & 1U) lo[i] += half;
    }
    side = half;
  }
}

void WspdJoin::link(NodeId leaf, int s) {
  NodeId pred = kNil;
  for (NodeId x = leaf; pred == kNil && nodes_[x].parent != kNil; x = nodes_[x].parent) {
    const Node& par = nodes_[nodes_[x].parent];
    for (auto it = par.children.rbegin(); it != par.children.rend(); ++it) {
      if (it->first >= nodes_[x].slot) continue;
      if (nodes_[it->second].cnt[s] > 0) {
        pred = nodes_[it->second].last[s];
        break;
      }
    }
  }
  Node& l = nodes_[leaf];
  const NodeId nxt = pred == kNil ? head_[s] : nodes_[pred].next[s];
  l.prev[s] = pred;
  l.next[s] = nxt;
  if (pred == kNil) {
    head_[s] = leaf;
  } else {
    nodes_[pred].next[s] = leaf;
  }
  if (nxt != kNil) nodes_[nxt].prev[s] = leaf;
  l.linked[s] = true;
}

void WspdJoin::unlink(NodeId leaf, int s) {
  Node& l = nodes_[leaf];
  if (!l.linked[s]) return;
  if (l.prev[s] == kNil) {
    head_[s] = l.next[s];
  } else {
    nodes_[l.prev[s]].next[s] = l.next[s];
  }
  if (l.next[s] != kNil) nodes_[l.next[s]].prev[s] = l.prev[s];
  l.prev[s] = l.next[s] = kNil;
  l.linked[s] = false;
}

void WspdJoin::refresh_leaf(NodeId leaf) {
  for (int s = 0; s < 2; ++s) {
    Node& l = nodes_[leaf];
    l.cnt[s] = l.pts[s].size();
    l.first[s] = l.last[s] = l.cnt[s] ? leaf : kNil;
    if (l.cnt[s] && !l.linked[s]) link(leaf, s);
    if (!l.cnt[s] && l.linked[s]) unlink(leaf, s);
  }
}

void WspdJoin::refresh_up(NodeId u) {
  for (NodeId x = u; x != kNil; x = nodes_[x].parent) {
    ++last_work_;
    Node& n = nodes_[x];
    if (n.leaf) continue;
    for (int s = 0; s < 2; ++s) {
      n.cnt[s] = 0;
      n.first[s] = n.last[s] = kNil;
      for (const auto& [slot, c] : n.children) {
        const Node& cn = nodes_[c];
        if (!cn.cnt[s]) continue;
        n.cnt[s] += cn.cnt[s];
        if (n.first[s] == kNil) n.first[s] = cn.first[s];
        n.last[s] = cn.last[s];
      }
    }
  }
}

// --- pairs ----------------------------------------------------------------

double WspdJoin::diam(NodeId u) const {
  const Node& n = nodes_[u];
  if (n.leaf) return 0;
  return combine(metric_, std::vector<double>(d_, n.side));
}

WspdJoin::Box WspdJoin::box(NodeId u) const {
  const Node& n = nodes_.at(u);
  if (n.leaf) return {n.loc, n.loc};
  Box b{n.lo, n.lo};
  for (double& x : b.hi) x += n.side;
  return b;
}

double WspdJoin::gap(NodeId u, NodeId v) const {
  const Node& a = nodes_[u];
  const Node& b = nodes_[v];
  std::vector<double> g(d_);
  for (std::size_t i = 0; i < d_; ++i) {
    const double alo = a.leaf ? a.loc[i] : a.lo[i];
    const double ahi = a.leaf ? a.loc[i] : a.lo[i] + a.side;
    const double blo = b.leaf ? b.loc[i] : b.lo[i];
    const double bhi = b.leaf ? b.loc[i] : b.lo[i] + b.side;
    g[i] = std::max({0.0, blo - ahi, alo - bhi});
  }
  return combine(metric_, g);
}

bool WspdJoin::separated(NodeId u, NodeId v) const {
  const double phi = gap(u, v);
  return phi > 0 && std::max(diam(u), diam(v)) <= sep_ * phi;
}

void WspdJoin::gen(NodeId u0, NodeId v0) {
  std::vector<std::pair<NodeId, NodeId>> stack{{u0, v0}};
  while (!stack.empty()) {
    auto [u, v] = stack.back();
    stack.pop_back();
    ++last_work_;
    const double phi = gap(u, v);
    const double du = diam(u), dv = diam(v);
    if (phi > 0 && std::max(du, dv) <= sep_ * phi) {
      add_pair(u, v, phi);
    } else if (du > dv) {
      for (const auto& [s, c] : nodes_[u].children) stack.emplace_back(c, v);
    } else if (dv > du) {
      for (const auto& [s, c] : nodes_[v].children) stack.emplace_back(u, c);
    } else {
      for (const auto& [s, cu] : nodes_[u].children) {
        for (const auto& [t, cv] : nodes_[v].children) stack.emplace_back(cu, cv);
      }
    }
  }
}

void WspdJoin::add_pair(NodeId u, NodeId v, double delta) {
  PairId id;
  if (!free_pairs_.empty()) {
    id = free_pairs_.back();
    free_pairs_.pop_back();
  } else {
    id = static_cast<PairId>(pairs_.size());
    pairs_.emplace_back();
  }
  pairs_[id] = Pair{u, v, delta, seq_++, false, true};
  nodes_[u].pairs.push_back(id);
  if (v != u) nodes_[v].pairs.push_back(id);
  set_productive(id);
  ++last_pairs_;
}

void WspdJoin::kill_pair(PairId id) {
  Pair& p = pairs_[id];
  if (p.productive) z_.erase({p.delta, p.seq, id});
  for (NodeId x : {p.u, p.v}) {
    auto& v = nodes_[x].pairs;
    auto it = std::find(v.begin(), v.end(), id);
    if (it == v.end()) continue;
    *it = v.back();
    v.pop_back();
  }
  p = Pair{};
  free_pairs_.push_back(id);
  ++last_pairs_;
}

void WspdJoin::set_productive(PairId id) {
  Pair& p = pairs_[id];
  const Node& u = nodes_[p.u];
  const Node& v = nodes_[p.v];
  const bool want = (u.cnt[0] && v.cnt[1]) || (v.cnt[0] && u.cnt[1]);
  if (want == p.productive) return;
  p.productive = want;
  if (want) {
    z_.insert({p.delta, p.seq, id});
  } else {
    z_.erase({p.delta, p.seq, id});
  }
}

void WspdJoin::subtree(NodeId u, std::vector<NodeId>& out) const {
  std::vector<NodeId> stack{u};
  while (!stack.empty()) {
    const NodeId x = stack.back();
    stack.pop_back();
    out.push_back(x);
    for (const auto& [s, c] : nodes_[x].children) stack.push_back(c);
  }
}

void WspdJoin::drop_pairs(const std::vector<NodeId>& nodes) {
  for (NodeId x : nodes) {
    while (!nodes_[x].pairs.empty()) kill_pair(nodes_[x].pairs.back());
  }
}

std::vector<WspdJoin::NodeId> WspdJoin::frontier(NodeId w) const {
  std::vector<NodeId> path;
  for (NodeId x = w; x != kNil; x = nodes_[x].parent) path.push_back(x);
  std::reverse(path.begin(), path.end());
  std::vector<NodeId> calls;
  std::vector<NodeId> seeds;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const NodeId a = path[i];
    const NodeId nx = path[i + 1];
    seeds.clear();
    for (const auto& [s, c] : nodes_[a].children) {
      if (c != nx) seeds.push_back(c);
    }
    const double da = diam(a);
    for (NodeId y : calls) {
      if (separated(a, y)) continue;
      const double dy = diam(y);
      if (da > dy) {
        seeds.push_back(y);
      } else if (da == dy) {
        for (const auto& [s, c] : nodes_[y].children) seeds.push_back(c);
      }
    }
    if (nx == w) break;
    calls.clear();
    std::vector<NodeId> stack = seeds;
    const double dn = diam(nx);
    while (!stack.empty()) {
      const NodeId y = stack.back();
      stack.pop_back();
      calls.push_back(y);
      if (!separated(nx, y) && diam(y) > dn) {
        for (const auto& [s, c] : nodes_[y].children) stack.push_back(c);
      }
    }
  }
  return path.size() < 2 ? std::vector<NodeId>{} : seeds;
}

void WspdJoin::regenerate(NodeId w) {
  for (NodeId y : frontier(w)) gen(w, y);
  std::vector<NodeId> nodes;
  subtree(w, nodes);
  for (NodeId x : nodes) {
    const auto& ch = nodes_[x].children;
    if (nodes_[x].leaf) {
      add_pair(x, x, 0);
      continue;
    }
    for (std::size_t i = 0; i < ch.size(); ++i) {
      for (std::size_t j = i + 1; j < ch.size(); ++j) gen(ch[i].second, ch[j].second);
    }
  }
}

void WspdJoin::refresh_pairs_on_path(NodeId leaf) {
  for (NodeId x = leaf; x != kNil; x = nodes_[x].parent) {
    for (PairId id : nodes_[x].pairs) {
      ++last_work_;
      set_productive(id);
    }
  }
}

void WspdJoin::build_pairs() {
  if (root_ != kNil) regenerate(root_);
}

// --- updates --------------------------------------------------------------

void WspdJoin::insert_point(PointId id, const std::vector<double>& p, Side side, bool pairs_on) {
  const int s = idx(side);
  auto place = [&](NodeId leaf) {
    nodes_[leaf].pts[s].push_back(id);
    locs_[s][id] = {leaf, nodes_[leaf].pts[s].size() - 1};
    coords_[s][id] = p;
  };
  if (root_ == kNil) {
    root_ = new_node(kNil, 0);
    nodes_[root_].leaf = true;
    nodes_[root_].loc = p;
    place(root_);
    refresh_leaf(root_);
    if (pairs_on) regenerate(root_);
    return;
  }
  NodeId u = root_;
  while (!nodes_[u].leaf) {
    ++last_work_;
    const std::uint32_t slot = child_slot(u, p);
    const NodeId c = child_at(u, slot);
    if (c == kNil) {
      const NodeId l = new_node(u, slot);
      nodes_[l].leaf = true;
      nodes_[l].loc = p;
      attach(u, slot, l);
      place(l);
      refresh_leaf(l);
      refresh_up(u);
      if (pairs_on) {
        regenerate(l);
        refresh_pairs_on_path(u);
      }
      return;
    }
    u = c;
  }
  if (nodes_[u].loc == p) {
    place(u);
    refresh_leaf(u);
    refresh_up(nodes_[u].parent);
    if (pairs_on) refresh_pairs_on_path(u);
    return;
  }
  if (split_depth(u, p) > depth_cap_) {
    throw config_error("spread guard: quadtree depth would exceed " + std::to_string(depth_cap_));
  }
  if (pairs_on) drop_pairs({u});
  unlink(u, 0);
  unlink(u, 1);
  const std::vector<double> q = std::move(nodes_[u].loc);
  std::vector<PointId> old[2] = {std::move(nodes_[u].pts[0]), std::move(nodes_[u].pts[1])};
  nodes_[u].leaf = false;
  nodes_[u].loc.clear();
  nodes_[u].pts[0].clear();
  nodes_[u].pts[1].clear();
  NodeId x = u;
  NodeId lq = kNil, lp = kNil;
  while (true) {
    ++last_work_;
    const std::uint32_t sp = child_slot(x, p);
    const std::uint32_t sq = child_slot(x, q);
    if (sp == sq) {
      const NodeId c = new_node(x, sp);
      attach(x, sp, c);
      x = c;
      continue;
    }
    lq = new_node(x, sq);
    lp = new_node(x, sp);
    attach(x, sq, lq);
    attach(x, sp, lp);
    break;
  }
  nodes_[lq].leaf = nodes_[lp].leaf = true;
  nodes_[lq].loc = q;
  nodes_[lp].loc = p;
  for (int t = 0; t < 2; ++t) {
    nodes_[lq].pts[t] = std::move(old[t]);
    for (std::size_t k = 0; k < nodes_[lq].pts[t].size(); ++k) locs_[t][nodes_[lq].pts[t][k]] = {lq, k};
  }
  place(lp);
  refresh_leaf(lq);
  refresh_leaf(lp);
  refresh_up(x);
  if (pairs_on) {
    regenerate(u);
    refresh_pairs_on_path(u);
  }
}

void WspdJoin::insert(const Point& p, Side side) {
  check(p);
  const int s = idx(side);
  if (locs_[s].count(p.id)) throw invalid_input("duplicate id " + std::to_string(p.id));
  last_pairs_ = last_work_ = 0;
  if (!in_root(p.coords)) rebuild_with(&p.coords);
  insert_point(p.id, p.coords, side, true);
}

void WspdJoin::erase(PointId id, Side side) {
  const int s = idx(side);
  auto it = locs_[s].find(id);
  if (it == locs_[s].end()) throw not_found("unknown id " + std::to_string(id));
  last_pairs_ = last_work_ = 0;
  const NodeId l = it->second.leaf;
  const std::size_t slot = it->second.slot;
  locs_[s].erase(it);
  coords_[s].erase(id);
  auto& v = nodes_[l].pts[s];
  if (slot + 1 != v.size()) {
    v[slot] = v.back();
    locs_[s][v[slot]].slot = slot;
  }
  v.pop_back();

  if (!nodes_[l].pts[0].empty() || !nodes_[l].pts[1].empty()) {
    refresh_leaf(l);
    refresh_up(nodes_[l].parent);
    refresh_pairs_on_path(l);
    return;
  }
  if (l == root_) {
    drop_pairs({l});
    unlink(l, 0);
    unlink(l, 1);
    free_node(l);
    root_ = kNil;
    return;
  }
  const NodeId par = nodes_[l].parent;
  NodeId other = kNil;
  if (nodes_[par].children.size() == 2) {
    other = nodes_[par].children[0].second == l ? nodes_[par].children[1].second : nodes_[par].children[0].second;
    if (!nodes_[other].leaf) other = kNil;
  }
  if (other == kNil) {
    drop_pairs({l});
    unlink(l, 0);
    unlink(l, 1);
    detach(par, l);
    free_node(l);
    refresh_up(par);
    refresh_pairs_on_path(par);
    return;
  }
  NodeId w = par;
  while (nodes_[w].parent != kNil && nodes_[nodes_[w].parent].children.size() == 1) w = nodes_[w].parent;
  std::vector<NodeId> old;
  subtree(w, old);
  drop_pairs(old);
  unlink(l, 0);
  unlink(l, 1);
  unlink(other, 0);
  unlink(other, 1);
  std::vector<double> loc = std::move(nodes_[other].loc);
  std::vector<PointId> pts[2] = {std::move(nodes_[other].pts[0]), std::move(nodes_[other].pts[1])};
  for (NodeId x : old) {
    if (x != w) free_node(x);
  }
  Node& wn = nodes_[w];
  wn.children.clear();
  wn.leaf = true;
  wn.loc = std::move(loc);
  for (int t = 0; t < 2; ++t) {
    wn.pts[t] = std::move(pts[t]);
    for (std::size_t k = 0; k < wn.pts[t].size(); ++k) locs_[t][wn.pts[t][k]] = {w, k};
  }
  refresh_leaf(w);
  refresh_up(nodes_[w].parent);
  regenerate(w);
  refresh_pairs_on_path(w);
}

void WspdJoin::rebuild_with(const std::vector<double>* extra) {
  std::vector<std::vector<double>> all;
  for (int s = 0; s < 2; ++s) {
    for (const auto& [id, c] : coords_[s]) all.push_back(c);
  }
  if (extra) all.push_back(*extra);
  WspdJoin tmp(d_, metric_, eps_, depth_cap_);
  tmp.reset_root(all);
  for (int s = 0; s < 2; ++s) {
    std::vector<PointId> ids;
    for (const auto& [id, c] : coords_[s]) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    for (PointId id : ids) tmp.insert_point(id, coords_[s].at(id), s ? Side::B : Side::A, false);
  }
  tmp.build_pairs();
  tmp.rebuilds_ = rebuilds_ + 1;
  tmp.last_work_ = last_work_ + tmp.last_work_;
  tmp.last_pairs_ = last_pairs_ + tmp.last_pairs_;
  *this = std::move(tmp);
}

void WspdJoin::build(std::span<const Point> a, std::span<const Point> b) {
  std::vector<std::vector<double>> all;
  for (const Point& p : a) {
    check(p);
    all.push_back(p.coords);
  }
  for (const Point& q : b) {
    check(q);
    all.push_back(q.coords);
  }
  WspdJoin tmp(d_, metric_, eps_, depth_cap_);
  tmp.reset_root(all);
  for (int s = 0; s < 2; ++s) {
    for (const Point& p : s ? b : a) {
      if (tmp.locs_[s].count(p.id)) throw invalid_input("duplicate id " + std::to_string(p.id));
      tmp.insert_point(p.id, p.coords, s ? Side::B : Side::A, false);
    }
  }
  tmp.build_pairs();
  *this = std::move(tmp);
}

WspdJoin WspdJoin::rebuilt() const {
  WspdJoin tmp(d_, metric_, eps_, depth_cap_);
  tmp.root_lo_ = root_lo_;
  tmp.root_side_ = root_side_;
  tmp.has_root_cell_ = has_root_cell_;
  for (int s = 0; s < 2; ++s) {
    std::vector<PointId> ids;
    for (const auto& [id, c] : coords_[s]) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    for (PointId id : ids) tmp.insert_point(id, coords_[s].at(id), s ? Side::B : Side::A, false);
  }
  tmp.build_pairs();
  return tmp;
}

// --- queries --------------------------------------------------------------

void WspdJoin::enumerate(double r, EnumerationSession& session) const {
  if (!(r > 0)) throw config_error("threshold r must be positive");
  auto cross = [&](NodeId x, NodeId y) {
    const Node& nx = nodes_[x];
    const Node& ny = nodes_[y];
    if (!nx.cnt[0] || !ny.cnt[1]) return;
    for (NodeId la = nx.first[0];; la = nodes_[la].next[0]) {
      for (PointId a : nodes_[la].pts[0]) {
        for (NodeId lb = ny.first[1];; lb = nodes_[lb].next[1]) {
          session.work();
          for (PointId b : nodes_[lb].pts[1]) session.emit(a, b);
          if (lb == ny.last[1]) break;
        }
      }
      if (la == nx.last[0]) break;
    }
  };
  for (const auto& [delta, seq, id] : z_) {
    session.work();
    if (delta > r) break;
    const Pair& p = pairs_[id];
    cross(p.u, p.v);
    if (p.u != p.v) cross(p.v, p.u);
  }
}

std::vector<WspdJoin::PairView> WspdJoin::pairs() const {
  std::vector<PairView> out;
  for (const Pair& p : pairs_) {
    if (p.live) out.push_back({p.u, p.v, p.delta, p.u == p.v, p.productive});
  }
  return out;
}

std::vector<PointId> WspdJoin::points_under(NodeId u, Side side) const {
  const int s = idx(side);
  std::vector<PointId> out;
  const Node& n = nodes_.at(u);
  if (!n.cnt[s]) return out;
  for (NodeId l = n.first[s];; l = nodes_[l].next[s]) {
    out.insert(out.end(), nodes_[l].pts[s].begin(), nodes_[l].pts[s].end());
    if (l == n.last[s]) break;
  }
  return out;
}

std::vector<std::string> WspdJoin::signature() const {
  auto key = [&](NodeId u) {
    const Node& n = nodes_[u];
    std::string k = n.leaf ? "L" : "I" + std::to_string(n.depth);
    for (double x : n.leaf ? n.loc : n.lo) k += ":" + hexd(x);
    return k;
  };
  std::vector<std::string> out;
  for (const Pair& p : pairs_) {
    if (!p.live) continue;
    std::string ku = key(p.u), kv = key(p.v);
    if (kv < ku) std::swap(ku, kv);
    out.push_back(ku + "|" + kv);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace simjoin
