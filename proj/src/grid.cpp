// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#include "simjoin/grid.hpp"

#include <algorithm>
#include <cmath>

namespace simjoin {

double GridGeometry::cell_side(std::size_t d, MetricKind metric, double r, double eps) {
  double root = 1.0;
  switch (metric) {
    case MetricKind::L1: root = static_cast<double>(d); break;
    case MetricKind::L2: root = std::sqrt(static_cast<double>(d)); break;
    case MetricKind::Linf: root = 1.0; break;
    case MetricKind::Hamming: throw config_error("grid index needs a real-valued metric");
  }
  return std::min(r, eps * r / (2.0 * root));
}

GridGeometry::GridGeometry(std::size_t d, MetricKind metric, double r, double eps)
    : d_(d), metric_(metric), r_(r), eps_(eps) {
  if (d == 0) throw config_error("dimension must be at least 1");
  if (!(r > 0) || !std::isfinite(r)) throw config_error("threshold r must be positive and finite");
  if (!(eps > 0) || !std::isfinite(eps)) throw config_error("grid index needs eps > 0");
  side_ = cell_side(d, metric, r, eps);
  reach_ = static_cast<std::int64_t>(std::ceil(r_ / side_)) + 1;
  const double box = std::pow(2.0 * static_cast<double>(reach_) + 1.0, static_cast<double>(d));
  if (box > 5e7) throw config_error("neighbour box too large; increase eps or lower d");

  CellKey origin(d, 0);
  CellKey o(d, -reach_);
  while (true) {
    if (near(origin, o)) offsets_.push_back(o);
    std::size_t i = d;
    while (i-- > 0) {
      if (o[i] < reach_) {
        ++o[i];
        break;
      }
      o[i] = -reach_;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
}

double GridGeometry::gap(std::int64_t delta) const noexcept {
  const std::int64_t k = delta < 0 ? -delta : delta;
  return k <= 1 ? 0.0 : static_cast<double>(k - 1) * side_;
}

CellKey GridGeometry::cell_of(std::span<const double> p) const {
  if (p.size() != d_) throw invalid_input("point dimension mismatch");
  CellKey key(d_);
  for (std::size_t i = 0; i < d_; ++i) {
    const double f = std::floor(p[i] / side_);
    if (!(std::abs(f) < 9e18)) throw invalid_input("coordinate out of grid range");
    key[i] = static_cast<std::int64_t>(f);
  }
  return key;
}

double GridGeometry::cell_distance(const CellKey& c, const CellKey& e) const {
  double s = 0;
  for (std::size_t i = 0; i < d_; ++i) {
    const double g = gap(e[i] - c[i]);
    switch (metric_) {
      case MetricKind::L1: s += g; break;
      case MetricKind::L2: s += g * g; break;
      default: s = std::max(s, g);
    }
  }
  return metric_ == MetricKind::L2 ? std::sqrt(s) : s;
}

bool GridGeometry::near(const CellKey& c, const CellKey& e) const {
  if (metric_ != MetricKind::L2) return cell_distance(c, e) <= r_;
  double s = 0;
  for (std::size_t i = 0; i < d_; ++i) {
    const double g = gap(e[i] - c[i]);
    s += g * g;
  }
  return s <= r_ * r_;
}

std::vector<CellKey> GridGeometry::neighbors(const CellKey& c) const {
  std::vector<CellKey> out;
  out.reserve(offsets_.size());
  for (const CellKey& o : offsets_) {
    CellKey k = c;
    for (std::size_t i = 0; i < d_; ++i) k[i] += o[i];
    out.push_back(std::move(k));
  }
  return out;
}

double GridGeometry::neighbor_box_bound() const {
  return std::pow(2.0 * std::ceil(r_ / side_) + 3.0, static_cast<double>(d_));
}

// ---------------------------------------------------------------------------

GridJoin::GridJoin(std::size_t d, MetricKind metric, double r, double eps, GridOptions options)
    : geo_(d, metric, r, eps), options_(options) {}

template <typename D, typename F>
void GridJoin::for_each_near(D& dir, const GridGeometry& geo, const CellKey& c, std::uint64_t& work, F&& f,
                             bool box_only) {
  const auto& offs = geo.offsets();
  if (box_only || offs.size() <= dir.size()) {
    CellKey probe(c.size());
    for (const CellKey& o : offs) {
      ++work;
      for (std::size_t i = 0; i < c.size(); ++i) probe[i] = c[i] + o[i];
      auto it = dir.find(probe);
      if (it != dir.end()) f(*it);
    }
    return;
  }
  for (auto& entry : dir) {
    ++work;
    if (geo.near(c, entry.first)) f(entry);
  }
}

void GridJoin::check(const Point& p) const {
  if (p.is_binary() || p.dim() != geo_.dim()) throw invalid_input("point dimension mismatch");
}

std::pair<GridJoin::Dir::iterator, bool> GridJoin::open_cell(const CellKey& key, bool scan) {
  ++last_work_;
  auto [it, created] = cells_.try_emplace(key);
  if (!created || !scan) return {it, created};
  Cell& cell = it->second;
  for_each_near(cells_, geo_, key, last_work_, [&](Dir::value_type& e) {
    if (e.second.b.empty()) return;
    cell.m += e.second.b.size();
    if (options_.constant_delay) cell.b_near.push_back(&e.first);
  });
  return {it, true};
}

void GridJoin::refresh(Dir::iterator it) {
  Cell& c = it->second;
  const bool want = !c.a.empty() && c.m > 0;
  if (want == c.active) return;
  ++last_work_;
  c.active = want;
  if (want) {
    active_.insert(&it->first);
  } else {
    active_.erase(&it->first);
  }
}

void GridJoin::close_if_empty(Dir::iterator it) {
  if (!it->second.a.empty() || !it->second.b.empty()) return;
  ++last_work_;
  if (it->second.active) active_.erase(&it->first);
  cells_.erase(it);
}

void GridJoin::remove_slot(std::vector<PointId>& v, std::size_t slot, std::unordered_map<PointId, Loc>& locs) {
  if (slot + 1 != v.size()) {
    v[slot] = v.back();
    locs[v[slot]].slot = slot;
  }
  v.pop_back();
}

void GridJoin::build(std::span<const Point> a, std::span<const Point> b) {
  cells_.clear();
  active_.clear();
  a_locs_.clear();
  b_locs_.clear();
  b_cells_ = 0;
  for (const Point& q : b) insert_b(q);
  for (const Point& p : a) insert_a(p);
}

void GridJoin::insert_a(const Point& p) {
  check(p);
  if (a_locs_.count(p.id)) throw invalid_input("duplicate A id " + std::to_string(p.id));
  last_work_ = 0;
  auto it = open_cell(geo_.cell_of(p.coords), true).first;
  it->second.a.push_back(p.id);
  a_locs_[p.id] = {&it->first, it->second.a.size() - 1};
  refresh(it);
}

void GridJoin::erase_a(PointId id) {
  auto loc = a_locs_.find(id);
  if (loc == a_locs_.end()) throw not_found("unknown A id " + std::to_string(id));
  last_work_ = 1;
  auto it = cells_.find(*loc->second.key);
  const std::size_t slot = loc->second.slot;
  a_locs_.erase(loc);
  remove_slot(it->second.a, slot, a_locs_);
  refresh(it);
  close_if_empty(it);
}

void GridJoin::insert_b(const Point& q) {
  check(q);
  if (b_locs_.count(q.id)) throw invalid_input("duplicate B id " + std::to_string(q.id));
  last_work_ = 0;
  auto [it, created] = open_cell(geo_.cell_of(q.coords), false);
  const bool first = it->second.b.empty();
  it->second.b.push_back(q.id);
  b_locs_[q.id] = {&it->first, it->second.b.size() - 1};
  if (first) ++b_cells_;
  const CellKey* key = &it->first;
  Cell& self = it->second;
  for_each_near(cells_, geo_, *key, last_work_, [&](Dir::value_type& e) {
    if (created && &e.first != key && !e.second.b.empty()) {
      self.m += e.second.b.size();
      if (options_.constant_delay) self.b_near.push_back(&e.first);
    }
    ++e.second.m;
    if (first && options_.constant_delay) e.second.b_near.push_back(key);
    refresh(cells_.find(e.first));
  });
}

void GridJoin::erase_b(PointId id) {
  auto loc = b_locs_.find(id);
  if (loc == b_locs_.end()) throw not_found("unknown B id " + std::to_string(id));
  last_work_ = 1;
  auto it = cells_.find(*loc->second.key);
  const std::size_t slot = loc->second.slot;
  b_locs_.erase(loc);
  const bool last = it->second.b.size() == 1;
  const CellKey* key = &it->first;
  for_each_near(cells_, geo_, *key, last_work_, [&](Dir::value_type& e) {
    --e.second.m;
    if (last && options_.constant_delay) {
      auto& v = e.second.b_near;
      v.erase(std::find(v.begin(), v.end(), key));
    }
    refresh(cells_.find(e.first));
  });
  remove_slot(it->second.b, slot, b_locs_);
  if (last) --b_cells_;
  close_if_empty(it);
}

void GridJoin::enumerate(EnumerationSession& session) const {
  for (const CellKey* key : active_) {
    session.work();
    const Cell& c = cells_.at(*key);
    auto emit_with = [&](const Cell& other) {
      for (PointId a : c.a) {
        for (PointId b : other.b) session.emit(a, b);
      }
    };
    if (options_.constant_delay) {
      for (const CellKey* nk : c.b_near) {
        session.work();
        emit_with(cells_.at(*nk));
      }
      continue;
    }
    std::uint64_t work = 0;
    for_each_near(cells_, geo_, *key, work, [&](const Dir::value_type& e) {
      session.work(work);
      work = 0;
      if (!e.second.b.empty()) emit_with(e.second);
    }, true);
    session.work(work);
  }
}

std::vector<GridJoin::CellView> GridJoin::cells() const {
  std::vector<CellView> out;
  for (const auto& [key, c] : cells_) out.push_back({key, c.a, c.b, c.m, c.active});
  return out;
}

CellKey GridJoin::cell_of_a(PointId id) const {
  auto it = a_locs_.find(id);
  if (it == a_locs_.end()) throw not_found("unknown A id " + std::to_string(id));
  return *it->second.key;
}

}  // namespace simjoin
