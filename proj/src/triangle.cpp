// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#include "simjoin/triangle.hpp"

namespace simjoin {

namespace {

constexpr int kA = 0;
constexpr int kB = 1;
constexpr int kS = 2;

int index_of(Side side) {
  switch (side) {
    case Side::A: return kA;
    case Side::B: return kB;
    default: return kS;
  }
}

template <typename D, typename It>
void collect_near(D& dir, const GridGeometry& geo, const CellKey& c, std::uint64_t& work, std::vector<It>& out) {
  const auto& offs = geo.offsets();
  if (offs.size() <= dir.size()) {
    CellKey probe(c.size());
    for (const CellKey& o : offs) {
      ++work;
      for (std::size_t i = 0; i < c.size(); ++i) probe[i] = c[i] + o[i];
      auto it = dir.find(probe);
      if (it != dir.end()) out.push_back(it);
    }
    return;
  }
  for (auto it = dir.begin(); it != dir.end(); ++it) {
    ++work;
    if (geo.near(c, it->first)) out.push_back(it);
  }
}

}  // namespace

TriangleJoin::TriangleJoin(std::size_t d, MetricKind metric, double r, double eps) : geo_(d, metric, r, eps) {}

void TriangleJoin::check(const Point& p) const {
  if (p.is_binary() || p.dim() != geo_.dim()) throw invalid_input("point dimension mismatch");
}

std::vector<TriangleJoin::Dir::iterator> TriangleJoin::near_cells(const CellKey& c, std::uint64_t& work) {
  std::vector<Dir::iterator> out;
  collect_near(cells_, geo_, c, work, out);
  return out;
}

std::vector<TriangleJoin::Dir::const_iterator> TriangleJoin::near_cells(const CellKey& c,
                                                                        std::uint64_t& work) const {
  std::vector<Dir::const_iterator> out;
  collect_near(cells_, geo_, c, work, out);
  return out;
}

std::vector<CellKey> TriangleJoin::lens(const CellKey& c, const CellKey& c1) const {
  std::uint64_t work = 0;
  std::vector<CellKey> out;
  for (auto it : near_cells(c, work)) {
    if (geo_.near(it->first, c1)) out.push_back(it->first);
  }
  return out;
}

std::uint64_t TriangleJoin::count_m(const std::vector<Dir::iterator>& nc) {
  std::uint64_t m = 0;
  for (auto c1 : nc) {
    const std::size_t nb = c1->second.pts[kB].size();
    if (!nb) continue;
    for (auto c2 : nc) {
      ++last_work_;
      if (!c2->second.pts[kS].empty() && geo_.near(c1->first, c2->first)) m += nb * c2->second.pts[kS].size();
    }
  }
  return m;
}

void TriangleJoin::refresh(Dir::iterator it) {
  Cell& c = it->second;
  const bool want = !c.pts[kA].empty() && c.m > 0;
  if (want == c.active) return;
  c.active = want;
  if (want) {
    active_.insert(&it->first);
  } else {
    active_.erase(&it->first);
  }
}

void TriangleJoin::build(std::span<const Point> a, std::span<const Point> b, std::span<const Point> s) {
  cells_.clear();
  active_.clear();
  for (auto& l : locs_) l.clear();
  for (const Point& q : b) insert(Side::B, q);
  for (const Point& q : s) insert(Side::S, q);
  for (const Point& p : a) insert(Side::A, p);
}

void TriangleJoin::insert(Side side, const Point& p) {
  check(p);
  const int k = index_of(side);
  if (locs_[k].count(p.id)) throw invalid_input("duplicate id " + std::to_string(p.id));
  last_work_ = 1;
  const CellKey key = geo_.cell_of(p.coords);
  auto [it, created] = cells_.try_emplace(key);
  std::vector<Dir::iterator> nx;
  if (created || k != kA) nx = near_cells(key, last_work_);
  if (created) it->second.m = count_m(nx);
  it->second.pts[k].push_back(p.id);
  locs_[k][p.id] = {&it->first, it->second.pts[k].size() - 1};
  if (k != kA) {
    const int other = k == kB ? kS : kB;
    for (auto c : nx) {
      std::uint64_t mass = 0;
      for (auto e : nx) {
        ++last_work_;
        if (geo_.near(e->first, c->first)) mass += e->second.pts[other].size();
      }
      c->second.m += mass;
      refresh(c);
    }
  }
  refresh(it);
}

void TriangleJoin::erase(Side side, PointId id) {
  const int k = index_of(side);
  auto loc = locs_[k].find(id);
  if (loc == locs_[k].end()) throw not_found("unknown id " + std::to_string(id));
  last_work_ = 1;
  auto it = cells_.find(*loc->second.key);
  const std::size_t slot = loc->second.slot;
  locs_[k].erase(loc);
  if (k != kA) {
    const int other = k == kB ? kS : kB;
    const auto nx = near_cells(it->first, last_work_);
    for (auto c : nx) {
      std::uint64_t mass = 0;
      for (auto e : nx) {
        ++last_work_;
        if (geo_.near(e->first, c->first)) mass += e->second.pts[other].size();
      }
      c->second.m -= mass;
      refresh(c);
    }
  }
  auto& v = it->second.pts[k];
  if (slot + 1 != v.size()) {
    v[slot] = v.back();
    locs_[k][v[slot]].slot = slot;
  }
  v.pop_back();
  refresh(it);
  const Cell& c = it->second;
  if (c.pts[kA].empty() && c.pts[kB].empty() && c.pts[kS].empty()) {
    if (c.active) active_.erase(&it->first);
    cells_.erase(it);
  }
}

void TriangleJoin::enumerate(EnumerationSession& session) const {
  std::vector<std::pair<const Cell*, const Cell*>> combos;
  for (const CellKey* key : active_) {
    session.work();
    const Cell& c = cells_.at(*key);
    std::uint64_t work = 0;
    const auto nc = near_cells(*key, work);
    combos.clear();
    for (auto c1 : nc) {
      if (c1->second.pts[kB].empty()) continue;
      for (auto c2 : nc) {
        ++work;
        if (!c2->second.pts[kS].empty() && geo_.near(c1->first, c2->first)) combos.emplace_back(&c1->second, &c2->second);
      }
    }
    session.work(work);
    for (PointId a : c.pts[kA]) {
      for (const auto& [c1, c2] : combos) {
        for (PointId b : c1->pts[kB]) {
          for (PointId s : c2->pts[kS]) session.emit(a, b, s);
        }
      }
    }
  }
}

std::vector<TriangleJoin::CellView> TriangleJoin::cells() const {
  std::vector<CellView> out;
  for (const auto& [key, c] : cells_) out.push_back({key, {c.pts[0], c.pts[1], c.pts[2]}, c.m, c.active});
  return out;
}

}  // namespace simjoin
