// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "simjoin/wspd.hpp"

using namespace simjoin;

namespace {

using Pts = std::map<PointId, Point>;

std::vector<double> uniform(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> u(0, 10);
  std::vector<double> c(d);
  for (auto& x : c) x = u(rng);
  return c;
}

std::vector<Point> values(const Pts& m) {
  std::vector<Point> out;
  for (const auto& [id, p] : m) out.push_back(p);
  return out;
}

double norm(MetricKind metric, const std::vector<double>& g) {
  double s = 0;
  for (double x : g) {
    if (metric == MetricKind::L1) s += x;
    if (metric == MetricKind::L2) s += x * x;
    if (metric == MetricKind::Linf) s = std::max(s, x);
  }
  return metric == MetricKind::L2 ? std::sqrt(s) : s;
}

double box_gap(MetricKind metric, const WspdJoin::Box& x, const WspdJoin::Box& y) {
  std::vector<double> g(x.lo.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::max({0.0, y.lo[i] - x.hi[i], x.lo[i] - y.hi[i]});
  return norm(metric, g);
}

double box_diam(MetricKind metric, const WspdJoin::Box& x) {
  std::vector<double> g(x.lo.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = x.hi[i] - x.lo[i];
  return norm(metric, g);
}

bool inside(const WspdJoin::Box& x, const Point& p) {
  for (std::size_t i = 0; i < p.coords.size(); ++i) {
    if (p.coords[i] < x.lo[i] || p.coords[i] > x.hi[i]) return false;
  }
  return true;
}

// Exhaustive structural audit against the current point sets.
void audit(const WspdJoin& w, const Pts& a, const Pts& b) {
  const MetricKind metric = w.metric();
  std::map<std::pair<PointId, PointId>, int> cover;
  std::size_t productive = 0;
  for (const auto& pv : w.pairs()) {
    const auto bu = w.box(pv.u);
    const auto bv = w.box(pv.v);
    const auto au = w.points_under(pv.u, Side::A), bu_ = w.points_under(pv.u, Side::B);
    const auto av = w.points_under(pv.v, Side::A), bv_ = w.points_under(pv.v, Side::B);
    for (PointId id : au) CHECK(inside(bu, a.at(id)));
    for (PointId id : bv_) CHECK(inside(bv, b.at(id)));
    if (pv.self) {
      CHECK(pv.delta == 0);
      CHECK(w.is_leaf(pv.u));
      for (PointId x : au) {
        for (PointId y : bu_) ++cover[{x, y}];
      }
      const bool want = !au.empty() && !bu_.empty();
      CHECK(pv.productive == want);
      productive += want;
      continue;
    }
    CHECK(pv.delta == doctest::Approx(box_gap(metric, bu, bv)).epsilon(1e-12));
    CHECK(pv.delta > 0);
    CHECK(std::max(box_diam(metric, bu), box_diam(metric, bv)) <= (w.eps() / 2) * pv.delta * (1 + 1e-12));
    for (PointId x : au) {
      for (PointId y : bv_) ++cover[{x, y}];
    }
    for (PointId x : av) {
      for (PointId y : bu_) ++cover[{x, y}];
    }
    const bool want = (!au.empty() && !bv_.empty()) || (!av.empty() && !bu_.empty());
    CHECK(pv.productive == want);
    productive += want;
  }
  CHECK(w.productive_pairs() == productive);
  CHECK(cover.size() == a.size() * b.size());
  for (const auto& [k, n] : cover) {
    CHECK(n == 1);
    CHECK(a.count(k.first));
    CHECK(b.count(k.second));
  }
}

std::vector<IdPair> run(const WspdJoin& w, double r, std::uint64_t* dups = nullptr) {
  EnumerationSession s;
  w.enumerate(r, s);
  s.finish();
  if (dups) *dups = s.duplicates();
  return s.sorted_pairs();
}

void sandwich(const WspdJoin& w, const Pts& a, const Pts& b, double r) {
  std::uint64_t dups = 0;
  const auto out = run(w, r, &dups);
  CHECK(dups == 0);
  const auto va = values(a), vb = values(b);
  const auto inner = oracle_join(va, vb, {w.metric(), r, 0});
  const auto outer = oracle_join(va, vb, {w.metric(), (1 + w.eps()) * r, 0});
  CHECK(std::includes(out.begin(), out.end(), inner.begin(), inner.end()));
  CHECK(std::includes(outer.begin(), outer.end(), out.begin(), out.end()));
}

std::size_t cross_pairs(const WspdJoin& w) {
  std::size_t n = 0;
  for (const auto& pv : w.pairs()) n += !pv.self;
  return n;
}

}  // namespace

TEST_CASE("tiny inputs") {
  WspdJoin w(2, MetricKind::L2, 0.5);
  w.build(std::vector<Point>{}, std::vector<Point>{});
  CHECK(w.pair_count() == 0);
  CHECK(run(w, 100).empty());
  w.insert_a(make_point(0, {1, 1}));
  CHECK(cross_pairs(w) == 0);
  CHECK(w.productive_pairs() == 0);

  WspdJoin one(1, MetricKind::L2, 0.5);
  one.build(std::vector<Point>{make_point(0, {0})}, std::vector<Point>{make_point(0, {1})});
  CHECK(cross_pairs(one) == 1);
  for (const auto& pv : one.pairs()) {
    if (!pv.self) CHECK(pv.delta <= 1);
  }
  CHECK(run(one, 1) == std::vector<IdPair>{{0, 0}});
  CHECK(run(one, 0.5).empty());
}

TEST_CASE("coincident points share a leaf") {
  WspdJoin w(2, MetricKind::L2, 0.5);
  Pts a, b;
  a.emplace(0, make_point(0, {1, 1}));
  a.emplace(1, make_point(1, {1, 1}));
  b.emplace(0, make_point(0, {1, 1}));
  b.emplace(1, make_point(1, {3, 1}));
  w.build(values(a), values(b));
  audit(w, a, b);
  CHECK(run(w, 1e-9) == std::vector<IdPair>{{0, 0}, {1, 0}});
  CHECK(run(w, 2).size() == 4);
}

TEST_CASE("build coverage and separation") {
  for (MetricKind metric : {MetricKind::L2, MetricKind::L1, MetricKind::Linf}) {
    for (std::size_t d : {1u, 2u, 3u}) {
      std::mt19937_64 rng(100 + d);
      Pts a, b;
      for (PointId i = 0; i < 64; ++i) {
        a.emplace(i, make_point(i, uniform(rng, d)));
        b.emplace(i, make_point(i, uniform(rng, d)));
      }
      WspdJoin w(d, metric, 0.5);
      w.build(values(a), values(b));
      audit(w, a, b);
      CHECK(w.signature() == w.rebuilt().signature());
    }
  }
}

TEST_CASE("threshold extremes") {
  std::mt19937_64 rng(7);
  Pts a, b;
  for (PointId i = 0; i < 50; ++i) {
    a.emplace(i, make_point(i, uniform(rng, 2)));
    b.emplace(i, make_point(i, uniform(rng, 2)));
  }
  WspdJoin w(2, MetricKind::L2, 0.5);
  w.build(values(a), values(b));
  double mn = 1e300;
  for (const auto& [i, p] : a) {
    for (const auto& [j, q] : b) mn = std::min(mn, distance(p, q, MetricKind::L2));
  }
  CHECK(run(w, mn / 2).empty());
  std::uint64_t dups = 0;
  CHECK(run(w, 100, &dups).size() == 2500);
  CHECK(dups == 0);
  CHECK_THROWS_AS(run(w, 0), Error);
}

TEST_CASE("dynamic updates match a rebuild") {
  for (MetricKind metric : {MetricKind::L2, MetricKind::Linf}) {
    std::mt19937_64 rng(metric == MetricKind::L2 ? 21 : 22);
    const std::size_t d = 2;
    const double eps = 0.5;
    Pts a, b;
    PointId na = 0, nb = 0;
    for (int i = 0; i < 60; ++i) {
      a.emplace(na, make_point(na, uniform(rng, d)));
      ++na;
      b.emplace(nb, make_point(nb, uniform(rng, d)));
      ++nb;
    }
    WspdJoin w(d, metric, eps);
    w.build(values(a), values(b));
    std::uint64_t worst = 0;
    for (int step = 0; step < 100; ++step) {
      const auto op = rng() % 5;
      if (op == 0 || a.empty()) {
        auto c = uniform(rng, d);
        if (step % 7 == 0) c = b.begin()->second.coords;  // coincident with a B point
        a.emplace(na, make_point(na, c));
        w.insert_a(a.at(na++));
      } else if (op == 1 || b.empty()) {
        b.emplace(nb, make_point(nb, uniform(rng, d)));
        w.insert_b(b.at(nb++));
      } else if (op == 2) {
        auto it = std::next(a.begin(), static_cast<long>(rng() % a.size()));
        w.erase_a(it->first);
        a.erase(it);
      } else if (op == 3) {
        auto it = std::next(b.begin(), static_cast<long>(rng() % b.size()));
        w.erase_b(it->first);
        b.erase(it);
      } else {
        std::vector<double> c(d, 9.9);
        c[0] = 9.9 - 1e-3 * step;
        b.emplace(nb, make_point(nb, c));
        w.insert_b(b.at(nb++));
      }
      worst = std::max(worst, w.last_update_pairs());
      audit(w, a, b);
      CHECK(w.signature() == w.rebuilt().signature());
      if (step % 10 == 0) {
        for (double r : {0.3, 1.0, 2.5}) sandwich(w, a, b, r);
      }
    }
    const double n = static_cast<double>(a.size() + b.size());
    const double lg = std::log2(n);
    CHECK(static_cast<double>(worst) <= 64 * std::pow(2 / eps, static_cast<double>(d)) * lg * lg);
  }
}

TEST_CASE("insert then delete restores the pair set") {
  std::mt19937_64 rng(3);
  Pts a, b;
  for (PointId i = 0; i < 40; ++i) {
    a.emplace(i, make_point(i, uniform(rng, 2)));
    b.emplace(i, make_point(i, uniform(rng, 2)));
  }
  WspdJoin w(2, MetricKind::L2, 0.5);
  w.build(values(a), values(b));
  const auto before = w.signature();
  for (int t = 0; t < 20; ++t) {
    w.insert_a(make_point(1000 + t, uniform(rng, 2)));
    w.erase_a(1000 + t);
    CHECK(w.signature() == before);
    w.insert_b(make_point(1000 + t, uniform(rng, 2)));
    w.erase_b(1000 + t);
    CHECK(w.signature() == before);
  }
}

TEST_CASE("point outside the root cell rebuilds") {
  WspdJoin w(2, MetricKind::L2, 0.5);
  Pts a, b;
  a.emplace(0, make_point(0, {0, 0}));
  b.emplace(0, make_point(0, {1, 1}));
  w.build(values(a), values(b));
  CHECK(w.rebuilds() == 0);
  b.emplace(1, make_point(1, {50, -20}));
  w.insert_b(b.at(1));
  CHECK(w.rebuilds() == 1);
  audit(w, a, b);
  sandwich(w, a, b, 2);
}

TEST_CASE("spread guard and errors") {
  WspdJoin w(1, MetricKind::L2, 0.5, 10);
  w.build(std::vector<Point>{make_point(0, {0})}, std::vector<Point>{make_point(0, {1})});
  CHECK_THROWS_AS(w.insert_a(make_point(1, {1e-9})), Error);
  CHECK(w.pair_count() == 3);
  CHECK_THROWS_AS(w.erase_a(5), Error);
  CHECK_THROWS_AS(w.insert_a(make_point(0, {0.5})), Error);
  CHECK_THROWS_AS(w.insert_a(make_point(2, {0.5, 0.5})), Error);
  CHECK_THROWS_AS(WspdJoin(2, MetricKind::L2, 1.5), Error);
  CHECK_THROWS_AS(WspdJoin(2, MetricKind::Hamming, 0.5), Error);
}

TEST_CASE("variable threshold sandwich") {
  std::mt19937_64 rng(55);
  Pts a, b;
  for (PointId i = 0; i < 100; ++i) {
    a.emplace(i, make_point(i, uniform(rng, 2)));
    b.emplace(i, make_point(i, uniform(rng, 2)));
  }
  WspdJoin w(2, MetricKind::L2, 0.25);
  w.build(values(a), values(b));
  for (int k = 1; k <= 10; ++k) sandwich(w, a, b, 0.35 * k);
}
