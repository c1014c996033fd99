// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "simjoin/lsh.hpp"

using namespace simjoin;

namespace {

Point random_bits(std::mt19937_64& rng, PointId id) { return make_binary_point(id, 64, {rng()}); }

Point flip(const Point& p, PointId id, std::mt19937_64& rng, std::size_t flips) {
  std::uint64_t w = p.bits[0];
  std::set<std::size_t> pos;
  while (pos.size() < flips) pos.insert(rng() % 64);
  for (std::size_t i : pos) w ^= std::uint64_t{1} << i;
  return make_binary_point(id, 64, {w});
}

// n/2 points per side; a quarter of B are planted within r of some A point.
void planted(std::uint64_t seed, std::size_t n, std::size_t r, std::vector<Point>& a, std::vector<Point>& b) {
  std::mt19937_64 rng(seed);
  a.clear();
  b.clear();
  for (std::size_t i = 0; i < n / 2; ++i) a.push_back(random_bits(rng, i));
  for (std::size_t i = 0; i < n / 2; ++i) {
    if (i % 4 == 0) {
      b.push_back(flip(a[rng() % a.size()], 1000 + i, rng, rng() % (r + 1)));
    } else {
      b.push_back(random_bits(rng, 1000 + i));
    }
  }
}

std::map<PointId, Point> by_id(const std::vector<Point>& v) {
  std::map<PointId, Point> m;
  for (const auto& p : v) m.emplace(p.id, p);
  return m;
}

std::vector<Point> values(const std::map<PointId, Point>& m) {
  std::vector<Point> out;
  for (const auto& [id, p] : m) out.push_back(p);
  return out;
}

// Witness subsets, near counters, activity and the representative against
// the bucket contents and the distance function.
void recheck(const LshJoin::BucketView& v, const std::map<PointId, Point>& a, const std::map<PointId, Point>& b,
             double R, std::size_t M) {
  const std::set<PointId> as(v.a.begin(), v.a.end()), bs(v.b.begin(), v.b.end());
  CHECK(v.wa.size() == std::min(M, v.a.size()));
  CHECK(v.wb.size() == std::min(M, v.b.size()));
  for (PointId w : v.wa) CHECK(as.count(w));
  for (PointId w : v.wb) CHECK(bs.count(w));
  bool any = false;
  for (std::size_t i = 0; i < v.wa.size(); ++i) {
    std::size_t beta = 0;
    for (PointId w : v.wb) beta += distance(a.at(v.wa[i]), b.at(w), MetricKind::Hamming) <= R;
    CHECK(v.beta[i] == beta);
    any = any || beta > 0;
  }
  CHECK(v.active == any);
  if (v.active) {
    CHECK(std::find(v.wa.begin(), v.wa.end(), v.rep_a) != v.wa.end());
    CHECK(std::find(v.wb.begin(), v.wb.end(), v.rep_b) != v.wb.end());
    CHECK(distance(a.at(v.rep_a), b.at(v.rep_b), MetricKind::Hamming) <= R);
  }
}

struct Outcome {
  std::vector<IdPair> pairs;
  std::uint64_t duplicates;
};

template <class Index>
Outcome run(Index& ix) {
  EnumerationSession s;
  ix.enumerate(s);
  s.finish();
  return {s.sorted_pairs(), s.duplicates()};
}

double recall(const std::vector<IdPair>& got, const std::vector<IdPair>& want) {
  if (want.empty()) return 1.0;
  std::vector<IdPair> hit;
  std::set_intersection(got.begin(), got.end(), want.begin(), want.end(), std::back_inserter(hit));
  return static_cast<double>(hit.size()) / want.size();
}

// Collision probability of one quantized projection by direct integration
// of the density of |<g, x - y>| / w.
double integrate(double (*pdf)(double), double w, double u) {
  const int n = 20000;
  const double h = w / n;
  double s = 0;
  for (int i = 0; i <= n; ++i) {
    const double t = i * h;
    const double f = pdf(t / u) / u * (1 - t / w);
    s += (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2)) * f;
  }
  return s * h / 3;
}
double half_normal(double t) { return 2 * std::exp(-t * t / 2) / std::sqrt(2 * std::numbers::pi); }
double half_cauchy(double t) { return 2 / (std::numbers::pi * (1 + t * t)); }

}  // namespace

TEST_CASE("collision probabilities") {
  CHECK(lsh_collision_probability(MetricKind::Hamming, 64, 0, 4) == doctest::Approx(60.0 / 64));
  CHECK(lsh_collision_probability(MetricKind::Hamming, 64, 0, 0) == 1.0);
  for (double u : {0.5, 1.0, 2.0, 4.0, 9.0}) {
    CHECK(lsh_collision_probability(MetricKind::L2, 8, 4, u) == doctest::Approx(integrate(half_normal, 4, u)).epsilon(1e-6));
    CHECK(lsh_collision_probability(MetricKind::L1, 8, 4, u) == doctest::Approx(integrate(half_cauchy, 4, u)).epsilon(1e-6));
  }
  CHECK_THROWS_AS(lsh_collision_probability(MetricKind::Linf, 8, 4, 1), Error);
}

TEST_CASE("derived parameters") {
  LshParams p;
  p.r = 4;
  p.eps = 1;
  p.n_hint = 400;
  LshJoin j(64, p);
  const double rho = std::log(64.0 / 60) / std::log(64.0 / 56);
  CHECK(j.rho() == doctest::Approx(rho));
  CHECK(j.params().tau == static_cast<std::size_t>(std::ceil(std::pow(400.0, rho))));
  CHECK(j.params().M == j.params().tau);
  CHECK(j.params().m == 18);
  CHECK(j.params().k == 9);
  CHECK(j.tables() == j.params().tau * 18);
  CHECK(j.report_radius() == 16);

  LshParams q = p;
  q.tau = 3;
  q.M = 5;
  q.m = 2;
  q.k = 7;
  LshJoin fixed(64, q);
  CHECK(fixed.tables() == 6);
  CHECK(fixed.params().M == 5);
  CHECK(fixed.sampled_bits(0).size() == 7);

  LshParams bad = p;
  bad.metric = MetricKind::Linf;
  CHECK_THROWS_AS(LshJoin(64, bad), Error);
  bad = p;
  bad.r = 0;
  CHECK_THROWS_AS(LshJoin(64, bad), Error);
  bad = p;
  bad.r = 40;  // (1 + eps) r beyond d
  CHECK_THROWS_AS(LshJoin(64, bad), Error);
}

TEST_CASE("keys are deterministic") {
  std::mt19937_64 rng(3);
  for (MetricKind metric : {MetricKind::Hamming, MetricKind::L2, MetricKind::L1}) {
    LshParams p;
    p.metric = metric;
    p.r = metric == MetricKind::Hamming ? 4 : 1;
    p.n_hint = 100;
    p.seed = 17;
    LshJoin x(metric == MetricKind::Hamming ? 64 : 5, p), y(metric == MetricKind::Hamming ? 64 : 5, p);
    for (int i = 0; i < 20; ++i) {
      Point q;
      if (metric == MetricKind::Hamming) {
        q = random_bits(rng, i);
      } else {
        std::normal_distribution<double> g;
        q = make_point(i, {g(rng), g(rng), g(rng), g(rng), g(rng)});
      }
      Point twin = q;
      twin.id = 99;
      for (std::size_t t = 0; t < x.tables(); ++t) {
        CHECK(x.key_of(q, t) == x.key_of(twin, t));
        CHECK(x.key_of(q, t) == y.key_of(q, t));
      }
    }
  }
}

TEST_CASE("near pairs collide more often than far pairs") {
  LshParams p;
  p.r = 4;
  p.eps = 1;
  p.n_hint = 400;
  LshJoin j(64, p);
  std::mt19937_64 rng(11);
  std::size_t near_hits = 0, far_hits = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    const Point x = random_bits(rng, 0);
    const Point y = flip(x, 1, rng, 1 + rng() % 4);
    const Point z = flip(x, 2, rng, 8 + rng() % 8);
    const std::size_t t = rng() % j.tables();
    near_hits += j.key_of(x, t) == j.key_of(y, t);
    far_hits += j.key_of(x, t) == j.key_of(z, t);
  }
  MESSAGE("near ", near_hits, " far ", far_hits);
  CHECK(near_hits > far_hits);
  // A k-bit key collides with probability (1 - u/d)^k.
  CHECK(static_cast<double>(near_hits) / trials > std::pow(60.0 / 64, 9) - 0.03);
  CHECK(static_cast<double>(far_hits) / trials < std::pow(56.0 / 64, 9) + 0.03);
}

TEST_CASE("identical points") {
  for (bool low : {false, true}) {
    LshParams p;
    p.r = 4;
    p.n_hint = 400;
    p.low_delay = low;
    LshJoin j(64, p);
    std::mt19937_64 rng(5);
    const Point x = random_bits(rng, 1);
    Point y = x;
    y.id = 2;
    j.insert_a(x);
    j.insert_b(y);
    const auto bks = j.buckets();
    CHECK(bks.size() == j.tables());
    if (!low) {
      CHECK(j.active_buckets() == j.tables());
      for (const auto& v : bks) {
        CHECK(v.active);
        CHECK(v.rep_a == 1);
        CHECK(v.rep_b == 2);
      }
    }
    const auto out = run(j);
    CHECK(out.pairs == std::vector<IdPair>{{1, 2}});
    CHECK(out.duplicates == 0);

    LshJoin empty(64, p);
    CHECK(run(empty).pairs.empty());
  }
}

TEST_CASE("deleting the representative") {
  LshParams p;
  p.r = 4;
  p.n_hint = 400;
  p.seed = 9;
  LshJoin j(64, p);
  std::mt19937_64 rng(21);
  const Point x = random_bits(rng, 1);
  const Point x2 = flip(x, 2, rng, 2);
  Point y = x;
  y.id = 10;
  j.insert_a(x);
  j.insert_a(x2);
  j.insert_b(y);
  std::size_t shared = 0;
  for (std::size_t t = 0; t < j.tables(); ++t) {
    const auto v = j.bucket(t, j.key_of(x, t));
    REQUIRE(v);
    CHECK(v->rep_a == 1);
    shared += j.key_of(x2, t) == j.key_of(x, t);
  }
  j.erase_a(1);
  std::size_t moved = 0;
  for (std::size_t t = 0; t < j.tables(); ++t) {
    const auto v = j.bucket(t, j.key_of(x, t));
    REQUIRE(v);
    if (j.key_of(x2, t) == j.key_of(x, t)) {
      CHECK(v->active);
      CHECK(v->rep_a == 2);
      ++moved;
    } else {
      CHECK(!v->active);
      CHECK(v->a.empty());
    }
  }
  CHECK(moved == shared);
  CHECK(shared > 0);
  CHECK_THROWS_AS(j.erase_a(1), Error);
  CHECK_THROWS_AS(j.erase_b(77), Error);
  CHECK_THROWS_AS(j.insert_b(y), Error);
}

TEST_CASE("bucket state matches a recheck after every update") {
  std::vector<Point> av, bv;
  planted(31, 400, 4, av, bv);
  LshParams p;
  p.r = 4;
  p.eps = 1;
  LshJoin j(64, p);
  j.build(av, bv);
  auto a = by_id(av), b = by_id(bv);
  const std::size_t M = j.params().M;
  std::mt19937_64 rng(8);
  PointId next = 5000;
  std::uint64_t max_evals = 0;
  for (int step = 0; step < 200; ++step) {
    const int kind = static_cast<int>(rng() % 4);
    if (kind == 0) {
      Point q = rng() % 2 ? random_bits(rng, next++) : flip(b.begin()->second, next++, rng, 3);
      j.insert_a(q);
      a.emplace(q.id, q);
    } else if (kind == 1) {
      Point q = rng() % 2 ? random_bits(rng, next++) : flip(a.begin()->second, next++, rng, 3);
      j.insert_b(q);
      b.emplace(q.id, q);
    } else if (kind == 2 && a.size() > 1) {
      auto it = std::next(a.begin(), static_cast<long>(rng() % a.size()));
      j.erase_a(it->first);
      a.erase(it);
    } else if (b.size() > 1) {
      auto it = std::next(b.begin(), static_cast<long>(rng() % b.size()));
      j.erase_b(it->first);
      b.erase(it);
    }
    max_evals = std::max(max_evals, j.last_update_bucket_evals());
    CHECK(j.last_update_bucket_evals() <= M + 1);
    std::size_t active = 0;
    for (const auto& v : j.buckets()) {
      recheck(v, a, b, j.report_radius(), M);
      active += v.active;
      CHECK(!(v.a.empty() && v.b.empty()));
    }
    CHECK(j.active_buckets() == active);
  }
  CHECK(j.rebuilds() >= 1);
  MESSAGE("max bucket evals ", max_evals, " M ", M);
}

TEST_CASE("precision and uniqueness in both modes") {
  for (MetricKind metric : {MetricKind::Hamming, MetricKind::L2, MetricKind::L1}) {
    for (bool low : {false, true}) {
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        std::vector<Point> av, bv;
        std::mt19937_64 rng(seed);
        LshParams p;
        p.metric = metric;
        p.eps = 1;
        p.low_delay = low;
        p.seed = seed;
        std::size_t d = 64;
        if (metric == MetricKind::Hamming) {
          p.r = 4;
          planted(seed, 200, 4, av, bv);
        } else {
          d = 4;
          p.r = 0.6;
          std::uniform_real_distribution<double> u(0, 3);
          for (PointId i = 0; i < 100; ++i) av.push_back(make_point(i, {u(rng), u(rng), u(rng), u(rng)}));
          for (PointId i = 0; i < 100; ++i) bv.push_back(make_point(500 + i, {u(rng), u(rng), u(rng), u(rng)}));
        }
        LshJoin j(d, p);
        j.build(av, bv);
        auto a = by_id(av), b = by_id(bv);
        for (int step = 0; step < 30; ++step) {
          if (step % 10 == 9) {
            const auto out = run(j);
            CHECK(out.duplicates == 0);
            for (const auto& pr : out.pairs) CHECK(distance(a.at(pr.a), b.at(pr.b), metric) <= j.report_radius());
            const auto want = oracle_join(values(a), values(b), {metric, p.r, 0});
            CHECK(recall(out.pairs, want) >= 0.5);
          }
          if (step % 2) {
            auto it = std::next(a.begin(), static_cast<long>(rng() % a.size()));
            j.erase_a(it->first);
            a.erase(it);
          } else {
            auto it = std::next(b.begin(), static_cast<long>(rng() % b.size()));
            Point q = it->second;
            j.erase_b(q.id);
            b.erase(it);
            q.id += 10000;
            j.insert_b(q);
            b.emplace(q.id, q);
          }
        }
      }
    }
  }
}

TEST_CASE("recall on planted pairs") {
  for (bool low : {false, true}) {
    double total = 0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      std::vector<Point> av, bv;
      planted(100 + seed, 400, 4, av, bv);
      LshParams p;
      p.r = 4;
      p.eps = 1;
      p.seed = seed;
      p.low_delay = low;
      LshJoin j(64, p);
      j.build(av, bv);
      const auto out = run(j);
      const auto want = oracle_join(av, bv, {MetricKind::Hamming, 4, 0});
      REQUIRE(!want.empty());
      const double rc = recall(out.pairs, want);
      CHECK(rc >= 0.9);
      total += rc;
    }
    CHECK(total / 4 >= 0.97);
  }
}

TEST_CASE("low-delay updates do less work") {
  std::vector<Point> av, bv;
  planted(7, 400, 4, av, bv);
  std::uint64_t work[2] = {0, 0};
  for (int low = 0; low < 2; ++low) {
    LshParams p;
    p.r = 4;
    p.n_hint = 400;
    p.low_delay = low;
    LshJoin j(64, p);
    for (const auto& q : av) {
      j.insert_a(q);
      work[low] += j.last_update_work();
    }
    for (const auto& q : bv) {
      j.insert_b(q);
      work[low] += j.last_update_work();
    }
    for (std::size_t i = 0; i < 100; ++i) {
      j.erase_a(av[i].id);
      work[low] += j.last_update_work();
    }
  }
  MESSAGE("default ", work[0], " low-delay ", work[1]);
  CHECK(work[1] < work[0]);
}

TEST_CASE("rebuild after half the size in updates") {
  LshParams p;
  p.r = 4;
  p.n_hint = 64;
  LshJoin j(64, p);
  std::vector<Point> av, bv;
  planted(2, 40, 4, av, bv);
  j.build(av, bv);
  CHECK(j.rebuilds() == 0);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 19; ++i) j.insert_a(random_bits(rng, 100 + i));
  CHECK(j.rebuilds() == 0);
  j.insert_a(random_bits(rng, 200));
  CHECK(j.rebuilds() == 1);
}

TEST_CASE("scale bank") {
  LshParams p;
  p.eps = 1;
  p.n_hint = 200;
  LshBank bank(64, p, 1, 16);
  CHECK(bank.scales() == std::vector<double>{1, 2, 4, 8, 16});
  CHECK(bank.scale_for(1) == 0);
  CHECK(bank.scale_for(4) == 2);
  CHECK(bank.scale_for(4.5) == 3);
  CHECK_THROWS_AS(bank.scale_for(0.5), Error);
  CHECK_THROWS_AS(bank.scale_for(17), Error);
  CHECK_THROWS_AS(LshBank(64, p, 0, 4), Error);

  LshParams q;
  q.eps = 0.5;
  q.n_hint = 400;
  LshBank sweep(64, q, 1, 12);
  std::vector<Point> av, bv;
  planted(12, 400, 8, av, bv);
  sweep.build(av, bv);
  for (double r : {1.0, 2.0, 3.0, 4.5, 6.0, 7.0, 9.0, 12.0}) {
    EnumerationSession s;
    sweep.enumerate(r, s);
    const auto got = s.sorted_pairs();
    CHECK(s.duplicates() == 0);
    const double rj = sweep.scales()[sweep.scale_for(r)];
    CHECK(rj >= r);
    CHECK(rj <= (1 + q.eps) * r + 1e-9);
    const auto outer = oracle_join(av, bv, {MetricKind::Hamming, (1 + q.eps) * 2 * (1 + q.eps) * r, 0});
    CHECK(std::includes(outer.begin(), outer.end(), got.begin(), got.end()));
    const auto inner = oracle_join(av, bv, {MetricKind::Hamming, r, 0});
    CHECK(recall(got, inner) >= 0.9);
  }
}

TEST_CASE("skip rule on a constructed bucket") {
  LshParams p;
  p.r = 4;
  p.eps = 1;
  p.tau = 4;
  p.m = 2;
  p.M = 2;
  p.k = 8;
  p.seed = 4;
  LshJoin j(64, p);
  const auto& s0 = j.sampled_bits(0);
  std::uint64_t mask = 0;
  for (std::size_t b : s0) mask |= std::uint64_t{1} << b;
  std::mt19937_64 rng(19);
  const double R = j.report_radius();
  const std::size_t M = j.params().M;
  // M + 1 far points per side, then a hidden identical pair; all agree on
  // the bits of table 0.
  const Point hidden_a = make_binary_point(50, 64, {rng() & ~mask});
  Point hidden_b = hidden_a;
  hidden_b.id = 150;
  std::vector<Point> av, bv;
  auto far_from_all = [&](const Point& q, const std::vector<Point>& others) {
    if (distance(q, hidden_a, MetricKind::Hamming) <= R) return false;
    for (const auto& o : others) {
      if (distance(q, o, MetricKind::Hamming) <= R) return false;
    }
    return true;
  };
  while (av.size() < M + 1 || bv.size() < M + 1) {
    const bool side_a = av.size() < M + 1;
    const Point q = make_binary_point(side_a ? av.size() : 100 + bv.size(), 64, {rng() & ~mask});
    if (far_from_all(q, side_a ? bv : av)) (side_a ? av : bv).push_back(q);
  }
  av.push_back(hidden_a);
  bv.push_back(hidden_b);
  j.build(av, bv);

  const auto v = j.bucket(0, j.key_of(hidden_a, 0));
  REQUIRE(v);
  CHECK(v->a.size() == M + 2);
  CHECK(v->b.size() == M + 2);
  CHECK(!v->active);
  for (std::size_t x : v->beta) CHECK(x == 0);
  for (PointId w : v->wa) CHECK(w != hidden_a.id);
  // The hidden pair is not proxied here: its A point has more than M far
  // colliders in the bucket.
  std::size_t far = 0;
  for (const auto& q : bv) far += distance(hidden_a, q, MetricKind::Hamming) > R;
  CHECK(far > M);

  const auto out = run(j);
  CHECK(std::find(out.pairs.begin(), out.pairs.end(), IdPair{50, 150}) != out.pairs.end());
  CHECK(out.duplicates == 0);
}
