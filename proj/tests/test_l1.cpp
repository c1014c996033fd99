// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "simjoin/l1.hpp"

using namespace simjoin;

namespace {

std::vector<double> lattice(std::mt19937_64& rng, std::size_t d) {
  std::uniform_int_distribution<int> u(0, 255);
  std::vector<double> c(d);
  for (auto& x : c) x = u(rng) / 64.0;
  return c;
}

bool in_lifted(const std::vector<double>& p, const std::vector<KeyInterval>& rect) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!rect[i].contains(p[i])) return false;
  }
  return true;
}

double l1(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

std::vector<IdPair> brute(const std::map<PointId, std::vector<double>>& a,
                          const std::map<PointId, std::vector<double>>& b, double r) {
  std::vector<IdPair> out;
  for (const auto& [ia, pa] : a) {
    for (const auto& [ib, pb] : b) {
      if (l1(pa, pb) <= r) out.push_back({ia, ib});
    }
  }
  return out;
}

std::vector<IdPair> run(const L1Join& j) {
  EnumerationSession s;
  j.enumerate(s);
  s.finish();
  CHECK(s.duplicates() == 0);
  return s.sorted_pairs();
}

}  // namespace

TEST_CASE("lift_point examples") {
  CHECK(lift_point(make_point(0, {1, 2}), {1, -1}) == std::vector<double>{1, 2, -1});
  CHECK(lift_point(make_point(0, {0, 0, 0}), {-1, 1, -1}) == std::vector<double>{0, 0, 0, 0});
  CHECK(lift_point(make_point(0, {3}), {-1}) == std::vector<double>{3, -3});
}

TEST_CASE("lift_rect examples") {
  auto r1 = lift_rect(make_point(0, {0, 0}), {1, 1}, 1.0);
  REQUIRE(r1.size() == 3);
  CHECK(r1[0].lo == 0.0);
  CHECK(r1[0].hi == kInf);
  CHECK(r1[1].lo == 0.0);
  CHECK(r1[2].lo == -kInf);
  CHECK(r1[2].hi == 1.0);

  auto r2 = lift_rect(make_point(0, {2}), {-1}, 1.0);
  CHECK(r2[0].lo == -kInf);
  CHECK(r2[0].hi == 2.0);
  CHECK(r2[0].hi_open);
  CHECK(r2[1].hi == -1.0);
  CHECK_FALSE(r2[1].hi_open);

  auto r3 = lift_rect(make_point(0, {1, 1}), {1, -1}, 2.0);
  CHECK(r3[0].lo == 1.0);
  CHECK(r3[1].hi == 1.0);
  CHECK(r3[2].hi == 2.0);
}

TEST_CASE("sign_vector examples") {
  CHECK(sign_vector(make_point(0, {1, 3}), make_point(1, {2, 1})) == SignVector{-1, 1});
  CHECK(sign_vector(make_point(0, {4, 4}), make_point(1, {4, 4})) == SignVector{1, 1});
  CHECK(sign_vector(make_point(0, {5}), make_point(1, {1})) == SignVector{1});
}

TEST_CASE("rotate_2d examples") {
  CHECK(rotate_2d(std::vector<double>{1, 0}) == std::vector<double>{1, 1});
  CHECK(rotate_2d(std::vector<double>{0, 1}) == std::vector<double>{1, -1});
  CHECK(rotate_2d(std::vector<double>{0, 0}) == std::vector<double>{0, 0});
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    auto p = lattice(rng, 2);
    auto q = lattice(rng, 2);
    auto rp = rotate_2d(p);
    auto rq = rotate_2d(q);
    const double linf = std::max(std::abs(rp[0] - rq[0]), std::abs(rp[1] - rq[1]));
    CHECK(linf == l1(p, q));
  }
}

TEST_CASE("lifted containment holds for the sign vector only") {
  std::mt19937_64 rng(2);
  for (std::size_t d : {1u, 2u, 3u}) {
    const double r = 1.0;
    for (int t = 0; t < 200; ++t) {
      Point a = make_point(0, lattice(rng, d));
      Point b = make_point(1, lattice(rng, d));
      if (t % 10 == 0) a.coords[0] = b.coords[0];  // coincident coordinate
      const SignVector star = sign_vector(a, b);
      for (const SignVector& e : all_sign_vectors(d)) {
        const bool in = in_lifted(lift_point(a, e), lift_rect(b, e, r));
        if (e == star) {
          CHECK(in == (l1(a.coords, b.coords) <= r));
        } else {
          CHECK_FALSE(in);
        }
      }
    }
  }
}

TEST_CASE("dimension limit") {
  CHECK_THROWS_AS(L1Join(7, 1.0), Error);
  CHECK_THROWS_AS(L1Join(3, 1.0, L1Path::kRotation), Error);
  CHECK(L1Join(2, 1.0).path() == L1Path::kRotation);
  CHECK(L1Join(3, 1.0).path() == L1Path::kLifting);
  CHECK(L1Join(3, 1.0).sub_indexes() == 8);
}

TEST_CASE("d=1 single pair comes from one sub-index") {
  L1Join j(1, 1.0, L1Path::kLifting);
  j.build(std::vector<Point>{make_point(0, {0.25})}, std::vector<Point>{make_point(0, {1.0})});
  std::size_t hits = 0;
  for (std::size_t k = 0; k < j.sub_indexes(); ++k) {
    EnumerationSession s;
    j.sub_index(k).enumerate(s);
    hits += s.emitted();
  }
  CHECK(hits == 1);
}

TEST_CASE("rotation and lifting agree in 2-d") {
  for (int trial = 0; trial < 5; ++trial) {
    std::mt19937_64 rng(40 + trial);
    std::vector<Point> a, b;
    for (PointId i = 0; i < 80; ++i) a.push_back(make_point(i, lattice(rng, 2)));
    for (PointId i = 0; i < 80; ++i) b.push_back(make_point(i, lattice(rng, 2)));
    L1Join rot(2, 0.75, L1Path::kRotation);
    L1Join lift(2, 0.75, L1Path::kLifting);
    rot.build(a, b);
    lift.build(a, b);
    CHECK(run(rot) == run(lift));
  }
}

TEST_CASE("d=3 replay against the oracle") {
  std::mt19937_64 rng(300);
  const double r = 0.75;
  L1Join j(3, r);
  std::map<PointId, std::vector<double>> ma, mb;
  std::vector<Point> a, b;
  PointId na = 0, nb = 0;
  for (int i = 0; i < 150; ++i) {
    a.push_back(make_point(na, lattice(rng, 3)));
    ma[na++] = a.back().coords;
    b.push_back(make_point(nb, lattice(rng, 3)));
    mb[nb++] = b.back().coords;
  }
  j.build(a, b);
  CHECK(run(j) == brute(ma, mb, r));
  for (int step = 0; step < 60; ++step) {
    switch (rng() % 4) {
      case 0: {
        auto c = lattice(rng, 3);
        j.insert_a(make_point(na, c));
        ma[na++] = c;
        break;
      }
      case 1: {
        auto c = lattice(rng, 3);
        j.insert_b(make_point(nb, c));
        mb[nb++] = c;
        break;
      }
      case 2: {
        auto it = std::next(ma.begin(), static_cast<long>(rng() % ma.size()));
        j.erase_a(it->first);
        ma.erase(it);
        break;
      }
      default: {
        auto it = std::next(mb.begin(), static_cast<long>(rng() % mb.size()));
        j.erase_b(it->first);
        mb.erase(it);
      }
    }
    CHECK(run(j) == brute(ma, mb, r));
  }
  CHECK_THROWS_AS(j.erase_a(100000), Error);
}
