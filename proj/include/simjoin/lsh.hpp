// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <unordered_map>
#include <vector>

#include "simjoin/core.hpp"
#include "simjoin/session.hpp"

namespace simjoin {

/// Zero fields are derived: tau = ceil(c_tau n^rho), M = ceil(c_M n^rho),
/// m = ceil(c_m ln n), k = ceil(log2 n) for Hamming and
/// ceil(ln n / ln(1/p2)) otherwise, w = 4r.
struct LshParams {
  MetricKind metric = MetricKind::Hamming;
  double r = 1.0;
  double eps = 1.0;
  double c_tau = 1.0;
  double c_M = 1.0;
  double c_m = 3.0;
  std::size_t k = 0;
  std::size_t tau = 0;
  std::size_t M = 0;
  std::size_t m = 0;
  double w = 0;
  std::uint64_t seed = 1;
  bool low_delay = false;
  /// Size used for the derived parameters; 0 means |A| + |B| at build.
  std::size_t n_hint = 0;
};

/// Probability that one atomic hash collides for two points at distance u.
double lsh_collision_probability(MetricKind metric, std::size_t d, double w, double u);

/// Approximate join: every emitted pair is within 2(1 + eps) r, each pair is
/// emitted once, and pairs within r are reported with high probability.
class LshJoin {
 public:
  using BucketId = std::uint32_t;
  using Key = std::vector<std::int64_t>;

  LshJoin(std::size_t d, LshParams params);

  void build(std::span<const Point> a, std::span<const Point> b);
  void insert_a(const Point& p);
  void erase_a(PointId id);
  void insert_b(const Point& q);
  void erase_b(PointId id);
  /// Mutates session marks; not safe to overlap with another call.
  void enumerate(EnumerationSession& session);

  /// Parameters with every derived field filled in.
  std::size_t dim() const noexcept { return d_; }
  const LshParams& params() const noexcept { return derived_; }
  double rho() const noexcept { return rho_; }
  double report_radius() const noexcept { return R_; }
  std::size_t tables() const noexcept { return hashes_.size(); }
  Key key_of(const Point& p, std::size_t table) const;
  /// Bit positions sampled by a Hamming table.
  const std::vector<std::size_t>& sampled_bits(std::size_t table) const { return hashes_.at(table).bits; }

  struct BucketView {
    std::size_t table;
    Key key;
    std::vector<PointId> a;
    std::vector<PointId> b;
    std::vector<PointId> wa;
    std::vector<PointId> wb;
    std::vector<std::size_t> beta;  // aligned with wa
    bool active;
    PointId rep_a;
    PointId rep_b;
  };
  std::vector<BucketView> buckets() const;
  std::optional<BucketView> bucket(std::size_t table, const Key& key) const;
  std::size_t active_buckets() const noexcept { return active_.size(); }
  /// Largest number of distance evaluations spent on one bucket by the last update.
  std::uint64_t last_update_bucket_evals() const noexcept { return last_bucket_evals_; }
  std::uint64_t last_update_work() const noexcept { return last_work_; }
  std::uint64_t rebuilds() const noexcept { return rebuilds_; }

 private:
  struct Hash {
    std::vector<std::size_t> bits;             // Hamming
    std::vector<std::vector<double>> proj;     // real metrics
    std::vector<double> shift;
  };
  struct Bucket {
    std::size_t table = 0;
    Key key;
    std::set<PointId> a;
    std::set<PointId> b;
    std::vector<PointId> wa;
    std::vector<PointId> wb;
    std::unordered_map<PointId, std::vector<PointId>> close;  // witness a -> close witnesses in wb
    std::size_t positive = 0;
    bool active = false;
    PointId rep_a = 0;
    PointId rep_b = 0;
    bool live = false;
  };
  struct Rec {
    Point p;
    std::vector<BucketId> buckets;
    std::uint64_t stamp = 0;  // A: session of retirement; B: epoch of last mark
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  using OrderKey = std::pair<std::size_t, Key>;

  struct Overlay;
  class Enumerator;

  void derive(std::size_t n);
  void draw_hashes();
  void check(const Point& p) const;
  bool close(const Point& x, const Point& y) const;
  BucketId open_bucket(std::size_t table, const Key& key);
  void drop_if_empty(BucketId id);
  void repair(Bucket& bk, BucketId id);
  void set_active(Bucket& bk, BucketId id, bool on);
  void add_a(BucketId id, PointId a);
  void remove_a(BucketId id, PointId a);
  void add_b(BucketId id, PointId b);
  void remove_b(BucketId id, PointId b);
  void after_update();
  void rebuild();
  void note_evals(std::uint64_t evals);
  BucketView view(BucketId id) const;

  std::size_t d_;
  LshParams p_;
  LshParams derived_;
  double rho_ = 0;
  double R_ = 0;
  std::mt19937_64 rng_;
  std::vector<Hash> hashes_;
  std::vector<std::unordered_map<Key, BucketId, KeyHash>> dirs_;
  std::vector<Bucket> buckets_;
  std::vector<BucketId> free_;
  std::map<OrderKey, BucketId> active_;
  std::map<OrderKey, BucketId> all_;
  std::unordered_map<PointId, Rec> a_;
  std::unordered_map<PointId, Rec> b_;
  std::size_t n_at_build_ = 0;
  std::size_t updates_ = 0;
  std::uint64_t session_ = 0;
  std::uint64_t epoch_ = 0;
  std::uint64_t last_bucket_evals_ = 0;
  std::uint64_t last_work_ = 0;
  std::uint64_t rebuilds_ = 0;
};

/// Thresholds r_j = r_min (1 + eps)^j covering [r_min, r_max]; a query at r
/// runs on the smallest r_j >= r.
class LshBank {
 public:
  LshBank(std::size_t d, LshParams base, double r_min, double r_max);

  void build(std::span<const Point> a, std::span<const Point> b);
  void insert_a(const Point& p);
  void erase_a(PointId id);
  void insert_b(const Point& q);
  void erase_b(PointId id);
  void enumerate(double r, EnumerationSession& session);

  std::size_t scale_for(double r) const;
  const std::vector<double>& scales() const noexcept { return scales_; }
  LshJoin& index(std::size_t j) { return *indexes_.at(j); }
  const LshJoin& index(std::size_t j) const { return *indexes_.at(j); }

 private:
  double r_min_;
  double r_max_;
  std::vector<double> scales_;
  std::vector<std::unique_ptr<LshJoin>> indexes_;
};

}  // namespace simjoin
