// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "simjoin/rangetree.hpp"

namespace simjoin {

using SignVector = std::vector<std::int8_t>;

/// All 2^d sign vectors, in binary counting order with bit i set meaning e_i = -1.
std::vector<SignVector> all_sign_vectors(std::size_t d);

/// e*_i = sign(a_i - b_i) with sign(0) = +1.
SignVector sign_vector(const Point& a, const Point& b);

/// (a_1, ..., a_d, sum e_i a_i).
std::vector<double> lift_point(const Point& a, const SignVector& e);

/// Box in dimension d+1: [b_i, inf) where e_i = +1, (-inf, b_i) where
/// e_i = -1, and (-inf, r + sum e_i b_i] on the last axis. The open end on
/// negative axes keeps the sign of a zero difference at +1.
std::vector<KeyInterval> lift_rect(const Point& b, const SignVector& e, double r);

/// (x, y) -> (x + y, x - y); l1 distance becomes l-infinity distance.
std::vector<double> rotate_2d(std::span<const double> p);

enum class L1Path : std::uint8_t { kAuto, kLifting, kRotation };

inline constexpr std::size_t kMaxLiftDim = 6;

/// Exact l1 join. Rotation handles d <= 2 with a single l-infinity index;
/// lifting keeps one containment index per sign vector.
class L1Join {
 public:
  L1Join(std::size_t d, double r, L1Path path = L1Path::kAuto);

  void build(std::span<const Point> a, std::span<const Point> b);
  void insert_a(const Point& p);
  void erase_a(PointId id);
  void insert_b(const Point& q);
  void erase_b(PointId id);
  void enumerate(EnumerationSession& session) const;

  L1Path path() const noexcept { return path_; }
  std::size_t dim() const noexcept { return d_; }
  std::size_t sub_indexes() const noexcept { return subs_.size(); }
  const RangeTreeJoin& sub_index(std::size_t i) const { return subs_.at(i); }
  std::uint64_t last_update_work() const noexcept { return last_work_; }

 private:
  Point transformed(const Point& p) const;
  Rect closed_rect(const Point& b, const SignVector& e) const;
  Point lifted(const Point& a, const SignVector& e) const;

  std::size_t d_;
  double r_;
  L1Path path_;
  std::vector<SignVector> signs_;
  std::vector<RangeTreeJoin> subs_;
  std::uint64_t last_work_ = 0;
};

}  // namespace simjoin
