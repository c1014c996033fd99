// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#include "simjoin/session.hpp"

#include <algorithm>
#include <bit>

namespace simjoin {

void DelayProbe::record(std::uint64_t work, std::uint64_t ns) {
  max_work = std::max(max_work, work);
  max_ns = std::max(max_ns, ns);
  total_work += work;
  total_ns += ns;
  ++gaps;
  const std::size_t bucket = std::min<std::size_t>(std::bit_width(work), kBuckets - 1);
  ++work_histogram[bucket];
}

void EnumerationSession::start() { last_ = Clock::now(); }

void EnumerationSession::close_gap() {
  const auto now = Clock::now();
  const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(now - last_).count();
  probe_.record(pending_work_, static_cast<std::uint64_t>(ns));
  pending_work_ = 0;
  last_ = now;
}

bool EnumerationSession::should_drop() {
  const bool drop = drop_index_ && *drop_index_ == seen_;
  ++seen_;
  return drop;
}

void EnumerationSession::emit(PointId a, PointId b) {
  if (should_drop()) return;
  if (pair_sink_) pair_sink_(a, b);
  close_gap();
  ++emitted_;
  if (!pair_set_.insert({a, b}).second) ++duplicates_;
  if (collect_) pairs_.push_back({a, b});
}

void EnumerationSession::emit(PointId a, PointId b, PointId s) {
  if (should_drop()) return;
  if (triple_sink_) triple_sink_(a, b, s);
  close_gap();
  ++emitted_;
  if (!triple_set_.insert({a, b, s}).second) ++duplicates_;
  if (collect_) triples_.push_back({a, b, s});
}

void EnumerationSession::finish() {
  if (finished_) return;
  close_gap();
  finished_ = true;
}

std::vector<IdPair> EnumerationSession::sorted_pairs() const {
  std::vector<IdPair> out = pairs_;
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<IdTriple> EnumerationSession::sorted_triples() const {
  std::vector<IdTriple> out = triples_;
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace simjoin
