// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_set>
#include <vector>

#include "simjoin/core.hpp"

namespace simjoin {

/// Gap statistics between consecutive emissions, including start -> first
/// and last -> end. Work units are machine independent; nanoseconds are not.
struct DelayProbe {
  static constexpr std::size_t kBuckets = 40;

  std::uint64_t max_work = 0;
  std::uint64_t max_ns = 0;
  std::uint64_t total_work = 0;
  std::uint64_t total_ns = 0;
  std::uint64_t gaps = 0;
  /// histogram[k] counts gaps whose work lies in [2^(k-1), 2^k); bucket 0 is zero work.
  std::array<std::uint64_t, kBuckets> work_histogram{};

  void record(std::uint64_t work, std::uint64_t ns);
  double mean_work() const { return gaps ? static_cast<double>(total_work) / gaps : 0.0; }
  double mean_ns() const { return gaps ? static_cast<double>(total_ns) / gaps : 0.0; }
};

/// One enumeration run. Indexes call `work()` for each unit of effort (node
/// visit, cell probe, bucket probe, distance evaluation) and `emit()` for
/// each result; the session tracks delays and rejects nothing, but counts
/// repeated results so callers can assert uniqueness.
class EnumerationSession {
 public:
  using PairSink = std::function<void(PointId, PointId)>;
  using TripleSink = std::function<void(PointId, PointId, PointId)>;

  EnumerationSession() { start(); }
  explicit EnumerationSession(PairSink sink) : pair_sink_(std::move(sink)) { start(); }
  explicit EnumerationSession(TripleSink sink) : triple_sink_(std::move(sink)) { start(); }

  void work(std::uint64_t units = 1) noexcept { pending_work_ += units; }

  void emit(PointId a, PointId b);
  void emit(PointId a, PointId b, PointId s);

  /// Closes the session: records the last -> end gap. Idempotent.
  void finish();

  /// Keep every emitted result in memory (on by default).
  void set_collect(bool on) { collect_ = on; }
  /// Fault-injection hook: silently drop the k-th emission (0-based).
  void drop_emission(std::uint64_t k) { drop_index_ = k; }

  const DelayProbe& probe() const { return probe_; }
  std::uint64_t emitted() const { return emitted_; }
  std::uint64_t duplicates() const { return duplicates_; }
  bool finished() const { return finished_; }

  const std::vector<IdPair>& pairs() const { return pairs_; }
  const std::vector<IdTriple>& triples() const { return triples_; }
  std::vector<IdPair> sorted_pairs() const;
  std::vector<IdTriple> sorted_triples() const;

 private:
  using Clock = std::chrono::steady_clock;

  void start();
  void close_gap();
  bool should_drop();

  PairSink pair_sink_;
  TripleSink triple_sink_;
  bool collect_ = true;
  bool finished_ = false;
  std::optional<std::uint64_t> drop_index_;
  std::uint64_t seen_ = 0;
  std::uint64_t emitted_ = 0;
  std::uint64_t duplicates_ = 0;
  std::uint64_t pending_work_ = 0;
  Clock::time_point last_;
  DelayProbe probe_;
  std::vector<IdPair> pairs_;
  std::vector<IdTriple> triples_;
  std::unordered_set<IdPair, IdPairHash> pair_set_;
  std::unordered_set<IdTriple, IdTripleHash> triple_set_;
};

}  // namespace simjoin
