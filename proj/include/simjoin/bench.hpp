// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "simjoin/core.hpp"
#include "simjoin/session.hpp"

namespace simjoin {

inline constexpr const char* kReportSchema = "simjoin.run/1";
inline constexpr const char* kSweepSchema = "simjoin.sweep/1";

// --- workloads ------------------------------------------------------------

struct Event {
  enum class Kind : std::uint8_t { Insert, Erase, Enumerate };
  Kind kind = Kind::Enumerate;
  Side side = Side::A;
  Point point;                 // Insert
  PointId id = 0;              // Erase
  std::optional<double> r;     // Enumerate
  std::size_t line = 0;
};

/// Inserted points take ids 0, 1, 2, ... in file order, shared across sides.
struct Workload {
  std::vector<Event> events;
  std::size_t dim = 0;
  bool binary = false;
};

/// One event per line: `ins A <point>`, `del A <id>`, `enum [r=<val>]`, with
/// sides A, B, S. Points are comma-separated coordinates or, when `binary`,
/// a hex bitstring. Blank lines and lines starting with '#' are skipped.
Workload parse_workload(std::istream& in, bool binary);
Workload load_workload(const std::string& path, bool binary);
void write_workload(std::ostream& out, const Workload& w);

/// One point per line; ids are line numbers among the points.
std::vector<Point> parse_points(std::istream& in, bool binary);
void write_points(std::ostream& out, std::span<const Point> points);

struct GeneratorSpec {
  std::string kind = "uniform";  // uniform | gaussian | hamming
  std::size_t d = 2;
  std::size_t n = 100;           // initial points per side
  std::size_t sides = 2;         // 3 adds S
  std::size_t updates = 0;       // interleaved inserts and deletes after the initial load
  std::size_t enum_every = 10;   // one enum after this many updates; 0 = only at the end
  double span = 1.0;             // cube side, or cluster spread for gaussian
  std::size_t clusters = 4;
  double sigma = 0.05;
  std::vector<double> r_values;  // cycled through enum events when non-empty
  std::uint64_t seed = 1;
};

Workload generate(const GeneratorSpec& spec);

// --- indexes --------------------------------------------------------------

struct IndexConfig {
  std::string index = "linf";  // linf | l1 | grid | wspd | lsh | triangle
  MetricKind metric = MetricKind::Linf;
  double r = 1.0;
  double eps = 0.5;
  std::string mode = "default";  // default | low-delay | constant-delay
  std::uint64_t seed = 1;
  double c_tau = 1.0;
  double c_M = 1.0;
  double c_m = 3.0;
  std::size_t lsh_n = 0;  // size for the derived LSH parameters; 0 = first build
  double r_min = 0;       // lsh: a bank over [r_min, r_max] when r_max > 0
  double r_max = 0;
};

/// Uniform surface over every index kind.
class JoinIndex {
 public:
  virtual ~JoinIndex() = default;
  virtual void build(std::span<const Point> a, std::span<const Point> b, std::span<const Point> s) = 0;
  virtual void insert(Side side, const Point& p) = 0;
  virtual void erase(Side side, PointId id) = 0;
  /// `r` is only honoured by variable-threshold indexes.
  virtual void enumerate(std::optional<double> r, EnumerationSession& session) = 0;
  virtual std::uint64_t last_update_work() const = 0;
  virtual bool triangles() const { return false; }
  virtual bool variable_r() const { return false; }
};

std::unique_ptr<JoinIndex> make_index(const IndexConfig& config, std::size_t d);

// --- runs -----------------------------------------------------------------

struct EnumRecord {
  std::size_t event = 0;
  double r = 0;
  std::uint64_t results = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t max_work = 0;
  double mean_work = 0;
  std::uint64_t max_ns = 0;
  double mean_ns = 0;
  std::string verdict = "unverified";
  bool pass = true;
  double recall = -1;  // lsh only
};

struct UpdateBatch {
  std::size_t first_event = 0;
  std::uint64_t updates = 0;
  std::uint64_t max_work = 0;
  std::uint64_t total_work = 0;
};

struct RunOptions {
  bool verify = false;
  std::optional<std::uint64_t> drop_emission;
  double min_recall = 0;  // lsh verdicts fail below this recall
};

struct RunReport {
  IndexConfig config;
  std::size_t dim = 0;
  std::size_t events = 0;
  std::vector<EnumRecord> enums;
  std::vector<UpdateBatch> batches;
  std::uint64_t max_update_work = 0;
  std::uint64_t total_update_work = 0;
  std::uint64_t updates = 0;
  bool verified = false;
  bool pass = true;
};

RunReport run(const IndexConfig& config, const Workload& workload, const RunOptions& options);

/// JSON lines: one object per update batch and per enumeration, then a
/// summary. Wall-clock fields end in `_ns`.
void write_jsonl(std::ostream& out, const RunReport& report);
/// One row per enumeration.
void write_csv(std::ostream& out, const RunReport& report);

// --- sweeps ---------------------------------------------------------------

struct SweepRow {
  std::size_t n = 0;
  std::size_t rep = 0;
  std::uint64_t max_delay_work = 0;
  double mean_update_work = 0;
  std::uint64_t max_update_work = 0;
  std::uint64_t results = 0;
  double delay_ratio = 1;   // against the first n, same rep
  double update_ratio = 1;
  double bound = 0;         // allowed delay ratio
};

struct SweepSpec {
  IndexConfig config;
  std::vector<std::size_t> ns;
  std::size_t reps = 1;
  std::size_t d = 2;
  double density = 1.0;  // expected points per r-ball, kept fixed across n
  std::size_t updates = 200;
  std::uint64_t seed = 1;
};

/// Uniform points with the cube scaled so the output density stays fixed.
/// The bound column is 2 (log n / log n0)^d for linf and l1, 2 otherwise.
std::vector<SweepRow> sweep(const SweepSpec& spec);
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace simjoin
