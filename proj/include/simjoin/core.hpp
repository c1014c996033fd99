// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace simjoin {

using PointId = std::uint64_t;

/// Base class for every error raised by the library. `code()` is stable and
/// is what the CLI maps onto exit codes.
class Error : public std::runtime_error {
 public:
  enum class Code { kInvalidInput, kNotFound, kConfig, kRange, kUndefinedSpread, kParse };

  Error(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

inline Error invalid_input(const std::string& what) { return {Error::Code::kInvalidInput, what}; }
inline Error not_found(const std::string& what) { return {Error::Code::kNotFound, what}; }
inline Error config_error(const std::string& what) { return {Error::Code::kConfig, what}; }
inline Error range_error(const std::string& what) { return {Error::Code::kRange, what}; }

enum class Side : std::uint8_t { A, B, S };

std::string_view to_string(Side side);

enum class MetricKind : std::uint8_t { L1, L2, Linf, Hamming };

std::string_view to_string(MetricKind kind);
MetricKind parse_metric(std::string_view name);

/// A point is either a real vector (`coords`) or a bit vector (`bits`, used
/// by the Hamming metric). Exactly one representation is populated.
struct Point {
  PointId id = 0;
  std::vector<double> coords;
  std::vector<std::uint64_t> bits;
  std::size_t nbits = 0;

  bool is_binary() const noexcept { return nbits != 0; }
  std::size_t dim() const noexcept { return is_binary() ? nbits : coords.size(); }
  bool bit(std::size_t i) const noexcept { return (bits[i / 64] >> (i % 64)) & 1U; }
};

Point make_point(PointId id, std::vector<double> coords);
Point make_binary_point(PointId id, std::size_t nbits, std::vector<std::uint64_t> words);
/// Parses a hex bitstring ("0f3a..."); bit i of the point is bit (i % 4) of
/// hex digit i / 4 counted from the left.
Point parse_hex_point(PointId id, std::string_view hex);
std::string to_hex(const Point& p);

bool metric_accepts(MetricKind kind, const Point& p) noexcept;

double distance(const Point& p, const Point& q, MetricKind metric);

/// phi(p, q) <= r without taking square roots for L2.
bool within(const Point& p, const Point& q, MetricKind metric, double r);

struct JoinSpec {
  MetricKind metric = MetricKind::L2;
  double r = 1.0;
  double eps = 0.0;

  void validate(bool exact) const;
};

struct IdPair {
  PointId a = 0;
  PointId b = 0;
  auto operator<=>(const IdPair&) const = default;
};

struct IdTriple {
  PointId a = 0;
  PointId b = 0;
  PointId s = 0;
  auto operator<=>(const IdTriple&) const = default;
};

struct IdPairHash {
  std::size_t operator()(const IdPair& p) const noexcept;
};

struct IdTripleHash {
  std::size_t operator()(const IdTriple& t) const noexcept;
};

/// Exhaustive |A|·|B| scan; sorted by (a, b).
std::vector<IdPair> oracle_join(std::span<const Point> a, std::span<const Point> b,
                                const JoinSpec& spec);

/// Exhaustive |A|·|B|·|S| scan; sorted by (a, b, s).
std::vector<IdTriple> oracle_triangle(std::span<const Point> a, std::span<const Point> b,
                                      std::span<const Point> s, const JoinSpec& spec);

/// Max pairwise distance over min pairwise distance.
double spread(std::span<const Point> points, MetricKind metric);

}  // namespace simjoin
