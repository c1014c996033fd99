// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#include "simjoin/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace simjoin {

std::string_view to_string(Side side) {
  switch (side) {
    case Side::A: return "A";
    case Side::B: return "B";
    case Side::S: return "S";
  }
  return "?";
}

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::L1: return "l1";
    case MetricKind::L2: return "l2";
    case MetricKind::Linf: return "linf";
    case MetricKind::Hamming: return "hamming";
  }
  return "?";
}

MetricKind parse_metric(std::string_view name) {
  if (name == "l1" || name == "L1") return MetricKind::L1;
  if (name == "l2" || name == "L2") return MetricKind::L2;
  if (name == "linf" || name == "Linf" || name == "inf") return MetricKind::Linf;
  if (name == "hamming" || name == "Hamming") return MetricKind::Hamming;
  throw config_error("unknown metric '" + std::string(name) + "'");
}

Point make_point(PointId id, std::vector<double> coords) {
  if (coords.empty()) throw invalid_input("point must have at least one coordinate");
  for (double c : coords) {
    if (!std::isfinite(c)) throw invalid_input("point coordinates must be finite");
  }
  Point p;
  p.id = id;
  p.coords = std::move(coords);
  return p;
}

Point make_binary_point(PointId id, std::size_t nbits, std::vector<std::uint64_t> words) {
  if (nbits == 0) throw invalid_input("binary point must have at least one bit");
  if (words.size() != (nbits + 63) / 64) throw invalid_input("word count does not match bit count");
  if (nbits % 64 != 0) words.back() &= (std::uint64_t{1} << (nbits % 64)) - 1;
  Point p;
  p.id = id;
  p.nbits = nbits;
  p.bits = std::move(words);
  return p;
}

Point parse_hex_point(PointId id, std::string_view hex) {
  if (hex.empty()) throw invalid_input("empty hex bitstring");
  const std::size_t nbits = hex.size() * 4;
  std::vector<std::uint64_t> words((nbits + 63) / 64, 0);
  for (std::size_t i = 0; i < hex.size(); ++i) {
    const char c = hex[i];
    unsigned v = 0;
    if (c >= '0' && c <= '9') {
      v = static_cast<unsigned>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      v = static_cast<unsigned>(c - 'a' + 10);
    } else if (c >= 'A' && c <= 'F') {
      v = static_cast<unsigned>(c - 'A' + 10);
    } else {
      throw invalid_input("invalid hex digit in '" + std::string(hex) + "'");
    }
    for (unsigned k = 0; k < 4; ++k) {
      if ((v >> (3 - k)) & 1U) {
        const std::size_t bit = i * 4 + k;
        words[bit / 64] |= std::uint64_t{1} << (bit % 64);
      }
    }
  }
  return make_binary_point(id, nbits, std::move(words));
}

std::string to_hex(const Point& p) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i + 4 <= p.nbits; i += 4) {
    unsigned v = 0;
    for (unsigned k = 0; k < 4; ++k) v = (v << 1) | (p.bit(i + k) ? 1U : 0U);
    out.push_back(kDigits[v]);
  }
  return out;
}

bool metric_accepts(MetricKind kind, const Point& p) noexcept {
  return (kind == MetricKind::Hamming) == p.is_binary();
}

namespace {

void check_compatible(const Point& p, const Point& q, MetricKind metric) {
  if (!metric_accepts(metric, p) || !metric_accepts(metric, q)) {
    throw invalid_input("point representation does not match metric " +
                        std::string(to_string(metric)));
  }
  if (p.dim() != q.dim()) {
    throw invalid_input("dimension mismatch: " + std::to_string(p.dim()) + " vs " +
                        std::to_string(q.dim()));
  }
}

double raw_distance(const Point& p, const Point& q, MetricKind metric) {
  switch (metric) {
    case MetricKind::Hamming: {
      std::size_t n = 0;
      for (std::size_t i = 0; i < p.bits.size(); ++i) n += std::popcount(p.bits[i] ^ q.bits[i]);
      return static_cast<double>(n);
    }
    case MetricKind::L1: {
      double s = 0;
      for (std::size_t i = 0; i < p.coords.size(); ++i) s += std::abs(p.coords[i] - q.coords[i]);
      return s;
    }
    case MetricKind::Linf: {
      double s = 0;
      for (std::size_t i = 0; i < p.coords.size(); ++i) {
        s = std::max(s, std::abs(p.coords[i] - q.coords[i]));
      }
      return s;
    }
    case MetricKind::L2: {
      double s = 0;
      for (std::size_t i = 0; i < p.coords.size(); ++i) {
        const double t = p.coords[i] - q.coords[i];
        s += t * t;
      }
      return s;  // squared
    }
  }
  return 0;
}

}  // namespace

double distance(const Point& p, const Point& q, MetricKind metric) {
  check_compatible(p, q, metric);
  const double raw = raw_distance(p, q, metric);
  return metric == MetricKind::L2 ? std::sqrt(raw) : raw;
}

bool within(const Point& p, const Point& q, MetricKind metric, double r) {
  check_compatible(p, q, metric);
  const double raw = raw_distance(p, q, metric);
  return metric == MetricKind::L2 ? raw <= r * r : raw <= r;
}

void JoinSpec::validate(bool exact) const {
  if (!(r > 0) || !std::isfinite(r)) throw config_error("threshold r must be positive and finite");
  if (!(eps >= 0) || !std::isfinite(eps)) throw config_error("eps must be non-negative");
  if (exact && eps > 0) throw config_error("exact index does not accept eps > 0");
}

std::size_t IdPairHash::operator()(const IdPair& p) const noexcept {
  std::uint64_t h = p.a * 0x9E3779B97F4A7C15ULL;
  h ^= p.b + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2);
  return static_cast<std::size_t>(h);
}

std::size_t IdTripleHash::operator()(const IdTriple& t) const noexcept {
  std::uint64_t h = IdPairHash{}(IdPair{t.a, t.b});
  h ^= t.s * 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2);
  return static_cast<std::size_t>(h);
}

std::vector<IdPair> oracle_join(std::span<const Point> a, std::span<const Point> b,
                                const JoinSpec& spec) {
  std::vector<IdPair> out;
  for (const Point& p : a) {
    for (const Point& q : b) {
      if (within(p, q, spec.metric, spec.r)) out.push_back({p.id, q.id});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<IdTriple> oracle_triangle(std::span<const Point> a, std::span<const Point> b,
                                      std::span<const Point> s, const JoinSpec& spec) {
  std::vector<IdTriple> out;
  for (const Point& p : a) {
    for (const Point& q : b) {
      if (!within(p, q, spec.metric, spec.r)) continue;
      for (const Point& t : s) {
        if (within(p, t, spec.metric, spec.r) && within(q, t, spec.metric, spec.r)) {
          out.push_back({p.id, q.id, t.id});
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double spread(std::span<const Point> points, MetricKind metric) {
  if (points.size() < 2) throw Error(Error::Code::kUndefinedSpread, "spread needs at least two points");
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d = distance(points[i], points[j], metric);
      if (d == 0) throw Error(Error::Code::kUndefinedSpread, "spread undefined for duplicate points");
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  return hi / lo;
}

}  // namespace simjoin
