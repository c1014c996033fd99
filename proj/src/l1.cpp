// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#include "simjoin/l1.hpp"

#include <cmath>

namespace simjoin {

std::vector<SignVector> all_sign_vectors(std::size_t d) {
  std::vector<SignVector> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d); ++mask) {
    SignVector e(d);
    for (std::size_t i = 0; i < d; ++i) e[i] = (mask >> i) & 1U ? -1 : 1;
    out.push_back(std::move(e));
  }
  return out;
}

SignVector sign_vector(const Point& a, const Point& b) {
  if (a.dim() != b.dim()) throw invalid_input("dimension mismatch");
  SignVector e(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) e[i] = a.coords[i] - b.coords[i] >= 0 ? 1 : -1;
  return e;
}

std::vector<double> lift_point(const Point& a, const SignVector& e) {
  if (a.dim() != e.size()) throw invalid_input("sign vector length mismatch");
  std::vector<double> out = a.coords;
  double s = 0;
  for (std::size_t i = 0; i < e.size(); ++i) s += e[i] * a.coords[i];
  out.push_back(s);
  return out;
}

std::vector<KeyInterval> lift_rect(const Point& b, const SignVector& e, double r) {
  if (b.dim() != e.size()) throw invalid_input("sign vector length mismatch");
  std::vector<KeyInterval> out;
  double s = r;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] > 0) {
      out.push_back({b.coords[i], kInf, false, false});
    } else {
      out.push_back({-kInf, b.coords[i], false, true});
    }
    s += e[i] * b.coords[i];
  }
  out.push_back({-kInf, s, false, false});
  return out;
}

std::vector<double> rotate_2d(std::span<const double> p) {
  if (p.size() != 2) throw invalid_input("rotation needs a 2-d point");
  return {p[0] + p[1], p[0] - p[1]};
}

L1Join::L1Join(std::size_t d, double r, L1Path path) : d_(d), r_(r), path_(path) {
  if (d == 0) throw config_error("dimension must be at least 1");
  if (!(r > 0) || !std::isfinite(r)) throw config_error("threshold r must be positive and finite");
  if (path_ == L1Path::kAuto) path_ = d <= 2 ? L1Path::kRotation : L1Path::kLifting;
  if (path_ == L1Path::kRotation) {
    if (d > 2) throw config_error("rotation path only exists for d <= 2");
    subs_.push_back(RangeTreeJoin::hypercube(d, r));
    return;
  }
  if (d > kMaxLiftDim) {
    throw config_error("l1 lifting keeps 2^d = " + std::to_string(std::uint64_t{1} << std::min<std::size_t>(d, 63)) +
                       " range trees of dimension d+1; d = " + std::to_string(d) + " exceeds the limit of " +
                       std::to_string(kMaxLiftDim));
  }
  signs_ = all_sign_vectors(d);
  for (const SignVector& e : signs_) {
    RectShape shape;
    for (std::size_t i = 0; i < d; ++i) {
      shape.has_lo.push_back(e[i] > 0);
      shape.has_hi.push_back(e[i] < 0);
    }
    shape.has_lo.push_back(false);
    shape.has_hi.push_back(true);
    subs_.push_back(RangeTreeJoin::containment(std::move(shape)));
  }
}

Point L1Join::transformed(const Point& p) const {
  if (p.is_binary() || p.dim() != d_) throw invalid_input("point dimension mismatch");
  if (d_ == 1) return p;
  Point q;
  q.id = p.id;
  q.coords = rotate_2d(p.coords);
  return q;
}

Point L1Join::lifted(const Point& a, const SignVector& e) const {
  Point q;
  q.id = a.id;
  q.coords = lift_point(a, e);
  return q;
}

Rect L1Join::closed_rect(const Point& b, const SignVector& e) const {
  Rect rect;
  for (const KeyInterval& s : lift_rect(b, e, r_)) {
    KeyInterval c = s;
    if (c.hi_open) {
      c.hi = std::nextafter(c.hi, -kInf);
      c.hi_open = false;
    }
    rect.sides.push_back(c);
  }
  return rect;
}

void L1Join::build(std::span<const Point> a, std::span<const Point> b) {
  for (const Point& p : a) {
    if (p.is_binary() || p.dim() != d_) throw invalid_input("A point dimension mismatch");
  }
  for (const Point& q : b) {
    if (q.is_binary() || q.dim() != d_) throw invalid_input("B point dimension mismatch");
  }
  if (path_ == L1Path::kRotation) {
    std::vector<Point> ta, tb;
    for (const Point& p : a) ta.push_back(transformed(p));
    for (const Point& q : b) tb.push_back(transformed(q));
    subs_[0].build(ta, tb);
    return;
  }
  for (std::size_t k = 0; k < signs_.size(); ++k) {
    std::vector<Point> la;
    std::vector<std::pair<PointId, Rect>> lb;
    for (const Point& p : a) la.push_back(lifted(p, signs_[k]));
    for (const Point& q : b) lb.emplace_back(q.id, closed_rect(q, signs_[k]));
    subs_[k].build(la, lb);
  }
}

void L1Join::insert_a(const Point& p) {
  if (p.is_binary() || p.dim() != d_) throw invalid_input("A point dimension mismatch");
  last_work_ = 0;
  if (path_ == L1Path::kRotation) {
    subs_[0].insert_a(transformed(p));
    last_work_ = subs_[0].last_update_work();
    return;
  }
  for (std::size_t k = 0; k < signs_.size(); ++k) {
    subs_[k].insert_a(lifted(p, signs_[k]));
    last_work_ += subs_[k].last_update_work();
  }
}

void L1Join::erase_a(PointId id) {
  last_work_ = 0;
  for (auto& s : subs_) {
    s.erase_a(id);
    last_work_ += s.last_update_work();
  }
}

void L1Join::insert_b(const Point& q) {
  if (q.is_binary() || q.dim() != d_) throw invalid_input("B point dimension mismatch");
  last_work_ = 0;
  if (path_ == L1Path::kRotation) {
    subs_[0].insert_b(transformed(q));
    last_work_ = subs_[0].last_update_work();
    return;
  }
  for (std::size_t k = 0; k < signs_.size(); ++k) {
    subs_[k].insert_b(q.id, closed_rect(q, signs_[k]));
    last_work_ += subs_[k].last_update_work();
  }
}

void L1Join::erase_b(PointId id) {
  last_work_ = 0;
  for (auto& s : subs_) {
    s.erase_b(id);
    last_work_ += s.last_update_work();
  }
}

void L1Join::enumerate(EnumerationSession& session) const {
  for (const auto& s : subs_) s.enumerate(session);
}

}  // namespace simjoin
