// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#include "simjoin/lsh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

namespace simjoin {

double lsh_collision_probability(MetricKind metric, std::size_t d, double w, double u) {
  if (u <= 0) return 1.0;
  switch (metric) {
    case MetricKind::Hamming:
      return std::max(0.0, 1.0 - u / static_cast<double>(d));
    case MetricKind::L2: {
      const double c = w / u;
      const double phi = 0.5 * std::erfc(c / std::numbers::sqrt2);
      return 1 - 2 * phi - 2 / (std::sqrt(2 * std::numbers::pi) * c) * (1 - std::exp(-c * c / 2));
    }
    case MetricKind::L1: {
      const double c = w / u;
      return 2 * std::atan(c) / std::numbers::pi - std::log1p(c * c) / (std::numbers::pi * c);
    }
    default:
      throw config_error("no LSH family for this metric");
  }
}

std::size_t LshJoin::KeyHash::operator()(const Key& k) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (std::int64_t x : k) {
    h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

LshJoin::LshJoin(std::size_t d, LshParams params) : d_(d), p_(params) {
  if (d == 0) throw config_error("dimension must be at least 1");
  if (!(p_.r > 0) || !std::isfinite(p_.r)) throw config_error("threshold r must be positive and finite");
  if (!(p_.eps > 0) || !std::isfinite(p_.eps)) throw config_error("lsh index needs eps > 0");
  if (p_.metric == MetricKind::Linf) throw config_error("no LSH family for linf");
  derive(p_.n_hint ? p_.n_hint : 64);
  draw_hashes();
}

void LshJoin::derive(std::size_t n) {
  n = std::max<std::size_t>(n, 2);
  const double w = p_.w > 0 ? p_.w : 4 * p_.r;
  const double p1 = lsh_collision_probability(p_.metric, d_, w, p_.r);
  const double p2 = lsh_collision_probability(p_.metric, d_, w, (1 + p_.eps) * p_.r);
  if (!(p2 > 0) || !(p1 > p2) || !(p1 < 1)) {
    throw config_error("LSH family is not sensitive at this r and eps (p1 = " + std::to_string(p1) +
                       ", p2 = " + std::to_string(p2) + ")");
  }
  rho_ = std::log(1 / p1) / std::log(1 / p2);
  const double nd = static_cast<double>(n);
  const double nr = std::pow(nd, rho_);
  LshParams q = p_;
  q.w = w;
  if (!q.tau) q.tau = static_cast<std::size_t>(std::ceil(p_.c_tau * nr));
  if (!q.M) q.M = static_cast<std::size_t>(std::ceil(p_.c_M * nr));
  if (!q.m) q.m = static_cast<std::size_t>(std::ceil(p_.c_m * std::log(nd)));
  if (!q.k) {
    q.k = p_.metric == MetricKind::Hamming
              ? static_cast<std::size_t>(std::ceil(std::log2(nd)))
              : static_cast<std::size_t>(std::ceil(std::log(nd) / std::log(1 / p2)));
  }
  q.tau = std::max<std::size_t>(q.tau, 1);
  q.M = std::max<std::size_t>(q.M, 1);
  q.m = std::max<std::size_t>(q.m, 1);
  q.k = std::max<std::size_t>(q.k, 1);
  if (q.tau * q.m > 100000) throw config_error("too many hash tables");
  derived_ = q;
  R_ = 2 * (1 + p_.eps) * p_.r;
}

void LshJoin::draw_hashes() {
  rng_.seed(p_.seed);
  const std::size_t total = derived_.tau * derived_.m;
  hashes_.assign(total, Hash{});
  std::uniform_int_distribution<std::size_t> bit(0, d_ - 1);
  std::normal_distribution<double> gauss;
  std::cauchy_distribution<double> cauchy;
  std::uniform_real_distribution<double> shift(0, derived_.w);
  for (Hash& h : hashes_) {
    for (std::size_t j = 0; j < derived_.k; ++j) {
      if (p_.metric == MetricKind::Hamming) {
        h.bits.push_back(bit(rng_));
        continue;
      }
      std::vector<double> a(d_);
      for (double& x : a) x = p_.metric == MetricKind::L2 ? gauss(rng_) : cauchy(rng_);
      h.proj.push_back(std::move(a));
      h.shift.push_back(shift(rng_));
    }
  }
  dirs_.assign(total, {});
}

void LshJoin::check(const Point& p) const {
  if (!metric_accepts(p_.metric, p) || p.dim() != d_) throw invalid_input("point does not fit the index");
}

LshJoin::Key LshJoin::key_of(const Point& p, std::size_t table) const {
  const Hash& h = hashes_.at(table);
  Key key;
  if (p_.metric == MetricKind::Hamming) {
    std::int64_t word = 0;
    int used = 0;
    for (std::size_t b : h.bits) {
      word = (word << 1) | static_cast<std::int64_t>(p.bit(b));
      if (++used == 62) {
        key.push_back(word);
        word = 0;
        used = 0;
      }
    }
    if (used) key.push_back(word);
    return key;
  }
  for (std::size_t j = 0; j < h.proj.size(); ++j) {
    double s = h.shift[j];
    for (std::size_t i = 0; i < d_; ++i) s += h.proj[j][i] * p.coords[i];
    const double f = std::floor(s / derived_.w);
    if (!(std::abs(f) < 9e18)) throw invalid_input("projection out of range");
    key.push_back(static_cast<std::int64_t>(f));
  }
  return key;
}

bool LshJoin::close(const Point& x, const Point& y) const { return within(x, y, p_.metric, R_); }

// --- buckets --------------------------------------------------------------

LshJoin::BucketId LshJoin::open_bucket(std::size_t table, const Key& key) {
  auto it = dirs_[table].find(key);
  if (it != dirs_[table].end()) return it->second;
  BucketId id;
  if (!free_.empty()) {
    id = free_.back();
    free_.pop_back();
  } else {
    id = static_cast<BucketId>(buckets_.size());
    buckets_.emplace_back();
  }
  Bucket& bk = buckets_[id];
  bk = Bucket{};
  bk.table = table;
  bk.key = key;
  bk.live = true;
  dirs_[table].emplace(key, id);
  all_.emplace(OrderKey{table, key}, id);
  return id;
}

void LshJoin::drop_if_empty(BucketId id) {
  Bucket& bk = buckets_[id];
  if (!bk.a.empty() || !bk.b.empty()) return;
  set_active(bk, id, false);
  dirs_[bk.table].erase(bk.key);
  all_.erase(OrderKey{bk.table, bk.key});
  bk = Bucket{};
  free_.push_back(id);
}

void LshJoin::set_active(Bucket& bk, BucketId id, bool on) {
  if (bk.active == on) return;
  bk.active = on;
  if (on) {
    active_.emplace(OrderKey{bk.table, bk.key}, id);
  } else {
    active_.erase(OrderKey{bk.table, bk.key});
  }
}

void LshJoin::repair(Bucket& bk, BucketId id) {
  if (bk.positive == 0) {
    set_active(bk, id, false);
    return;
  }
  if (bk.active) {
    auto it = bk.close.find(bk.rep_a);
    if (it != bk.close.end() && std::find(it->second.begin(), it->second.end(), bk.rep_b) != it->second.end()) return;
  }
  for (PointId w : bk.wa) {
    const auto& c = bk.close.at(w);
    if (c.empty()) continue;
    bk.rep_a = w;
    bk.rep_b = c.front();
    break;
  }
  set_active(bk, id, true);
}

void LshJoin::note_evals(std::uint64_t evals) {
  last_work_ += evals;
  last_bucket_evals_ = std::max(last_bucket_evals_, evals);
  if (evals > derived_.M + 1) throw std::logic_error("witness maintenance exceeded M + 1 distance evaluations");
}

void LshJoin::add_a(BucketId id, PointId a) {
  Bucket& bk = buckets_[id];
  bk.a.insert(a);
  ++last_work_;
  if (p_.low_delay || bk.wa.size() >= derived_.M) return;
  std::uint64_t evals = 0;
  std::vector<PointId> near;
  const Point& pa = a_.at(a).p;
  for (PointId b : bk.wb) {
    ++evals;
    if (close(pa, b_.at(b).p)) near.push_back(b);
  }
  bk.wa.push_back(a);
  if (!near.empty()) ++bk.positive;
  bk.close[a] = std::move(near);
  repair(bk, id);
  note_evals(evals);
}

void LshJoin::remove_a(BucketId id, PointId a) {
  Bucket& bk = buckets_[id];
  bk.a.erase(a);
  ++last_work_;
  auto c = bk.close.find(a);
  if (c != bk.close.end()) {
    if (!c->second.empty()) --bk.positive;
    bk.close.erase(c);
    bk.wa.erase(std::find(bk.wa.begin(), bk.wa.end(), a));
    std::uint64_t evals = 0;
    for (PointId x : bk.a) {
      if (bk.close.count(x)) continue;
      std::vector<PointId> near;
      const Point& px = a_.at(x).p;
      for (PointId b : bk.wb) {
        ++evals;
        if (close(px, b_.at(b).p)) near.push_back(b);
      }
      bk.wa.push_back(x);
      if (!near.empty()) ++bk.positive;
      bk.close[x] = std::move(near);
      break;
    }
    repair(bk, id);
    note_evals(evals);
  }
  drop_if_empty(id);
}

void LshJoin::add_b(BucketId id, PointId b) {
  Bucket& bk = buckets_[id];
  bk.b.insert(b);
  ++last_work_;
  if (p_.low_delay || bk.wb.size() >= derived_.M) return;
  std::uint64_t evals = 0;
  const Point& pb = b_.at(b).p;
  bk.wb.push_back(b);
  for (PointId a : bk.wa) {
    ++evals;
    if (!close(a_.at(a).p, pb)) continue;
    auto& v = bk.close[a];
    if (v.empty()) ++bk.positive;
    v.push_back(b);
  }
  repair(bk, id);
  note_evals(evals);
}

void LshJoin::remove_b(BucketId id, PointId b) {
  Bucket& bk = buckets_[id];
  bk.b.erase(b);
  ++last_work_;
  auto w = std::find(bk.wb.begin(), bk.wb.end(), b);
  if (w != bk.wb.end()) {
    bk.wb.erase(w);
    for (PointId a : bk.wa) {
      auto& v = bk.close[a];
      auto it = std::find(v.begin(), v.end(), b);
      if (it == v.end()) continue;
      v.erase(it);
      if (v.empty()) --bk.positive;
    }
    std::uint64_t evals = 0;
    for (PointId x : bk.b) {
      if (std::find(bk.wb.begin(), bk.wb.end(), x) != bk.wb.end()) continue;
      const Point& px = b_.at(x).p;
      bk.wb.push_back(x);
      for (PointId a : bk.wa) {
        ++evals;
        if (!close(a_.at(a).p, px)) continue;
        auto& v = bk.close[a];
        if (v.empty()) ++bk.positive;
        v.push_back(x);
      }
      break;
    }
    repair(bk, id);
    note_evals(evals);
  }
  drop_if_empty(id);
}

// --- updates --------------------------------------------------------------

void LshJoin::insert_a(const Point& p) {
  check(p);
  if (a_.count(p.id)) throw invalid_input("duplicate A id " + std::to_string(p.id));
  last_work_ = last_bucket_evals_ = 0;
  Rec& rec = a_[p.id];
  rec.p = p;
  for (std::size_t t = 0; t < hashes_.size(); ++t) {
    const BucketId id = open_bucket(t, key_of(p, t));
    a_.at(p.id).buckets.push_back(id);
    add_a(id, p.id);
  }
  after_update();
}

void LshJoin::erase_a(PointId id) {
  auto it = a_.find(id);
  if (it == a_.end()) throw not_found("unknown A id " + std::to_string(id));
  last_work_ = last_bucket_evals_ = 0;
  const std::vector<BucketId> bks = it->second.buckets;
  for (BucketId bk : bks) remove_a(bk, id);
  a_.erase(id);
  after_update();
}

void LshJoin::insert_b(const Point& q) {
  check(q);
  if (b_.count(q.id)) throw invalid_input("duplicate B id " + std::to_string(q.id));
  last_work_ = last_bucket_evals_ = 0;
  Rec& rec = b_[q.id];
  rec.p = q;
  for (std::size_t t = 0; t < hashes_.size(); ++t) {
    const BucketId id = open_bucket(t, key_of(q, t));
    b_.at(q.id).buckets.push_back(id);
    add_b(id, q.id);
  }
  after_update();
}

void LshJoin::erase_b(PointId id) {
  auto it = b_.find(id);
  if (it == b_.end()) throw not_found("unknown B id " + std::to_string(id));
  last_work_ = last_bucket_evals_ = 0;
  const std::vector<BucketId> bks = it->second.buckets;
  for (BucketId bk : bks) remove_b(bk, id);
  b_.erase(id);
  after_update();
}

void LshJoin::after_update() {
  if (++updates_ >= std::max<std::size_t>(1, n_at_build_ / 2)) rebuild();
}

void LshJoin::rebuild() {
  ++rebuilds_;
  for (auto& d : dirs_) d.clear();
  buckets_.clear();
  free_.clear();
  active_.clear();
  all_.clear();
  std::vector<PointId> ids;
  for (int s = 0; s < 2; ++s) {
    auto& recs = s ? b_ : a_;
    ids.clear();
    for (auto& [id, rec] : recs) {
      rec.buckets.clear();
      ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    for (PointId id : ids) {
      for (std::size_t t = 0; t < hashes_.size(); ++t) {
        const BucketId bk = open_bucket(t, key_of(recs.at(id).p, t));
        recs.at(id).buckets.push_back(bk);
        if (s) {
          add_b(bk, id);
        } else {
          add_a(bk, id);
        }
      }
    }
  }
  n_at_build_ = a_.size() + b_.size();
  updates_ = 0;
}

void LshJoin::build(std::span<const Point> a, std::span<const Point> b) {
  for (const Point& p : a) check(p);
  for (const Point& q : b) check(q);
  if (!p_.n_hint) {
    derive(a.size() + b.size());
    draw_hashes();
  }
  a_.clear();
  b_.clear();
  for (const Point& p : a) {
    if (!a_.emplace(p.id, Rec{p, {}, 0}).second) throw invalid_input("duplicate A id " + std::to_string(p.id));
  }
  for (const Point& q : b) {
    if (!b_.emplace(q.id, Rec{q, {}, 0}).second) throw invalid_input("duplicate B id " + std::to_string(q.id));
  }
  rebuilds_ = 0;
  rebuild();
  rebuilds_ = 0;
}

LshJoin::BucketView LshJoin::view(BucketId id) const {
  const Bucket& bk = buckets_[id];
  BucketView v{bk.table, bk.key, {bk.a.begin(), bk.a.end()}, {bk.b.begin(), bk.b.end()}, bk.wa, bk.wb, {},
               bk.active, bk.rep_a, bk.rep_b};
  for (PointId w : bk.wa) v.beta.push_back(bk.close.at(w).size());
  return v;
}

std::vector<LshJoin::BucketView> LshJoin::buckets() const {
  std::vector<BucketView> out;
  for (const auto& [key, id] : all_) out.push_back(view(id));
  return out;
}

std::optional<LshJoin::BucketView> LshJoin::bucket(std::size_t table, const Key& key) const {
  const auto& dir = dirs_.at(table);
  auto it = dir.find(key);
  if (it == dir.end()) return std::nullopt;
  return view(it->second);
}

// --- enumeration ----------------------------------------------------------

struct LshJoin::Overlay {
  std::vector<PointId> wa;
  std::unordered_map<PointId, std::vector<PointId>> close;
  std::size_t positive = 0;
  bool active = false;
  PointId rep_a = 0;
  PointId rep_b = 0;
  std::set<PointId>::const_iterator cursor;
};

// Session-scoped view: witness state is copied on first write so the
// persistent index is untouched; retirements and marks use stamps.
class LshJoin::Enumerator {
 public:
  Enumerator(LshJoin& j, EnumerationSession& s) : j_(j), s_(s) {}

  void run() {
    ++j_.session_;
    if (j_.p_.low_delay) {
      run_low_delay();
      return;
    }
    for (auto it = j_.active_.begin(); it != j_.active_.end();) {
      s_.work();
      const BucketId id = it->second;
      if (!is_active(id)) {
        ++it;
        continue;
      }
      const auto [a, b] = rep(id);
      if (retired(a)) throw std::logic_error("representative refers to a visited point");
      process(a, b);
    }
  }

 private:
  bool retired(PointId a) const { return j_.a_.at(a).stamp == j_.session_; }
  bool marked(PointId b) const { return j_.b_.at(b).stamp == j_.epoch_; }

  bool is_active(BucketId id) const {
    auto it = ov_.find(id);
    return it == ov_.end() ? j_.buckets_[id].active : it->second.active;
  }
  std::pair<PointId, PointId> rep(BucketId id) const {
    auto it = ov_.find(id);
    if (it == ov_.end()) return {j_.buckets_[id].rep_a, j_.buckets_[id].rep_b};
    return {it->second.rep_a, it->second.rep_b};
  }
  Overlay& edit(BucketId id) {
    auto it = ov_.find(id);
    if (it != ov_.end()) return it->second;
    const Bucket& bk = j_.buckets_[id];
    Overlay o{bk.wa, bk.close, bk.positive, bk.active, bk.rep_a, bk.rep_b, bk.a.begin()};
    return ov_.emplace(id, std::move(o)).first->second;
  }

  void emit(PointId a, PointId b) {
    s_.emit(a, b);
    dedup(a, b);
  }

  bool check_close(PointId a, PointId b) {
    s_.work();
    return j_.close(j_.a_.at(a).p, j_.b_.at(b).p);
  }

  void process(PointId a, PointId b0) {
    ++j_.epoch_;
    j_.a_.at(a).stamp = j_.session_;
    removed_.clear();
    emit(a, b0);
    const auto& bks = j_.a_.at(a).buckets;
    std::vector<BucketId> ca;
    for (BucketId id : bks) {
      s_.work();
      if (j_.p_.low_delay || is_active(id)) ca.push_back(id);
    }
    for (BucketId id : ca) {
      if (removed_.count(id)) continue;
      if (!j_.p_.low_delay && !is_active(id)) continue;
      std::size_t far = 0;
      for (PointId b : j_.buckets_[id].b) {
        if (marked(b)) continue;
        if (check_close(a, b)) {
          emit(a, b);
          if (removed_.count(id)) break;
        } else if (++far > j_.derived_.M) {
          break;
        }
      }
      if (!removed_.count(id)) retire(id, a);
    }
  }

  void dedup(PointId a, PointId b) {
    j_.b_.at(b).stamp = j_.epoch_;
    if (j_.p_.low_delay) return;
    const auto& ba = j_.a_.at(a).buckets;
    const auto& bb = j_.b_.at(b).buckets;
    for (std::size_t t = 0; t < ba.size(); ++t) {
      s_.work();
      const BucketId id = ba[t];
      if (bb[t] != id || removed_.count(id) || !is_active(id)) continue;
      if (rep(id) != std::make_pair(a, b)) continue;
      Overlay& o = edit(id);
      bool found = false;
      std::size_t tried = 0;
      for (PointId b2 : j_.buckets_[id].b) {
        if (marked(b2)) continue;
        if (++tried > j_.derived_.M) break;
        if (check_close(a, b2)) {
          o.rep_b = b2;
          found = true;
          break;
        }
      }
      if (!found) retire(id, a);
    }
  }

  void retire(BucketId id, PointId a) {
    removed_.insert(id);
    if (j_.p_.low_delay) return;
    Overlay& o = edit(id);
    auto c = o.close.find(a);
    if (c == o.close.end()) return;
    if (!c->second.empty()) --o.positive;
    o.close.erase(c);
    o.wa.erase(std::find(o.wa.begin(), o.wa.end(), a));
    const Bucket& bk = j_.buckets_[id];
    while (o.cursor != bk.a.end() && (o.close.count(*o.cursor) || retired(*o.cursor))) ++o.cursor;
    if (o.cursor != bk.a.end()) {
      const PointId x = *o.cursor++;
      std::vector<PointId> near;
      for (PointId b : bk.wb) {
        if (check_close(x, b)) near.push_back(b);
      }
      if (!near.empty()) ++o.positive;
      o.wa.push_back(x);
      o.close[x] = std::move(near);
    }
    if (o.positive == 0) {
      o.active = false;
      return;
    }
    if (o.rep_a != a && o.active) return;
    for (PointId w : o.wa) {
      const auto& v = o.close.at(w);
      if (v.empty()) continue;
      o.rep_a = w;
      o.rep_b = v.front();
      o.active = true;
      return;
    }
  }

  void run_low_delay() {
    const std::size_t M = j_.derived_.M;
    for (const auto& [key, id] : j_.all_) {
      const Bucket& bk = j_.buckets_[id];
      while (true) {
        s_.work();
        std::vector<PointId> as, bs;
        for (PointId a : bk.a) {
          if (retired(a)) continue;
          as.push_back(a);
          if (as.size() == M) break;
        }
        for (PointId b : bk.b) {
          bs.push_back(b);
          if (bs.size() == M) break;
        }
        bool found = false;
        for (PointId a : as) {
          for (PointId b : bs) {
            if (!check_close(a, b)) continue;
            process(a, b);
            found = true;
            break;
          }
          if (found) break;
        }
        if (!found) break;
      }
    }
  }

  LshJoin& j_;
  EnumerationSession& s_;
  std::unordered_map<BucketId, Overlay> ov_;
  std::unordered_set<BucketId> removed_;
};

void LshJoin::enumerate(EnumerationSession& session) {
  Enumerator e(*this, session);
  e.run();
}

// --- bank -----------------------------------------------------------------

LshBank::LshBank(std::size_t d, LshParams base, double r_min, double r_max) : r_min_(r_min), r_max_(r_max) {
  if (!(r_min > 0) || !(r_max >= r_min)) throw config_error("bank needs 0 < r_min <= r_max");
  for (double r = r_min;; r *= 1 + base.eps) {
    scales_.push_back(r);
    if (r >= r_max) break;
  }
  for (std::size_t j = 0; j < scales_.size(); ++j) {
    LshParams p = base;
    p.r = scales_[j];
    p.seed = base.seed + j;
    indexes_.push_back(std::make_unique<LshJoin>(d, p));
  }
}

std::size_t LshBank::scale_for(double r) const {
  if (!(r >= r_min_) || !(r <= r_max_)) {
    throw range_error("threshold " + std::to_string(r) + " outside the bank range [" +
                      std::to_string(r_min_) + ", " + std::to_string(r_max_) + "]");
  }
  return static_cast<std::size_t>(std::lower_bound(scales_.begin(), scales_.end(), r) - scales_.begin());
}

void LshBank::build(std::span<const Point> a, std::span<const Point> b) {
  for (auto& ix : indexes_) ix->build(a, b);
}
void LshBank::insert_a(const Point& p) {
  for (auto& ix : indexes_) ix->insert_a(p);
}
void LshBank::erase_a(PointId id) {
  for (auto& ix : indexes_) ix->erase_a(id);
}
void LshBank::insert_b(const Point& q) {
  for (auto& ix : indexes_) ix->insert_b(q);
}
void LshBank::erase_b(PointId id) {
  for (auto& ix : indexes_) ix->erase_b(id);
}
void LshBank::enumerate(double r, EnumerationSession& session) { indexes_[scale_for(r)]->enumerate(session); }

}  // namespace simjoin
