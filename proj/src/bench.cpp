// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#include "simjoin/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <random>
#include <sstream>

#include "simjoin/grid.hpp"
#include "simjoin/l1.hpp"
#include "simjoin/lsh.hpp"
#include "simjoin/rangetree.hpp"
#include "simjoin/triangle.hpp"
#include "simjoin/wspd.hpp"

namespace simjoin {

namespace {

Error parse_error(std::size_t line, const std::string& what) {
  return {Error::Code::kParse, "line " + std::to_string(line) + ": " + what};
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t k = s.find(sep, start);
    out.push_back(s.substr(start, k - start));
    if (k == std::string_view::npos) break;
    start = k + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s, std::size_t line) {
  s = trim(s);
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw parse_error(line, "bad number '" + std::string(s) + "'");
  return v;
}

Point parse_point(std::string_view text, PointId id, bool binary, std::size_t line) {
  text = trim(text);
  try {
    if (binary) return parse_hex_point(id, text);
    std::vector<double> c;
    for (auto tok : split(text, ',')) c.push_back(parse_double(tok, line));
    return make_point(id, std::move(c));
  } catch (const Error& e) {
    if (e.code() == Error::Code::kParse) throw;
    throw parse_error(line, e.what());
  }
}

Side parse_side(std::string_view s, std::size_t line) {
  if (s == "A") return Side::A;
  if (s == "B") return Side::B;
  if (s == "S") return Side::S;
  throw parse_error(line, "unknown side '" + std::string(s) + "'");
}

std::string format_point(const Point& p) {
  if (p.is_binary()) return to_hex(p);
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < p.coords.size(); ++i) {
    if (i) out.push_back(',');
    const auto res = std::to_chars(buf, buf + sizeof buf, p.coords[i]);
    out.append(buf, res.ptr);
  }
  return out;
}

}  // namespace

Workload parse_workload(std::istream& in, bool binary) {
  Workload w;
  w.binary = binary;
  std::string raw;
  std::size_t line = 0;
  PointId next = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    const std::size_t sp = s.find_first_of(" \t");
    const std::string_view op = s.substr(0, sp);
    const std::string_view rest = sp == std::string_view::npos ? std::string_view{} : trim(s.substr(sp));
    Event e;
    e.line = line;
    if (op == "enum") {
      e.kind = Event::Kind::Enumerate;
      if (!rest.empty()) {
        if (rest.substr(0, 2) != "r=") throw parse_error(line, "expected r=<value>");
        e.r = parse_double(rest.substr(2), line);
        if (!(*e.r > 0) || !std::isfinite(*e.r)) throw parse_error(line, "r must be positive");
      }
    } else if (op == "ins" || op == "del") {
      const std::size_t sp2 = rest.find_first_of(" \t");
      if (sp2 == std::string_view::npos) throw parse_error(line, "expected a side and an argument");
      e.side = parse_side(rest.substr(0, sp2), line);
      const std::string_view arg = trim(rest.substr(sp2));
      if (op == "ins") {
        e.kind = Event::Kind::Insert;
        e.point = parse_point(arg, next++, binary, line);
        if (!w.dim) w.dim = e.point.dim();
        if (e.point.dim() != w.dim) throw parse_error(line, "dimension differs from earlier points");
      } else {
        e.kind = Event::Kind::Erase;
        std::uint64_t id = 0;
        const auto [p, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), id);
        if (ec != std::errc() || p != arg.data() + arg.size()) throw parse_error(line, "bad id '" + std::string(arg) + "'");
        e.id = id;
      }
    } else {
      throw parse_error(line, "unknown event '" + std::string(op) + "'");
    }
    w.events.push_back(std::move(e));
  }
  return w;
}

Workload load_workload(const std::string& path, bool binary) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open workload " + path);
  return parse_workload(in, binary);
}

void write_workload(std::ostream& out, const Workload& w) {
  for (const Event& e : w.events) {
    switch (e.kind) {
      case Event::Kind::Insert: out << "ins " << to_string(e.side) << ' ' << format_point(e.point) << '\n'; break;
      case Event::Kind::Erase: out << "del " << to_string(e.side) << ' ' << e.id << '\n'; break;
      case Event::Kind::Enumerate:
        out << "enum";
        if (e.r) {
          char buf[32];
          const auto res = std::to_chars(buf, buf + sizeof buf, *e.r);
          out << " r=" << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
        }
        out << '\n';
        break;
    }
  }
}

std::vector<Point> parse_points(std::istream& in, bool binary) {
  std::vector<Point> out;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    out.push_back(parse_point(s, out.size(), binary, line));
    if (out.back().dim() != out.front().dim()) throw parse_error(line, "dimension differs from earlier points");
  }
  return out;
}

void write_points(std::ostream& out, std::span<const Point> points) {
  for (const Point& p : points) out << format_point(p) << '\n';
}

Workload generate(const GeneratorSpec& spec) {
  if (spec.kind != "uniform" && spec.kind != "gaussian" && spec.kind != "hamming") {
    throw config_error("unknown generator '" + spec.kind + "'");
  }
  if (spec.d == 0) throw config_error("generator needs d >= 1");
  if (spec.sides != 2 && spec.sides != 3) throw config_error("generator supports 2 or 3 sides");
  const bool binary = spec.kind == "hamming";
  if (binary && spec.d % 4) throw config_error("hamming dimension must be a multiple of 4");
  if (!(spec.span > 0)) throw config_error("span must be positive");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0, spec.span);
  std::normal_distribution<double> noise(0, spec.sigma);
  std::vector<std::vector<double>> centers;
  if (spec.kind == "gaussian") {
    if (!spec.clusters) throw config_error("gaussian generator needs clusters >= 1");
    for (std::size_t c = 0; c < spec.clusters; ++c) {
      std::vector<double> x(spec.d);
      for (double& v : x) v = unit(rng);
      centers.push_back(std::move(x));
    }
  }
  PointId next = 0;
  auto draw = [&]() {
    const PointId id = next++;
    if (binary) {
      std::vector<std::uint64_t> words((spec.d + 63) / 64);
      for (auto& x : words) x = rng();
      return make_binary_point(id, spec.d, std::move(words));
    }
    std::vector<double> x(spec.d);
    if (centers.empty()) {
      for (double& v : x) v = unit(rng);
    } else {
      const auto& c = centers[rng() % centers.size()];
      for (std::size_t i = 0; i < spec.d; ++i) x[i] = c[i] + noise(rng);
    }
    return make_point(id, std::move(x));
  };

  Workload w;
  w.dim = spec.d;
  w.binary = binary;
  const Side sides[3] = {Side::A, Side::B, Side::S};
  std::vector<PointId> live[3];
  auto insert = [&](std::size_t k) {
    Event e;
    e.kind = Event::Kind::Insert;
    e.side = sides[k];
    e.point = draw();
    live[k].push_back(e.point.id);
    w.events.push_back(std::move(e));
  };
  std::size_t enums = 0;
  auto enumerate = [&]() {
    Event e;
    e.kind = Event::Kind::Enumerate;
    if (!spec.r_values.empty()) e.r = spec.r_values[enums % spec.r_values.size()];
    ++enums;
    w.events.push_back(std::move(e));
  };
  for (std::size_t k = 0; k < spec.sides; ++k) {
    for (std::size_t i = 0; i < spec.n; ++i) insert(k);
  }
  for (std::size_t u = 0; u < spec.updates; ++u) {
    const std::size_t k = rng() % spec.sides;
    if (rng() % 2 == 0 && !live[k].empty()) {
      const std::size_t at = rng() % live[k].size();
      Event e;
      e.kind = Event::Kind::Erase;
      e.side = sides[k];
      e.id = live[k][at];
      live[k][at] = live[k].back();
      live[k].pop_back();
      w.events.push_back(std::move(e));
    } else {
      insert(k);
    }
    if (spec.enum_every && (u + 1) % spec.enum_every == 0) enumerate();
  }
  if (w.events.empty() || w.events.back().kind != Event::Kind::Enumerate) enumerate();
  return w;
}

// --- index adapters -------------------------------------------------------

namespace {

void pair_only(Side side) {
  if (side == Side::S) throw invalid_input("side S needs the triangle index");
}

template <typename J>
class PairAdapter : public JoinIndex {
 public:
  explicit PairAdapter(J j) : j_(std::move(j)) {}
  void build(std::span<const Point> a, std::span<const Point> b, std::span<const Point> s) override {
    if (!s.empty()) pair_only(Side::S);
    j_.build(a, b);
  }
  void insert(Side side, const Point& p) override {
    pair_only(side);
    side == Side::A ? j_.insert_a(p) : j_.insert_b(p);
  }
  void erase(Side side, PointId id) override {
    pair_only(side);
    side == Side::A ? j_.erase_a(id) : j_.erase_b(id);
  }
  void enumerate(std::optional<double> r, EnumerationSession& s) override {
    if constexpr (requires { j_.enumerate(s); }) {
      j_.enumerate(s);
    } else {
      j_.enumerate(*r, s);
    }
  }
  std::uint64_t last_update_work() const override { return j_.last_update_work(); }

 protected:
  J j_;
};

class WspdAdapter : public PairAdapter<WspdJoin> {
 public:
  WspdAdapter(WspdJoin j, double r) : PairAdapter(std::move(j)), r_(r) {}
  void enumerate(std::optional<double> r, EnumerationSession& s) override { j_.enumerate(r.value_or(r_), s); }
  bool variable_r() const override { return true; }

 private:
  double r_;
};

class BankAdapter : public JoinIndex {
 public:
  BankAdapter(std::size_t d, LshParams p, double r_min, double r_max, double r)
      : bank_(d, p, r_min, r_max), r_(r) {}
  void build(std::span<const Point> a, std::span<const Point> b, std::span<const Point> s) override {
    if (!s.empty()) pair_only(Side::S);
    bank_.build(a, b);
  }
  void insert(Side side, const Point& p) override {
    pair_only(side);
    side == Side::A ? bank_.insert_a(p) : bank_.insert_b(p);
  }
  void erase(Side side, PointId id) override {
    pair_only(side);
    side == Side::A ? bank_.erase_a(id) : bank_.erase_b(id);
  }
  void enumerate(std::optional<double> r, EnumerationSession& s) override { bank_.enumerate(r.value_or(r_), s); }
  std::uint64_t last_update_work() const override {
    std::uint64_t w = 0;
    for (std::size_t j = 0; j < bank_.scales().size(); ++j) w += bank_.index(j).last_update_work();
    return w;
  }
  bool variable_r() const override { return true; }
  double scale(double r) const { return bank_.scales()[bank_.scale_for(r)]; }

 private:
  LshBank bank_;
  double r_;
};

class TriangleAdapter : public JoinIndex {
 public:
  explicit TriangleAdapter(TriangleJoin t) : t_(std::move(t)) {}
  void build(std::span<const Point> a, std::span<const Point> b, std::span<const Point> s) override {
    t_.build(a, b, s);
  }
  void insert(Side side, const Point& p) override { t_.insert(side, p); }
  void erase(Side side, PointId id) override { t_.erase(side, id); }
  void enumerate(std::optional<double>, EnumerationSession& s) override { t_.enumerate(s); }
  std::uint64_t last_update_work() const override { return t_.last_update_work(); }
  bool triangles() const override { return true; }

 private:
  TriangleJoin t_;
};

LshParams lsh_params(const IndexConfig& c) {
  LshParams p;
  p.metric = c.metric;
  p.r = c.r;
  p.eps = c.eps;
  p.c_tau = c.c_tau;
  p.c_M = c.c_M;
  p.c_m = c.c_m;
  p.seed = c.seed;
  p.low_delay = c.mode == "low-delay";
  p.n_hint = c.lsh_n;
  return p;
}

void check_mode(const IndexConfig& c) {
  if (c.mode == "default") return;
  if (c.mode == "low-delay" && c.index == "lsh") return;
  if (c.mode == "constant-delay" && c.index == "grid") return;
  throw config_error("mode '" + c.mode + "' does not apply to index " + c.index);
}

}  // namespace

std::unique_ptr<JoinIndex> make_index(const IndexConfig& c, std::size_t d) {
  check_mode(c);
  if (c.index == "linf") {
    if (c.metric != MetricKind::Linf) throw config_error("linf index needs --metric linf");
    return std::make_unique<PairAdapter<RangeTreeJoin>>(RangeTreeJoin::hypercube(d, c.r));
  }
  if (c.index == "l1") {
    if (c.metric != MetricKind::L1) throw config_error("l1 index needs --metric l1");
    return std::make_unique<PairAdapter<L1Join>>(L1Join(d, c.r));
  }
  if (c.index == "grid") {
    return std::make_unique<PairAdapter<GridJoin>>(
        GridJoin(d, c.metric, c.r, c.eps, GridOptions{c.mode == "constant-delay"}));
  }
  if (c.index == "wspd") return std::make_unique<WspdAdapter>(WspdJoin(d, c.metric, c.eps), c.r);
  if (c.index == "lsh") {
    if (c.r_max > 0) {
      return std::make_unique<BankAdapter>(d, lsh_params(c), c.r_min > 0 ? c.r_min : c.r, c.r_max, c.r);
    }
    return std::make_unique<PairAdapter<LshJoin>>(LshJoin(d, lsh_params(c)));
  }
  if (c.index == "triangle") return std::make_unique<TriangleAdapter>(TriangleJoin(d, c.metric, c.r, c.eps));
  throw config_error("unknown index '" + c.index + "'");
}

// --- runs -----------------------------------------------------------------

namespace {

template <typename T>
bool subset(const std::vector<T>& x, const std::vector<T>& y) {
  return std::includes(y.begin(), y.end(), x.begin(), x.end());
}

std::vector<Point> values(const std::map<PointId, Point>& m) {
  std::vector<Point> out;
  out.reserve(m.size());
  for (const auto& [id, p] : m) out.push_back(p);
  return out;
}

struct Verifier {
  const IndexConfig& c;
  JoinIndex& ix;
  const std::map<PointId, Point>* sets;
  const RunOptions& opt;

  void check(std::optional<double> rq, const EnumerationSession& s, EnumRecord& rec) {
    const double r = rq.value_or(c.r);
    std::string verdict;
    bool pass = true;
    auto fail = [&](const char* why) {
      if (pass) verdict = why;
      pass = false;
    };
    if (s.duplicates()) fail("duplicate");

    EnumerationSession audit;
    ix.enumerate(rq, audit);
    audit.finish();

    const auto a = values(sets[0]), b = values(sets[1]);
    if (ix.triangles()) {
      const auto got = s.sorted_triples();
      const auto want = audit.sorted_triples();
      const auto inner = oracle_triangle(a, b, values(sets[2]), {c.metric, r, 0});
      const auto outer = oracle_triangle(a, b, values(sets[2]), {c.metric, (1 + c.eps) * r, 0});
      if (!subset(inner, got) || !subset(got, outer)) fail("sandwich-fail");
      if (got != want) fail("audit-mismatch");
      if (pass) verdict = "sandwich-pass";
    } else if (c.index == "linf" || c.index == "l1") {
      const auto got = s.sorted_pairs();
      if (got != oracle_join(a, b, {c.metric, r, 0})) fail("exact-mismatch");
      if (pass) verdict = "exact-match";
    } else if (c.index == "lsh") {
      const auto got = s.sorted_pairs();
      double rj = c.r;
      if (auto* bank = dynamic_cast<BankAdapter*>(&ix)) rj = bank->scale(r);
      const auto outer = oracle_join(a, b, {c.metric, 2 * (1 + c.eps) * rj, 0});
      const auto inner = oracle_join(a, b, {c.metric, r, 0});
      std::vector<IdPair> hit;
      std::set_intersection(got.begin(), got.end(), inner.begin(), inner.end(), std::back_inserter(hit));
      rec.recall = inner.empty() ? 1.0 : static_cast<double>(hit.size()) / static_cast<double>(inner.size());
      if (!subset(got, outer)) fail("precision-fail");
      if (got != audit.sorted_pairs()) fail("audit-mismatch");
      if (rec.recall < opt.min_recall) fail("recall-low");
      if (pass) verdict = "precision-pass";
    } else {
      const auto got = s.sorted_pairs();
      const auto inner = oracle_join(a, b, {c.metric, r, 0});
      const auto outer = oracle_join(a, b, {c.metric, (1 + c.eps) * r, 0});
      if (!subset(inner, got) || !subset(got, outer)) fail("sandwich-fail");
      if (got != audit.sorted_pairs()) fail("audit-mismatch");
      if (pass) verdict = "sandwich-pass";
    }
    rec.verdict = verdict;
    rec.pass = pass;
  }
};

int side_index(Side s) { return s == Side::A ? 0 : s == Side::B ? 1 : 2; }

}  // namespace

RunReport run(const IndexConfig& config, const Workload& workload, const RunOptions& options) {
  RunReport rep;
  rep.config = config;
  rep.dim = workload.dim;
  rep.events = workload.events.size();
  rep.verified = options.verify;
  if (workload.events.empty()) return rep;
  if (workload.binary != (config.metric == MetricKind::Hamming)) {
    throw config_error("workload point format does not match metric " + std::string(to_string(config.metric)));
  }
  auto ix = make_index(config, workload.dim);
  std::map<PointId, Point> live[3];

  // Leading inserts are bulk loaded.
  std::size_t i = 0;
  {
    std::vector<Point> init[3];
    for (; i < workload.events.size() && workload.events[i].kind == Event::Kind::Insert; ++i) {
      const Event& e = workload.events[i];
      init[side_index(e.side)].push_back(e.point);
      live[side_index(e.side)].emplace(e.point.id, e.point);
    }
    if (i > 0) ix->build(init[0], init[1], init[2]);
  }

  Verifier verifier{config, *ix, live, options};
  UpdateBatch batch;
  batch.first_event = i;
  auto close_batch = [&](std::size_t next) {
    if (batch.updates) rep.batches.push_back(batch);
    batch = UpdateBatch{};
    batch.first_event = next;
  };
  for (; i < workload.events.size(); ++i) {
    const Event& e = workload.events[i];
    try {
      if (e.kind == Event::Kind::Enumerate) {
        close_batch(i + 1);
        if (e.r && !ix->variable_r() && *e.r != config.r) {
          throw config_error("index " + config.index + " has a fixed threshold; enum r= must match --r");
        }
        EnumerationSession s;
        if (options.drop_emission) s.drop_emission(*options.drop_emission);
        ix->enumerate(e.r, s);
        s.finish();
        EnumRecord rec;
        rec.event = i;
        rec.r = e.r.value_or(config.r);
        rec.results = s.emitted();
        rec.duplicates = s.duplicates();
        rec.max_work = s.probe().max_work;
        rec.mean_work = s.probe().mean_work();
        rec.max_ns = s.probe().max_ns;
        rec.mean_ns = s.probe().mean_ns();
        if (options.verify) verifier.check(e.r, s, rec);
        rep.pass = rep.pass && rec.pass;
        rep.enums.push_back(std::move(rec));
        continue;
      }
      auto& set = live[side_index(e.side)];
      if (e.kind == Event::Kind::Insert) {
        ix->insert(e.side, e.point);
        set.emplace(e.point.id, e.point);
      } else {
        if (!set.count(e.id)) throw not_found("unknown " + std::string(to_string(e.side)) + " id " + std::to_string(e.id));
        ix->erase(e.side, e.id);
        set.erase(e.id);
      }
    } catch (const Error& err) {
      throw Error(err.code(), "event at line " + std::to_string(e.line) + ": " + err.what());
    }
    const std::uint64_t w = ix->last_update_work();
    ++batch.updates;
    ++rep.updates;
    batch.max_work = std::max(batch.max_work, w);
    batch.total_work += w;
    rep.max_update_work = std::max(rep.max_update_work, w);
    rep.total_update_work += w;
  }
  close_batch(workload.events.size());
  return rep;
}

// --- reports --------------------------------------------------------------

namespace {

nlohmann::json config_json(const IndexConfig& c) {
  return {{"index", c.index}, {"metric", std::string(to_string(c.metric))},
          {"r", c.r},         {"eps", c.eps},
          {"mode", c.mode},   {"seed", c.seed},
          {"c_tau", c.c_tau}, {"c_M", c.c_M},
          {"c_m", c.c_m},     {"r_min", c.r_min},
          {"r_max", c.r_max}};
}

}  // namespace

void write_jsonl(std::ostream& out, const RunReport& rep) {
  for (const auto& b : rep.batches) {
    nlohmann::json j = {{"schema", kReportSchema}, {"type", "updates"}, {"first_event", b.first_event},
                        {"updates", b.updates},    {"max_work", b.max_work}, {"total_work", b.total_work}};
    out << j.dump() << '\n';
  }
  for (const auto& e : rep.enums) {
    nlohmann::json j = {{"schema", kReportSchema}, {"type", "enum"},          {"event", e.event},
                        {"r", e.r},                {"results", e.results},    {"duplicates", e.duplicates},
                        {"max_work", e.max_work},  {"mean_work", e.mean_work}, {"max_ns", e.max_ns},
                        {"mean_ns", e.mean_ns},    {"verdict", e.verdict},    {"pass", e.pass}};
    if (e.recall >= 0) j["recall"] = e.recall;
    out << j.dump() << '\n';
  }
  nlohmann::json s = {{"schema", kReportSchema},
                      {"type", "summary"},
                      {"config", config_json(rep.config)},
                      {"dim", rep.dim},
                      {"events", rep.events},
                      {"updates", rep.updates},
                      {"enumerations", rep.enums.size()},
                      {"max_update_work", rep.max_update_work},
                      {"total_update_work", rep.total_update_work},
                      {"verified", rep.verified},
                      {"pass", rep.pass}};
  out << s.dump() << '\n';
}

void write_csv(std::ostream& out, const RunReport& rep) {
  out << "schema,index,event,r,results,duplicates,max_work,mean_work,max_ns,mean_ns,verdict,recall\n";
  for (const auto& e : rep.enums) {
    out << kReportSchema << ',' << rep.config.index << ',' << e.event << ',' << e.r << ',' << e.results << ','
        << e.duplicates << ',' << e.max_work << ',' << e.mean_work << ',' << e.max_ns << ',' << e.mean_ns << ','
        << e.verdict << ',';
    if (e.recall >= 0) out << e.recall;
    out << '\n';
  }
}

// --- sweeps ---------------------------------------------------------------

std::vector<SweepRow> sweep(const SweepSpec& spec) {
  if (spec.ns.empty()) throw config_error("sweep needs at least one n");
  for (std::size_t i = 1; i < spec.ns.size(); ++i) {
    if (spec.ns[i] <= spec.ns[i - 1]) throw config_error("sweep n values must increase");
  }
  if (!(spec.density > 0)) throw config_error("density must be positive");
  const bool exact = spec.config.index == "linf" || spec.config.index == "l1";
  std::vector<SweepRow> rows;
  for (std::size_t rep = 0; rep < spec.reps; ++rep) {
    const std::size_t first = rows.size();
    for (std::size_t n : spec.ns) {
      GeneratorSpec g;
      g.kind = spec.config.metric == MetricKind::Hamming ? "hamming" : "uniform";
      g.d = spec.d;
      g.n = n;
      g.sides = spec.config.index == "triangle" ? 3 : 2;
      g.updates = spec.updates;
      g.enum_every = 0;
      // n points per side in a cube of side L; a ball of radius r in
      // l-infinity covers (2r)^d, so L = 2r (n / density)^(1/d).
      g.span = 2 * spec.config.r * std::pow(static_cast<double>(n) / spec.density, 1.0 / static_cast<double>(spec.d));
      g.seed = spec.seed + rep * 1000003ULL + n;
      const Workload w = generate(g);
      // Enumerate right after the load as well as at the end.
      Workload w2;
      w2.dim = w.dim;
      w2.binary = w.binary;
      bool placed = false;
      for (const Event& e : w.events) {
        if (!placed && e.kind != Event::Kind::Insert) {
          w2.events.push_back(Event{});
          placed = true;
        }
        w2.events.push_back(e);
      }
      const RunReport r = run(spec.config, w2, {});
      SweepRow row;
      row.n = n;
      row.rep = rep;
      for (const auto& e : r.enums) {
        row.max_delay_work = std::max(row.max_delay_work, e.max_work);
        row.results = std::max(row.results, e.results);
      }
      row.max_update_work = r.max_update_work;
      row.mean_update_work = r.updates ? static_cast<double>(r.total_update_work) / static_cast<double>(r.updates) : 0;
      const SweepRow& base = rows.size() > first ? rows[first] : row;
      row.delay_ratio = base.max_delay_work ? static_cast<double>(row.max_delay_work) / base.max_delay_work : 1;
      row.update_ratio = base.mean_update_work > 0 ? row.mean_update_work / base.mean_update_work : 1;
      const double growth = std::log(static_cast<double>(n)) / std::log(static_cast<double>(spec.ns.front()));
      row.bound = exact ? 2 * std::pow(growth, static_cast<double>(spec.d)) : 2;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "schema,n,rep,max_delay_work,delay_ratio,bound,mean_update_work,update_ratio,max_update_work,results\n";
  for (const auto& r : rows) {
    out << kSweepSchema << ',' << r.n << ',' << r.rep << ',' << r.max_delay_work << ',' << r.delay_ratio << ','
        << r.bound << ',' << r.mean_update_work << ',' << r.update_ratio << ',' << r.max_update_work << ','
        << r.results << '\n';
  }
}

}  // namespace simjoin
