// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <sstream>

#include "simjoin/bench.hpp"

using namespace simjoin;

namespace {

Workload parse(const std::string& text, bool binary = false) {
  std::istringstream in(text);
  return parse_workload(in, binary);
}

std::string text_of(const Workload& w) {
  std::ostringstream out;
  write_workload(out, w);
  return out.str();
}

// JSON lines with the wall-clock fields removed.
std::vector<nlohmann::json> stable(const RunReport& rep) {
  std::ostringstream out;
  write_jsonl(out, rep);
  std::istringstream in(out.str());
  std::vector<nlohmann::json> lines;
  std::string line;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    for (auto it = j.begin(); it != j.end();) {
      const std::string& k = it.key();
      if (k.size() > 3 && k.compare(k.size() - 3, 3, "_ns") == 0) {
        it = j.erase(it);
      } else {
        ++it;
      }
    }
    lines.push_back(std::move(j));
  }
  return lines;
}

GeneratorSpec small_spec(std::uint64_t seed) {
  GeneratorSpec g;
  g.d = 2;
  g.n = 80;
  g.updates = 60;
  g.enum_every = 20;
  g.span = 4;
  g.seed = seed;
  return g;
}

}  // namespace

TEST_CASE("workload parsing") {
  const auto w = parse(
      "# comment\n"
      "ins A 0.5,1\n"
      "\n"
      "ins B 0.25,-1e-3\n"
      "enum\n"
      "del A 0\n"
      "enum r=0.75\n");
  REQUIRE(w.events.size() == 5);
  CHECK(w.dim == 2);
  CHECK(w.events[0].kind == Event::Kind::Insert);
  CHECK(w.events[0].point.id == 0);
  CHECK(w.events[1].point.id == 1);
  CHECK(w.events[1].side == Side::B);
  CHECK(w.events[1].point.coords == std::vector<double>{0.25, -1e-3});
  CHECK(!w.events[2].r);
  CHECK(w.events[3].kind == Event::Kind::Erase);
  CHECK(w.events[3].id == 0);
  CHECK(w.events[4].r == 0.75);
  CHECK(w.events[4].line == 7);
  CHECK(parse(text_of(w)).events.size() == 5);
  CHECK(text_of(parse(text_of(w))) == text_of(w));

  const auto h = parse("ins A 0f3a\nins B 0f3b\nenum\n", true);
  CHECK(h.dim == 16);
  CHECK(text_of(h) == "ins A 0f3a\nins B 0f3b\nenum\n");

  for (const char* bad : {"ins A 1,2\nins B 1,x\n", "ins A 1,2\nins C 1,2\n", "ins A 1,2\nins B 1\n",
                          "ins A 1\nfoo\n", "ins A 1\ndel A\n", "ins A 1\nenum r=-1\n", "ins A 1\nenum q=2\n"}) {
    try {
      parse(bad);
      FAIL("accepted: " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == Error::Code::kParse);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  CHECK_THROWS_AS(parse("ins A zz\n", true), Error);
}

TEST_CASE("generation is seeded") {
  const auto x = text_of(generate(small_spec(3)));
  CHECK(x == text_of(generate(small_spec(3))));
  CHECK(x != text_of(generate(small_spec(4))));

  const auto w = generate(small_spec(3));
  std::size_t ins = 0, del = 0, enums = 0;
  for (const auto& e : w.events) {
    ins += e.kind == Event::Kind::Insert;
    del += e.kind == Event::Kind::Erase;
    enums += e.kind == Event::Kind::Enumerate;
  }
  CHECK(ins + del == 160 + 60);
  CHECK(enums == 3);
  for (std::size_t i = 0; i < 160; ++i) CHECK(w.events[i].side == (i < 80 ? Side::A : Side::B));

  GeneratorSpec h;
  h.kind = "hamming";
  h.d = 64;
  h.n = 10;
  h.sides = 3;
  h.r_values = {1, 2};
  const auto hw = generate(h);
  CHECK(hw.binary);
  CHECK(hw.events.size() == 31);
  CHECK(hw.events.back().r == 1.0);
  CHECK(text_of(parse(text_of(hw), true)) == text_of(hw));

  GeneratorSpec g = small_spec(1);
  g.kind = "gaussian";
  CHECK(generate(g).events.size() == generate(small_spec(1)).events.size());
  g.kind = "zipf";
  CHECK_THROWS_AS(generate(g), Error);
  h.d = 30;
  CHECK_THROWS_AS(generate(h), Error);
}

TEST_CASE("run verdicts") {
  SUBCASE("empty workload") {
    const auto rep = run({}, Workload{}, {true});
    CHECK(rep.events == 0);
    CHECK(rep.enums.empty());
    CHECK(rep.pass);
  }
  SUBCASE("single pair, exact") {
    const auto w = parse("ins A 0,0\nins B 0.5,0.5\nenum\n");
    IndexConfig c;
    c.index = "linf";
    c.r = 1;
    const auto rep = run(c, w, {true});
    REQUIRE(rep.enums.size() == 1);
    CHECK(rep.enums[0].verdict == "exact-match");
    CHECK(rep.enums[0].results == 1);
  }
  SUBCASE("every index kind") {
    struct Case {
      const char* index;
      MetricKind metric;
      const char* verdict;
    };
    for (const Case& k : {Case{"linf", MetricKind::Linf, "exact-match"}, Case{"l1", MetricKind::L1, "exact-match"},
                          Case{"grid", MetricKind::L2, "sandwich-pass"}, Case{"wspd", MetricKind::L2, "sandwich-pass"},
                          Case{"triangle", MetricKind::L2, "sandwich-pass"}}) {
      GeneratorSpec g = small_spec(7);
      if (std::string(k.index) == "triangle") g.sides = 3;
      if (std::string(k.index) == "wspd") g.r_values = {0.2, 0.4, 0.3};
      const auto w = generate(g);
      IndexConfig c;
      c.index = k.index;
      c.metric = k.metric;
      c.r = 0.3;
      c.eps = 0.5;
      const auto rep = run(c, w, {true});
      CHECK(rep.pass);
      std::uint64_t results = 0;
      for (const auto& e : rep.enums) {
        CHECK(e.verdict == k.verdict);
        results += e.results;
      }
      CHECK(results > 0);

      RunOptions faulty{true};
      faulty.drop_emission = 0;
      const auto bad = run(c, w, faulty);
      CHECK(!bad.pass);
      for (const auto& e : bad.enums) CHECK(!e.pass);
    }
  }
  SUBCASE("lsh") {
    GeneratorSpec g;
    g.kind = "hamming";
    g.d = 64;
    g.n = 100;
    g.updates = 40;
    g.enum_every = 20;
    const auto w = generate(g);
    IndexConfig c;
    c.index = "lsh";
    c.metric = MetricKind::Hamming;
    c.r = 24;
    c.eps = 0.25;
    for (const char* mode : {"default", "low-delay"}) {
      c.mode = mode;
      const auto rep = run(c, w, {true});
      CHECK(rep.pass);
      for (const auto& e : rep.enums) {
        CHECK(e.verdict == "precision-pass");
        CHECK(e.recall >= 0);
      }
    }
    c.mode = "default";
    c.r_min = 16;
    c.r_max = 32;
    GeneratorSpec gv = g;
    gv.r_values = {16, 20, 30};
    const auto rep = run(c, generate(gv), {true});
    CHECK(rep.pass);
    CHECK(rep.enums.size() == 2);

    RunOptions faulty{true};
    faulty.drop_emission = 0;
    c.r_max = 0;
    CHECK(!run(c, w, faulty).pass);
  }
  SUBCASE("configuration errors") {
    const auto w = parse("ins A 0,0\nins B 0.5,0.5\nenum r=2\n");
    IndexConfig c;
    c.index = "grid";
    c.metric = MetricKind::L2;
    CHECK_THROWS_AS(run(c, w, {}), Error);
    c.index = "linf";
    CHECK_THROWS_AS(run(c, w, {}), Error);
    c.index = "grid";
    c.mode = "low-delay";
    CHECK_THROWS_AS(run(c, parse("ins A 0,0\nenum\n"), {}), Error);
    c.mode = "default";
    CHECK_THROWS_AS(run(c, parse("ins A 0,0\ndel B 4\n"), {}), Error);
    CHECK_THROWS_AS(run(c, parse("ins S 0,0\nenum\n"), {}), Error);
    c.index = "bogus";
    CHECK_THROWS_AS(run(c, parse("ins A 0,0\n"), {}), Error);
  }
}

TEST_CASE("reports are deterministic apart from wall clock") {
  const auto w = generate(small_spec(11));
  IndexConfig c;
  c.index = "grid";
  c.metric = MetricKind::L2;
  c.r = 0.3;
  const auto x = run(c, w, {true});
  const auto y = run(c, w, {true});
  CHECK(stable(x) == stable(y));
  const auto lines = stable(x);
  CHECK(lines.size() == x.batches.size() + x.enums.size() + 1);
  for (const auto& j : lines) CHECK(j["schema"] == kReportSchema);
  CHECK(lines.back()["type"] == "summary");
  CHECK(lines.back()["config"]["index"] == "grid");

  std::ostringstream csv;
  write_csv(csv, x);
  std::istringstream in(csv.str());
  std::string header, row;
  std::getline(in, header);
  CHECK(header.rfind("schema,", 0) == 0);
  std::size_t rows = 0;
  while (std::getline(in, row)) ++rows;
  CHECK(rows == x.enums.size());
}

TEST_CASE("sweeps") {
  SweepSpec s;
  s.config.index = "grid";
  s.config.metric = MetricKind::L2;
  s.config.r = 1;
  s.ns = {300};
  s.updates = 50;
  auto rows = sweep(s);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].delay_ratio == 1);
  CHECK(rows[0].bound == 2);

  s.config.index = "linf";
  s.config.metric = MetricKind::Linf;
  s.ns = {250, 500, 1000};
  s.reps = 2;
  rows = sweep(s);
  CHECK(rows.size() == 6);
  for (const auto& r : rows) {
    CHECK(r.results > 0);
    CHECK(r.bound >= 2);
  }
  CHECK(rows[2].bound == doctest::Approx(2 * std::pow(std::log(1000.0) / std::log(250.0), 2)));
  std::ostringstream out;
  write_sweep_csv(out, rows);
  CHECK(out.str().rfind("schema,n,rep", 0) == 0);

  s.ns = {500, 250};
  CHECK_THROWS_AS(sweep(s), Error);
}
