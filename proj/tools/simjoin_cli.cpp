// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

// simjoin run|generate|sweep. Exit status: 0 pass, 1 verification failure,
// 2 usage or configuration error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "simjoin/bench.hpp"

using namespace simjoin;

namespace {

struct Common {
  IndexConfig config;
  std::string metric = "linf";
};

void add_index_flags(CLI::App* app, Common& c) {
  app->add_option("--index", c.config.index, "linf, l1, grid, wspd, lsh or triangle")
      ->check(CLI::IsMember({"linf", "l1", "grid", "wspd", "lsh", "triangle"}));
  app->add_option("--metric", c.metric, "l1, l2, linf or hamming")
      ->check(CLI::IsMember({"l1", "l2", "linf", "hamming"}));
  app->add_option("--r", c.config.r, "distance threshold");
  app->add_option("--eps", c.config.eps, "approximation parameter");
  app->add_option("--seed", c.config.seed, "hash seed");
  app->add_option("--mode", c.config.mode, "default, low-delay (lsh) or constant-delay (grid)")
      ->check(CLI::IsMember({"default", "low-delay", "constant-delay"}));
  app->add_option("--c-tau", c.config.c_tau, "lsh table-count constant");
  app->add_option("--c-M", c.config.c_M, "lsh witness-cap constant");
  app->add_option("--c-m", c.config.c_m, "lsh copy-count constant");
  app->add_option("--lsh-n", c.config.lsh_n, "size used for lsh parameters (0: first build)");
  app->add_option("--r-min", c.config.r_min, "lsh bank lower threshold");
  app->add_option("--r-max", c.config.r_max, "lsh bank upper threshold; enables the bank");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write " + path);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simjoin: dynamic similarity join harness"};
  app.require_subcommand(1);

  Common run_opts;
  std::string workload_path, report_path, csv_path;
  bool verify = false;
  double min_recall = 0;
  std::int64_t drop = -1;
  auto* run_cmd = app.add_subcommand("run", "replay a workload against an index");
  add_index_flags(run_cmd, run_opts);
  run_cmd->add_option("--workload", workload_path, "workload file")->required();
  run_cmd->add_flag("--verify", verify, "check every enumeration against the oracle");
  run_cmd->add_option("--report", report_path, "JSON-lines report path");
  run_cmd->add_option("--csv", csv_path, "CSV summary path");
  run_cmd->add_option("--min-recall", min_recall, "lsh: fail enumerations below this recall");
  run_cmd->add_option("--fault-drop", drop, "drop the k-th emission of every enumeration");

  GeneratorSpec gen;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("generate", "write a seeded workload");
  gen_cmd->add_option("--kind", gen.kind, "uniform, gaussian or hamming")
      ->check(CLI::IsMember({"uniform", "gaussian", "hamming"}));
  gen_cmd->add_option("--d", gen.d, "dimension (bits for hamming)");
  gen_cmd->add_option("--n", gen.n, "initial points per side");
  gen_cmd->add_option("--sides", gen.sides, "2, or 3 for triangle workloads");
  gen_cmd->add_option("--updates", gen.updates, "interleaved updates after the load");
  gen_cmd->add_option("--enum-every", gen.enum_every, "updates between enumerations");
  gen_cmd->add_option("--span", gen.span, "cube side");
  gen_cmd->add_option("--clusters", gen.clusters, "gaussian clusters");
  gen_cmd->add_option("--sigma", gen.sigma, "gaussian spread");
  gen_cmd->add_option("--r-values", gen.r_values, "thresholds cycled through enum events")->delimiter(',');
  gen_cmd->add_option("--seed", gen.seed, "generator seed");
  gen_cmd->add_option("--out", gen_out, "output path (stdout if absent)");

  Common sweep_opts;
  SweepSpec sw;
  std::string sweep_csv;
  auto* sweep_cmd = app.add_subcommand("sweep", "delay and update growth across n");
  add_index_flags(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--ns", sw.ns, "increasing n values")->delimiter(',')->required();
  sweep_cmd->add_option("--reps", sw.reps, "repetitions");
  sweep_cmd->add_option("--d", sw.d, "dimension");
  sweep_cmd->add_option("--density", sw.density, "expected points per r-ball");
  sweep_cmd->add_option("--updates", sw.updates, "updates after the load");
  sweep_cmd->add_option("--csv", sweep_csv, "output path (stdout if absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) {
      run_opts.config.metric = parse_metric(run_opts.metric);
      const Workload w = load_workload(workload_path, run_opts.config.metric == MetricKind::Hamming);
      RunOptions opt;
      opt.verify = verify;
      opt.min_recall = min_recall;
      if (drop >= 0) opt.drop_emission = static_cast<std::uint64_t>(drop);
      const RunReport rep = run(run_opts.config, w, opt);
      if (!report_path.empty()) {
        auto out = open_out(report_path);
        write_jsonl(out, rep);
      }
      if (!csv_path.empty()) {
        auto out = open_out(csv_path);
        write_csv(out, rep);
      }
      std::size_t failed = 0;
      for (const auto& e : rep.enums) failed += !e.pass;
      std::cout << "events " << rep.events << ", updates " << rep.updates << ", enumerations " << rep.enums.size();
      if (rep.verified) std::cout << ", failed verdicts " << failed;
      std::cout << '\n';
      return rep.pass ? 0 : 1;
    }
    if (*gen_cmd) {
      const Workload w = generate(gen);
      if (gen_out.empty()) {
        write_workload(std::cout, w);
      } else {
        auto out = open_out(gen_out);
        write_workload(out, w);
      }
      return 0;
    }
    if (*sweep_cmd) {
      sweep_opts.config.metric = parse_metric(sweep_opts.metric);
      sw.config = sweep_opts.config;
      const auto rows = sweep(sw);
      if (sweep_csv.empty()) {
        write_sweep_csv(std::cout, rows);
      } else {
        auto out = open_out(sweep_csv);
        write_sweep_csv(out, rows);
      }
      bool ok = true;
      for (const auto& r : rows) ok = ok && r.delay_ratio <= r.bound;
      return ok ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "simjoin: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "simjoin: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
