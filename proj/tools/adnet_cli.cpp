// Command-line front end: single experiments, parameter sweeps, the full
// verification battery, and trace-file utilities.
//
// Exit code 0 means every requested check passed; anything else is a usage
// error or at least one failed run.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adnet/harness.hpp"

namespace {

using namespace adnet;

void print_violations(std::ostream& os, const RunResult& res) {
  for (const auto& v : res.violations)
    os << "violation " << v.check << " first at round " << v.round << " (x"
       << v.count << "): " << v.detail << "\n";
}

struct RunArgs {
  ExperimentConfig cfg;
  std::string dump_tree_path;
  bool quiet = false;
};

int do_run(const RunArgs& args) {
  RunResult res = run_experiment(args.cfg);
  if (!args.quiet)
    std::cout << csv_header() << "\n" << csv_row(res) << "\n";
  if (res.timed_out) {
    std::cout << "output timeout\n";
  } else if (res.count) {
    std::cout << "output " << *res.count << "\n";
    if (!res.values.empty()) {
      std::cout << "values";
      for (auto [value, mult] : res.values)
        std::cout << ' ' << value << ':' << mult;
      std::cout << "\n";
    }
  } else {
    std::cout << "output none\n";
  }
  print_violations(std::cout, res);
  if (!args.dump_tree_path.empty()) {
    if (args.dump_tree_path == "-") {
      std::cout << dump_tree(res.effective);
    } else {
      std::ofstream os(args.dump_tree_path);
      if (!os) {
        std::cerr << "cannot write " << args.dump_tree_path << "\n";
        return 1;
      }
      os << dump_tree(res.effective);
    }
  }
  return res.ok() ? 0 : 1;
}

struct SweepArgs {
  ExperimentConfig base;
  int n_min = 1;
  int n_max = 1;
  std::vector<std::uint64_t> seeds = {0};
  std::string out_path;
};

int do_sweep(const SweepArgs& args) {
  std::vector<int> ns;
  for (int n = args.n_min; n <= args.n_max; ++n) ns.push_back(n);
  auto rows = sweep(args.base, ns, args.seeds);

  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!args.out_path.empty()) {
    file.open(args.out_path);
    if (!file) {
      std::cerr << "cannot write " << args.out_path << "\n";
      return 1;
    }
    os = &file;
  }
  *os << csv_header() << "\n";
  bool all_ok = true;
  for (const auto& r : rows) {
    *os << csv_row(r) << "\n";
    if (!r.ok()) {
      all_ok = false;
      print_violations(std::cerr, r);
    }
  }
  return all_ok ? 0 : 1;
}

// The verification battery: counting with live monitors across schedulers,
// forced-fault recovery, the mode extensions, and reproducibility.
int do_verify(int max_n, const std::vector<std::uint64_t>& seeds) {
  int failures = 0;
  auto report = [&](const std::string& name, bool pass,
                    const std::string& detail = "") {
    std::cout << (pass ? "PASS " : "FAIL ") << name;
    if (!pass && !detail.empty()) std::cout << ": " << detail;
    std::cout << "\n";
    if (!pass) ++failures;
  };
  auto run_ok = [&](ExperimentConfig cfg, const std::string& name,
                    std::optional<std::int64_t> expect_count) {
    RunResult res = run_experiment(cfg);
    bool pass = res.ok() && (!expect_count || res.count == expect_count);
    std::string detail;
    if (!pass) {
      if (res.timed_out)
        detail = "timed out";
      else if (!res.count)
        detail = "no output";
      else if (expect_count && res.count != expect_count)
        detail = "output " + std::to_string(*res.count) + " instead of " +
                 std::to_string(*expect_count);
      for (const auto& v : res.violations)
        detail += (detail.empty() ? "" : "; ") + v.check + " at round " +
                  std::to_string(v.round);
    }
    report(name, pass, detail);
  };

  for (int n = 1; n <= max_n; ++n) {
    for (const char* sched : {"star", "path", "alt:star,path,cycle"}) {
      ExperimentConfig cfg;
      cfg.n = n;
      cfg.scheduler = sched;
      run_ok(cfg, "invariants n=" + std::to_string(n) + " " + sched, n);
    }
    for (auto seed : seeds) {
      ExperimentConfig cfg;
      cfg.n = n;
      cfg.scheduler = "random";
      cfg.seed = seed;
      run_ok(cfg,
             "invariants n=" + std::to_string(n) + " random seed " +
                 std::to_string(seed),
             n);
    }
  }

  for (int n = 2; n <= max_n; ++n) {
    ExperimentConfig cfg;
    cfg.n = n;
    cfg.scheduler = "star";
    cfg.fault_cut = true;
    RunResult res = run_experiment(cfg);
    bool pass = res.ok() && res.count == n && res.metrics.resets >= 1;
    report("fault recovery n=" + std::to_string(n), pass,
           pass ? "" : "resets " + std::to_string(res.metrics.resets));
  }

  for (int n = 1; n <= std::min(max_n, 6); ++n) {
    ExperimentConfig cfg;
    cfg.n = n;
    cfg.scheduler = "path";
    cfg.mode = "simultaneous";
    run_ok(cfg, "simultaneous n=" + std::to_string(n), n);
  }
  for (int n = 2; n <= std::min(max_n, 6); ++n) {
    ExperimentConfig cfg;
    cfg.n = n;
    cfg.scheduler = "random";
    cfg.seed = seeds.empty() ? 0 : seeds.front();
    cfg.mode = "generalized";
    run_ok(cfg, "generalized n=" + std::to_string(n), n);
  }
  for (int T : {2, 3}) {
    ExperimentConfig cfg;
    cfg.n = 3;
    cfg.scheduler = "tunion:" + std::to_string(T);
    cfg.mode = cfg.scheduler;
    cfg.seed = 1;
    run_ok(cfg, "block union T=" + std::to_string(T), 3);
  }

  {
    ExperimentConfig cfg;
    cfg.n = std::min(max_n, 5);
    cfg.scheduler = "random";
    cfg.seed = 7;
    std::string a = csv_row(run_experiment(cfg));
    std::string b = csv_row(run_experiment(cfg));
    report("reproducible rows", a == b);
  }

  std::cout << (failures == 0 ? "verification passed"
                              : "verification failed (" +
                                    std::to_string(failures) + " checks)")
            << "\n";
  return failures == 0 ? 0 : 1;
}

int do_trace_gen(int n, const std::string& scheduler, std::uint64_t seed,
                 int rounds, int T, const std::string& out_path) {
  auto sched = make_scheduler(
      scheduler == "random-connected" ? "random" : scheduler, n, seed);
  Trace trace;
  trace.n = n;
  trace.T = T;
  for (int r = 1; r <= rounds; ++r) trace.rounds.push_back(sched->round(r));

  if (out_path.empty() || out_path == "-") {
    write_trace(std::cout, trace);
    return 0;
  }
  std::ofstream os(out_path);
  if (!os) {
    std::cerr << "cannot write " << out_path << "\n";
    return 1;
  }
  write_trace(os, trace);
  return 0;
}

int do_trace_show(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    std::cerr << "cannot read " << path << "\n";
    return 1;
  }
  Trace trace;
  try {
    trace = parse_trace(is);
  } catch (const std::exception& e) {
    std::cerr << "invalid trace: " << e.what() << "\n";
    return 1;
  }
  std::int64_t links = 0;
  for (const auto& g : trace.rounds) links += g.total_link_mult();
  std::cout << "n " << trace.n << " T " << trace.T << " rounds "
            << trace.rounds.size() << " total-link-multiplicity " << links
            << "\n";
  write_trace(std::cout, trace);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Deterministic simulator and experiment harness for counting in "
      "congested anonymous dynamic networks"};
  app.require_subcommand(1);
  int exit_code = 0;

  // --- run -------------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "Run a single experiment");
  auto run_args = std::make_shared<RunArgs>();
  run_cmd->add_option("--n", run_args->cfg.n, "number of processes")
      ->required()
      ->check(CLI::Range(1, 1000000));
  run_cmd->add_option(
      "--scheduler", run_args->cfg.scheduler,
      "star | path | cycle | random | random-connected | alt:a,b,... | "
      "tunion:<T> | trace:<file>");
  run_cmd->add_option("--seed", run_args->cfg.seed, "random seed");
  run_cmd->add_option("--mode", run_args->cfg.mode,
                      "basic | simultaneous | generalized | tunion:<T>");
  run_cmd
      ->add_option("--inputs", run_args->cfg.inputs,
                   "generalized-mode inputs, one per non-leader")
      ->delimiter(',');
  run_cmd->add_option("--budget", run_args->cfg.round_budget,
                      "round budget (0 = automatic)");
  run_cmd->add_flag("!--no-invariants", run_args->cfg.check_invariants,
                    "skip the per-round monitors");
  run_cmd->add_flag("--fault-cut", run_args->cfg.fault_cut,
                    "isolate the last process during an acknowledgment phase");
  run_cmd->add_option("--fault-after", run_args->cfg.fault_cut_after_round,
                      "earliest round for the fault cut");
  run_cmd->add_option("--dump-tree", run_args->dump_tree_path,
                      "write the leader's final tree ('-' for stdout)");
  run_cmd->add_flag("--quiet", run_args->quiet, "suppress the CSV block");
  run_cmd->callback([run_args, &exit_code] { exit_code = do_run(*run_args); });

  // --- sweep -----------------------------------------------------------
  auto* sweep_cmd =
      app.add_subcommand("sweep", "Run a grid of experiments, emit CSV");
  auto sweep_args = std::make_shared<SweepArgs>();
  sweep_cmd->add_option("--n-min", sweep_args->n_min, "smallest n")
      ->check(CLI::Range(1, 1000000));
  sweep_cmd->add_option("--n-max", sweep_args->n_max, "largest n")
      ->required()
      ->check(CLI::Range(1, 1000000));
  sweep_cmd->add_option("--seeds", sweep_args->seeds, "seeds, one run per seed")
      ->delimiter(',');
  sweep_cmd->add_option("--scheduler", sweep_args->base.scheduler,
                        "scheduler spec (see run)");
  sweep_cmd->add_option("--mode", sweep_args->base.mode, "mode (see run)");
  sweep_cmd->add_option("--budget", sweep_args->base.round_budget,
                        "round budget (0 = automatic)");
  sweep_cmd->add_flag("!--no-invariants", sweep_args->base.check_invariants,
                      "skip the per-round monitors");
  sweep_cmd->add_option("--out", sweep_args->out_path, "CSV output file");
  sweep_cmd->callback(
      [sweep_args, &exit_code] { exit_code = do_sweep(*sweep_args); });

  // --- verify ----------------------------------------------------------
  auto* verify_cmd =
      app.add_subcommand("verify", "Run the full verification battery");
  auto verify_max_n = std::make_shared<int>(8);
  auto verify_seeds = std::make_shared<std::vector<std::uint64_t>>(
      std::vector<std::uint64_t>{1, 2});
  verify_cmd->add_option("--max-n", *verify_max_n, "largest process count")
      ->check(CLI::Range(1, 1000000));
  verify_cmd->add_option("--seeds", *verify_seeds, "seeds for random topologies")
      ->delimiter(',');
  verify_cmd->callback([verify_max_n, verify_seeds, &exit_code] {
    exit_code = do_verify(*verify_max_n, *verify_seeds);
  });

  // --- trace -----------------------------------------------------------
  auto* trace_cmd = app.add_subcommand("trace", "Trace-file utilities");
  trace_cmd->require_subcommand(1);

  auto* gen_cmd = trace_cmd->add_subcommand(
      "gen", "Record scheduler rounds into a trace file");
  auto gen_n = std::make_shared<int>(0);
  auto gen_sched = std::make_shared<std::string>("random");
  auto gen_seed = std::make_shared<std::uint64_t>(0);
  auto gen_rounds = std::make_shared<int>(10);
  auto gen_T = std::make_shared<int>(1);
  auto gen_out = std::make_shared<std::string>();
  gen_cmd->add_option("--n", *gen_n, "number of processes")
      ->required()
      ->check(CLI::Range(1, 1000000));
  gen_cmd->add_option("--scheduler", *gen_sched, "scheduler spec");
  gen_cmd->add_option("--seed", *gen_seed, "random seed");
  gen_cmd->add_option("--rounds", *gen_rounds, "rounds to record")
      ->check(CLI::Range(1, 1000000));
  gen_cmd->add_option("--T", *gen_T, "union block size stored in the header")
      ->check(CLI::Range(1, 1000000));
  gen_cmd->add_option("--out", *gen_out, "output file ('-' for stdout)");
  gen_cmd->callback([=, &exit_code] {
    exit_code =
        do_trace_gen(*gen_n, *gen_sched, *gen_seed, *gen_rounds, *gen_T,
                     *gen_out);
  });

  auto* show_cmd =
      trace_cmd->add_subcommand("show", "Validate and echo a trace file");
  auto show_file = std::make_shared<std::string>();
  show_cmd->add_option("--file", *show_file, "trace file")->required();
  show_cmd->callback(
      [show_file, &exit_code] { exit_code = do_trace_show(*show_file); });

  CLI11_PARSE(app, argc, argv);
  return exit_code;
}
