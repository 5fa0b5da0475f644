#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cxtlms/complexity.hpp"
#include "cxtlms/error.hpp"
#include "cxtlms/experiment.hpp"
#include "cxtlms/oracle.hpp"

using namespace cxtlms;

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kNumeric = 2, kIo = 3 };

struct RunOptions {
  std::string config;
  std::string seed;
  std::size_t jobs = 0;
  std::string arch;
  std::string out;
  bool dump_state = false;
  std::vector<std::string> overrides;
};

ExperimentConfig build_config(const RunOptions& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  // --seed wins over CX_TLMS_SEED, which wins over the config file.
  if (!o.seed.empty()) {
    set_config_value(cfg, "seed", o.seed);
  } else if (const char* env = std::getenv("CX_TLMS_SEED"); env != nullptr && *env != '\0') {
    set_config_value(cfg, "seed", env);
  }
  if (o.jobs > 0) cfg.jobs = o.jobs;
  if (!o.arch.empty()) cfg.architectures = parse_architecture_list(o.arch);
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.dump_state) cfg.dump_state = true;
  cfg.validate();
  return cfg;
}

int cmd_run(const RunOptions& o) {
  const auto cfg = build_config(o);
  std::fprintf(stderr, "running %zu runs x %zu samples, seed %llu, %zu job(s)\n", cfg.scenario.n_runs,
               cfg.scenario.n_samples, static_cast<unsigned long long>(cfg.scenario.seed), cfg.jobs);
  const auto res = run_experiment(cfg);
  write_gnuplot_script(cfg.out_dir, cfg.architectures, cfg.smoothing > 1);
  std::printf("%-8s %14s %10s %12s\n", "arch", "steady_mse_db", "checks", "violations");
  for (const auto& s : res.summaries) {
    std::printf("%-8s %14.3f %10zu %12zu\n", std::string(to_string(s.kind)).c_str(), s.steady_state_db,
                s.stability_checks, s.stability_violations);
  }
  std::printf("wrote %s\n", cfg.out_dir.string().c_str());
  return kOk;
}

int cmd_complexity(const ComplexityShape& shape, bool count) {
  std::printf("P=%zu R=%zu M=%zu I=%zu\n", shape.taps, shape.rank, shape.order, shape.bins);
  std::printf("%-8s %-9s %10s %10s %6s\n", "arch", "step", "mult", "add", "div");
  for (auto k : kAllArchitectures) {
    const auto row = complexity_estimate(k, shape);
    const auto name = std::string(to_string(k));
    std::printf("%-8s %-9s %10llu %10llu %6llu\n", name.c_str(), "forward",
                static_cast<unsigned long long>(row.forward.mul), static_cast<unsigned long long>(row.forward.add),
                static_cast<unsigned long long>(row.forward.div));
    std::printf("%-8s %-9s %10llu %10llu %6llu\n", name.c_str(), "backward",
                static_cast<unsigned long long>(row.backward.mul), static_cast<unsigned long long>(row.backward.add),
                static_cast<unsigned long long>(row.backward.div));
    if (count) {
      const auto m = measure_forward(k, shape);
      std::printf("%-8s %-9s %10llu %10llu %6llu\n", name.c_str(), "counted", static_cast<unsigned long long>(m.mul),
                  static_cast<unsigned long long>(m.add), static_cast<unsigned long long>(m.div));
    }
  }
  return kOk;
}

int cmd_gradcheck(std::size_t states, std::uint64_t seed, double tol) {
  const auto results = run_gradient_suite(states, seed, tol);
  bool ok = true;
  for (const auto& r : results) {
    std::printf("%-18s checks %5zu  worst rel err %.3e at (%zu, %zu)  h=%g  %s\n", r.name.c_str(), r.checks,
                r.worst.max_relative_error, r.worst.worst_row, r.worst.worst_col, r.worst.step,
                r.passed ? "ok" : "FAIL");
    ok = ok && r.passed;
  }
  return ok ? kOk : kNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Complex-valued tensor-LMS system identification experiments"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Monte-Carlo learning-curve experiment");
  run->add_option("--config", run_opts.config, "INI file with key = value settings")->check(CLI::ExistingFile);
  run->add_option("--seed", run_opts.seed, "master seed (falls back to CX_TLMS_SEED)");
  run->add_option("--jobs", run_opts.jobs, "parallel runs");
  run->add_option("--arch", run_opts.arch, "tlms2r, ttlms, ctlms, a comma list, or all");
  run->add_option("--out", run_opts.out, "output directory");
  run->add_flag("--dump-state", run_opts.dump_state, "write final factor matrices and weights");
  run->add_option("--set", run_opts.overrides, "override a config key, e.g. --set n_runs=4")->take_all();

  ComplexityShape shape;
  bool count = false;
  auto* complexity = app.add_subcommand("complexity", "per-sample operation counts");
  complexity->add_option("--taps,-P", shape.taps)->check(CLI::PositiveNumber);
  complexity->add_option("--rank,-R", shape.rank)->check(CLI::PositiveNumber);
  complexity->add_option("--order,-M", shape.order)->check(CLI::PositiveNumber);
  complexity->add_option("--bins,-I", shape.bins)->check(CLI::PositiveNumber);
  complexity->add_flag("--count", count, "also run the instrumented forward pass");

  std::size_t states = 100;
  std::uint64_t grad_seed = 1;
  double tol = 1e-6;
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of every update direction");
  gradcheck->add_option("--states", states, "random states per architecture")->check(CLI::PositiveNumber);
  gradcheck->add_option("--seed", grad_seed);
  gradcheck->add_option("--tol", tol);

  std::string plot_out = "out";
  std::string plot_arch = "all";
  bool raw = false;
  auto* plot = app.add_subcommand("plot", "write a gnuplot script for the curves in an output directory");
  plot->add_option("--out", plot_out);
  plot->add_option("--arch", plot_arch);
  plot->add_flag("--raw", raw, "plot mse_curve.csv instead of the smoothed curve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*complexity) return cmd_complexity(shape, count);
    if (*gradcheck) return cmd_gradcheck(states, grad_seed, tol);
    if (*plot) {
      write_gnuplot_script(plot_out, parse_architecture_list(plot_arch), !raw);
      std::printf("wrote %s/plot.gp\n", plot_out.c_str());
      return kOk;
    }
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric abort: %s\n", e.what());
    return kNumeric;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kIo;
  } catch (const Error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  }
  return kOk;
}
