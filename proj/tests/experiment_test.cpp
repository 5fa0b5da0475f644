#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "cxtlms/experiment.hpp"
#include "cxtlms/rng.hpp"

using namespace cxtlms;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cxtlms_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

ExperimentConfig tiny_config(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.scenario.n_samples = 1000;
  cfg.scenario.n_runs = 1;
  cfg.scenario.seed = 17;
  cfg.out_dir = out;
  cfg.smoothing = 16;
  return cfg;
}

}  // namespace

TEST(Config, ParsesKeysAndSections) {
  std::istringstream in(
      "taps = 8\n"
      "rank=4\n"
      "snr_db = inf\n"
      "[steps]\n"
      "ctlms_mu_tensor = 0.02\n"
      "arch = ctlms, ttlms\n"
      "dump_state = yes\n");
  const auto cfg = parse_config(in);
  EXPECT_EQ(cfg.scenario.taps, 8u);
  EXPECT_EQ(cfg.scenario.rank, 4u);
  EXPECT_TRUE(std::isinf(cfg.scenario.snr_db));
  EXPECT_EQ(cfg.scenario.ctlms.mu_tensor, 0.02);
  EXPECT_EQ(cfg.architectures, (std::vector<ArchitectureKind>{ArchitectureKind::Ctlms, ArchitectureKind::Ttlms}));
  EXPECT_TRUE(cfg.dump_state);
  EXPECT_EQ(cfg.scenario.n_runs, 20u);
}

TEST(Config, Errors) {
  std::istringstream unknown("tapz = 8\n");
  EXPECT_THROW(parse_config(unknown), ConfigError);
  std::istringstream bad_number("taps = eight\n");
  EXPECT_THROW(parse_config(bad_number), ConfigError);
  std::istringstream out_of_range("ar_coeff = 1.5\n");
  EXPECT_THROW(parse_config(out_of_range), ConfigError);
  std::istringstream negative("n_runs = -1\n");
  EXPECT_THROW(parse_config(negative), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/cxtlms.ini"), ConfigError);
}

TEST(Config, ArchitectureList) {
  EXPECT_EQ(parse_architecture_list("all").size(), 3u);
  EXPECT_EQ(parse_architecture_list("ttlms,all").front(), ArchitectureKind::Ttlms);
  EXPECT_EQ(parse_architecture_list("ctlms,ctlms").size(), 1u);
  EXPECT_THROW(parse_architecture_list(""), ConfigError);
  EXPECT_THROW(parse_architecture_list("ctlms,foo"), ConfigError);
}

TEST(Config, OverridesApply) {
  ExperimentConfig cfg;
  set_config_value(cfg, "seed", "99");
  set_config_value(cfg, "jobs", "4");
  EXPECT_EQ(cfg.scenario.seed, 99u);
  EXPECT_EQ(cfg.jobs, 4u);
  EXPECT_THROW(set_config_value(cfg, "jobs", "1.5"), ConfigError);
}

TEST(Numbers, FormatRoundTrip) {
  Rng rng(1);
  std::normal_distribution<double> g(0.0, 1e3);
  for (int k = 0; k < 1000; ++k) {
    const double v = g(rng) * std::pow(10.0, static_cast<int>(k % 40) - 20);
    EXPECT_EQ(std::stod(format_double(v)), v);
    const Complex c(g(rng), -v);
    EXPECT_EQ(parse_complex(format_complex(c)), c);
  }
  EXPECT_EQ(parse_complex("1e-05-2.5e+03j"), Complex(1e-5, -2.5e3));
  EXPECT_EQ(parse_complex("-0+1j"), Complex(0, 1));
  EXPECT_THROW(parse_complex("1+2"), IoError);
  EXPECT_THROW(parse_complex("abcj"), IoError);
}

TEST(MatrixCsv, RoundTrip) {
  const auto dir = scratch_dir("matrix");
  fs::create_directories(dir);
  Rng rng(2);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  Matrix<double> r(4, 3);
  for (auto& v : r.values()) v = u(rng);
  Matrix<Complex> c(2, 5);
  for (auto& v : c.values()) {
    const double re = u(rng);
    v = {re, u(rng) * 1e-7};
  }
  write_matrix_csv(dir / "r.csv", r);
  write_matrix_csv(dir / "c.csv", c);
  EXPECT_EQ(first_line(dir / "r.csv"), "rows=4 cols=3 field=real");
  EXPECT_EQ(first_line(dir / "c.csv"), "rows=2 cols=5 field=complex");
  EXPECT_EQ(std::get<Matrix<double>>(read_matrix_csv(dir / "r.csv")), r);
  EXPECT_EQ(std::get<Matrix<Complex>>(read_matrix_csv(dir / "c.csv")), c);
  std::ofstream(dir / "bad.csv") << "rows=2 cols=2 field=real\n1,2\n";
  EXPECT_THROW(read_matrix_csv(dir / "bad.csv"), IoError);
  fs::remove_all(dir);
}

TEST(Experiment, DeterministicFiles) {
  const auto a = scratch_dir("det_a");
  const auto b = scratch_dir("det_b");
  auto cfg_a = tiny_config(a);
  auto cfg_b = tiny_config(b);
  cfg_b.jobs = 2;
  run_experiment(cfg_a);
  run_experiment(cfg_b);
  for (const char* name : {"mse_curve.csv", "mse_curve_smoothed.csv", "summary.csv", "steady_state.csv"}) {
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
  EXPECT_EQ(first_line(a / "mse_curve.csv"), "n,arch,mse_db");
  EXPECT_EQ(first_line(a / "summary.csv"), "run,arch,final_mse_db");
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Experiment, SeedChangesOutput) {
  const auto a = scratch_dir("seed_a");
  const auto b = scratch_dir("seed_b");
  auto cfg_a = tiny_config(a);
  auto cfg_b = tiny_config(b);
  cfg_b.scenario.seed = 18;
  run_experiment(cfg_a);
  run_experiment(cfg_b);
  EXPECT_NE(slurp(a / "mse_curve.csv"), slurp(b / "mse_curve.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Experiment, CurveValuesFinite) {
  auto cfg = tiny_config(scratch_dir("finite"));
  cfg.scenario.n_runs = 2;
  const auto res = simulate_experiment(cfg);
  ASSERT_EQ(res.summaries.size(), 3u);
  for (const auto& s : res.summaries) {
    EXPECT_EQ(s.mse_db.size(), 1000u);
    for (double v : s.mse_db) EXPECT_TRUE(std::isfinite(v));
    EXPECT_EQ(s.stability_violations, 0u);
    EXPECT_GT(s.stability_checks, 0u);
  }
  EXPECT_EQ(res.runs[0].run, 1u);
  EXPECT_EQ(res.runs[1].run, 2u);
  EXPECT_NE(res.runs[0].duplexer_seed, res.runs[1].duplexer_seed);
}

TEST(Experiment, SharedSignalAcrossArchitectures) {
  // Running one architecture alone gives the same trace as running it with
  // the others, since all see the same (x, y) stream.
  auto all = tiny_config(scratch_dir("shared"));
  auto one = all;
  one.architectures = {ArchitectureKind::Ttlms};
  const auto ra = simulate_run(all, 1);
  const auto ro = simulate_run(one, 1);
  EXPECT_EQ(ra.traces[1].squared_error, ro.traces[0].squared_error);
}

TEST(Experiment, NanGuardNamesArchitectureAndSample) {
  auto cfg = tiny_config(scratch_dir("nan"));
  cfg.scenario.init_low = 1e200;
  cfg.scenario.init_high = 1e200;
  cfg.architectures = {ArchitectureKind::Ctlms};
  try {
    run_experiment(cfg);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("ctlms"), std::string::npos);
    EXPECT_NE(what.find("sample 0"), std::string::npos);
  }
  EXPECT_FALSE(fs::exists(cfg.out_dir / "mse_curve.csv"));
}

TEST(Experiment, DumpState) {
  const auto dir = scratch_dir("dump");
  auto cfg = tiny_config(dir);
  cfg.dump_state = true;
  cfg.architectures = {ArchitectureKind::Ctlms, ArchitectureKind::Tlms2R};
  run_experiment(cfg);
  EXPECT_EQ(first_line(dir / "state" / "run001_ctlms_A1.csv"), "rows=32 cols=10 field=complex");
  EXPECT_EQ(first_line(dir / "state" / "run001_ctlms_w.csv"), "rows=16 cols=1 field=complex");
  EXPECT_EQ(first_line(dir / "state" / "run001_tlms2r_im_A2.csv"), "rows=32 cols=10 field=real");
  fs::remove_all(dir);
}

TEST(Experiment, UnwritableOutputIsIoError) {
  auto cfg = tiny_config("/proc/cxtlms_cannot_write_here");
  cfg.architectures = {ArchitectureKind::Tlms2R};
  EXPECT_THROW(run_experiment(cfg), IoError);
}

TEST(Experiment, GnuplotScript) {
  const auto dir = scratch_dir("gp");
  write_gnuplot_script(dir, {ArchitectureKind::Tlms2R, ArchitectureKind::Ctlms}, true);
  const auto text = slurp(dir / "plot.gp");
  EXPECT_NE(text.find("mse_curve_smoothed.csv"), std::string::npos);
  EXPECT_NE(text.find("'tlms2r'"), std::string::npos);
  EXPECT_NE(text.find("'ctlms'"), std::string::npos);
  fs::remove_all(dir);
}

// Default scenario without noise: the run-averaged MSE over the last 10% of
// samples must sit at least 20 dB below the first 10%.
TEST(Experiment, NoiselessCtlmsConverges) {
  ExperimentConfig cfg;
  cfg.scenario.snr_db = std::numeric_limits<double>::infinity();
  cfg.architectures = {ArchitectureKind::Ctlms};
  cfg.jobs = std::max(1u, std::thread::hardware_concurrency());
  const auto res = simulate_experiment(cfg);
  const auto& mse = res.summary(ArchitectureKind::Ctlms).mean_mse;
  const std::size_t w = mse.size() / 10;
  double head = 0.0;
  double tail = 0.0;
  for (std::size_t n = 0; n < w; ++n) {
    head += mse[n];
    tail += mse[mse.size() - w + n];
  }
  EXPECT_LE(10.0 * std::log10(tail / head), -20.0)
      << "initial window " << power_db(head / w) << " dB, final window " << power_db(tail / w) << " dB";
}
