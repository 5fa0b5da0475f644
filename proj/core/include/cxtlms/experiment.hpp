#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cxtlms/scenario.hpp"
#include "cxtlms/tlms.hpp"

namespace cxtlms {

struct ExperimentConfig {
  ScenarioConfig scenario;
  std::vector<ArchitectureKind> architectures{std::begin(kAllArchitectures), std::end(kAllArchitectures)};
  std::filesystem::path out_dir = "out";
  std::size_t jobs = 1;
  std::size_t smoothing = 512;  // presentation-only moving average; 1 disables
  bool dump_state = false;
  double steady_state_fraction = 0.1;

  void validate() const;
};

/// Reads flat `key = value` pairs (INI syntax; section headers are accepted
/// and ignored). Keys not present keep their defaults. Throws ConfigError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies one key/value pair; used by the file parser and by CLI overrides.
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// "all" or a comma separated list of architecture names.
std::vector<ArchitectureKind> parse_architecture_list(std::string_view text);

struct ArchitectureTrace {
  ArchitectureKind kind{};
  std::vector<double> squared_error;  // |d_n - y_hat_n|^2 per sample
  double final_mse_db = 0.0;          // steady-state window of this run
  std::size_t stability_checks = 0;
  std::size_t stability_violations = 0;
  double worst_stability_factor = 0.0;
  std::vector<NamedMatrix> final_state;  // filled only with dump_state
};

struct RunResult {
  std::size_t run = 0;  // 1-based
  std::uint64_t duplexer_seed = 0;
  std::vector<ArchitectureTrace> traces;
};

struct ArchitectureSummary {
  ArchitectureKind kind{};
  std::vector<double> mean_mse;  // linear, averaged over runs
  std::vector<double> mse_db;
  double steady_state_db = 0.0;
  std::size_t stability_checks = 0;
  std::size_t stability_violations = 0;
  double worst_stability_factor = 0.0;
};

struct ExperimentResult {
  std::vector<RunResult> runs;
  std::vector<ArchitectureSummary> summaries;

  const ArchitectureSummary& summary(ArchitectureKind kind) const;
};

/// One Monte-Carlo run: fresh duplexer, excitation and noise, every selected
/// architecture driven over the same (x, y) stream. Throws NumericError when
/// any estimator state turns non-finite.
RunResult simulate_run(const ExperimentConfig& cfg, std::size_t run);

/// All runs (in parallel up to cfg.jobs) plus per-architecture aggregates.
/// No file output.
ExperimentResult simulate_experiment(const ExperimentConfig& cfg);

/// Writes mse_curve.csv, summary.csv, steady_state.csv, the smoothed curve
/// when enabled and state dumps when requested. Throws IoError.
void write_experiment(const ExperimentConfig& cfg, const ExperimentResult& result);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// 17 significant digits, '.' decimal separator.
std::string format_double(double v);
std::string format_complex(Complex v);
Complex parse_complex(std::string_view text);

/// Matrix dump: header "rows=I cols=R field=real|complex", then one comma
/// separated line per row; complex entries written as "re+imj".
void write_matrix_csv(const std::filesystem::path& path, const AnyMatrix& m);
AnyMatrix read_matrix_csv(const std::filesystem::path& path);

/// gnuplot script plotting the curve CSVs found in out_dir.
void write_gnuplot_script(const std::filesystem::path& out_dir, const std::vector<ArchitectureKind>& archs,
                          bool smoothed);

}  // namespace cxtlms
