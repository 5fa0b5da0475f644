#include "cxtlms/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>
#include <variant>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cxtlms/rng.hpp"

namespace cxtlms {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  // from_chars rejects a leading '+'.
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("config: '" + std::string(key) + "' expects a number, got '" + t + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("config: '" + std::string(key) + "' expects a non-negative integer, got '" + t + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ConfigError("config: '" + std::string(key) + "' expects a boolean, got '" + t + "'");
}

using Setter = std::function<void(ExperimentConfig&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto size_field = [](std::size_t ScenarioConfig::*f) {
      return [f](ExperimentConfig& c, std::string_view k, std::string_view v) {
        c.scenario.*f = static_cast<std::size_t>(parse_unsigned(k, v));
      };
    };
    auto real_field = [](double ScenarioConfig::*f) {
      return [f](ExperimentConfig& c, std::string_view k, std::string_view v) { c.scenario.*f = parse_double(k, v); };
    };
    auto step_field = [](ArchitectureSteps ScenarioConfig::*arch, double ArchitectureSteps::*f) {
      return [arch, f](ExperimentConfig& c, std::string_view k, std::string_view v) {
        c.scenario.*arch.*f = parse_double(k, v);
      };
    };
    t["taps"] = size_field(&ScenarioConfig::taps);
    t["rank"] = size_field(&ScenarioConfig::rank);
    t["order"] = size_field(&ScenarioConfig::order);
    t["n_samples"] = size_field(&ScenarioConfig::n_samples);
    t["n_runs"] = size_field(&ScenarioConfig::n_runs);
    t["n_bins"] = size_field(&ScenarioConfig::n_bins);
    t["ar_coeff"] = real_field(&ScenarioConfig::ar_coeff);
    t["snr_db"] = real_field(&ScenarioConfig::snr_db);
    t["epsilon"] = real_field(&ScenarioConfig::epsilon);
    t["delta_x"] = real_field(&ScenarioConfig::delta_x);
    t["init_low"] = real_field(&ScenarioConfig::init_low);
    t["init_high"] = real_field(&ScenarioConfig::init_high);
    t["tlms2r_mu_tensor"] = step_field(&ScenarioConfig::tlms2r, &ArchitectureSteps::mu_tensor);
    t["tlms2r_mu_lms"] = step_field(&ScenarioConfig::tlms2r, &ArchitectureSteps::mu_lms);
    t["ttlms_mu_tensor"] = step_field(&ScenarioConfig::ttlms, &ArchitectureSteps::mu_tensor);
    t["ttlms_mu_lms"] = step_field(&ScenarioConfig::ttlms, &ArchitectureSteps::mu_lms);
    t["ctlms_mu_tensor"] = step_field(&ScenarioConfig::ctlms, &ArchitectureSteps::mu_tensor);
    t["ctlms_mu_lms"] = step_field(&ScenarioConfig::ctlms, &ArchitectureSteps::mu_lms);
    t["seed"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.scenario.seed = parse_unsigned(k, v);
    };
    t["arch"] = [](ExperimentConfig& c, std::string_view, std::string_view v) {
      c.architectures = parse_architecture_list(v);
    };
    t["out"] = [](ExperimentConfig& c, std::string_view, std::string_view v) { c.out_dir = trim(v); };
    t["jobs"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.jobs = static_cast<std::size_t>(parse_unsigned(k, v));
    };
    t["smoothing"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.smoothing = static_cast<std::size_t>(parse_unsigned(k, v));
    };
    t["dump_state"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.dump_state = parse_bool(k, v);
    };
    t["steady_state_fraction"] = [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.steady_state_fraction = parse_double(k, v);
    };
    return t;
  }();
  return table;
}

}  // namespace

void ExperimentConfig::validate() const {
  scenario.validate();
  if (architectures.empty()) throw ConfigError("experiment: select at least one architecture");
  if (jobs == 0) throw ConfigError("experiment: jobs must be positive");
  if (smoothing == 0) throw ConfigError("experiment: smoothing window must be positive");
  if (!(steady_state_fraction > 0.0 && steady_state_fraction <= 1.0)) {
    throw ConfigError("experiment: steady_state_fraction must lie in (0, 1]");
  }
}

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  const auto& table = setters();
  const auto it = table.find(trim(key));
  if (it == table.end()) throw ConfigError("config: unknown key '" + std::string(key) + "'");
  it->second(cfg, it->first, value);
}

ExperimentConfig parse_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      set_config_value(cfg, key, node.data());
    } else {
      for (const auto& [sub_key, sub] : node) set_config_value(cfg, sub_key, sub.data());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  return parse_config(in);
}

std::vector<ArchitectureKind> parse_architecture_list(std::string_view text) {
  std::vector<ArchitectureKind> out;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (item == "all") {
      for (auto k : kAllArchitectures) {
        if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
      }
      continue;
    }
    const auto k = parse_architecture(item);
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  }
  if (out.empty()) throw ConfigError("config: empty architecture list");
  return out;
}

// ---------------------------------------------------------------------------
// Simulation

const ArchitectureSummary& ExperimentResult::summary(ArchitectureKind kind) const {
  for (const auto& s : summaries) {
    if (s.kind == kind) return s;
  }
  throw ConfigError("experiment: architecture '" + std::string(to_string(kind)) + "' was not run");
}

RunResult simulate_run(const ExperimentConfig& cfg, std::size_t run) {
  const auto& sc = cfg.scenario;
  const std::uint64_t master = sc.seed;
  RunResult result;
  result.run = run;
  result.duplexer_seed = derive_seed(master, {run, 0});

  const auto x = gen_colored_noise(sc.ar_coeff, sc.n_samples, derive_seed(master, {run, 1}));
  const auto h = synth_duplexer(sc.taps, result.duplexer_seed);
  const auto target = simulate_target(x, h, sc.snr_db, derive_seed(master, {run, 2}));
  const auto disc = sc.discretizer();

  std::vector<IndexVector> indices;
  indices.reserve(x.size());
  for (const auto& v : x) indices.push_back(complex_index(v, disc));

  constexpr std::size_t kStateCheckInterval = 256;
  for (auto kind : cfg.architectures) {
    auto est = make_estimator(kind, sc.estimator_params(kind), disc,
                              derive_seed(master, {run, 3, static_cast<std::uint64_t>(kind)}));
    ArchitectureTrace trace;
    trace.kind = kind;
    trace.squared_error.resize(sc.n_samples);
    StepOutput<Complex> out;
    for (std::size_t n = 0; n < sc.n_samples; ++n) {
      out.modes.clear();
      out.estimate = est->forward(indices[n]);
      out.error = target.observed[n] - out.estimate;
      est->update(out.error, out.modes);
      const bool check_state = (n + 1) % kStateCheckInterval == 0 || n + 1 == sc.n_samples;
      if (!is_finite(out.estimate) || !is_finite(out.error) || (check_state && !est->finite())) {
        throw NumericError("non-finite value in " + std::string(to_string(kind)) + " at sample " +
                           std::to_string(n) + " of run " + std::to_string(run));
      }
      trace.squared_error[n] = std::norm(target.desired[n] - out.estimate);
      for (const auto& d : out.modes) {
        if (d.s_frobenius_sq > 0.0) {
          ++trace.stability_checks;
          trace.worst_stability_factor = std::max(trace.worst_stability_factor, d.stability_factor);
          if (d.violates_bound()) ++trace.stability_violations;
        }
      }
    }
    trace.final_mse_db = steady_state_db(trace.squared_error, cfg.steady_state_fraction);
    if (cfg.dump_state) trace.final_state = est->state_matrices();
    result.traces.push_back(std::move(trace));
  }
  return result;
}

ExperimentResult simulate_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t n_runs = cfg.scenario.n_runs;
  ExperimentResult result;
  result.runs.resize(n_runs);
  std::vector<std::exception_ptr> errors(n_runs);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t l = next++; l < n_runs; l = next++) {
      try {
        result.runs[l] = simulate_run(cfg, l + 1);
      } catch (...) {
        errors[l] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min(cfg.jobs, n_runs);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (std::size_t a = 0; a < cfg.architectures.size(); ++a) {
    ArchitectureSummary s;
    s.kind = cfg.architectures[a];
    std::vector<std::vector<double>> sq;
    sq.reserve(n_runs);
    for (const auto& r : result.runs) {
      const auto& t = r.traces[a];
      sq.push_back(t.squared_error);
      s.stability_checks += t.stability_checks;
      s.stability_violations += t.stability_violations;
      s.worst_stability_factor = std::max(s.worst_stability_factor, t.worst_stability_factor);
    }
    s.mean_mse = mean_squared_error(sq);
    s.mse_db.resize(s.mean_mse.size());
    std::transform(s.mean_mse.begin(), s.mean_mse.end(), s.mse_db.begin(), power_db);
    s.steady_state_db = steady_state_db(s.mean_mse, cfg.steady_state_fraction);
    result.summaries.push_back(std::move(s));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Output

std::string format_double(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::string format_complex(Complex v) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%.17g%+.17gj", v.real(), v.imag());
  return std::string(buf, static_cast<std::size_t>(n));
}

Complex parse_complex(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty() || t.back() != 'j') throw IoError("matrix csv: bad complex entry '" + t + "'");
  // Split at the sign that starts the imaginary part: the last '+' or '-'
  // that is neither leading nor part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t i = t.size() - 1; i > 0; --i) {
    if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) throw IoError("matrix csv: bad complex entry '" + t + "'");
  try {
    return {parse_double("re", t.substr(0, split)), parse_double("im", t.substr(split, t.size() - split - 1))};
  } catch (const ConfigError&) {
    throw IoError("matrix csv: bad complex entry '" + t + "'");
  }
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void make_dirs(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

void write_curve(const std::filesystem::path& path, const std::vector<ArchitectureSummary>& summaries,
                 std::size_t window) {
  auto out = open_for_write(path);
  out << "n,arch,mse_db\n";
  for (const auto& s : summaries) {
    const auto name = to_string(s.kind);
    if (window > 1) {
      const auto smooth = moving_average(s.mean_mse, window);
      for (std::size_t n = 0; n < smooth.size(); ++n) {
        out << n << ',' << name << ',' << format_double(power_db(smooth[n])) << '\n';
      }
    } else {
      for (std::size_t n = 0; n < s.mse_db.size(); ++n) {
        out << n << ',' << name << ',' << format_double(s.mse_db[n]) << '\n';
      }
    }
  }
  finish(out, path);
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path, const AnyMatrix& any) {
  auto out = open_for_write(path);
  std::visit(
      [&out](const auto& m) {
        using T = typename std::decay_t<decltype(m)>::value_type;
        out << "rows=" << m.rows() << " cols=" << m.cols() << " field=" << (is_complex_v<T> ? "complex" : "real")
            << '\n';
        for (std::size_t i = 0; i < m.rows(); ++i) {
          for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            if constexpr (is_complex_v<T>) {
              out << format_complex(m(i, j));
            } else {
              out << format_double(m(i, j));
            }
          }
          out << '\n';
        }
      },
      any);
  finish(out, path);
}

AnyMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::string header;
  std::getline(in, header);
  std::size_t rows = 0;
  std::size_t cols = 0;
  char field[16] = {};
  if (std::sscanf(header.c_str(), "rows=%zu cols=%zu field=%15s", &rows, &cols, field) != 3) {
    throw IoError("matrix csv: bad header in '" + path.string() + "'");
  }
  const std::string kind(field);
  if (kind != "real" && kind != "complex") throw IoError("matrix csv: unknown field '" + kind + "'");

  auto read_rows = [&](auto parse, auto& m) {
    std::string line;
    for (std::size_t i = 0; i < rows; ++i) {
      if (!std::getline(in, line)) throw IoError("matrix csv: truncated '" + path.string() + "'");
      std::stringstream ss(line);
      std::string cell;
      std::size_t j = 0;
      while (std::getline(ss, cell, ',')) {
        if (j >= cols) throw IoError("matrix csv: too many columns");
        m(i, j++) = parse(cell);
      }
      if (j != cols) throw IoError("matrix csv: too few columns");
    }
  };
  if (kind == "real") {
    Matrix<double> m(rows, cols);
    read_rows(
        [](const std::string& c) {
          try {
            return parse_double("entry", c);
          } catch (const ConfigError&) {
            throw IoError("matrix csv: bad real entry '" + c + "'");
          }
        },
        m);
    return m;
  }
  Matrix<Complex> m(rows, cols);
  read_rows([](const std::string& c) { return parse_complex(c); }, m);
  return m;
}

void write_experiment(const ExperimentConfig& cfg, const ExperimentResult& result) {
  for (const auto& s : result.summaries) {
    for (double v : s.mse_db) {
      if (!std::isfinite(v)) throw NumericError("non-finite MSE for " + std::string(to_string(s.kind)));
    }
  }
  make_dirs(cfg.out_dir);
  write_curve(cfg.out_dir / "mse_curve.csv", result.summaries, 1);
  if (cfg.smoothing > 1) write_curve(cfg.out_dir / "mse_curve_smoothed.csv", result.summaries, cfg.smoothing);

  {
    const auto path = cfg.out_dir / "summary.csv";
    auto out = open_for_write(path);
    out << "run,arch,final_mse_db\n";
    for (const auto& r : result.runs) {
      for (const auto& t : r.traces) {
        out << r.run << ',' << to_string(t.kind) << ',' << format_double(t.final_mse_db) << '\n';
      }
    }
    finish(out, path);
  }
  {
    const auto path = cfg.out_dir / "steady_state.csv";
    auto out = open_for_write(path);
    out << "arch,steady_state_mse_db,stability_checks,stability_violations\n";
    for (const auto& s : result.summaries) {
      out << to_string(s.kind) << ',' << format_double(s.steady_state_db) << ',' << s.stability_checks << ','
          << s.stability_violations << '\n';
    }
    finish(out, path);
  }

  if (cfg.dump_state) {
    const auto dir = cfg.out_dir / "state";
    make_dirs(dir);
    for (const auto& r : result.runs) {
      for (const auto& t : r.traces) {
        for (const auto& nm : t.final_state) {
          char name[128];
          std::snprintf(name, sizeof name, "run%03zu_%s_%s.csv", r.run, std::string(to_string(t.kind)).c_str(),
                        nm.name.c_str());
          write_matrix_csv(dir / name, nm.matrix);
        }
      }
    }
  }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  auto result = simulate_experiment(cfg);
  write_experiment(cfg, result);
  return result;
}

void write_gnuplot_script(const std::filesystem::path& out_dir, const std::vector<ArchitectureKind>& archs,
                          bool smoothed) {
  make_dirs(out_dir);
  const auto path = out_dir / "plot.gp";
  auto out = open_for_write(path);
  const std::string csv = smoothed ? "mse_curve_smoothed.csv" : "mse_curve.csv";
  out << "# gnuplot -p plot.gp  (run from the output directory)\n"
      << "set datafile separator ','\n"
      << "set key top right\n"
      << "set xlabel 'sample n'\n"
      << "set ylabel 'MSE [dB]'\n"
      << "set grid\n"
      << "plot \\\n";
  for (std::size_t a = 0; a < archs.size(); ++a) {
    const auto name = std::string(to_string(archs[a]));
    out << "  '" << csv << "' using 1:(strcol(2) eq '" << name << "' ? $3 : 1/0) with lines title '" << name
        << "'" << (a + 1 < archs.size() ? ", \\\n" : "\n");
  }
  finish(out, path);
}

}  // namespace cxtlms
