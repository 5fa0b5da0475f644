#include "cxtlms/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "cxtlms/error.hpp"
#include "cxtlms/rng.hpp"

namespace cxtlms {

namespace {

void check_step(const ArchitectureSteps& s, const char* name) {
  if (!(s.mu_tensor > 0.0 && s.mu_tensor < 1.0) || !(s.mu_lms > 0.0 && s.mu_lms < 1.0)) {
    throw ConfigError(std::string("scenario: step sizes for ") + name + " must lie in (0, 1)");
  }
}

// Circular complex Gaussian with E|v|^2 = 1.
Complex circular_gaussian(Rng& rng, std::normal_distribution<double>& half) {
  const double re = half(rng);
  const double im = half(rng);
  return {re, im};
}

}  // namespace

void ScenarioConfig::validate() const {
  if (taps == 0) throw ConfigError("scenario: taps must be positive");
  if (rank == 0) throw ConfigError("scenario: rank must be positive");
  if (order != 2) throw ConfigError("scenario: tensor order must be 2 (real and imaginary input parts)");
  if (!(ar_coeff >= 0.0 && ar_coeff < 1.0)) throw ConfigError("scenario: ar_coeff must lie in [0, 1)");
  if (std::isnan(snr_db)) throw ConfigError("scenario: snr_db is NaN");
  if (n_samples == 0) throw ConfigError("scenario: n_samples must be positive");
  if (n_runs == 0) throw ConfigError("scenario: n_runs must be at least 1");
  check_step(tlms2r, "tlms2r");
  check_step(ttlms, "ttlms");
  check_step(ctlms, "ctlms");
  if (!(epsilon >= 0.0)) throw ConfigError("scenario: epsilon must be >= 0");
  if (n_bins == 0 || n_bins % 2 != 0) throw ConfigError("scenario: n_bins must be a positive even number");
  if (!(delta_x > 0.0)) throw ConfigError("scenario: delta_x must be positive");
  if (!(init_low <= init_high)) throw ConfigError("scenario: empty init interval");
}

const ArchitectureSteps& ScenarioConfig::steps(ArchitectureKind kind) const {
  switch (kind) {
    case ArchitectureKind::Tlms2R:
      return tlms2r;
    case ArchitectureKind::Ttlms:
      return ttlms;
    case ArchitectureKind::Ctlms:
      return ctlms;
  }
  throw ConfigError("scenario: unknown architecture");
}

TlmsParams ScenarioConfig::estimator_params(ArchitectureKind kind) const {
  TlmsParams p;
  p.taps = taps;
  p.rank = rank;
  p.dims.assign(order, n_bins);
  p.mu_tensor = steps(kind).mu_tensor;
  p.mu_lms = steps(kind).mu_lms;
  p.epsilon = epsilon;
  p.init_low = init_low;
  p.init_high = init_high;
  return p;
}

std::vector<Complex> gen_colored_noise(double a, std::size_t n_samples, std::uint64_t seed) {
  if (!(a >= 0.0 && a < 1.0)) throw ConfigError("gen_colored_noise: a must lie in [0, 1)");
  Rng rng(seed);
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));
  const double innovation = std::sqrt(1.0 - a * a);
  std::vector<Complex> x(n_samples);
  for (std::size_t n = 0; n < n_samples; ++n) {
    const Complex nu = circular_gaussian(rng, half);
    x[n] = n == 0 ? nu : a * x[n - 1] + innovation * nu;
  }
  return x;
}

Complex pa_nonlinearity(Complex x) { return x * x / (1.0 + std::abs(x)); }

DuplexerResponse synth_duplexer(std::size_t taps, std::uint64_t seed) {
  if (taps == 0) throw ConfigError("synth_duplexer: at least one tap required");
  Rng rng(seed);
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));
  DuplexerResponse h{std::vector<Complex>(taps), seed};
  double energy = 0.0;
  for (std::size_t p = 0; p < taps; ++p) {
    h.taps[p] = circular_gaussian(rng, half) * std::exp(-static_cast<double>(p) / 4.0);
    energy += std::norm(h.taps[p]);
  }
  const double scale = 1.0 / std::sqrt(energy);
  for (auto& v : h.taps) v *= scale;
  return h;
}

TargetSignal simulate_target(std::span<const Complex> x, const DuplexerResponse& h, double snr_db,
                             std::uint64_t seed) {
  if (h.taps.empty()) throw DimensionError("simulate_target: empty duplexer response");
  const std::size_t n_samples = x.size();
  std::vector<Complex> pa(n_samples);
  std::transform(x.begin(), x.end(), pa.begin(), pa_nonlinearity);

  TargetSignal out;
  out.desired.assign(n_samples, Complex{});
  double power = 0.0;
  for (std::size_t n = 0; n < n_samples; ++n) {
    Complex acc{};
    const std::size_t reach = std::min(h.taps.size(), n + 1);
    for (std::size_t p = 0; p < reach; ++p) acc += h.taps[p] * pa[n - p];
    out.desired[n] = acc;
    power += std::norm(acc);
  }
  out.observed = out.desired;
  if (std::isinf(snr_db) && snr_db > 0.0) return out;
  if (n_samples == 0) return out;

  power /= static_cast<double>(n_samples);
  const double noise_power = power / std::pow(10.0, snr_db / 10.0);
  Rng rng(seed);
  std::normal_distribution<double> half(0.0, std::sqrt(0.5 * noise_power));
  for (auto& y : out.observed) y += circular_gaussian(rng, half);
  return out;
}

double power_db(double p) {
  if (!(p > 0.0)) return kMseFloorDb;
  return std::max(10.0 * std::log10(p), kMseFloorDb);
}

std::vector<double> mean_squared_error(std::span<const std::vector<double>> squared_errors) {
  if (squared_errors.empty()) throw DimensionError("mse: no runs");
  const std::size_t n = squared_errors.front().size();
  std::vector<double> mean(n, 0.0);
  for (const auto& run : squared_errors) {
    if (run.size() != n) throw DimensionError("mse: runs differ in length");
    for (std::size_t i = 0; i < n; ++i) mean[i] += run[i];
  }
  const double inv = 1.0 / static_cast<double>(squared_errors.size());
  for (auto& v : mean) v *= inv;
  return mean;
}

std::vector<double> mse_curve_from_squared(std::span<const std::vector<double>> squared_errors) {
  auto mean = mean_squared_error(squared_errors);
  for (auto& v : mean) v = power_db(v);
  return mean;
}

std::vector<double> mse_curve(std::span<const std::vector<Complex>> desired,
                              std::span<const std::vector<Complex>> estimates) {
  if (desired.size() != estimates.size()) throw DimensionError("mse: run count mismatch");
  std::vector<std::vector<double>> sq;
  sq.reserve(desired.size());
  for (std::size_t l = 0; l < desired.size(); ++l) {
    if (desired[l].size() != estimates[l].size()) throw DimensionError("mse: desired/estimate length mismatch");
    std::vector<double> e(desired[l].size());
    for (std::size_t n = 0; n < e.size(); ++n) e[n] = std::norm(desired[l][n] - estimates[l][n]);
    sq.push_back(std::move(e));
  }
  return mse_curve_from_squared(sq);
}

std::vector<double> moving_average(std::span<const double> values, std::size_t window) {
  if (window == 0) throw ConfigError("moving_average: window must be positive");
  std::vector<double> out(values.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < values.size(); ++n) {
    acc += values[n];
    if (n >= window) acc -= values[n - window];
    out[n] = acc / static_cast<double>(std::min(n + 1, window));
  }
  return out;
}

double steady_state_db(std::span<const double> linear_mse, double fraction) {
  if (linear_mse.empty()) throw DimensionError("steady_state_db: empty curve");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("steady_state_db: fraction must lie in (0, 1]");
  const auto count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(linear_mse.size()))));
  double acc = 0.0;
  for (std::size_t i = linear_mse.size() - count; i < linear_mse.size(); ++i) acc += linear_mse[i];
  return power_db(acc / static_cast<double>(count));
}

}  // namespace cxtlms
