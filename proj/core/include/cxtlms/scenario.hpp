#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "cxtlms/tensor.hpp"
#include "cxtlms/tlms.hpp"

namespace cxtlms {

struct ArchitectureSteps {
  double mu_tensor;
  double mu_lms;
};

/// Generation and estimator settings of the transmitter-harmonics scenario.
struct ScenarioConfig {
  std::size_t taps = 16;      // P: duplexer length and LMS length
  std::size_t rank = 10;      // R
  std::size_t order = 2;      // M: real part and imaginary part of x_n
  double ar_coeff = 0.9;
  double snr_db = 10.0;       // +inf disables the noise
  std::size_t n_samples = 100'000;
  std::size_t n_runs = 20;
  ArchitectureSteps tlms2r{0.009, 0.009};
  ArchitectureSteps ttlms{0.009, 0.005};
  ArchitectureSteps ctlms{0.075, 0.009};
  double epsilon = 1e-12;
  std::size_t n_bins = 32;
  double delta_x = 0.25;      // 8 / n_bins
  double init_low = 0.9;
  double init_high = 1.1;
  std::uint64_t seed = 1;

  /// Throws ConfigError on any out-of-range value.
  void validate() const;

  const ArchitectureSteps& steps(ArchitectureKind kind) const;
  TlmsParams estimator_params(ArchitectureKind kind) const;
  Discretizer discretizer() const { return Discretizer(delta_x, n_bins); }
};

/// x_n = a x_{n-1} + sqrt(1 - a^2) nu_n with nu_n circular complex Gaussian of
/// unit variance. Starts from x_0 = nu_0, so the sequence is stationary.
std::vector<Complex> gen_colored_noise(double a, std::size_t n_samples, std::uint64_t seed);

/// Power-amplifier harmonic model x^2 / (1 + |x|).
Complex pa_nonlinearity(Complex x);

struct DuplexerResponse {
  std::vector<Complex> taps;
  std::uint64_t seed = 0;
};

/// Random decaying FIR standing in for a measured duplexer stop-band response:
/// i.i.d. circular Gaussian taps weighted by exp(-p / 4), unit l2 norm.
DuplexerResponse synth_duplexer(std::size_t taps, std::uint64_t seed);

struct TargetSignal {
  std::vector<Complex> desired;   // d_n
  std::vector<Complex> observed;  // y_n = d_n + eta_n
};

/// d_n = sum_p h_p f(x_{n-p}) with f the PA model and zero pre-history;
/// eta_n circular complex Gaussian scaled so that mean |d|^2 sits snr_db
/// above the noise power.
TargetSignal simulate_target(std::span<const Complex> x, const DuplexerResponse& h, double snr_db,
                             std::uint64_t seed);

inline constexpr double kMseFloorDb = -320.0;

/// 10 log10(p), floored at kMseFloorDb.
double power_db(double p);

/// MSE_dB[n] = 10 log10(mean_l |d_n^(l) - y_hat_n^(l)|^2). Throws
/// DimensionError on ragged input.
std::vector<double> mse_curve(std::span<const std::vector<Complex>> desired,
                              std::span<const std::vector<Complex>> estimates);

/// Same metric from per-run squared-error sequences.
std::vector<double> mse_curve_from_squared(std::span<const std::vector<double>> squared_errors);

/// Mean of the linear MSE over runs, per sample.
std::vector<double> mean_squared_error(std::span<const std::vector<double>> squared_errors);

/// Trailing moving average (linear domain), window clipped at the start.
std::vector<double> moving_average(std::span<const double> values, std::size_t window);

/// 10 log10 of the mean of the last `fraction` of a linear MSE sequence.
double steady_state_db(std::span<const double> linear_mse, double fraction = 0.1);

}  // namespace cxtlms
