#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "cxtlms/scenario.hpp"

using namespace cxtlms;

namespace {

double mean_power(const std::vector<Complex>& v) {
  double acc = 0.0;
  for (const auto& x : v) acc += std::norm(x);
  return acc / static_cast<double>(v.size());
}

// Normalized lag-1 autocorrelation Re{sum x_n x*_{n-1}} / sum |x_n|^2.
double lag1(const std::vector<Complex>& v) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t n = 0; n < v.size(); ++n) {
    den += std::norm(v[n]);
    if (n > 0) num += (v[n] * std::conj(v[n - 1])).real();
  }
  return num / den;
}

}  // namespace

TEST(ColoredNoise, WhiteCaseIsTheDrivingNoise) {
  // Inverting the AR(1) recursion of an a = 0.5 sequence recovers the same
  // driving noise as the a = 0 sequence drawn from the same seed.
  const auto white = gen_colored_noise(0.0, 1000, 42);
  const auto colored = gen_colored_noise(0.5, 1000, 42);
  const double g = std::sqrt(1.0 - 0.25);
  EXPECT_NEAR(std::abs(colored[0] - white[0]), 0.0, 1e-15);
  for (std::size_t n = 1; n < white.size(); ++n) {
    EXPECT_NEAR(std::abs((colored[n] - 0.5 * colored[n - 1]) / g - white[n]), 0.0, 1e-12);
  }
}

TEST(ColoredNoise, UnitVarianceAndLagOne) {
  const auto x = gen_colored_noise(0.9, 100'000, 1);
  EXPECT_NEAR(mean_power(x), 1.0, 0.05 * 1.0 + 0.05);
  EXPECT_NEAR(lag1(x), 0.9, 0.02);
  const auto w = gen_colored_noise(0.0, 100'000, 2);
  EXPECT_NEAR(mean_power(w), 1.0, 0.05);
  EXPECT_NEAR(lag1(w), 0.0, 0.02);
}

TEST(ColoredNoise, RejectsBadCoefficient) {
  EXPECT_THROW(gen_colored_noise(1.0, 10, 1), ConfigError);
  EXPECT_THROW(gen_colored_noise(-0.1, 10, 1), ConfigError);
}

TEST(PaModel, Examples) {
  EXPECT_EQ(pa_nonlinearity(Complex(0, 0)), Complex(0, 0));
  EXPECT_DOUBLE_EQ(pa_nonlinearity(Complex(1, 0)).real(), 0.5);
  const auto j = pa_nonlinearity(Complex(0, 1));
  EXPECT_DOUBLE_EQ(j.real(), -0.5);
  EXPECT_NEAR(j.imag(), 0.0, 1e-16);
}

TEST(PaModel, MagnitudeBelowInput) {
  for (double r : {0.01, 0.3, 1.0, 5.0, 100.0}) {
    for (double phi : {0.0, 0.7, 2.0, -2.5}) {
      const auto x = std::polar(r, phi);
      const auto y = pa_nonlinearity(x);
      EXPECT_LT(std::abs(y), std::abs(x));
      EXPECT_NEAR(std::arg(y), std::arg(x * x), 1e-12);
    }
  }
}

TEST(Duplexer, UnitNormAndDeterministic) {
  const auto a = synth_duplexer(16, 5);
  const auto b = synth_duplexer(16, 5);
  const auto c = synth_duplexer(16, 6);
  EXPECT_EQ(a.taps, b.taps);
  EXPECT_NE(a.taps, c.taps);
  double e = 0.0;
  for (const auto& h : a.taps) e += std::norm(h);
  EXPECT_NEAR(e, 1.0, 1e-12);
}

TEST(Duplexer, EnergyDecaysOverTaps) {
  std::vector<double> energy(16, 0.0);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto h = synth_duplexer(16, s);
    for (std::size_t p = 0; p < 16; ++p) energy[p] += std::norm(h.taps[p]);
  }
  const double head = energy[0] + energy[1] + energy[2] + energy[3];
  const double tail = energy[12] + energy[13] + energy[14] + energy[15];
  EXPECT_GT(head, 10.0 * tail);
}

TEST(Target, NoiselessWhenSnrInfinite) {
  const auto x = gen_colored_noise(0.9, 2000, 3);
  const auto h = synth_duplexer(16, 3);
  const auto t = simulate_target(x, h, std::numeric_limits<double>::infinity(), 4);
  EXPECT_EQ(t.observed, t.desired);
}

TEST(Target, IdentityDuplexerGivesPaOutput) {
  const auto x = gen_colored_noise(0.9, 200, 3);
  DuplexerResponse h{std::vector<Complex>(4, Complex(0, 0)), 0};
  h.taps[0] = 1.0;
  const auto t = simulate_target(x, h, std::numeric_limits<double>::infinity(), 4);
  for (std::size_t n = 0; n < x.size(); ++n) EXPECT_EQ(t.desired[n], pa_nonlinearity(x[n]));
}

TEST(Target, SnrCalibration) {
  const auto x = gen_colored_noise(0.9, 100'000, 8);
  const auto h = synth_duplexer(16, 8);
  const auto t = simulate_target(x, h, 10.0, 9);
  std::vector<Complex> eta(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) eta[n] = t.observed[n] - t.desired[n];
  EXPECT_NEAR(10.0 * std::log10(mean_power(t.desired) / mean_power(eta)), 10.0, 0.3);
}

TEST(Target, CausalConvolution) {
  const std::vector<Complex> x{Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(0, 0)};
  DuplexerResponse h{{Complex(0.5, 0), Complex(0, 0.25)}, 0};
  const auto t = simulate_target(x, h, std::numeric_limits<double>::infinity(), 0);
  EXPECT_EQ(t.desired[0], Complex(0.25, 0));
  EXPECT_EQ(t.desired[1], Complex(0, 0.125));
  EXPECT_EQ(t.desired[2], Complex(0, 0));
}

TEST(Mse, Examples) {
  const std::vector<std::vector<Complex>> d{{Complex(1, 0), Complex(1, 0)}, {Complex(0, 0), Complex(3, 0)}};
  const std::vector<std::vector<Complex>> same = d;
  const auto floor = mse_curve(d, same);
  EXPECT_EQ(floor[0], kMseFloorDb);
  const std::vector<std::vector<Complex>> zero{{Complex(0, 0), Complex(0, 1)}, {Complex(1, 0), Complex(3, 0)}};
  const auto c = mse_curve(d, zero);
  EXPECT_NEAR(c[0], 0.0, 1e-12);
  // |1+0j - j|^2 = 2 in run 1, 0 in run 2 -> mean 1
  EXPECT_NEAR(c[1], 0.0, 1e-12);
  const std::vector<std::vector<double>> sq{{1.0}, {3.0}};
  EXPECT_NEAR(mse_curve_from_squared(sq)[0], 10.0 * std::log10(2.0), 1e-12);
}

TEST(Mse, RaggedInputThrows) {
  const std::vector<std::vector<Complex>> a{{Complex(1, 0)}, {Complex(1, 0), Complex(1, 0)}};
  EXPECT_THROW(mse_curve(a, a), DimensionError);
  const std::vector<std::vector<Complex>> b{{Complex(1, 0)}};
  EXPECT_THROW(mse_curve(a, b), DimensionError);
}

TEST(Mse, ZeroEstimateMeasuresSignalPower) {
  const auto x = gen_colored_noise(0.9, 20'000, 10);
  const auto t = simulate_target(x, synth_duplexer(16, 10), 10.0, 11);
  const std::vector<std::vector<Complex>> y{t.observed};
  const std::vector<std::vector<Complex>> zero{std::vector<Complex>(x.size())};
  const auto c = mse_curve(y, zero);
  double lin = 0.0;
  for (double v : c) lin += std::pow(10.0, v / 10.0);
  lin /= static_cast<double>(c.size());
  EXPECT_NEAR(10.0 * std::log10(lin), power_db(mean_power(t.observed)), 1e-9);
}

TEST(MovingAverage, TrailingWindow) {
  const std::vector<double> v{1, 2, 3, 4, 5};
  const auto a = moving_average(v, 2);
  EXPECT_EQ(a, (std::vector<double>{1, 1.5, 2.5, 3.5, 4.5}));
  EXPECT_EQ(moving_average(v, 1), v);
}

TEST(SteadyState, FinalWindowMean) {
  std::vector<double> v(100, 1.0);
  for (std::size_t n = 90; n < 100; ++n) v[n] = 0.01;
  EXPECT_NEAR(steady_state_db(v, 0.1), -20.0, 1e-12);
  EXPECT_NEAR(steady_state_db(v, 0.2), 10.0 * std::log10(0.505), 1e-12);
}

TEST(ScenarioConfig, Defaults) {
  const ScenarioConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.taps, 16u);
  EXPECT_EQ(c.rank, 10u);
  EXPECT_EQ(c.n_runs, 20u);
  EXPECT_EQ(c.snr_db, 10.0);
  EXPECT_EQ(c.steps(ArchitectureKind::Ctlms).mu_tensor, 0.075);
  EXPECT_EQ(c.steps(ArchitectureKind::Ttlms).mu_lms, 0.005);
  EXPECT_EQ(c.estimator_params(ArchitectureKind::Tlms2R).dims, (std::vector<std::size_t>{32, 32}));
}

TEST(ScenarioConfig, Validation) {
  ScenarioConfig c;
  c.ar_coeff = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ScenarioConfig{};
  c.n_runs = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ScenarioConfig{};
  c.ctlms.mu_tensor = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ScenarioConfig{};
  c.order = 3;
  EXPECT_THROW(c.validate(), ConfigError);
}
