#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cxtlms/error.hpp"
#include "cxtlms/op_count.hpp"
#include "cxtlms/tensor.hpp"

namespace cxtlms {

inline constexpr double kDefaultEpsilon = 1e-12;

/// Normalized (C)LMS filter: weights, step size and regularizer.
template <typename T>
struct LmsState {
  std::vector<T> weights;
  double step_size = 0.0;
  double epsilon = kDefaultEpsilon;

  LmsState() = default;
  LmsState(std::size_t taps, double mu, double eps = kDefaultEpsilon)
      : weights(taps, T{}), step_size(mu), epsilon(eps) {
    validate();
  }
  LmsState(std::vector<T> w, double mu, double eps) : weights(std::move(w)), step_size(mu), epsilon(eps) {
    validate();
  }

  std::size_t taps() const noexcept { return weights.size(); }

  void validate() const {
    if (weights.empty()) throw ConfigError("LMS: at least one tap required");
    if (!(step_size > 0.0 && step_size <= 1.0)) throw ConfigError("LMS: step size must lie in (0, 1]");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("LMS: epsilon must be finite and >= 0");
  }
};

namespace detail {

// w^T z without conjugation; first product seeds the accumulator.
template <typename T, typename Tally>
T dot_unchecked(std::span<const T> w, std::span<const T> z, Tally& tally) {
  T acc = w[0] * z[0];
  tally.template mul<T>();
  for (std::size_t p = 1; p < w.size(); ++p) {
    acc += w[p] * z[p];
    tally.template mul<T>();
    tally.template add<T>();
  }
  return acc;
}

inline void require_taps(std::size_t expected, std::size_t got) {
  if (expected != got) {
    throw DimensionError("LMS: expected " + std::to_string(expected) + " regressor entries, got " +
                         std::to_string(got));
  }
}

template <typename T>
void normalized_update(LmsState<T>& s, T e, std::span<const T> z) {
  require_taps(s.taps(), z.size());
  double energy = 0.0;
  for (const auto& v : z) energy += abs_sq(v);
  const double denom = s.epsilon + energy;
  // z == 0 with epsilon == 0 leaves nothing to update (e * z* is zero).
  if (denom == 0.0) return;
  const T gain = s.step_size * e / denom;
  for (std::size_t p = 0; p < z.size(); ++p) s.weights[p] += gain * conj_if_complex(z[p]);
}

}  // namespace detail

/// y_hat = w^T z (plain transpose, no conjugation).
template <typename T>
T lms_predict(const LmsState<T>& s, std::span<const T> z) {
  detail::require_taps(s.taps(), z.size());
  NullTally tally;
  return detail::dot_unchecked<T>(s.weights, z, tally);
}

/// w += mu * e * conj(z) / (eps + z^H z)
inline void clms_update(LmsState<Complex>& s, Complex e, std::span<const Complex> z) {
  detail::normalized_update<Complex>(s, e, z);
}

/// Real NLMS: w += mu * e * z / (eps + z^T z)
inline void nlms_update(LmsState<double>& s, double e, std::span<const double> z) {
  detail::normalized_update<double>(s, e, z);
}

}  // namespace cxtlms
