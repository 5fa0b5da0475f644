#include "cxtlms/tensor.hpp"

#include <cmath>
#include <string>

namespace cxtlms {

Discretizer::Discretizer(double delta_x, std::size_t n_bins) : delta_x_(delta_x), n_bins_(n_bins) {
  if (!(delta_x > 0.0) || !std::isfinite(delta_x)) {
    throw ConfigError("discretizer: delta_x must be positive and finite");
  }
  if (n_bins == 0 || n_bins % 2 != 0) {
    throw ConfigError("discretizer: n_bins must be a positive even number, got " + std::to_string(n_bins));
  }
}

long long Discretizer::raw_bin(double x) const {
  if (!std::isfinite(x)) throw InputError("discretize: non-finite sample");
  const double q = std::floor(x / delta_x_);
  const double half = static_cast<double>(n_bins_ / 2);
  // Saturate in floating point first so huge |x| cannot overflow the cast.
  const double lo = -static_cast<double>(n_bins_);
  const double hi = 2.0 * static_cast<double>(n_bins_);
  return static_cast<long long>(std::clamp(q + half, lo, hi));
}

std::size_t Discretizer::operator()(double x) const {
  const long long raw = raw_bin(x);
  return static_cast<std::size_t>(std::clamp<long long>(raw, 1, static_cast<long long>(n_bins_)));
}

std::size_t discretize(double x, const Discretizer& d) { return d(x); }

std::array<double, 2> c2r_split(Complex x) { return {x.real(), x.imag()}; }

IndexVector complex_index(Complex x, const Discretizer& d) {
  const auto parts = c2r_split(x);
  return IndexVector{d(parts[0]), d(parts[1])};
}

}  // namespace cxtlms
