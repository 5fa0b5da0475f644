#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cxtlms/error.hpp"
#include "cxtlms/op_count.hpp"

namespace cxtlms {

using Complex = std::complex<double>;

template <typename T>
constexpr T conj_if_complex(const T& v) {
  if constexpr (is_complex_v<T>) {
    return std::conj(v);
  } else {
    return v;
  }
}

template <typename T>
constexpr double abs_sq(const T& v) {
  if constexpr (is_complex_v<T>) {
    return std::norm(v);
  } else {
    return v * v;
  }
}

template <typename T>
bool is_finite(const T& v) {
  if constexpr (is_complex_v<T>) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  } else {
    return std::isfinite(v);
  }
}

/// Dense row-major matrix. Factor matrices are accessed row-wise (one row per
/// lookup bin), so rows are contiguous.
template <typename T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  void fill(const T& v) { std::fill(data_.begin(), data_.end(), v); }

  double frobenius_sq() const {
    double acc = 0.0;
    for (const auto& v : data_) acc += abs_sq(v);
    return acc;
  }

  bool all_finite() const {
    for (const auto& v : data_) {
      if (!is_finite(v)) return false;
    }
    return true;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// One lookup position per tensor mode. Entries are 1-based bin numbers.
class IndexVector {
 public:
  IndexVector() = default;
  IndexVector(std::initializer_list<std::size_t> init) : idx_(init) {}
  explicit IndexVector(std::vector<std::size_t> idx) : idx_(std::move(idx)) {}

  std::size_t size() const noexcept { return idx_.size(); }
  std::size_t operator[](std::size_t m) const { return idx_[m]; }
  std::size_t& operator[](std::size_t m) { return idx_[m]; }
  std::span<const std::size_t> values() const noexcept { return idx_; }
  auto begin() const noexcept { return idx_.begin(); }
  auto end() const noexcept { return idx_.end(); }

  friend bool operator==(const IndexVector&, const IndexVector&) = default;

 private:
  std::vector<std::size_t> idx_;
};

/// Uniform quantizer mapping a real sample onto a 1-based bin number.
///
/// bin = floor(x / delta_x) + n_bins / 2, saturated into [1, n_bins].
class Discretizer {
 public:
  Discretizer(double delta_x, std::size_t n_bins);

  double delta_x() const noexcept { return delta_x_; }
  std::size_t n_bins() const noexcept { return n_bins_; }

  /// Unclamped bin (may be < 1 or > n_bins).
  long long raw_bin(double x) const;
  std::size_t operator()(double x) const;

 private:
  double delta_x_;
  std::size_t n_bins_;
};

std::size_t discretize(double x, const Discretizer& d);

/// [Re x, Im x]
std::array<double, 2> c2r_split(Complex x);

/// Bin pair for a complex sample: real part on mode 0, imaginary part on mode 1.
IndexVector complex_index(Complex x, const Discretizer& d);

/// Rank-R canonical polyadic (CPD) tensor held as M factor matrices A_m of
/// shape I_m x R. Entry X(i_1..i_M) = sum_r prod_m A_m(i_m, r).
template <typename T>
class CpdTensor {
 public:
  using value_type = T;

  CpdTensor() = default;

  /// All-zero tensor with the given mode sizes.
  CpdTensor(const std::vector<std::size_t>& dims, std::size_t rank) {
    if (dims.empty()) throw DimensionError("CpdTensor: order must be positive");
    if (rank == 0) throw DimensionError("CpdTensor: rank must be positive");
    factors_.reserve(dims.size());
    for (auto d : dims) {
      if (d == 0) throw DimensionError("CpdTensor: mode sizes must be positive");
      factors_.emplace_back(d, rank);
    }
  }

  explicit CpdTensor(std::vector<Matrix<T>> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw DimensionError("CpdTensor: order must be positive");
    const auto r = factors_.front().cols();
    if (r == 0) throw DimensionError("CpdTensor: rank must be positive");
    for (const auto& a : factors_) {
      if (a.cols() != r) throw DimensionError("CpdTensor: factor matrices disagree on rank");
      if (a.rows() == 0) throw DimensionError("CpdTensor: mode sizes must be positive");
    }
  }

  std::size_t order() const noexcept { return factors_.size(); }
  std::size_t rank() const noexcept { return factors_.empty() ? 0 : factors_.front().cols(); }
  std::size_t dim(std::size_t mode) const { return factors_.at(mode).rows(); }
  std::vector<std::size_t> dims() const {
    std::vector<std::size_t> out;
    for (const auto& a : factors_) out.push_back(a.rows());
    return out;
  }

  Matrix<T>& factor(std::size_t mode) { return factors_.at(mode); }
  const Matrix<T>& factor(std::size_t mode) const { return factors_.at(mode); }
  std::span<Matrix<T>> factors() noexcept { return factors_; }
  std::span<const Matrix<T>> factors() const noexcept { return factors_; }

  bool all_finite() const {
    for (const auto& a : factors_) {
      if (!a.all_finite()) return false;
    }
    return true;
  }

  /// Throws IndexError unless idx has one in-range 1-based entry per mode.
  void check_index(const IndexVector& idx) const {
    if (idx.size() != order()) {
      throw IndexError("index vector has " + std::to_string(idx.size()) + " entries, tensor order is " +
                       std::to_string(order()));
    }
    for (std::size_t m = 0; m < order(); ++m) {
      if (idx[m] < 1 || idx[m] > dim(m)) {
        throw IndexError("index " + std::to_string(idx[m]) + " out of range [1, " + std::to_string(dim(m)) +
                         "] on mode " + std::to_string(m));
      }
    }
  }

  friend bool operator==(const CpdTensor&, const CpdTensor&) = default;

 private:
  std::vector<Matrix<T>> factors_;
};

namespace detail {

// sum_r prod_m A_m(i_m, r), with the first factor seeding each product and the
// first rank term seeding the sum. No bounds checks.
template <typename T, typename Tally>
T cpd_eval_unchecked(const CpdTensor<T>& t, const IndexVector& idx, Tally& tally) {
  const std::size_t order = t.order();
  const std::size_t rank = t.rank();
  T acc{};
  for (std::size_t r = 0; r < rank; ++r) {
    T prod = t.factor(0)(idx[0] - 1, r);
    for (std::size_t m = 1; m < order; ++m) {
      prod *= t.factor(m)(idx[m] - 1, r);
      tally.template mul<T>();
    }
    if (r == 0) {
      acc = prod;
    } else {
      acc += prod;
      tally.template add<T>();
    }
  }
  return acc;
}

}  // namespace detail

/// X(idx) = sum_r prod_m A_m(i_m, r). Throws IndexError on a bad index.
template <typename T>
T cpd_eval(const CpdTensor<T>& t, const IndexVector& idx) {
  t.check_index(idx);
  NullTally tally;
  return detail::cpd_eval_unchecked(t, idx, tally);
}

/// Element-wise product of the rows A_m(i_m, :) over every mode m != mode.
/// `mode` is 0-based. For M = 1 the result is all ones.
template <typename T>
std::vector<T> hadamard_excluding(const CpdTensor<T>& t, const IndexVector& idx, std::size_t mode) {
  if (mode >= t.order()) {
    throw ModeError("mode " + std::to_string(mode) + " out of range for order " + std::to_string(t.order()));
  }
  t.check_index(idx);
  std::vector<T> out(t.rank(), T{1});
  for (std::size_t m = 0; m < t.order(); ++m) {
    if (m == mode) continue;
    const auto row = t.factor(m).row(idx[m] - 1);
    for (std::size_t r = 0; r < out.size(); ++r) out[r] *= row[r];
  }
  return out;
}

/// Plain M-way array, first mode varying fastest.
template <typename T>
class DenseTensor {
 public:
  explicit DenseTensor(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    std::size_t n = 1;
    for (auto d : dims_) n *= d;
    data_.assign(n, T{});
  }

  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::size_t offset(const IndexVector& idx) const {
    if (idx.size() != dims_.size()) throw IndexError("dense tensor: index order mismatch");
    std::size_t off = 0;
    std::size_t stride = 1;
    for (std::size_t m = 0; m < dims_.size(); ++m) {
      if (idx[m] < 1 || idx[m] > dims_[m]) throw IndexError("dense tensor: index out of range");
      off += (idx[m] - 1) * stride;
      stride *= dims_[m];
    }
    return off;
  }

  T& at(const IndexVector& idx) { return data_[offset(idx)]; }
  const T& at(const IndexVector& idx) const { return data_[offset(idx)]; }
  std::span<const T> values() const noexcept { return data_; }

 private:
  std::vector<std::size_t> dims_;
  std::vector<T> data_;
};

inline constexpr std::size_t kDenseEntryLimit = 1'000'000;

/// Expands a CPD tensor entry by entry, walking every index with an odometer.
/// Throws CapacityError when prod I_m exceeds kDenseEntryLimit.
template <typename T>
DenseTensor<T> dense_materialize(const CpdTensor<T>& t) {
  const auto dims = t.dims();
  std::size_t total = 1;
  for (auto d : dims) {
    if (total > kDenseEntryLimit / d) throw CapacityError("dense_materialize: tensor exceeds 1e6 entries");
    total *= d;
  }
  DenseTensor<T> out(dims);
  IndexVector idx(std::vector<std::size_t>(dims.size(), 1));
  for (std::size_t n = 0; n < total; ++n) {
    T acc{};
    for (std::size_t r = 0; r < t.rank(); ++r) {
      T prod{1};
      for (std::size_t m = 0; m < dims.size(); ++m) prod *= t.factor(m)(idx[m] - 1, r);
      acc += prod;
    }
    out.at(idx) = acc;
    for (std::size_t m = 0; m < dims.size(); ++m) {
      if (++idx[m] <= dims[m]) break;
      idx[m] = 1;
    }
  }
  return out;
}

}  // namespace cxtlms
