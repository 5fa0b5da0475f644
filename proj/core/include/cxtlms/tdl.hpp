#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "cxtlms/tensor.hpp"

namespace cxtlms {

/// Tapped delay line of tensor lookups. Each tap keeps the index vector, the
/// factor rows A_m(i_m, :) as they were when the tap was pushed, and the
/// tensor output computed from them. Taps are addressed newest-first (tap 0 is
/// the current sample). Unfilled taps read as zero output with no index.
template <typename T>
class TdlState {
 public:
  TdlState() = default;
  TdlState(std::size_t depth, std::size_t order, std::size_t rank)
      : depth_(depth), order_(order), rank_(rank), slots_(depth), outputs_(depth, T{}) {
    if (depth == 0) throw DimensionError("TDL: depth must be positive");
    for (auto& s : slots_) {
      s.index = IndexVector(std::vector<std::size_t>(order, 0));
      s.rows.assign(order * rank, T{});
    }
  }

  std::size_t depth() const noexcept { return depth_; }
  std::size_t order() const noexcept { return order_; }
  std::size_t rank() const noexcept { return rank_; }
  std::size_t filled() const noexcept { return filled_; }
  bool tap_filled(std::size_t p) const noexcept { return p < filled_; }

  const IndexVector& tap_index(std::size_t p) const { return slot(p).index; }
  std::span<const T> tap_row(std::size_t p, std::size_t mode) const {
    return std::span<const T>(slot(p).rows).subspan(mode * rank_, rank_);
  }
  T tap_output(std::size_t p) const { return outputs_[p]; }

  /// Cached outputs z_n, z_{n-1}, ..., z_{n-P+1}.
  std::span<const T> outputs() const noexcept { return outputs_; }

  /// Looks up `idx` in `t` (no bounds check), snapshots the rows and shifts
  /// the line by one. Returns the new output.
  template <typename Tally>
  T push(const CpdTensor<T>& t, const IndexVector& idx, Tally& tally) {
    head_ = (head_ + depth_ - 1) % depth_;
    auto& s = slots_[head_];
    for (std::size_t m = 0; m < order_; ++m) {
      s.index[m] = idx[m];
      const auto row = t.factor(m).row(idx[m] - 1);
      std::copy(row.begin(), row.end(), s.rows.begin() + static_cast<std::ptrdiff_t>(m * rank_));
    }
    const T z = detail::cpd_eval_unchecked(t, idx, tally);
    std::copy_backward(outputs_.begin(), outputs_.end() - 1, outputs_.end());
    outputs_[0] = z;
    filled_ = std::min(filled_ + 1, depth_);
    return z;
  }

  T push(const CpdTensor<T>& t, const IndexVector& idx) {
    t.check_index(idx);
    NullTally tally;
    return push(t, idx, tally);
  }

 private:
  struct Slot {
    IndexVector index;
    std::vector<T> rows;  // order x rank, row-major by mode
  };

  const Slot& slot(std::size_t p) const { return slots_[(head_ + p) % depth_]; }

  std::size_t depth_ = 0;
  std::size_t order_ = 0;
  std::size_t rank_ = 0;
  std::size_t head_ = 0;
  std::size_t filled_ = 0;
  std::vector<Slot> slots_;
  std::vector<T> outputs_;
};

}  // namespace cxtlms
