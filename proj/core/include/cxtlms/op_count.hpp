#pragma once

#include <complex>
#include <cstdint>
#include <type_traits>

namespace cxtlms {

template <typename T>
inline constexpr bool is_complex_v = false;
template <typename T>
inline constexpr bool is_complex_v<std::complex<T>> = true;

/// Real-arithmetic operation totals.
struct OpCount {
  std::uint64_t mul = 0;
  std::uint64_t add = 0;
  std::uint64_t div = 0;

  friend bool operator==(const OpCount&, const OpCount&) = default;
  OpCount& operator+=(const OpCount& o) {
    mul += o.mul;
    add += o.add;
    div += o.div;
    return *this;
  }
};

// Kernels take a tally policy so the same loop body serves both the hot path
// (NullTally, compiled away) and the instrumented counting mode (OpTally).
//
// Counting convention: a real op costs one; a complex multiply costs four real
// multiplies and two real adds; a complex add costs two real adds.

struct NullTally {
  template <typename T>
  constexpr void mul() const noexcept {}
  template <typename T>
  constexpr void add() const noexcept {}
  template <typename T>
  constexpr void div() const noexcept {}
};

struct OpTally {
  OpCount count;

  template <typename T>
  void mul() noexcept {
    if constexpr (is_complex_v<T>) {
      count.mul += 4;
      count.add += 2;
    } else {
      count.mul += 1;
    }
  }
  template <typename T>
  void add() noexcept {
    count.add += is_complex_v<T> ? 2 : 1;
  }
  template <typename T>
  void div() noexcept {
    count.div += 1;
  }
};

}  // namespace cxtlms
