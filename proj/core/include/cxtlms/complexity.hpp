#pragma once

#include <cstddef>

#include "cxtlms/op_count.hpp"
#include "cxtlms/tlms.hpp"

namespace cxtlms {

struct ComplexityShape {
  std::size_t taps = 16;   // P
  std::size_t rank = 10;   // R
  std::size_t order = 2;   // M
  std::size_t bins = 32;   // I_m
};

struct ComplexityRow {
  OpCount forward;
  OpCount backward;
};

/// Closed-form per-sample multiply/add/divide counts of one architecture.
ComplexityRow complexity_estimate(ArchitectureKind kind, const ComplexityShape& shape);

/// Runs the instrumented forward pass of a freshly initialized estimator of the
/// given shape, once the TDL is full, and returns the counted operations.
OpCount measure_forward(ArchitectureKind kind, const ComplexityShape& shape);

}  // namespace cxtlms
