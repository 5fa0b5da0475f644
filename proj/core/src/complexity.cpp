#include "cxtlms/complexity.hpp"

#include <cstdint>
#include <vector>

#include "cxtlms/error.hpp"

namespace cxtlms {

namespace {

OpCount make_count(std::int64_t mul, std::int64_t add, std::int64_t div) {
  if (mul < 0 || add < 0 || div < 0) throw ConfigError("complexity: parameters too small for the formulas");
  return {static_cast<std::uint64_t>(mul), static_cast<std::uint64_t>(add), static_cast<std::uint64_t>(div)};
}

}  // namespace

ComplexityRow complexity_estimate(ArchitectureKind kind, const ComplexityShape& shape) {
  if (shape.taps == 0 || shape.rank == 0 || shape.order == 0 || shape.bins == 0) {
    throw ConfigError("complexity: all parameters must be positive");
  }
  const auto P = static_cast<std::int64_t>(shape.taps);
  const auto R = static_cast<std::int64_t>(shape.rank);
  const auto M = static_cast<std::int64_t>(shape.order);
  const auto I = static_cast<std::int64_t>(shape.bins);

  switch (kind) {
    case ArchitectureKind::Tlms2R:
      return {make_count(2 * P + 2 * R * (M - 1), 2 * P + 2 * R - 4, 0),
              make_count(2 * M * R * (P * (M - 1) + I) + 4 * P * (M + 1) + 2, 4 * P + 2 * M * R * I * (P + 1),
                         2 + 2 * M)};
    case ArchitectureKind::Ttlms:
      return {make_count(4 * P + 2 * R * (M - 1), 4 * P + 2 * R - 4, 0),
              make_count(2 * M * R * (P * (M - 1) + I) + 4 * P * (M + 2) + 4, 12 * P + 2 * M * R * I * (P + 1) + 2,
                         1 + 2 * M)};
    case ArchitectureKind::Ctlms:
      return {make_count(4 * P + 4 * R * (M - 1), 6 * P + 2 * R * (M + 1) - 8, 0),
              make_count(4 * M * R * (P * (M - 1) + I) + 8 * P * (M + 1) + 4,
                         2 * M * R * (P * (M - 1) + 2 * I * (P + 1)) + 4 * P * (M + 1) + 2, 1 + M)};
  }
  throw ConfigError("complexity: unknown architecture");
}

OpCount measure_forward(ArchitectureKind kind, const ComplexityShape& shape) {
  TlmsParams params;
  params.taps = shape.taps;
  params.rank = shape.rank;
  params.dims.assign(shape.order, shape.bins);
  // Indices are fed directly, the discretizer is never consulted.
  const Discretizer disc(0.25, 32);
  auto est = make_estimator(kind, params, disc, 0);
  IndexVector idx(std::vector<std::size_t>(shape.order, 1));
  for (std::size_t p = 0; p < shape.taps; ++p) est->forward(idx);
  return est->count_forward(idx);
}

}  // namespace cxtlms
