#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cxtlms/tensor.hpp"
#include "cxtlms/tlms.hpp"

// Brute-force reference computations used to check the adaptive updates.
// Nothing here shares code with the TDL / S-matrix path: costs are recomputed
// from fully materialized dense tensors and gradients from central
// differences.

namespace cxtlms {

inline constexpr double kFdStep = 1e-5;

using RealCost = std::function<double(const Matrix<double>&)>;
using ComplexCost = std::function<double(const Matrix<Complex>&)>;

/// Central differences (J(A + h E_ij) - J(A - h E_ij)) / 2h for every entry.
Matrix<double> fd_gradient_real(const RealCost& cost, const Matrix<double>& a, double h = kFdStep);

/// dJ/dA* = (dJ/dRe A + j dJ/dIm A) / 2, each partial by central differences.
Matrix<Complex> fd_gradient_wirtinger(const ComplexCost& cost, const Matrix<Complex>& a, double h = kFdStep);

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t worst_row = 0;  // largest absolute deviation inside the worst matrix
  std::size_t worst_col = 0;
  double step = kFdStep;
};

/// ||impl - ref||_F / max(||ref||_F, 1e-30), plus the coordinate of the
/// largest entry-wise deviation.
template <typename T>
GradCheckReport compare_gradients(const Matrix<T>& impl, const Matrix<T>& ref, double h = kFdStep) {
  if (impl.rows() != ref.rows() || impl.cols() != ref.cols()) throw DimensionError("gradient shapes differ");
  GradCheckReport rep;
  rep.step = h;
  double diff = 0.0;
  double worst = -1.0;
  for (std::size_t i = 0; i < impl.rows(); ++i) {
    for (std::size_t j = 0; j < impl.cols(); ++j) {
      const double d = abs_sq(impl(i, j) - ref(i, j));
      diff += d;
      if (d > worst) {
        worst = d;
        rep.worst_row = i;
        rep.worst_col = j;
      }
    }
  }
  rep.max_relative_error = std::sqrt(diff) / std::max(std::sqrt(ref.frobenius_sq()), 1e-30);
  return rep;
}

// Frozen copies of an estimator's adaptive parameters plus the lookups still
// held in its delay line (newest first). Tap p contributes weights[p] * X(taps[p]).
struct RealSnapshot {
  CpdTensor<double> tensor;
  std::vector<double> weights;
  std::vector<IndexVector> taps;
  double target = 0.0;
};

struct DualSnapshot {
  CpdTensor<double> re;
  CpdTensor<double> im;
  std::vector<Complex> weights;
  std::vector<IndexVector> taps;
  Complex target{};
};

struct ComplexSnapshot {
  CpdTensor<Complex> tensor;
  std::vector<Complex> weights;
  std::vector<IndexVector> taps;
  Complex target{};
};

RealSnapshot snapshot_of(const RealTlms& f, double target);
DualSnapshot snapshot_of(const Ttlms& f, Complex target);
ComplexSnapshot snapshot_of(const Ctlms& f, Complex target);

/// Largest tensor the reference cost will expand.
inline constexpr std::size_t kReferenceEntryLimit = 4096;

/// J = (y - sum_p w_p X(i_p))^2 with X the dense expansion of the current
/// factors. Every lookup reads the live factors, which is the z-tilde
/// approximation for the perturbed mode whenever the delay line was filled
/// from the same factors. Throws CapacityError above kReferenceEntryLimit.
double dense_reference_cost(const RealSnapshot& s);
/// J = |y - sum_p w_p (X_re(i_p) + j X_im(i_p))|^2
double dense_reference_cost(const DualSnapshot& s);
/// J = |y - sum_p w_p X(i_p)|^2
double dense_reference_cost(const ComplexSnapshot& s);

struct GradientSuiteResult {
  std::string name;
  std::size_t checks = 0;
  GradCheckReport worst;
  bool passed = false;
};

/// Draws `n_states` random small estimators (P <= 4, R <= 3, M = 2,
/// I_m <= 8) per architecture, fills their delay lines without adapting, and
/// compares every implemented tensor increment against the finite-difference
/// descent direction. Returns one summary per checked tensor path.
std::vector<GradientSuiteResult> run_gradient_suite(std::size_t n_states, std::uint64_t seed,
                                                    double tolerance = 1e-6);

}  // namespace cxtlms
