#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "cxtlms/lms.hpp"
#include "cxtlms/op_count.hpp"
#include "cxtlms/rng.hpp"
#include "cxtlms/tdl.hpp"
#include "cxtlms/tensor.hpp"

namespace cxtlms {

/// Shape and step sizes of one tensor-LMS estimator.
struct TlmsParams {
  std::size_t taps = 16;                      // P, LMS length and TDL depth
  std::size_t rank = 10;                      // R
  std::vector<std::size_t> dims{32, 32};      // I_m per mode
  double mu_tensor = 0.009;                   // normalized tensor step, in (0, 1)
  double mu_lms = 0.009;
  double epsilon = kDefaultEpsilon;
  double init_low = 0.9;                      // factor init interval
  double init_high = 1.1;

  void validate() const;
};

enum class WeightCoupling {
  Plain,      // c_p = w_p
  Conjugate,  // c_p = conj(w_p)
};

template <typename TA, typename TW>
using SScalar = std::conditional_t<is_complex_v<TA> || is_complex_v<TW>, Complex, double>;

/// Scatter-accumulates the weighted Hadamard-excluding rows of every filled
/// tap into an I_m x R matrix:
///
///   S(i, :) = sum_{p : i_{mode,p} = i} c_p * (prod_{m != mode} row_{m,p})
///
/// The rows come from the TDL snapshots, not the live factors.
template <typename TA, typename TW>
void build_S_into(Matrix<SScalar<TA, TW>>& out, const TdlState<TA>& tdl, std::span<const TW> weights,
                  std::size_t mode, std::size_t rows, WeightCoupling coupling) {
  using TS = SScalar<TA, TW>;
  if (mode >= tdl.order()) throw ModeError("build_S: mode out of range");
  if (weights.size() != tdl.depth()) throw DimensionError("build_S: weight count differs from TDL depth");
  const std::size_t rank = tdl.rank();
  if (out.rows() != rows || out.cols() != rank) {
    out = Matrix<TS>(rows, rank);
  } else {
    out.fill(TS{});
  }
  for (std::size_t p = 0; p < tdl.filled(); ++p) {
    const TS c = coupling == WeightCoupling::Conjugate ? TS(conj_if_complex(weights[p])) : TS(weights[p]);
    if (c == TS{}) continue;
    const std::size_t i = tdl.tap_index(p)[mode];
    if (i < 1 || i > rows) throw IndexError("build_S: tap index out of range");
    auto dst = out.row(i - 1);
    for (std::size_t r = 0; r < rank; ++r) {
      TS h{1};
      for (std::size_t m = 0; m < tdl.order(); ++m) {
        if (m != mode) h *= tdl.tap_row(p, m)[r];
      }
      dst[r] += c * h;
    }
  }
}

template <typename TA, typename TW>
Matrix<SScalar<TA, TW>> build_S(const TdlState<TA>& tdl, std::span<const TW> weights, std::size_t mode,
                                std::size_t rows, WeightCoupling coupling) {
  Matrix<SScalar<TA, TW>> out;
  build_S_into<TA, TW>(out, tdl, weights, mode, rows, coupling);
  return out;
}

/// mu_bar / (eps + ||S||_F^2)
inline double tensor_step_size(double s_frobenius_sq, double mu_bar, double eps) {
  return mu_bar / (eps + s_frobenius_sq);
}

template <typename T>
double tensor_step_size(const Matrix<T>& s, double mu_bar, double eps) {
  return tensor_step_size(s.frobenius_sq(), mu_bar, eps);
}

/// |1 - 2 mu ||S||_F^2|; below one means the linearized error contracts.
inline double stability_factor(double mu, double s_frobenius_sq) {
  return std::abs(1.0 - 2.0 * mu * s_frobenius_sq);
}

/// First-order prediction of the error after a single-mode tensor update:
/// (1 - 2 mu ||S||_F^2) e.
template <typename TE, typename T>
TE aposteriori_error_estimate(TE e, double mu, const Matrix<T>& s) {
  return (1.0 - 2.0 * mu * s.frobenius_sq()) * e;
}

struct ModeDiagnostics {
  std::size_t path = 0;  // tensor path (0 real / 1 imaginary for dual-tensor designs)
  std::size_t mode = 0;
  double s_frobenius_sq = 0.0;
  double step_size = 0.0;
  double stability_factor = 0.0;

  /// True when S is nonzero but the contraction bound fails.
  bool violates_bound() const { return s_frobenius_sq > 0.0 && !(stability_factor < 1.0); }
};

template <typename T>
struct StepOutput {
  T estimate{};
  T error{};
  std::vector<ModeDiagnostics> modes;
};

/// Factor matrices with entries i.i.d. uniform on [low, high]; complex
/// factors draw real and imaginary parts independently.
template <typename T>
CpdTensor<T> random_cpd(const std::vector<std::size_t>& dims, std::size_t rank, double low, double high,
                        Rng& rng) {
  CpdTensor<T> t(dims, rank);
  std::uniform_real_distribution<double> u(low, high);
  for (auto& a : t.factors()) {
    for (auto& v : a.values()) {
      if constexpr (is_complex_v<T>) {
        const double re = u(rng);
        const double im = u(rng);
        v = T(re, im);
      } else {
        v = u(rng);
      }
    }
  }
  return t;
}

namespace detail {

// Builds S for every mode from the pre-update snapshots, then applies
// A_m += mu_m * direction(S_m) mode by mode.
template <typename TA, typename TW, typename Direction>
void update_tensor_path(CpdTensor<TA>& tensor, const TdlState<TA>& tdl, std::span<const TW> weights,
                        WeightCoupling coupling, double mu_bar, double eps, std::size_t path,
                        std::vector<Matrix<SScalar<TA, TW>>>& scratch, std::vector<ModeDiagnostics>& diag,
                        Direction&& direction) {
  const std::size_t order = tensor.order();
  scratch.resize(order);
  for (std::size_t m = 0; m < order; ++m) {
    build_S_into<TA, TW>(scratch[m], tdl, weights, m, tensor.dim(m), coupling);
  }
  for (std::size_t m = 0; m < order; ++m) {
    const double frob = scratch[m].frobenius_sq();
    const double mu = tensor_step_size(frob, mu_bar, eps);
    diag.push_back({path, m, frob, mu, stability_factor(mu, frob)});
    if (frob == 0.0) continue;
    auto dst = tensor.factor(m).values();
    const auto src = scratch[m].values();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += mu * direction(src[k]);
  }
}

}  // namespace detail

/// Real-valued tensor-LMS: CPD lookup feeding a TDL and a real NLMS filter.
class RealTlms {
 public:
  RealTlms(const TlmsParams& params, std::uint64_t seed);
  RealTlms(CpdTensor<double> tensor, LmsState<double> lms, double mu_tensor);

  /// Pushes the lookup at `idx` into the TDL and returns w^T z.
  double forward(const IndexVector& idx);

  template <typename Tally>
  double forward(const IndexVector& idx, Tally& tally) {
    tdl_.push(tensor_, idx, tally);
    return detail::dot_unchecked<double>(lms_.weights, tdl_.outputs(), tally);
  }

  Matrix<double> build_S(std::size_t mode) const;
  /// Increment direction 2 e S for one mode (before step-size scaling).
  Matrix<double> descent_direction(std::size_t mode, double e) const;

  /// Tensor update for all modes, then NLMS. Requires a preceding forward().
  std::vector<ModeDiagnostics> update(double e, std::size_t path = 0);
  void update(double e, std::size_t path, std::vector<ModeDiagnostics>& diag);

  StepOutput<double> step(const IndexVector& idx, double y);

  const CpdTensor<double>& tensor() const noexcept { return tensor_; }
  const LmsState<double>& lms() const noexcept { return lms_; }
  const TdlState<double>& tdl() const noexcept { return tdl_; }
  double mu_tensor() const noexcept { return mu_tensor_; }
  bool finite() const;

 private:
  CpdTensor<double> tensor_;
  LmsState<double> lms_;
  TdlState<double> tdl_;
  double mu_tensor_;
  std::vector<Matrix<double>> scratch_;
};

enum class ArchitectureKind { Tlms2R, Ttlms, Ctlms };

inline constexpr ArchitectureKind kAllArchitectures[] = {ArchitectureKind::Tlms2R, ArchitectureKind::Ttlms,
                                                         ArchitectureKind::Ctlms};

std::string_view to_string(ArchitectureKind kind);
/// Accepts "tlms2r", "ttlms", "ctlms" (case-insensitive). Throws ConfigError.
ArchitectureKind parse_architecture(std::string_view name);

using AnyMatrix = std::variant<Matrix<double>, Matrix<Complex>>;
struct NamedMatrix {
  std::string name;
  AnyMatrix matrix;
};

/// Common interface of the complex-in/complex-out estimators. The input sample
/// is split into [Re x, Im x] and each part is discretized onto one tensor mode.
class ComplexEstimator {
 public:
  explicit ComplexEstimator(Discretizer disc) : disc_(disc) {}
  virtual ~ComplexEstimator() = default;

  virtual ArchitectureKind kind() const = 0;

  virtual Complex forward(const IndexVector& idx) = 0;
  /// Instrumented forward pass; mutates the TDL exactly like forward().
  virtual OpCount count_forward(const IndexVector& idx) = 0;
  virtual void update(Complex e, std::vector<ModeDiagnostics>& diag) = 0;

  virtual bool finite() const = 0;
  virtual std::vector<NamedMatrix> state_matrices() const = 0;

  StepOutput<Complex> step(const IndexVector& idx, Complex y) {
    StepOutput<Complex> out;
    out.estimate = forward(idx);
    out.error = y - out.estimate;
    update(out.error, out.modes);
    return out;
  }

  StepOutput<Complex> step(Complex x, Complex y) { return step(complex_index(x, disc_), y); }

  const Discretizer& discretizer() const noexcept { return disc_; }

 private:
  Discretizer disc_;
};

/// Two independent real tensor-LMS pipelines, one for the real and one for the
/// imaginary part of the target, sharing the input index stream.
class Tlms2R final : public ComplexEstimator {
 public:
  Tlms2R(const TlmsParams& params, const Discretizer& disc, std::uint64_t seed);
  Tlms2R(RealTlms re, RealTlms im, const Discretizer& disc);

  ArchitectureKind kind() const override { return ArchitectureKind::Tlms2R; }
  Complex forward(const IndexVector& idx) override;
  OpCount count_forward(const IndexVector& idx) override;
  void update(Complex e, std::vector<ModeDiagnostics>& diag) override;
  bool finite() const override;
  std::vector<NamedMatrix> state_matrices() const override;

  const RealTlms& real_path() const noexcept { return re_; }
  const RealTlms& imag_path() const noexcept { return im_; }

 private:
  RealTlms re_;
  RealTlms im_;
};

/// Two real tensors (real and imaginary output parts) feeding one complex
/// NLMS filter.
class Ttlms final : public ComplexEstimator {
 public:
  enum class Path : std::size_t { Real = 0, Imag = 1 };

  Ttlms(const TlmsParams& params, const Discretizer& disc, std::uint64_t seed);
  Ttlms(CpdTensor<double> re, CpdTensor<double> im, LmsState<Complex> lms, double mu_tensor,
        const Discretizer& disc);

  ArchitectureKind kind() const override { return ArchitectureKind::Ttlms; }
  Complex forward(const IndexVector& idx) override;
  OpCount count_forward(const IndexVector& idx) override;
  void update(Complex e, std::vector<ModeDiagnostics>& diag) override;
  bool finite() const override;
  std::vector<NamedMatrix> state_matrices() const override;

  /// S for one path, built with conjugated weights.
  Matrix<Complex> build_S(Path path, std::size_t mode) const;
  /// 2 Re{e S} for the real path, 2 Im{e S} for the imaginary path.
  Matrix<double> descent_direction(Path path, std::size_t mode, Complex e) const;

  const CpdTensor<double>& tensor(Path path) const noexcept { return path == Path::Real ? re_ : im_; }
  const TdlState<double>& tdl(Path path) const noexcept { return path == Path::Real ? tdl_re_ : tdl_im_; }
  const LmsState<Complex>& lms() const noexcept { return lms_; }
  std::span<const Complex> regressor() const noexcept { return z_; }

 private:
  template <typename Tally>
  Complex forward_impl(const IndexVector& idx, Tally& tally);

  CpdTensor<double> re_;
  CpdTensor<double> im_;
  TdlState<double> tdl_re_;
  TdlState<double> tdl_im_;
  LmsState<Complex> lms_;
  double mu_tensor_;
  std::vector<Complex> z_;
  std::vector<Matrix<Complex>> scratch_;
};

/// Fully complex design: one complex CPD tensor and one complex NLMS filter,
/// tensor updated along the conjugate (Wirtinger) gradient.
class Ctlms final : public ComplexEstimator {
 public:
  Ctlms(const TlmsParams& params, const Discretizer& disc, std::uint64_t seed);
  Ctlms(CpdTensor<Complex> tensor, LmsState<Complex> lms, double mu_tensor, const Discretizer& disc);

  ArchitectureKind kind() const override { return ArchitectureKind::Ctlms; }
  Complex forward(const IndexVector& idx) override;
  OpCount count_forward(const IndexVector& idx) override;
  void update(Complex e, std::vector<ModeDiagnostics>& diag) override;
  bool finite() const override;
  std::vector<NamedMatrix> state_matrices() const override;

  Matrix<Complex> build_S(std::size_t mode) const;
  /// 2 e conj(S)
  Matrix<Complex> descent_direction(std::size_t mode, Complex e) const;

  const CpdTensor<Complex>& tensor() const noexcept { return tensor_; }
  const TdlState<Complex>& tdl() const noexcept { return tdl_; }
  const LmsState<Complex>& lms() const noexcept { return lms_; }

 private:
  template <typename Tally>
  Complex forward_impl(const IndexVector& idx, Tally& tally);

  CpdTensor<Complex> tensor_;
  LmsState<Complex> lms_;
  TdlState<Complex> tdl_;
  double mu_tensor_;
  std::vector<Matrix<Complex>> scratch_;
};

std::unique_ptr<ComplexEstimator> make_estimator(ArchitectureKind kind, const TlmsParams& params,
                                                 const Discretizer& disc, std::uint64_t seed);

}  // namespace cxtlms
