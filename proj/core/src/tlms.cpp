#include "cxtlms/tlms.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace cxtlms {

void TlmsParams::validate() const {
  if (taps == 0) throw ConfigError("TLMS: taps must be positive");
  if (rank == 0) throw ConfigError("TLMS: rank must be positive");
  if (dims.empty()) throw ConfigError("TLMS: at least one tensor mode required");
  for (auto d : dims) {
    if (d == 0) throw ConfigError("TLMS: mode sizes must be positive");
  }
  if (!(mu_tensor > 0.0 && mu_tensor < 1.0)) throw ConfigError("TLMS: tensor step size must lie in (0, 1)");
  if (!(mu_lms > 0.0 && mu_lms <= 1.0)) throw ConfigError("TLMS: LMS step size must lie in (0, 1]");
  if (!(epsilon >= 0.0)) throw ConfigError("TLMS: epsilon must be >= 0");
  if (!(init_low <= init_high)) throw ConfigError("TLMS: empty init interval");
}

namespace {

void check_mu_tensor(double mu) {
  if (!(mu > 0.0 && mu < 1.0)) throw ConfigError("TLMS: tensor step size must lie in (0, 1)");
}

template <typename TA>
void require_index(const CpdTensor<TA>& t, const IndexVector& idx) {
  t.check_index(idx);
}

}  // namespace

// ---------------------------------------------------------------------------
// RealTlms

RealTlms::RealTlms(const TlmsParams& params, std::uint64_t seed)
    : lms_(params.taps, params.mu_lms, params.epsilon), mu_tensor_(params.mu_tensor) {
  params.validate();
  Rng rng(seed);
  tensor_ = random_cpd<double>(params.dims, params.rank, params.init_low, params.init_high, rng);
  tdl_ = TdlState<double>(params.taps, tensor_.order(), tensor_.rank());
}

RealTlms::RealTlms(CpdTensor<double> tensor, LmsState<double> lms, double mu_tensor)
    : tensor_(std::move(tensor)), lms_(std::move(lms)), mu_tensor_(mu_tensor) {
  check_mu_tensor(mu_tensor);
  lms_.validate();
  tdl_ = TdlState<double>(lms_.taps(), tensor_.order(), tensor_.rank());
}

double RealTlms::forward(const IndexVector& idx) {
  require_index(tensor_, idx);
  NullTally tally;
  return forward(idx, tally);
}

Matrix<double> RealTlms::build_S(std::size_t mode) const {
  if (mode >= tensor_.order()) throw ModeError("RealTlms::build_S: mode out of range");
  return cxtlms::build_S<double, double>(tdl_, lms_.weights, mode, tensor_.dim(mode), WeightCoupling::Plain);
}

Matrix<double> RealTlms::descent_direction(std::size_t mode, double e) const {
  auto s = build_S(mode);
  for (auto& v : s.values()) v = 2.0 * e * v;
  return s;
}

void RealTlms::update(double e, std::size_t path, std::vector<ModeDiagnostics>& diag) {
  detail::update_tensor_path<double, double>(tensor_, tdl_, lms_.weights, WeightCoupling::Plain, mu_tensor_,
                                             lms_.epsilon, path, scratch_, diag,
                                             [e](double s) { return 2.0 * e * s; });
  nlms_update(lms_, e, tdl_.outputs());
}

std::vector<ModeDiagnostics> RealTlms::update(double e, std::size_t path) {
  std::vector<ModeDiagnostics> diag;
  update(e, path, diag);
  return diag;
}

StepOutput<double> RealTlms::step(const IndexVector& idx, double y) {
  StepOutput<double> out;
  out.estimate = forward(idx);
  out.error = y - out.estimate;
  update(out.error, 0, out.modes);
  return out;
}

bool RealTlms::finite() const {
  return tensor_.all_finite() && std::all_of(lms_.weights.begin(), lms_.weights.end(),
                                             [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------
// Architecture names

std::string_view to_string(ArchitectureKind kind) {
  switch (kind) {
    case ArchitectureKind::Tlms2R:
      return "tlms2r";
    case ArchitectureKind::Ttlms:
      return "ttlms";
    case ArchitectureKind::Ctlms:
      return "ctlms";
  }
  return "unknown";
}

ArchitectureKind parse_architecture(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  lower.erase(std::remove(lower.begin(), lower.end(), '-'), lower.end());
  for (auto k : kAllArchitectures) {
    if (lower == to_string(k)) return k;
  }
  throw ConfigError("unknown architecture '" + std::string(name) + "' (expected tlms2r, ttlms or ctlms)");
}

// ---------------------------------------------------------------------------
// Tlms2R

Tlms2R::Tlms2R(const TlmsParams& params, const Discretizer& disc, std::uint64_t seed)
    : ComplexEstimator(disc),
      re_(params, derive_seed(seed, {0})),
      im_(params, derive_seed(seed, {1})) {}

Tlms2R::Tlms2R(RealTlms re, RealTlms im, const Discretizer& disc)
    : ComplexEstimator(disc), re_(std::move(re)), im_(std::move(im)) {
  if (re_.tensor().dims() != im_.tensor().dims() || re_.lms().taps() != im_.lms().taps()) {
    throw DimensionError("Tlms2R: real and imaginary paths differ in shape");
  }
}

Complex Tlms2R::forward(const IndexVector& idx) {
  require_index(re_.tensor(), idx);
  NullTally tally;
  const double yr = re_.forward(idx, tally);
  const double yi = im_.forward(idx, tally);
  return {yr, yi};
}

OpCount Tlms2R::count_forward(const IndexVector& idx) {
  require_index(re_.tensor(), idx);
  OpTally tally;
  re_.forward(idx, tally);
  im_.forward(idx, tally);
  return tally.count;
}

void Tlms2R::update(Complex e, std::vector<ModeDiagnostics>& diag) {
  re_.update(e.real(), 0, diag);
  im_.update(e.imag(), 1, diag);
}

bool Tlms2R::finite() const { return re_.finite() && im_.finite(); }

std::vector<NamedMatrix> Tlms2R::state_matrices() const {
  std::vector<NamedMatrix> out;
  const std::pair<const char*, const RealTlms*> paths[] = {{"re", &re_}, {"im", &im_}};
  for (const auto& [prefix, path] : paths) {
    for (std::size_t m = 0; m < path->tensor().order(); ++m) {
      out.push_back({std::string(prefix) + "_A" + std::to_string(m + 1), path->tensor().factor(m)});
    }
    const auto& w = path->lms().weights;
    Matrix<double> wm(w.size(), 1);
    std::copy(w.begin(), w.end(), wm.values().begin());
    out.push_back({std::string(prefix) + "_w", std::move(wm)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ttlms

Ttlms::Ttlms(const TlmsParams& params, const Discretizer& disc, std::uint64_t seed)
    : ComplexEstimator(disc), lms_(params.taps, params.mu_lms, params.epsilon), mu_tensor_(params.mu_tensor) {
  params.validate();
  Rng rng_re(derive_seed(seed, {0}));
  Rng rng_im(derive_seed(seed, {1}));
  re_ = random_cpd<double>(params.dims, params.rank, params.init_low, params.init_high, rng_re);
  im_ = random_cpd<double>(params.dims, params.rank, params.init_low, params.init_high, rng_im);
  tdl_re_ = TdlState<double>(params.taps, re_.order(), re_.rank());
  tdl_im_ = TdlState<double>(params.taps, im_.order(), im_.rank());
  z_.assign(params.taps, Complex{});
}

Ttlms::Ttlms(CpdTensor<double> re, CpdTensor<double> im, LmsState<Complex> lms, double mu_tensor,
             const Discretizer& disc)
    : ComplexEstimator(disc), re_(std::move(re)), im_(std::move(im)), lms_(std::move(lms)), mu_tensor_(mu_tensor) {
  check_mu_tensor(mu_tensor);
  lms_.validate();
  if (re_.dims() != im_.dims() || re_.rank() != im_.rank()) {
    throw DimensionError("Ttlms: real and imaginary tensors differ in shape");
  }
  tdl_re_ = TdlState<double>(lms_.taps(), re_.order(), re_.rank());
  tdl_im_ = TdlState<double>(lms_.taps(), im_.order(), im_.rank());
  z_.assign(lms_.taps(), Complex{});
}

template <typename Tally>
Complex Ttlms::forward_impl(const IndexVector& idx, Tally& tally) {
  const double zr = tdl_re_.push(re_, idx, tally);
  const double zi = tdl_im_.push(im_, idx, tally);
  std::copy_backward(z_.begin(), z_.end() - 1, z_.end());
  z_[0] = Complex(zr, zi);
  return detail::dot_unchecked<Complex>(lms_.weights, z_, tally);
}

Complex Ttlms::forward(const IndexVector& idx) {
  require_index(re_, idx);
  NullTally tally;
  return forward_impl(idx, tally);
}

OpCount Ttlms::count_forward(const IndexVector& idx) {
  require_index(re_, idx);
  OpTally tally;
  forward_impl(idx, tally);
  return tally.count;
}

Matrix<Complex> Ttlms::build_S(Path path, std::size_t mode) const {
  const auto& t = tensor(path);
  if (mode >= t.order()) throw ModeError("Ttlms::build_S: mode out of range");
  return cxtlms::build_S<double, Complex>(tdl(path), lms_.weights, mode, t.dim(mode), WeightCoupling::Conjugate);
}

Matrix<double> Ttlms::descent_direction(Path path, std::size_t mode, Complex e) const {
  const auto s = build_S(path, mode);
  Matrix<double> out(s.rows(), s.cols());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const Complex es = e * s.values()[k];
    out.values()[k] = 2.0 * (path == Path::Real ? es.real() : es.imag());
  }
  return out;
}

void Ttlms::update(Complex e, std::vector<ModeDiagnostics>& diag) {
  detail::update_tensor_path<double, Complex>(re_, tdl_re_, lms_.weights, WeightCoupling::Conjugate, mu_tensor_,
                                              lms_.epsilon, 0, scratch_, diag,
                                              [e](Complex s) { return 2.0 * (e * s).real(); });
  detail::update_tensor_path<double, Complex>(im_, tdl_im_, lms_.weights, WeightCoupling::Conjugate, mu_tensor_,
                                              lms_.epsilon, 1, scratch_, diag,
                                              [e](Complex s) { return 2.0 * (e * s).imag(); });
  clms_update(lms_, e, z_);
}

bool Ttlms::finite() const {
  return re_.all_finite() && im_.all_finite() &&
         std::all_of(lms_.weights.begin(), lms_.weights.end(), [](Complex v) { return is_finite(v); });
}

std::vector<NamedMatrix> Ttlms::state_matrices() const {
  std::vector<NamedMatrix> out;
  for (std::size_t m = 0; m < re_.order(); ++m) out.push_back({"re_A" + std::to_string(m + 1), re_.factor(m)});
  for (std::size_t m = 0; m < im_.order(); ++m) out.push_back({"im_A" + std::to_string(m + 1), im_.factor(m)});
  Matrix<Complex> wm(lms_.taps(), 1);
  std::copy(lms_.weights.begin(), lms_.weights.end(), wm.values().begin());
  out.push_back({"w", std::move(wm)});
  return out;
}

// ---------------------------------------------------------------------------
// Ctlms

Ctlms::Ctlms(const TlmsParams& params, const Discretizer& disc, std::uint64_t seed)
    : ComplexEstimator(disc), lms_(params.taps, params.mu_lms, params.epsilon), mu_tensor_(params.mu_tensor) {
  params.validate();
  Rng rng(derive_seed(seed, {0}));
  tensor_ = random_cpd<Complex>(params.dims, params.rank, params.init_low, params.init_high, rng);
  tdl_ = TdlState<Complex>(params.taps, tensor_.order(), tensor_.rank());
}

Ctlms::Ctlms(CpdTensor<Complex> tensor, LmsState<Complex> lms, double mu_tensor, const Discretizer& disc)
    : ComplexEstimator(disc), tensor_(std::move(tensor)), lms_(std::move(lms)), mu_tensor_(mu_tensor) {
  check_mu_tensor(mu_tensor);
  lms_.validate();
  tdl_ = TdlState<Complex>(lms_.taps(), tensor_.order(), tensor_.rank());
}

template <typename Tally>
Complex Ctlms::forward_impl(const IndexVector& idx, Tally& tally) {
  tdl_.push(tensor_, idx, tally);
  return detail::dot_unchecked<Complex>(lms_.weights, tdl_.outputs(), tally);
}

Complex Ctlms::forward(const IndexVector& idx) {
  require_index(tensor_, idx);
  NullTally tally;
  return forward_impl(idx, tally);
}

OpCount Ctlms::count_forward(const IndexVector& idx) {
  require_index(tensor_, idx);
  OpTally tally;
  forward_impl(idx, tally);
  return tally.count;
}

Matrix<Complex> Ctlms::build_S(std::size_t mode) const {
  if (mode >= tensor_.order()) throw ModeError("Ctlms::build_S: mode out of range");
  return cxtlms::build_S<Complex, Complex>(tdl_, lms_.weights, mode, tensor_.dim(mode), WeightCoupling::Plain);
}

Matrix<Complex> Ctlms::descent_direction(std::size_t mode, Complex e) const {
  auto s = build_S(mode);
  for (auto& v : s.values()) v = 2.0 * e * std::conj(v);
  return s;
}

void Ctlms::update(Complex e, std::vector<ModeDiagnostics>& diag) {
  detail::update_tensor_path<Complex, Complex>(tensor_, tdl_, lms_.weights, WeightCoupling::Plain, mu_tensor_,
                                               lms_.epsilon, 0, scratch_, diag,
                                               [e](Complex s) { return 2.0 * e * std::conj(s); });
  clms_update(lms_, e, tdl_.outputs());
}

bool Ctlms::finite() const {
  return tensor_.all_finite() &&
         std::all_of(lms_.weights.begin(), lms_.weights.end(), [](Complex v) { return is_finite(v); });
}

std::vector<NamedMatrix> Ctlms::state_matrices() const {
  std::vector<NamedMatrix> out;
  for (std::size_t m = 0; m < tensor_.order(); ++m) out.push_back({"A" + std::to_string(m + 1), tensor_.factor(m)});
  Matrix<Complex> wm(lms_.taps(), 1);
  std::copy(lms_.weights.begin(), lms_.weights.end(), wm.values().begin());
  out.push_back({"w", std::move(wm)});
  return out;
}

// ---------------------------------------------------------------------------

std::unique_ptr<ComplexEstimator> make_estimator(ArchitectureKind kind, const TlmsParams& params,
                                                 const Discretizer& disc, std::uint64_t seed) {
  switch (kind) {
    case ArchitectureKind::Tlms2R:
      return std::make_unique<Tlms2R>(params, disc, seed);
    case ArchitectureKind::Ttlms:
      return std::make_unique<Ttlms>(params, disc, seed);
    case ArchitectureKind::Ctlms:
      return std::make_unique<Ctlms>(params, disc, seed);
  }
  throw ConfigError("make_estimator: unknown architecture");
}

}  // namespace cxtlms
