#include "cxtlms/oracle.hpp"

#include <random>

#include "cxtlms/rng.hpp"

namespace cxtlms {

Matrix<double> fd_gradient_real(const RealCost& cost, const Matrix<double>& a, double h) {
  if (!(h > 0.0)) throw ConfigError("fd_gradient_real: step must be positive");
  Matrix<double> grad(a.rows(), a.cols());
  Matrix<double> probe = a;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double orig = probe.values()[k];
    probe.values()[k] = orig + h;
    const double plus = cost(probe);
    probe.values()[k] = orig - h;
    const double minus = cost(probe);
    probe.values()[k] = orig;
    grad.values()[k] = (plus - minus) / (2.0 * h);
  }
  return grad;
}

Matrix<Complex> fd_gradient_wirtinger(const ComplexCost& cost, const Matrix<Complex>& a, double h) {
  if (!(h > 0.0)) throw ConfigError("fd_gradient_wirtinger: step must be positive");
  Matrix<Complex> grad(a.rows(), a.cols());
  Matrix<Complex> probe = a;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Complex orig = probe.values()[k];
    probe.values()[k] = orig + Complex(h, 0.0);
    const double re_plus = cost(probe);
    probe.values()[k] = orig - Complex(h, 0.0);
    const double re_minus = cost(probe);
    probe.values()[k] = orig + Complex(0.0, h);
    const double im_plus = cost(probe);
    probe.values()[k] = orig - Complex(0.0, h);
    const double im_minus = cost(probe);
    probe.values()[k] = orig;
    const double d_re = (re_plus - re_minus) / (2.0 * h);
    const double d_im = (im_plus - im_minus) / (2.0 * h);
    grad.values()[k] = 0.5 * Complex(d_re, d_im);
  }
  return grad;
}

namespace {

template <typename T>
std::vector<IndexVector> filled_taps(const TdlState<T>& tdl) {
  std::vector<IndexVector> taps;
  for (std::size_t p = 0; p < tdl.filled(); ++p) taps.push_back(tdl.tap_index(p));
  return taps;
}

template <typename T>
DenseTensor<T> guarded_dense(const CpdTensor<T>& t) {
  std::size_t total = 1;
  for (auto d : t.dims()) total *= d;
  if (total > kReferenceEntryLimit) throw CapacityError("dense_reference_cost: tensor too large for the oracle");
  return dense_materialize(t);
}

void check_taps(std::size_t n_weights, std::size_t n_taps) {
  if (n_taps > n_weights) throw DimensionError("dense_reference_cost: more taps than weights");
}

}  // namespace

RealSnapshot snapshot_of(const RealTlms& f, double target) {
  return {f.tensor(), f.lms().weights, filled_taps(f.tdl()), target};
}

DualSnapshot snapshot_of(const Ttlms& f, Complex target) {
  return {f.tensor(Ttlms::Path::Real), f.tensor(Ttlms::Path::Imag), f.lms().weights,
          filled_taps(f.tdl(Ttlms::Path::Real)), target};
}

ComplexSnapshot snapshot_of(const Ctlms& f, Complex target) {
  return {f.tensor(), f.lms().weights, filled_taps(f.tdl()), target};
}

double dense_reference_cost(const RealSnapshot& s) {
  check_taps(s.weights.size(), s.taps.size());
  const auto dense = guarded_dense(s.tensor);
  double y_hat = 0.0;
  for (std::size_t p = 0; p < s.taps.size(); ++p) y_hat += s.weights[p] * dense.at(s.taps[p]);
  const double e = s.target - y_hat;
  return e * e;
}

double dense_reference_cost(const DualSnapshot& s) {
  check_taps(s.weights.size(), s.taps.size());
  const auto dense_re = guarded_dense(s.re);
  const auto dense_im = guarded_dense(s.im);
  Complex y_hat{};
  for (std::size_t p = 0; p < s.taps.size(); ++p) {
    y_hat += s.weights[p] * Complex(dense_re.at(s.taps[p]), dense_im.at(s.taps[p]));
  }
  return std::norm(s.target - y_hat);
}

double dense_reference_cost(const ComplexSnapshot& s) {
  check_taps(s.weights.size(), s.taps.size());
  const auto dense = guarded_dense(s.tensor);
  Complex y_hat{};
  for (std::size_t p = 0; p < s.taps.size(); ++p) y_hat += s.weights[p] * dense.at(s.taps[p]);
  return std::norm(s.target - y_hat);
}

// ---------------------------------------------------------------------------
// Randomized suite

namespace {

struct SmallShape {
  std::size_t taps;
  std::size_t rank;
  std::vector<std::size_t> dims;
};

SmallShape draw_shape(Rng& rng) {
  std::uniform_int_distribution<std::size_t> taps(1, 4);
  std::uniform_int_distribution<std::size_t> rank(1, 3);
  std::uniform_int_distribution<std::size_t> bins(2, 8);
  SmallShape s{taps(rng), rank(rng), {}};
  s.dims = {bins(rng), bins(rng)};
  return s;
}

IndexVector draw_index(const std::vector<std::size_t>& dims, Rng& rng) {
  std::vector<std::size_t> idx;
  for (auto d : dims) idx.push_back(std::uniform_int_distribution<std::size_t>(1, d)(rng));
  return IndexVector(std::move(idx));
}

double draw_real(Rng& rng) { return std::uniform_real_distribution<double>(-1.0, 1.0)(rng); }
Complex draw_complex(Rng& rng) {
  const double re = draw_real(rng);
  const double im = draw_real(rng);
  return {re, im};
}

template <typename W>
std::vector<W> draw_weights(std::size_t n, Rng& rng) {
  std::vector<W> w(n);
  for (auto& v : w) {
    if constexpr (is_complex_v<W>) {
      v = draw_complex(rng);
    } else {
      v = draw_real(rng);
    }
  }
  return w;
}

void absorb(GradientSuiteResult& acc, const GradCheckReport& rep, double tolerance) {
  ++acc.checks;
  if (acc.checks == 1 || rep.max_relative_error > acc.worst.max_relative_error) acc.worst = rep;
  acc.passed = acc.worst.max_relative_error <= tolerance;
}

const Discretizer kSuiteDisc(0.25, 32);

}  // namespace

std::vector<GradientSuiteResult> run_gradient_suite(std::size_t n_states, std::uint64_t seed, double tolerance) {
  GradientSuiteResult real_tlms{"real_tlms", 0, {}, false};
  GradientSuiteResult ttlms_re{"ttlms_real_tensor", 0, {}, false};
  GradientSuiteResult ttlms_im{"ttlms_imag_tensor", 0, {}, false};
  GradientSuiteResult ctlms{"ctlms", 0, {}, false};

  Rng rng(seed);
  for (std::size_t s = 0; s < n_states; ++s) {
    // Real TLMS: update direction 2 e S must equal -dJ/dA.
    {
      const auto shape = draw_shape(rng);
      const double y = draw_real(rng);
      auto tensor = random_cpd<double>(shape.dims, shape.rank, -1.0, 1.0, rng);
      auto weights = draw_weights<double>(shape.taps, rng);
      RealTlms f(std::move(tensor), LmsState<double>(std::move(weights), 0.5, kDefaultEpsilon), 0.5);
      for (std::size_t p = 0; p < shape.taps; ++p) f.forward(draw_index(shape.dims, rng));
      const double e = y - lms_predict(f.lms(), f.tdl().outputs());
      const auto base = snapshot_of(f, y);
      for (std::size_t m = 0; m < shape.dims.size(); ++m) {
        auto g = fd_gradient_real(
            [&](const Matrix<double>& a) {
              auto probe = base;
              probe.tensor.factor(m) = a;
              return dense_reference_cost(probe);
            },
            base.tensor.factor(m));
        for (auto& v : g.values()) v = -v;
        absorb(real_tlms, compare_gradients(f.descent_direction(m, e), g), tolerance);
      }
    }
    // TTLMS: 2 Re{e S} and 2 Im{e S} must equal -dJ/dA for J = |e|^2.
    {
      const auto shape = draw_shape(rng);
      const Complex y = draw_complex(rng);
      auto re = random_cpd<double>(shape.dims, shape.rank, -1.0, 1.0, rng);
      auto im = random_cpd<double>(shape.dims, shape.rank, -1.0, 1.0, rng);
      auto weights = draw_weights<Complex>(shape.taps, rng);
      Ttlms f(std::move(re), std::move(im), LmsState<Complex>(std::move(weights), 0.5, kDefaultEpsilon), 0.5,
              kSuiteDisc);
      for (std::size_t p = 0; p < shape.taps; ++p) f.forward(draw_index(shape.dims, rng));
      const Complex e = y - lms_predict(f.lms(), f.regressor());
      const auto base = snapshot_of(f, y);
      for (auto path : {Ttlms::Path::Real, Ttlms::Path::Imag}) {
        for (std::size_t m = 0; m < shape.dims.size(); ++m) {
          const auto& start = path == Ttlms::Path::Real ? base.re.factor(m) : base.im.factor(m);
          auto g = fd_gradient_real(
              [&](const Matrix<double>& a) {
                auto probe = base;
                (path == Ttlms::Path::Real ? probe.re : probe.im).factor(m) = a;
                return dense_reference_cost(probe);
              },
              start);
          for (auto& v : g.values()) v = -v;
          absorb(path == Ttlms::Path::Real ? ttlms_re : ttlms_im,
                 compare_gradients(f.descent_direction(path, m, e), g), tolerance);
        }
      }
    }
    // CTLMS: 2 e conj(S) must equal -2 dJ/dA*.
    {
      const auto shape = draw_shape(rng);
      const Complex y = draw_complex(rng);
      auto tensor = random_cpd<Complex>(shape.dims, shape.rank, -1.0, 1.0, rng);
      auto weights = draw_weights<Complex>(shape.taps, rng);
      Ctlms f(std::move(tensor), LmsState<Complex>(std::move(weights), 0.5, kDefaultEpsilon), 0.5, kSuiteDisc);
      for (std::size_t p = 0; p < shape.taps; ++p) f.forward(draw_index(shape.dims, rng));
      const Complex e = y - lms_predict(f.lms(), f.tdl().outputs());
      const auto base = snapshot_of(f, y);
      for (std::size_t m = 0; m < shape.dims.size(); ++m) {
        auto g = fd_gradient_wirtinger(
            [&](const Matrix<Complex>& a) {
              auto probe = base;
              probe.tensor.factor(m) = a;
              return dense_reference_cost(probe);
            },
            base.tensor.factor(m));
        for (auto& v : g.values()) v = -2.0 * v;
        absorb(ctlms, compare_gradients(f.descent_direction(m, e), g), tolerance);
      }
    }
  }
  return {real_tlms, ttlms_re, ttlms_im, ctlms};
}

}  // namespace cxtlms
