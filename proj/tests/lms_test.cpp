#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "cxtlms/lms.hpp"
#include "cxtlms/rng.hpp"

using namespace cxtlms;

TEST(LmsPredict, UnitVectorPicksFirst) {
  LmsState<Complex> s({Complex(1, 0), Complex(0, 0), Complex(0, 0)}, 0.5, 1e-12);
  const std::vector<Complex> z{Complex(2, -3), Complex(5, 5), Complex(-1, 0)};
  EXPECT_EQ(lms_predict<Complex>(s, z), Complex(2, -3));
}

TEST(LmsPredict, NoConjugation) {
  LmsState<Complex> s({Complex(1, 1), Complex(0, 0)}, 0.5, 1e-12);
  const std::vector<Complex> z{Complex(1, -1), Complex(0, 0)};
  EXPECT_EQ(lms_predict<Complex>(s, z), Complex(2, 0));
}

TEST(LmsPredict, ZeroWeights) {
  LmsState<double> s(4, 0.5);
  const std::vector<double> z{1, 2, 3, 4};
  EXPECT_EQ(lms_predict<double>(s, z), 0.0);
}

TEST(LmsPredict, DimensionMismatch) {
  LmsState<double> s(4, 0.5);
  const std::vector<double> z{1, 2, 3};
  EXPECT_THROW(lms_predict<double>(s, z), DimensionError);
  EXPECT_THROW(nlms_update(s, 1.0, z), DimensionError);
}

TEST(LmsState, Validation) {
  EXPECT_THROW(LmsState<double>(0, 0.5), ConfigError);
  EXPECT_THROW(LmsState<double>(2, 0.0), ConfigError);
  EXPECT_THROW(LmsState<double>(2, 1.5), ConfigError);
  EXPECT_THROW(LmsState<double>(2, 0.5, -1.0), ConfigError);
}

TEST(ClmsUpdate, ZeroErrorIsFixedPoint) {
  LmsState<Complex> s({Complex(0.3, -0.1), Complex(1, 2)}, 0.5, 1e-12);
  const auto before = s.weights;
  const std::vector<Complex> z{Complex(1, 1), Complex(-2, 0.5)};
  clms_update(s, Complex(0, 0), z);
  EXPECT_EQ(s.weights, before);
}

TEST(ClmsUpdate, ScalarExample) {
  LmsState<Complex> s({Complex(0, 0)}, 0.5, 0.0);
  const std::vector<Complex> z{Complex(1, 0)};
  clms_update(s, Complex(1, 0), z);
  EXPECT_EQ(s.weights[0], Complex(0.5, 0));
}

TEST(ClmsUpdate, ConjugatesRegressor) {
  LmsState<Complex> s({Complex(0, 0)}, 1.0, 0.0);
  const std::vector<Complex> z{Complex(0, 1)};
  clms_update(s, Complex(1, 0), z);
  EXPECT_EQ(s.weights[0], Complex(0, -1));
}

TEST(ClmsUpdate, ZeroRegressorWithoutRegularizer) {
  LmsState<Complex> s({Complex(0.1, 0), Complex(0, 0)}, 0.5, 0.0);
  const std::vector<Complex> z(2);
  clms_update(s, Complex(1, 1), z);
  EXPECT_EQ(s.weights[0], Complex(0.1, 0));
  EXPECT_TRUE(is_finite(s.weights[1]));
}

TEST(NlmsUpdate, Examples) {
  LmsState<double> s(1, 1.0, 0.0);
  const std::vector<double> z{2.0};
  nlms_update(s, 0.0, z);
  EXPECT_EQ(s.weights[0], 0.0);
  nlms_update(s, 1.0, z);
  EXPECT_DOUBLE_EQ(s.weights[0], 0.5);
}

TEST(NlmsUpdate, MovesAlongErrorSign) {
  LmsState<double> s(1, 0.5, 1e-12);
  const std::vector<double> z{-3.0};
  nlms_update(s, 1.0, z);
  EXPECT_LT(s.weights[0], 0.0);
}

// After one normalized update, the a-posteriori error on the same regressor is
// (1 - mu zHz / (eps + zHz)) e, i.e. strictly smaller in magnitude.
TEST(ClmsUpdate, APosterioriContraction) {
  Rng rng(21);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int k = 0; k < 200; ++k) {
    const std::size_t P = 1 + static_cast<std::size_t>(k % 8);
    std::vector<Complex> w(P), z(P);
    for (auto& v : w) v = {g(rng), g(rng)};
    for (auto& v : z) v = {g(rng), g(rng)};
    LmsState<Complex> s(w, u(rng), 1e-12);
    const Complex y{g(rng), g(rng)};
    const Complex e = y - lms_predict<Complex>(s, z);
    clms_update(s, e, z);
    const Complex e_post = y - lms_predict<Complex>(s, z);
    EXPECT_LT(std::abs(e_post), std::abs(e));
    EXPECT_NEAR(std::abs(e_post), (1.0 - s.step_size) * std::abs(e), 1e-9 * (1.0 + std::abs(e)));
  }
}

TEST(ClmsUpdate, RealDataMatchesNlms) {
  Rng rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  LmsState<double> r(5, 0.3, 1e-6);
  LmsState<Complex> c(5, 0.3, 1e-6);
  for (int n = 0; n < 100; ++n) {
    std::vector<double> z(5);
    for (auto& v : z) v = g(rng);
    const std::vector<Complex> zc(z.begin(), z.end());
    const double y = g(rng);
    nlms_update(r, y - lms_predict<double>(r, z), z);
    clms_update(c, Complex(y, 0) - lms_predict<Complex>(c, zc), zc);
  }
  for (std::size_t p = 0; p < 5; ++p) {
    EXPECT_EQ(c.weights[p].imag(), 0.0);
    EXPECT_NEAR(c.weights[p].real(), r.weights[p], 1e-12);
  }
}
