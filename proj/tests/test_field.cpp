#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "prtk/field.hpp"

using namespace prtk;

TEST(ForwardIntensities, DeltaHasFlatSpectrum) {
  ComplexImage x(2);
  x(0, 0) = 1.0;
  const auto y = field::forward_intensities(x, 4);
  ASSERT_EQ(y.side(), 4u);
  for (double v : y) EXPECT_NEAR(v, 1.0, 1e-15);
}

TEST(ForwardIntensities, ZeroObjectGivesZeroPattern) {
  const auto y = field::forward_intensities(ComplexImage(2), 4);
  for (double v : y) EXPECT_EQ(v, 0.0);
}

TEST(ForwardIntensities, MatchesDirectDft) {
  std::mt19937_64 rng(11);
  const auto x = oracle::random_image(3, rng);
  const auto y = field::forward_intensities(x, 8);
  EXPECT_LE(oracle::rel_error(y.vector(), oracle::direct_intensities(x, 8)), 1e-12);
}

TEST(ForwardIntensities, OddFrameSizes) {
  std::mt19937_64 rng(12);
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto x = oracle::random_image(n, rng);
    const std::size_t m = 2 * n - 1;
    EXPECT_LE(oracle::rel_error(field::forward_intensities(x, m).vector(),
                                oracle::direct_intensities(x, m)),
              1e-12)
        << "n=" << n;
  }
}

TEST(ForwardIntensities, RejectsUndersampledFrame) {
  EXPECT_THROW(field::forward_intensities(ComplexImage(4), 6), DimensionError);
  EXPECT_NO_THROW(field::forward_intensities(ComplexImage(4), 7));
}

TEST(ForwardIntensities, RejectsNonFiniteObject) {
  ComplexImage x(2);
  x(1, 1) = cplx(std::nan(""), 0.0);
  EXPECT_THROW(field::forward_intensities(x, 4), ValidationError);
  EXPECT_THROW((ComplexImage(1, std::vector<cplx>{cplx(INFINITY, 0.0)})), ValidationError);
}

TEST(ForwardIntensities, Parseval) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 10; ++t) {
    const auto x = oracle::random_image(6, rng);
    const auto y = field::forward_intensities(x, 12);
    double total = 0.0;
    for (double v : y) total += v;
    const double expect = 144.0 * x.squared_norm();
    EXPECT_LE(std::abs(total - expect) / expect, 1e-12);
  }
}

TEST(ForwardIntensities, SymmetryInvariance) {
  std::mt19937_64 rng(14);
  const std::size_t n = 5, m = 10;
  for (int t = 0; t < 20; ++t) {
    const auto x = oracle::random_image(n, rng);
    const auto y = field::forward_intensities(x, m);
    const auto padded = embed(x, m);
    auto check = [&](const ComplexImage& variant) {
      const auto yv = fft::forward(variant);
      std::vector<double> iv(yv.size());
      for (std::size_t i = 0; i < yv.size(); ++i) iv[i] = std::norm(yv[i]);
      EXPECT_LE(oracle::rel_error(iv, y.vector()), 1e-10);
    };
    check(cyclic_shift(padded, 3, 7));
    check(conjugate_flip(padded));
    auto rotated = padded;
    for (auto& v : rotated) v *= std::polar(1.0, 1.234);
    check(rotated);
  }
}

TEST(Loss, SelfConsistentMeasurementIsZero) {
  std::mt19937_64 rng(21);
  const auto x = oracle::random_image(4, rng);
  EXPECT_NEAR(field::loss(field::forward_intensities(x, 8), x), 0.0, 1e-18);
}

TEST(Loss, ZeroObjectGivesSumOfSquares) {
  DiffractionPattern y(6);
  double expect = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = 0.1 * static_cast<double>(i);
    expect += y[i] * y[i];
  }
  EXPECT_DOUBLE_EQ(field::loss(y, ComplexImage(3)), expect);
}

TEST(Loss, MatchesOracleRecomputation) {
  std::mt19937_64 rng(22);
  const auto x = oracle::random_image(4, rng);
  const auto x2 = oracle::random_image(4, rng);
  const auto y = field::forward_intensities(x2, 9);
  const double expect = oracle::direct_loss(y.vector(), x, 9);
  EXPECT_LE(std::abs(field::loss(y, x) - expect) / expect, 1e-12);
}

TEST(Loss, DimensionMismatch) {
  EXPECT_THROW(field::loss(DiffractionPattern(5), ComplexImage(4)), DimensionError);
}

TEST(LossGradient, ZeroAtGroundTruth) {
  std::mt19937_64 rng(31);
  const auto x = oracle::random_image(6, rng);
  const auto g = field::loss_gradient(field::forward_intensities(x, 12), x);
  for (const auto& v : g) EXPECT_LE(std::abs(v), 1e-10);
}

namespace {

void expect_gradient_matches_fd(const DiffractionPattern& y, ComplexImage x) {
  const auto g = field::loss_gradient(y, x);
  const std::vector<double> yv = y.vector();
  const std::size_t m = y.side();
  double gmax = 0.0;
  for (const auto& v : g) gmax = std::max({gmax, std::abs(v.real()), std::abs(v.imag())});
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto* parts = reinterpret_cast<double*>(&x[i]);
    for (int part = 0; part < 2; ++part) {
      const double fd = oracle::central_difference(
          [&] { return oracle::direct_loss(yv, x, m); }, parts[part], 1e-6);
      const double an = part == 0 ? g[i].real() : g[i].imag();
      EXPECT_LE(oracle::rel_diff(an, fd, 1e-3 * gmax), 1e-6) << "pixel " << i << " part " << part;
    }
  }
}

}  // namespace

TEST(LossGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(32);
  const auto x = oracle::random_image(8, rng, 0.3);
  const auto y = field::forward_intensities(oracle::random_image(8, rng, 0.3), 16);
  expect_gradient_matches_fd(y, x);
}

TEST(LossGradient, ZeroMeasurementMatchesFiniteDifferences) {
  std::mt19937_64 rng(33);
  const auto x = oracle::random_image(4, rng, 0.5);
  expect_gradient_matches_fd(DiffractionPattern(8), x);
}

TEST(AutocorrelationSupport, DeltaGivesOnlyZeroLag) {
  ComplexImage x(4);
  x(2, 1) = 1.0;
  const auto mask = field::autocorrelation_support(field::forward_intensities(x, 8), 0.5);
  EXPECT_EQ(mask.count(), 1u);
  EXPECT_EQ(mask(0, 0), 1);
}

TEST(AutocorrelationSupport, TwoPixelObject) {
  ComplexImage x(4);
  x(0, 0) = 1.0;
  x(0, 1) = 1.0;
  const auto mask = field::autocorrelation_support(field::forward_intensities(x, 8), 0.4);
  EXPECT_EQ(mask.count(), 3u);
  EXPECT_EQ(mask(0, 0), 1);
  EXPECT_EQ(mask(0, 1), 1);
  EXPECT_EQ(mask(0, 7), 1);
}

TEST(AutocorrelationSupport, TinyThresholdCoversNonzeroLags) {
  std::mt19937_64 rng(41);
  const auto x = oracle::random_image(3, rng);
  const auto mask = field::autocorrelation_support(field::forward_intensities(x, 8), 1e-9);
  // Lags (dr, dc) with |dr|, |dc| <= 2 are generically nonzero; the rest vanish.
  for (std::size_t r = 0; r < 8; ++r) {
    for (std::size_t c = 0; c < 8; ++c) {
      const bool near = (r <= 2 || r >= 6) && (c <= 2 || c >= 6);
      EXPECT_EQ(mask(r, c) != 0, near) << r << "," << c;
    }
  }
}

TEST(AutocorrelationSupport, Errors) {
  EXPECT_THROW(field::autocorrelation_support(DiffractionPattern(4), 0.5), ValidationError);
  DiffractionPattern y(4, 1.0);
  EXPECT_THROW(field::autocorrelation_support(y, 0.0), ValidationError);
  EXPECT_THROW(field::autocorrelation_support(y, 1.0), ValidationError);
}
