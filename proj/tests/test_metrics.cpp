#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "prtk/metrics.hpp"

using namespace prtk;

namespace {

// conj(x(n-1-r, n-1-c)): a flip plus shift that stays inside the n x n window.
ComplexImage flip_in_place(const ComplexImage& x) {
  const std::size_t n = x.side();
  ComplexImage out(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out(r, c) = std::conj(x(n - 1 - r, n - 1 - c));
  return out;
}

ComplexImage rotate(ComplexImage x, double phi) {
  const cplx rot = std::polar(1.0, phi);
  for (auto& v : x) v *= rot;
  return x;
}

double distance(const ComplexImage& a, const ComplexImage& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST(WrapPhase, MapsIntoHalfOpenInterval) {
  constexpr double pi = std::numbers::pi;
  EXPECT_DOUBLE_EQ(metrics::wrap_phase(0.3), 0.3);
  EXPECT_DOUBLE_EQ(metrics::wrap_phase(pi), -pi);
  EXPECT_DOUBLE_EQ(metrics::wrap_phase(-pi), -pi);
  EXPECT_NEAR(metrics::wrap_phase(2 * pi + 0.5), 0.5, 1e-14);
  EXPECT_NEAR(metrics::wrap_phase(-3 * pi + 0.25), -pi + 0.25, 1e-14);
}

TEST(Alignment, IdentityIsExact) {
  std::mt19937_64 rng(1);
  const auto x = oracle::random_image(6, rng);
  const auto a = metrics::best_symmetry_alignment(x, x, 12);
  EXPECT_LE(a.rel_error, 1e-7);
  EXPECT_EQ(a.shift_row, 0u);
  EXPECT_EQ(a.shift_col, 0u);
  EXPECT_FALSE(a.flipped);
  EXPECT_NEAR(a.phase, 0.0, 1e-12);
}

TEST(Alignment, RecoversShiftAndPhase) {
  std::mt19937_64 rng(2);
  const std::size_t m = 16;
  const auto x = embed(oracle::random_image(6, rng), m);
  const auto xhat = rotate(cyclic_shift(x, 3, 5), 0.7);
  const auto a = metrics::best_symmetry_alignment(x, xhat, m);
  EXPECT_EQ(a.shift_row, 3u);
  EXPECT_EQ(a.shift_col, 5u);
  EXPECT_FALSE(a.flipped);
  EXPECT_NEAR(a.phase, -0.7, 1e-12);
  EXPECT_LE(a.rel_error, 1e-7);
  EXPECT_LE(distance(x, metrics::apply_alignment(xhat, a, m)) / std::sqrt(x.squared_norm()),
            1e-12);
}

TEST(Alignment, MatchesBruteForce) {
  std::mt19937_64 rng(3);
  const std::size_t n = 4, m = 8;
  for (int t = 0; t < 50; ++t) {
    const auto x = oracle::random_image(n, rng);
    const auto xhat = oracle::random_image(n, rng);
    const auto a = metrics::best_symmetry_alignment(x, xhat, m);
    const auto b = oracle::brute_force_alignment(x, xhat, m);
    EXPECT_NEAR(a.rel_error, b.rel_error, 1e-10) << t;
    EXPECT_EQ(a.shift_row, b.shift_row) << t;
    EXPECT_EQ(a.shift_col, b.shift_col) << t;
    EXPECT_EQ(a.flipped, b.flipped) << t;
    const auto aligned = metrics::apply_alignment(xhat, a, m);
    EXPECT_NEAR(distance(embed(x, m), aligned) / std::sqrt(x.squared_norm()), a.rel_error, 1e-10);
  }
}

TEST(Alignment, EverySymmetryCopyIsExact) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> phase(-3.0, 3.0);
  for (std::size_t m : {5u, 6u, 8u}) {
    const auto x = embed(oracle::random_image(m / 2, rng), m);
    for (int flip = 0; flip < 2; ++flip) {
      const auto base = flip ? conjugate_flip(x) : x;
      for (std::ptrdiff_t dr = 0; dr < static_cast<std::ptrdiff_t>(m); ++dr) {
        for (std::ptrdiff_t dc = 0; dc < static_cast<std::ptrdiff_t>(m); ++dc) {
          const auto copy = rotate(cyclic_shift(base, dr, dc), phase(rng));
          const auto a = metrics::best_symmetry_alignment(x, copy, m);
          EXPECT_LE(a.rel_error, 1e-10) << m << " " << flip << " " << dr << "," << dc;
        }
      }
    }
  }
}

TEST(Alignment, InvariantUnderSharedTransform) {
  std::mt19937_64 rng(5);
  const std::size_t m = 10;
  for (int t = 0; t < 10; ++t) {
    const auto x = embed(oracle::random_image(5, rng), m);
    const auto xhat = embed(oracle::random_image(5, rng), m);
    const double e = metrics::best_symmetry_alignment(x, xhat, m).rel_error;
    auto g = [&](const ComplexImage& v) { return rotate(cyclic_shift(conjugate_flip(v), 2, 7), 1.1); };
    EXPECT_NEAR(metrics::best_symmetry_alignment(g(x), g(xhat), m).rel_error, e, 1e-10);
  }
}

TEST(Alignment, ZeroEstimateHasUnitError) {
  std::mt19937_64 rng(6);
  const auto x = oracle::random_image(4, rng);
  EXPECT_DOUBLE_EQ(metrics::best_symmetry_alignment(x, ComplexImage(4), 8).rel_error, 1.0);
}

TEST(Alignment, Errors) {
  EXPECT_THROW(metrics::best_symmetry_alignment(ComplexImage(4), ComplexImage(4), 8),
               ValidationError);
  ComplexImage x(4, cplx(1.0, 0.0));
  EXPECT_THROW(metrics::best_symmetry_alignment(x, ComplexImage(3), 8), DimensionError);
  EXPECT_THROW(metrics::best_symmetry_alignment(x, x, 3), DimensionError);
}

TEST(FourierResidual, Cases) {
  std::mt19937_64 rng(7);
  const auto x = oracle::random_image(4, rng);
  const auto y = field::forward_intensities(x, 8);
  EXPECT_LE(metrics::fourier_residual(y, x), 1e-14);
  EXPECT_DOUBLE_EQ(metrics::fourier_residual(y, ComplexImage(4)), 1.0);
  const auto other = oracle::random_image(4, rng);
  const double expect = std::sqrt(oracle::direct_loss(y.vector(), other, 8) / y.squared_norm());
  EXPECT_NEAR(metrics::fourier_residual(y, other), expect, 1e-12 * expect);
  EXPECT_LE(metrics::fourier_residual(y, rotate(flip_in_place(x), 0.4)), 1e-13);
  EXPECT_THROW(metrics::fourier_residual(DiffractionPattern(8), x), ValidationError);
}

TEST(FourierResidual, ZeroExactlyForSymmetryCopies) {
  // Noiseless: zero residual and zero alignment error go together.
  std::mt19937_64 rng(8);
  const std::size_t m = 8;
  const auto x = oracle::random_image(4, rng);
  const auto y = field::forward_intensities(x, m);
  const auto copy = rotate(flip_in_place(x), -2.0);
  EXPECT_LE(metrics::fourier_residual(y, copy), 1e-13);
  EXPECT_LE(metrics::best_symmetry_alignment(x, copy, m).rel_error, 1e-10);
  const auto off = oracle::random_image(4, rng);
  EXPECT_GT(metrics::fourier_residual(y, off), 1e-3);
  EXPECT_GT(metrics::best_symmetry_alignment(x, off, m).rel_error, 1e-3);
}
