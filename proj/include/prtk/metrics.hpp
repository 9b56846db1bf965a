#pragma once

// Distances modulo the phase-retrieval symmetry group: cyclic translation of
// the padded frame, conjugate flip, and global phase.

#include <cmath>
#include <numbers>

#include "prtk/fft.hpp"
#include "prtk/field.hpp"

namespace prtk::metrics {

struct Alignment {
  std::size_t shift_row = 0;  // content of xhat sits at x's content + shift
  std::size_t shift_col = 0;
  bool flipped = false;       // xhat was conjugate-flipped before shifting
  double phase = 0.0;         // in [-pi, pi); x ~ exp(i phase) * aligned xhat
  double rel_error = 0.0;     // ||x - aligned xhat||_F / ||x||_F
};

/// Maps an angle into [-pi, pi).
inline double wrap_phase(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a < 0.0) a += two_pi;
  const double w = a - std::numbers::pi;
  return w >= std::numbers::pi ? -std::numbers::pi : w;
}

/// Applies a found alignment to xhat in the m x m frame so it overlays x.
inline ComplexImage apply_alignment(const ComplexImage& xhat, const Alignment& a, std::size_t m) {
  auto h = embed(xhat, m);
  if (a.flipped) h = conjugate_flip(h);
  h = cyclic_shift(h, -static_cast<std::ptrdiff_t>(a.shift_row),
                   -static_cast<std::ptrdiff_t>(a.shift_col));
  const cplx rot = std::polar(1.0, a.phase);
  for (auto& v : h) v *= rot;
  return h;
}

/// Exact minimizer of ||x - e^{i phi} S_d(T_s(xhat))|| over integer cyclic
/// shifts d of the m x m frame, flip state s and phase phi.
///
/// For each s the correlation C(d) = sum_r x(r) conj(xhat_s(r + d)) is formed
/// with FFTs and the optimum is the largest |C(d)|, phi = arg C. The error is
/// then measured on the aligned image directly; the closed form
/// ||x||^2 + ||xhat||^2 - 2|C| cancels badly near zero.
inline Alignment best_symmetry_alignment(const ComplexImage& x, const ComplexImage& xhat,
                                         std::size_t m) {
  if (x.side() != xhat.side()) throw DimensionError("alignment needs equally sized images");
  if (m < x.side()) throw DimensionError("alignment frame smaller than the images");
  const double nx = x.squared_norm();
  if (!(nx > 0.0)) throw ValidationError("ground truth must be nonzero");

  const auto fx = fft::forward(embed(x, m));
  const auto padded_hat = embed(xhat, m);

  Alignment best;
  double best_mag = -1.0;
  cplx best_c{};
  for (const bool flip : {false, true}) {
    auto fh = fft::forward(flip ? conjugate_flip(padded_hat) : padded_hat);
    // c(t) = sum_r x(r) conj(h(r - t)) = IDFT(X conj(H))(t); d = -t.
    for (std::size_t i = 0; i < fh.size(); ++i) fh[i] = fx[i] * std::conj(fh[i]);
    const auto corr = fft::inverse(std::move(fh));
    for (std::size_t t = 0; t < corr.size(); ++t) {
      const double mag = std::abs(corr[t]);
      if (mag > best_mag) {
        best_mag = mag;
        best_c = corr[t];
        const std::size_t tr = t / m, tc = t % m;
        best.shift_row = (m - tr) % m;
        best.shift_col = (m - tc) % m;
        best.flipped = flip;
      }
    }
  }
  best.phase = best_mag > 0.0 ? wrap_phase(std::arg(best_c)) : 0.0;
  const auto px = embed(x, m);
  const auto aligned = apply_alignment(xhat, best, m);
  double dist = 0.0;
  for (std::size_t i = 0; i < px.size(); ++i) dist += std::norm(px[i] - aligned[i]);
  best.rel_error = std::sqrt(dist / nx);
  return best;
}

/// ||y - |F xhat_pad|^2||_F / ||y||_F.
inline double fourier_residual(const DiffractionPattern& y, const ComplexImage& xhat) {
  const double ny = y.squared_norm();
  if (!(ny > 0.0)) throw ValidationError("fourier residual needs a nonzero pattern");
  return std::sqrt(field::loss(y, xhat) / ny);
}

}  // namespace prtk::metrics
