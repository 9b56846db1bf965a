#pragma once

// Oversampled Fourier forward model Y = |F(pad_m(X))|^2, its least-squares
// misfit, the gradient of that misfit, and the autocorrelation support cue.

#include <algorithm>
#include <cmath>
#include <string>

#include "prtk/fft.hpp"
#include "prtk/grid.hpp"

namespace prtk::field {

inline constexpr double kDefaultSupportTau = 0.04;

/// Default oversampled side for an n x n object.
inline constexpr std::size_t default_oversampling(std::size_t n) { return 2 * n; }

inline void require_oversampled(std::size_t n, std::size_t m) {
  if (n == 0) throw DimensionError("object side must be positive");
  if (m < 2 * n - 1) {
    throw DimensionError("measurement side " + std::to_string(m) + " < 2n - 1 for n = " +
                         std::to_string(n));
  }
}

/// F(pad_m(x)), the complex spectrum behind the intensities.
inline ComplexImage padded_spectrum(const ComplexImage& x, std::size_t m) {
  require_oversampled(x.side(), m);
  if (!x.all_finite()) throw ValidationError("object contains non-finite entries");
  return fft::forward(embed(x, m));
}

inline DiffractionPattern forward_intensities(const ComplexImage& x, std::size_t m) {
  const auto spec = padded_spectrum(x, m);
  DiffractionPattern y(m);
  for (std::size_t i = 0; i < spec.size(); ++i) y[i] = std::norm(spec[i]);
  return y;
}

/// ||y - |F x_pad|^2||_F^2, no per-pixel averaging.
inline double loss(const DiffractionPattern& y, const ComplexImage& x) {
  const auto spec = padded_spectrum(x, y.side());
  double s = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double d = y[i] - std::norm(spec[i]);
    s += d * d;
  }
  return s;
}

struct LossAndGradient {
  double loss = 0.0;
  ComplexImage gradient;
};

/// Loss plus its gradient w.r.t. (Re x, Im x), packed as Re g + i Im g:
///   g = 4 crop_n( F^H( (|F x_pad|^2 - y) .* F x_pad ) ).
inline LossAndGradient loss_and_gradient(const DiffractionPattern& y, const ComplexImage& x) {
  auto spec = padded_spectrum(x, y.side());
  double s = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double resid = std::norm(spec[i]) - y[i];
    s += resid * resid;
    spec[i] *= resid;
  }
  fft::transform(spec, fft::Direction::backward);
  auto g = crop_cyclic(spec, x.side());
  for (auto& v : g) v *= 4.0;
  return {s, std::move(g)};
}

inline ComplexImage loss_gradient(const DiffractionPattern& y, const ComplexImage& x) {
  return loss_and_gradient(y, x).gradient;
}

/// Mask {|a| > tau max|a|} where a = IDFT(y) is the autocorrelation of the
/// object. The zero-lag pixel is always set.
inline SupportMask autocorrelation_support(const DiffractionPattern& y,
                                           double tau = kDefaultSupportTau) {
  if (!(tau > 0.0 && tau < 1.0)) throw ValidationError("support threshold tau must be in (0, 1)");
  if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; })) {
    throw ValidationError("cannot estimate support from an all-zero pattern");
  }
  ComplexImage a(y.side());
  for (std::size_t i = 0; i < y.size(); ++i) a[i] = y[i];
  a = fft::inverse(std::move(a));

  double peak = 0.0;
  for (const auto& v : a) peak = std::max(peak, std::abs(v));
  SupportMask mask(y.side());
  for (std::size_t i = 0; i < a.size(); ++i) mask[i] = std::abs(a[i]) > tau * peak ? 1 : 0;
  mask[0] = 1;
  return mask;
}

}  // namespace prtk::field
