#pragma once

// Plain hybrid input-output (no shrinkwrap) on the m x m padded frame.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>

#include "prtk/fft.hpp"
#include "prtk/field.hpp"
#include "prtk/recovery.hpp"

namespace prtk::hio {

struct Constraints {
  bool support = true;
  bool real = false;
  bool nonneg = false;
};

struct HioConfig {
  double beta = 0.9;
  std::size_t iterations = 2000;
  double tau = field::kDefaultSupportTau;
  Constraints constraints;
  std::uint64_t rng_seed = 0;
  std::size_t log_every = 1;

  void validate() const {
    if (!(beta > 0.0 && beta <= 1.0)) throw ValidationError("hio beta must be in (0, 1]");
    if (constraints.support && !(tau > 0.0 && tau < 1.0)) {
      throw ValidationError("support threshold tau must be in (0, 1)");
    }
    if (log_every == 0) throw ValidationError("log_every must be positive");
  }
};

/// Replaces each modulus by sqrt(y), keeping phases; zero entries get phase 0.
inline ComplexImage magnitude_project(const ComplexImage& spectrum, const DiffractionPattern& y) {
  if (spectrum.side() != y.side()) throw DimensionError("spectrum and pattern sizes differ");
  ComplexImage out(y.side());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] >= 0.0)) throw ValidationError("diffraction pattern has negative entries");
    const double target = std::sqrt(y[i]);
    const double mod = std::abs(spectrum[i]);
    out[i] = mod > 0.0 ? spectrum[i] * (target / mod) : cplx(target, 0.0);
  }
  return out;
}

namespace detail {

/// Fourier-projected iterate x' and the violation set for it.
struct Projection {
  ComplexImage projected;
  std::vector<std::uint8_t> violated;
};

inline Projection project(const ComplexImage& x_in, const DiffractionPattern& y,
                          const SupportMask& mask, const Constraints& cons) {
  auto xp = fft::inverse(magnitude_project(fft::forward(x_in), y));
  std::vector<std::uint8_t> violated(xp.size(), 0);
  for (std::size_t i = 0; i < xp.size(); ++i) {
    const bool outside = cons.support && !mask[i];
    const bool negative = cons.nonneg && xp[i].real() < 0.0;
    violated[i] = (outside || negative) ? 1 : 0;
  }
  return {std::move(xp), std::move(violated)};
}

inline void check_sizes(const ComplexImage& x_in, const DiffractionPattern& y,
                        const SupportMask& mask, const Constraints& cons) {
  if (x_in.side() != y.side()) throw DimensionError("hio iterate and pattern sizes differ");
  if (cons.support && mask.side() != y.side()) {
    throw DimensionError("support mask and pattern sizes differ");
  }
}

}  // namespace detail

/// One HIO update: pixels where x' = IDFT(P_M(DFT x_in)) satisfies the
/// constraints take x' (imaginary part dropped under the real flag), the rest
/// take x_in - beta x'.
inline ComplexImage hio_step(const ComplexImage& x_in, const DiffractionPattern& y,
                             const SupportMask& mask, const HioConfig& cfg) {
  detail::check_sizes(x_in, y, mask, cfg.constraints);
  auto [xp, violated] = detail::project(x_in, y, mask, cfg.constraints);
  ComplexImage out(x_in.side());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (violated[i]) {
      out[i] = x_in[i] - cfg.beta * xp[i];
    } else {
      out[i] = cfg.constraints.real ? cplx(xp[i].real(), 0.0) : xp[i];
    }
  }
  return out;
}

/// x' with violating pixels zeroed: the object estimate behind an iterate.
inline ComplexImage constrained_estimate(const ComplexImage& x, const DiffractionPattern& y,
                                         const SupportMask& mask, const Constraints& cons) {
  detail::check_sizes(x, y, mask, cons);
  auto [xp, violated] = detail::project(x, y, mask, cons);
  for (std::size_t i = 0; i < xp.size(); ++i) {
    if (violated[i]) {
      xp[i] = 0.0;
    } else if (cons.real) {
      xp[i] = cplx(xp[i].real(), 0.0);
    }
  }
  return xp;
}

/// Top-left corner of the cyclic n x n window of `x` holding the most
/// in-mask energy. Ties resolve to the first corner in row-major order.
inline std::pair<std::size_t, std::size_t> max_energy_window(const ComplexImage& x,
                                                             const SupportMask& mask,
                                                             std::size_t n) {
  const std::size_t m = x.side();
  std::vector<double> energy(m * m);
  for (std::size_t i = 0; i < energy.size(); ++i) energy[i] = mask[i] ? std::norm(x[i]) : 0.0;
  // Cyclic box sums along columns, then rows.
  std::vector<double> colsum(m * m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < m; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += energy[r * m + (c + j) % m];
      colsum[r * m + c] = s;
    }
  }
  double best = -1.0;
  std::pair<std::size_t, std::size_t> corner{0, 0};
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < m; ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += colsum[((r + i) % m) * m + c];
      if (s > best) {
        best = s;
        corner = {r, c};
      }
    }
  }
  return corner;
}

/// Random-phase spectral start: IDFT(sqrt(y) exp(i phi)), phi ~ U[-pi, pi).
inline ComplexImage random_phase_start(const DiffractionPattern& y, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
  ComplexImage spec(y.side());
  for (std::size_t i = 0; i < y.size(); ++i) spec[i] = std::polar(std::sqrt(y[i]), phase(rng));
  return fft::inverse(std::move(spec));
}

/// Runs plain HIO from a random-phase start. When `support` is absent and the
/// support flag is set, the mask comes from the autocorrelation at cfg.tau.
/// The returned image is the constrained estimate cropped to its best n x n
/// window; the trace holds the unnormalized Fourier misfit of that estimate.
inline RecoveryResult solve_hio(const DiffractionPattern& y, std::size_t n, const HioConfig& cfg,
                                const std::optional<SupportMask>& support = std::nullopt) {
  cfg.validate();
  field::require_oversampled(n, y.side());
  const std::size_t m = y.side();

  Stopwatch clock;
  SupportMask mask = support ? *support
                     : cfg.constraints.support ? field::autocorrelation_support(y, cfg.tau)
                                               : SupportMask(m, 1);
  if (mask.side() != m) throw DimensionError("support mask and pattern sizes differ");

  RecoveryResult result;
  result.solver = "hio";

  auto misfit = [&](const ComplexImage& est) {
    const auto spec = fft::forward(est);
    double s = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const double d = y[i] - std::norm(spec[i]);
      s += d * d;
    }
    return s;
  };

  ComplexImage x = random_phase_start(y, cfg.rng_seed);
  ComplexImage estimate = cfg.iterations == 0 ? x : ComplexImage{};
  for (std::size_t it = 1; it <= cfg.iterations; ++it) {
    x = hio_step(x, y, mask, cfg);
    if (!x.all_finite()) throw DivergenceError("hio produced non-finite values", result.trace);
    if (it % cfg.log_every == 0 || it == cfg.iterations) {
      estimate = constrained_estimate(x, y, mask, cfg.constraints);
      result.trace.push_back({it, misfit(estimate), clock.elapsed_ms()});
    }
  }
  if (cfg.iterations == 0) result.trace.push_back({0, misfit(estimate), clock.elapsed_ms()});

  const auto [r0, c0] = max_energy_window(estimate, mask, n);
  result.image = crop_cyclic(estimate, n, r0, c0);
  result.best_loss = field::loss(y, result.image);
  const double ny = std::sqrt(y.squared_norm());
  result.fourier_residual = ny > 0.0 ? std::sqrt(result.best_loss) / ny : 0.0;
  result.wall_time_ms = clock.elapsed_ms();
  return result;
}

}  // namespace prtk::hio
