#pragma once

// Gradient-based solvers for the Fourier least-squares problem:
//  - solve_sidgp: fit the weights of an untrained decoder, X = G_theta(z).
//  - solve_pixel_least_squares: Adam directly on the n x n pixels.
// Both report the best iterate seen, not the last one.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>

#include "prtk/adam.hpp"
#include "prtk/decoder.hpp"
#include "prtk/field.hpp"
#include "prtk/recovery.hpp"

namespace prtk::optim {

struct SidgpConfig {
  decoder::DecoderConfig decoder = decoder::DecoderConfig::desk_scale();
  std::size_t iterations = 3000;
  double lr = 0.01;
  std::uint64_t rng_seed = 0;
  std::size_t restarts = 2;
  std::size_t log_every = 10;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const {
    decoder.validate();
    if (log_every == 0) throw ValidationError("log_every must be positive");
    if (!(lr > 0.0)) throw ValidationError("learning rate must be positive");
  }

  AdamParams adam() const { return {lr, beta1, beta2, eps}; }
};

namespace detail {

inline double residual_ratio(double loss, const DiffractionPattern& y) {
  const double ny = std::sqrt(y.squared_norm());
  return ny > 0.0 ? std::sqrt(loss) / ny : std::sqrt(loss);
}

inline bool should_log(std::size_t it, std::size_t last, std::size_t every) {
  return it % every == 0 || it == last;
}

}  // namespace detail

/// Minimizes ||y - |F G_theta(z)|^2||_F^2 over theta with Adam. Runs
/// 1 + restarts independent fits (fit r seeded with rng_seed + r) and keeps
/// the lowest-loss image over all of them. If `best_model` is given it
/// receives the weights and seed that produced that image.
inline RecoveryResult solve_sidgp(const DiffractionPattern& y, const SidgpConfig& cfg,
                                  std::optional<decoder::DecoderInit>* best_model = nullptr) {
  cfg.validate();
  const auto& dcfg = cfg.decoder;
  field::require_oversampled(dcfg.output_side(), y.side());

  Stopwatch clock;
  RecoveryResult result;
  result.solver = "sidgp";
  result.best_loss = std::numeric_limits<double>::infinity();
  std::string last_failure;

  for (std::size_t r = 0; r <= cfg.restarts; ++r) {
    auto [weights, seed] = decoder::init_decoder(dcfg, cfg.rng_seed + r);
    AdamState adam(weights.parameter_count(), cfg.adam());
    for (std::size_t it = 0; it <= cfg.iterations; ++it) {
      const std::uint64_t global_iter = r * (cfg.iterations + 1) + it;
      auto fwd = decoder::decoder_forward(weights, seed, dcfg);
      if (!fwd.image.all_finite()) {
        last_failure = "decoder output became non-finite in restart " + std::to_string(r);
        break;
      }
      auto lg = field::loss_and_gradient(y, fwd.image);
      const bool log = detail::should_log(it, cfg.iterations, cfg.log_every);
      if (!std::isfinite(lg.loss)) {
        result.trace.push_back({global_iter, lg.loss, clock.elapsed_ms()});
        last_failure = "loss became non-finite in restart " + std::to_string(r);
        break;
      }
      if (log) result.trace.push_back({global_iter, lg.loss, clock.elapsed_ms()});
      if (lg.loss < result.best_loss) {
        result.best_loss = lg.loss;
        result.image = fwd.image;
        if (best_model) best_model->emplace(decoder::DecoderInit{weights, seed});
      }
      if (it == cfg.iterations) break;
      auto grads = decoder::decoder_backward(fwd.tape, lg.gradient, weights, dcfg);
      try {
        adam_step(adam, weights.flat(), grads.flat());
      } catch (const NumericalError& e) {
        last_failure = e.what();
        break;
      }
    }
  }

  if (!std::isfinite(result.best_loss)) {
    throw DivergenceError("sidgp diverged in every restart: " + last_failure, result.trace);
  }
  result.fourier_residual = detail::residual_ratio(result.best_loss, y);
  result.wall_time_ms = clock.elapsed_ms();
  return result;
}

enum class PixelInit { random, zeros };

struct PixelLsConfig {
  std::size_t n = 32;
  std::size_t iterations = 3000;
  double lr = 0.01;
  std::uint64_t rng_seed = 0;
  std::size_t log_every = 10;
  PixelInit init = PixelInit::random;
};

/// Complex Gaussian start scaled so that its padded spectrum carries the same
/// energy as y (sum y = m^2 sum |x|^2).
inline ComplexImage random_pixel_start(const DiffractionPattern& y, std::size_t n,
                                       std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexImage x(n);
  for (auto& v : x) {
    const double re = normal(rng);
    const double im = normal(rng);
    v = cplx(re, im);
  }
  double target = 0.0;
  for (double v : y) target += v;
  target /= static_cast<double>(y.size());
  const double have = x.squared_norm();
  const double scale = have > 0.0 ? std::sqrt(target / have) : 0.0;
  for (auto& v : x) v *= scale;
  return x;
}

/// Adam on the raw pixels of an n x n complex image.
inline RecoveryResult solve_pixel_least_squares(const DiffractionPattern& y,
                                                const PixelLsConfig& cfg) {
  field::require_oversampled(cfg.n, y.side());
  if (cfg.log_every == 0) throw ValidationError("log_every must be positive");
  if (!(cfg.lr > 0.0)) throw ValidationError("learning rate must be positive");

  Stopwatch clock;
  RecoveryResult result;
  result.solver = "baseline-ls";
  result.best_loss = std::numeric_limits<double>::infinity();

  ComplexImage x = cfg.init == PixelInit::zeros ? ComplexImage(cfg.n)
                                                : random_pixel_start(y, cfg.n, cfg.rng_seed);
  // complex<double> is layout-compatible with double[2]; (Re, Im) interleave
  // matches the packing of the gradient.
  auto as_reals = [](ComplexImage& img) {
    return std::span<double>(reinterpret_cast<double*>(img.values().data()), 2 * img.size());
  };
  AdamState adam(2 * x.size(), {cfg.lr, 0.9, 0.999, 1e-8});

  for (std::size_t it = 0; it <= cfg.iterations; ++it) {
    auto lg = field::loss_and_gradient(y, x);
    if (!std::isfinite(lg.loss)) {
      result.trace.push_back({it, lg.loss, clock.elapsed_ms()});
      if (std::isfinite(result.best_loss)) break;
      throw DivergenceError("pixel least squares diverged", result.trace);
    }
    if (detail::should_log(it, cfg.iterations, cfg.log_every)) {
      result.trace.push_back({it, lg.loss, clock.elapsed_ms()});
    }
    if (lg.loss < result.best_loss) {
      result.best_loss = lg.loss;
      result.image = x;
    }
    if (it == cfg.iterations) break;
    adam_step(adam, as_reals(x), as_reals(lg.gradient));
  }
  result.fourier_residual = detail::residual_ratio(result.best_loss, y);
  result.wall_time_ms = clock.elapsed_ms();
  return result;
}

}  // namespace prtk::optim
