#pragma once

// Untrained deep-decoder style generator G_theta(z).
//
// Hidden layer: bilinear 2x upsample -> 1x1 channel mixing -> ReLU ->
// channel normalization -> per-channel gain and bias.
// Output layer: 1x1 mixing + bias, either two channels read as (Re, Im) or one
// channel squashed through a logistic sigmoid.
//
// Tensors are stored channel-major: t[c * side * side + r * side + col].

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prtk/errors.hpp"
#include "prtk/grid.hpp"

namespace prtk::decoder {

enum class OutputMode { complex2ch, real_sigmoid };

inline std::string to_string(OutputMode mode) {
  return mode == OutputMode::complex2ch ? "complex2ch" : "real_sigmoid";
}

inline OutputMode output_mode_from_string(const std::string& s) {
  if (s == "complex2ch") return OutputMode::complex2ch;
  if (s == "real_sigmoid") return OutputMode::real_sigmoid;
  throw ValidationError("unknown output mode '" + s + "'");
}

struct DecoderConfig {
  std::size_t num_layers = 3;
  std::size_t channels = 32;
  std::size_t seed_side = 4;
  OutputMode output_mode = OutputMode::complex2ch;
  double norm_epsilon = 1e-6;

  std::size_t output_side() const { return seed_side << num_layers; }
  std::size_t output_channels() const { return output_mode == OutputMode::complex2ch ? 2 : 1; }

  std::size_t parameter_count() const {
    const std::size_t k = channels;
    return num_layers * (k * k + 2 * k) + k * output_channels() + output_channels();
  }

  void validate() const {
    if (num_layers == 0 || channels == 0 || seed_side == 0) {
      throw ValidationError("decoder layers, channels and seed side must be positive");
    }
    if (num_layers > 16) throw ValidationError("decoder depth too large");
    if (!(norm_epsilon > 0.0)) throw ValidationError("norm_epsilon must be positive");
  }

  /// L=3, k=32, n0=4: 32 x 32 output.
  static DecoderConfig desk_scale(OutputMode mode = OutputMode::complex2ch) {
    return {3, 32, 4, mode, 1e-6};
  }
  /// L=4, k=64, n0=8: 128 x 128 output.
  static DecoderConfig paper_scale(OutputMode mode = OutputMode::complex2ch) {
    return {4, 64, 8, mode, 1e-6};
  }

  friend bool operator==(const DecoderConfig&, const DecoderConfig&) = default;
};

/// Fixed latent input z, channels x side x side.
class SeedTensor {
 public:
  SeedTensor(std::size_t channels, std::size_t side, std::vector<double> values)
      : channels_(channels), side_(side), values_(std::move(values)) {
    if (values_.size() != channels_ * side_ * side_) {
      throw DimensionError("seed tensor length does not match its shape");
    }
    for (double v : values_) {
      if (!std::isfinite(v)) throw ValidationError("seed tensor contains non-finite entries");
    }
  }

  std::size_t channels() const noexcept { return channels_; }
  std::size_t side() const noexcept { return side_; }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const SeedTensor&, const SeedTensor&) = default;

 private:
  std::size_t channels_;
  std::size_t side_;
  std::vector<double> values_;
};

/// All trainable parameters in one flat buffer, with per-tensor views.
///
/// Per hidden layer: mixing (k x k, [out][in]), gain (k), bias (k).
/// Output: mixing (k x c_out, [in][out]), bias (c_out).
class DecoderWeights {
 public:
  explicit DecoderWeights(const DecoderConfig& cfg)
      : cfg_(cfg), params_(cfg.parameter_count(), 0.0) {}

  const DecoderConfig& config() const noexcept { return cfg_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }

  std::span<double> flat() noexcept { return params_; }
  std::span<const double> flat() const noexcept { return params_; }

  std::span<double> mixing(std::size_t layer) { return view(layer_offset(layer), k() * k()); }
  std::span<double> gain(std::size_t layer) { return view(layer_offset(layer) + k() * k(), k()); }
  std::span<double> bias(std::size_t layer) {
    return view(layer_offset(layer) + k() * k() + k(), k());
  }
  std::span<double> output_mixing() { return view(output_offset(), k() * cfg_.output_channels()); }
  std::span<double> output_bias() {
    return view(output_offset() + k() * cfg_.output_channels(), cfg_.output_channels());
  }

  std::span<const double> mixing(std::size_t layer) const {
    return cview(layer_offset(layer), k() * k());
  }
  std::span<const double> gain(std::size_t layer) const {
    return cview(layer_offset(layer) + k() * k(), k());
  }
  std::span<const double> bias(std::size_t layer) const {
    return cview(layer_offset(layer) + k() * k() + k(), k());
  }
  std::span<const double> output_mixing() const {
    return cview(output_offset(), k() * cfg_.output_channels());
  }
  std::span<const double> output_bias() const {
    return cview(output_offset() + k() * cfg_.output_channels(), cfg_.output_channels());
  }

  bool all_finite() const {
    return std::all_of(params_.begin(), params_.end(), [](double v) { return std::isfinite(v); });
  }

  friend bool operator==(const DecoderWeights&, const DecoderWeights&) = default;

 private:
  std::size_t k() const { return cfg_.channels; }
  std::size_t layer_offset(std::size_t layer) const {
    if (layer >= cfg_.num_layers) throw ValidationError("decoder layer index out of range");
    return layer * (k() * k() + 2 * k());
  }
  std::size_t output_offset() const { return cfg_.num_layers * (k() * k() + 2 * k()); }
  std::span<double> view(std::size_t off, std::size_t len) {
    return std::span<double>(params_).subspan(off, len);
  }
  std::span<const double> cview(std::size_t off, std::size_t len) const {
    return std::span<const double>(params_).subspan(off, len);
  }

  DecoderConfig cfg_;
  std::vector<double> params_;
};

/// Gradients share the weight layout.
using WeightGradients = DecoderWeights;

struct LayerTape {
  std::size_t side = 0;             // spatial side after upsampling
  std::vector<double> upsampled;    // mixing input
  std::vector<double> pre_act;      // mixing output, before ReLU
  std::vector<double> normalized;   // channel-normalized ReLU output
  std::vector<double> inv_std;      // per channel 1 / sqrt(var + eps)
  std::vector<double> output;       // gain * normalized + bias
};

/// Activations cached by decoder_forward for decoder_backward.
struct ForwardTape {
  DecoderConfig config;
  std::vector<LayerTape> layers;
  std::vector<double> output_pre;  // c_out x n x n, before the sigmoid (if any)
};

struct DecoderInit {
  DecoderWeights weights;
  SeedTensor seed;
};

/// z ~ U[0,1), mixing entries ~ N(0, 2/k), gains 1, biases 0.
inline DecoderInit init_decoder(const DecoderConfig& cfg, std::uint64_t rng_seed) {
  cfg.validate();
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> z(cfg.channels * cfg.seed_side * cfg.seed_side);
  for (auto& v : z) v = uniform(rng);

  DecoderWeights w(cfg);
  std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(cfg.channels)));
  for (std::size_t l = 0; l < cfg.num_layers; ++l) {
    for (auto& v : w.mixing(l)) v = normal(rng);
    std::fill(w.gain(l).begin(), w.gain(l).end(), 1.0);
  }
  for (auto& v : w.output_mixing()) v = normal(rng);
  return {std::move(w), SeedTensor(cfg.channels, cfg.seed_side, std::move(z))};
}

namespace detail {

/// Source taps for one output index of a 2x bilinear upsample
/// (align_corners = false, clamped at borders).
struct Tap {
  std::size_t i0, i1;
  double w0, w1;
};

inline std::vector<Tap> upsample_taps(std::size_t in_side) {
  std::vector<Tap> taps(2 * in_side);
  for (std::size_t o = 0; o < taps.size(); ++o) {
    double src = (static_cast<double>(o) + 0.5) / 2.0 - 0.5;
    src = std::max(src, 0.0);
    const auto i0 = std::min(static_cast<std::size_t>(src), in_side - 1);
    const auto i1 = std::min(i0 + 1, in_side - 1);
    const double frac = src - static_cast<double>(i0);
    taps[o] = {i0, i1, 1.0 - frac, frac};
  }
  return taps;
}

/// Upsamples `channels` planes of side s to side 2s.
inline std::vector<double> upsample(std::span<const double> in, std::size_t channels,
                                    std::size_t s) {
  const auto taps = upsample_taps(s);
  const std::size_t t = 2 * s;
  std::vector<double> rows(channels * t * s);  // rows upsampled, cols not yet
  std::vector<double> out(channels * t * t);
  for (std::size_t ch = 0; ch < channels; ++ch) {
    const double* src = in.data() + ch * s * s;
    double* mid = rows.data() + ch * t * s;
    for (std::size_t r = 0; r < t; ++r) {
      const auto& tp = taps[r];
      for (std::size_t c = 0; c < s; ++c) {
        mid[r * s + c] = tp.w0 * src[tp.i0 * s + c] + tp.w1 * src[tp.i1 * s + c];
      }
    }
    double* dst = out.data() + ch * t * t;
    for (std::size_t r = 0; r < t; ++r) {
      for (std::size_t c = 0; c < t; ++c) {
        const auto& tp = taps[c];
        dst[r * t + c] = tp.w0 * mid[r * s + tp.i0] + tp.w1 * mid[r * s + tp.i1];
      }
    }
  }
  return out;
}

/// Exact adjoint of `upsample`.
inline std::vector<double> upsample_adjoint(std::span<const double> grad, std::size_t channels,
                                            std::size_t s) {
  const auto taps = upsample_taps(s);
  const std::size_t t = 2 * s;
  std::vector<double> mid(channels * t * s, 0.0);
  std::vector<double> out(channels * s * s, 0.0);
  for (std::size_t ch = 0; ch < channels; ++ch) {
    const double* g = grad.data() + ch * t * t;
    double* m = mid.data() + ch * t * s;
    for (std::size_t r = 0; r < t; ++r) {
      for (std::size_t c = 0; c < t; ++c) {
        const auto& tp = taps[c];
        m[r * s + tp.i0] += tp.w0 * g[r * t + c];
        m[r * s + tp.i1] += tp.w1 * g[r * t + c];
      }
    }
    double* dst = out.data() + ch * s * s;
    for (std::size_t r = 0; r < t; ++r) {
      const auto& tp = taps[r];
      for (std::size_t c = 0; c < s; ++c) {
        dst[tp.i0 * s + c] += tp.w0 * m[r * s + c];
        dst[tp.i1 * s + c] += tp.w1 * m[r * s + c];
      }
    }
  }
  return out;
}

/// out[o] = sum_i mix(o, i) * in[i], with mix(o, i) = matrix[o * in_ch + i]
/// when `out_major`, else matrix[i * out_ch + o].
inline std::vector<double> mix_channels(std::span<const double> in, std::span<const double> matrix,
                                        std::size_t in_ch, std::size_t out_ch, std::size_t plane,
                                        bool out_major) {
  std::vector<double> out(out_ch * plane, 0.0);
  for (std::size_t o = 0; o < out_ch; ++o) {
    double* dst = out.data() + o * plane;
    for (std::size_t i = 0; i < in_ch; ++i) {
      const double a = out_major ? matrix[o * in_ch + i] : matrix[i * out_ch + o];
      if (a == 0.0) continue;
      const double* src = in.data() + i * plane;
      for (std::size_t p = 0; p < plane; ++p) dst[p] += a * src[p];
    }
  }
  return out;
}

/// Backward of mix_channels: accumulates d(matrix) and returns d(in).
inline std::vector<double> mix_channels_backward(std::span<const double> in,
                                                 std::span<const double> matrix,
                                                 std::span<const double> grad_out,
                                                 std::span<double> grad_matrix, std::size_t in_ch,
                                                 std::size_t out_ch, std::size_t plane,
                                                 bool out_major) {
  std::vector<double> grad_in(in_ch * plane, 0.0);
  for (std::size_t o = 0; o < out_ch; ++o) {
    const double* go = grad_out.data() + o * plane;
    for (std::size_t i = 0; i < in_ch; ++i) {
      const double* src = in.data() + i * plane;
      double acc = 0.0;
      for (std::size_t p = 0; p < plane; ++p) acc += go[p] * src[p];
      const std::size_t idx = out_major ? o * in_ch + i : i * out_ch + o;
      grad_matrix[idx] += acc;
      const double a = matrix[idx];
      double* gi = grad_in.data() + i * plane;
      for (std::size_t p = 0; p < plane; ++p) gi[p] += a * go[p];
    }
  }
  return grad_in;
}

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace detail

struct ForwardResult {
  ComplexImage image;
  ForwardTape tape;
};

inline void check_shapes(const DecoderWeights& w, const SeedTensor& z, const DecoderConfig& cfg) {
  cfg.validate();
  if (!(w.config() == cfg)) throw DimensionError("weights were built for a different config");
  if (z.channels() != cfg.channels || z.side() != cfg.seed_side) {
    throw DimensionError("seed tensor shape does not match decoder config");
  }
}

inline ForwardResult decoder_forward(const DecoderWeights& w, const SeedTensor& z,
                                     const DecoderConfig& cfg) {
  check_shapes(w, z, cfg);
  const std::size_t k = cfg.channels;
  ForwardTape tape;
  tape.config = cfg;
  tape.layers.resize(cfg.num_layers);

  std::vector<double> h(z.values().begin(), z.values().end());
  std::size_t side = cfg.seed_side;
  for (std::size_t l = 0; l < cfg.num_layers; ++l) {
    auto& lt = tape.layers[l];
    lt.upsampled = detail::upsample(h, k, side);
    side *= 2;
    lt.side = side;
    const std::size_t plane = side * side;
    lt.pre_act = detail::mix_channels(lt.upsampled, w.mixing(l), k, k, plane, true);

    lt.normalized.resize(k * plane);
    lt.inv_std.resize(k);
    lt.output.resize(k * plane);
    const auto gain = w.gain(l);
    const auto bias = w.bias(l);
    for (std::size_t ch = 0; ch < k; ++ch) {
      const double* a = lt.pre_act.data() + ch * plane;
      double* xn = lt.normalized.data() + ch * plane;
      double mean = 0.0;
      for (std::size_t p = 0; p < plane; ++p) {
        xn[p] = a[p] > 0.0 ? a[p] : 0.0;
        mean += xn[p];
      }
      mean /= static_cast<double>(plane);
      double var = 0.0;
      for (std::size_t p = 0; p < plane; ++p) {
        xn[p] -= mean;
        var += xn[p] * xn[p];
      }
      var /= static_cast<double>(plane);
      const double inv = 1.0 / std::sqrt(var + cfg.norm_epsilon);
      lt.inv_std[ch] = inv;
      double* out = lt.output.data() + ch * plane;
      for (std::size_t p = 0; p < plane; ++p) {
        xn[p] *= inv;
        out[p] = gain[ch] * xn[p] + bias[ch];
      }
    }
    h = lt.output;
  }

  const std::size_t n = side;
  const std::size_t plane = n * n;
  const std::size_t c_out = cfg.output_channels();
  tape.output_pre = detail::mix_channels(h, w.output_mixing(), k, c_out, plane, false);
  const auto ob = w.output_bias();
  for (std::size_t c = 0; c < c_out; ++c)
    for (std::size_t p = 0; p < plane; ++p) tape.output_pre[c * plane + p] += ob[c];

  ComplexImage image(n);
  if (cfg.output_mode == OutputMode::complex2ch) {
    for (std::size_t p = 0; p < plane; ++p)
      image[p] = cplx(tape.output_pre[p], tape.output_pre[plane + p]);
  } else {
    for (std::size_t p = 0; p < plane; ++p) image[p] = detail::sigmoid(tape.output_pre[p]);
  }
  return {std::move(image), std::move(tape)};
}

/// Gradients of a scalar loss w.r.t. all weights, given the gradient of that
/// loss w.r.t. the output image packed as dL/dRe + i dL/dIm.
inline WeightGradients decoder_backward(const ForwardTape& tape, const ComplexImage& grad_out,
                                        const DecoderWeights& w, const DecoderConfig& cfg) {
  cfg.validate();
  if (!(tape.config == cfg) || !(w.config() == cfg) || tape.layers.size() != cfg.num_layers) {
    throw ValidationError("forward tape does not match the decoder config");
  }
  const std::size_t k = cfg.channels;
  const std::size_t n = cfg.output_side();
  const std::size_t plane = n * n;
  const std::size_t c_out = cfg.output_channels();
  if (grad_out.side() != n || tape.output_pre.size() != c_out * plane) {
    throw ValidationError("stale forward tape or output gradient of the wrong size");
  }

  WeightGradients grads(cfg);

  std::vector<double> d_pre(c_out * plane);
  if (cfg.output_mode == OutputMode::complex2ch) {
    for (std::size_t p = 0; p < plane; ++p) {
      d_pre[p] = grad_out[p].real();
      d_pre[plane + p] = grad_out[p].imag();
    }
  } else {
    for (std::size_t p = 0; p < plane; ++p) {
      const double s = detail::sigmoid(tape.output_pre[p]);
      d_pre[p] = grad_out[p].real() * s * (1.0 - s);
    }
  }

  auto gob = grads.output_bias();
  for (std::size_t c = 0; c < c_out; ++c) {
    double acc = 0.0;
    for (std::size_t p = 0; p < plane; ++p) acc += d_pre[c * plane + p];
    gob[c] = acc;
  }
  std::vector<double> dh = detail::mix_channels_backward(tape.layers.back().output,
                                                         w.output_mixing(), d_pre,
                                                         grads.output_mixing(), k, c_out, plane,
                                                         false);

  for (std::size_t l = cfg.num_layers; l-- > 0;) {
    const auto& lt = tape.layers[l];
    const std::size_t pl = lt.side * lt.side;
    if (lt.pre_act.size() != k * pl || dh.size() != k * pl) {
      throw ValidationError("stale forward tape: layer shapes do not match");
    }
    const auto gain = w.gain(l);
    auto ggain = grads.gain(l);
    auto gbias = grads.bias(l);
    std::vector<double> d_act(k * pl);
    for (std::size_t ch = 0; ch < k; ++ch) {
      const double* g = dh.data() + ch * pl;
      const double* xn = lt.normalized.data() + ch * pl;
      double sum_g = 0.0, sum_gx = 0.0;
      for (std::size_t p = 0; p < pl; ++p) {
        sum_g += g[p];
        sum_gx += g[p] * xn[p];
      }
      ggain[ch] = sum_gx;
      gbias[ch] = sum_g;
      // d(normalized) = gain * g; chain through the standardization.
      const double mean_dx = gain[ch] * sum_g / static_cast<double>(pl);
      const double mean_dx_x = gain[ch] * sum_gx / static_cast<double>(pl);
      const double* a = lt.pre_act.data() + ch * pl;
      double* da = d_act.data() + ch * pl;
      for (std::size_t p = 0; p < pl; ++p) {
        const double d_relu = lt.inv_std[ch] * (gain[ch] * g[p] - mean_dx - xn[p] * mean_dx_x);
        da[p] = a[p] > 0.0 ? d_relu : 0.0;
      }
    }
    auto d_up = detail::mix_channels_backward(lt.upsampled, w.mixing(l), d_act, grads.mixing(l), k,
                                              k, pl, true);
    if (l == 0) break;  // z is frozen
    dh = detail::upsample_adjoint(d_up, k, lt.side / 2);
  }
  return grads;
}

}  // namespace prtk::decoder
