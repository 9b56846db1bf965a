#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prtk/errors.hpp"

namespace prtk::optim {

struct AdamParams {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamState(std::size_t n, AdamParams p = {}) : params(p), m(n, 0.0), v(n, 0.0) {}

  AdamParams params;
  std::uint64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;
};

/// One bias-corrected Adam update of `x` in place.
inline void adam_step(AdamState& state, std::span<double> x, std::span<const double> grad) {
  if (x.size() != state.m.size() || grad.size() != x.size()) {
    throw DimensionError("adam: parameter, gradient and moment sizes disagree");
  }
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i])) {
      throw NumericalError("adam: non-finite gradient at index " + std::to_string(i) +
                           " (step " + std::to_string(state.step + 1) + ")");
    }
  }
  const auto& p = state.params;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double corr1 = 1.0 - std::pow(p.beta1, t);
  const double corr2 = 1.0 - std::pow(p.beta2, t);
  for (std::size_t i = 0; i < x.size(); ++i) {
    state.m[i] = p.beta1 * state.m[i] + (1.0 - p.beta1) * grad[i];
    state.v[i] = p.beta2 * state.v[i] + (1.0 - p.beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / corr1;
    const double v_hat = state.v[i] / corr2;
    x[i] -= p.lr * m_hat / (std::sqrt(v_hat) + p.eps);
  }
}

}  // namespace prtk::optim
