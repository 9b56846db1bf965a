#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "prtk/errors.hpp"
#include "prtk/grid.hpp"

namespace prtk {

struct TracePoint {
  std::uint64_t iter = 0;
  double loss = 0.0;
  double elapsed_ms = 0.0;
};

using LossTrace = std::vector<TracePoint>;

/// Running minimum of a trace's loss column.
inline LossTrace best_so_far(const LossTrace& trace) {
  LossTrace out = trace;
  double best = std::numeric_limits<double>::infinity();
  for (auto& tp : out) {
    if (tp.loss < best) best = tp.loss;
    tp.loss = best;
  }
  return out;
}

struct RecoveryResult {
  ComplexImage image;
  LossTrace trace;
  double best_loss = 0.0;
  double wall_time_ms = 0.0;
  double fourier_residual = 0.0;  // ||y - |F x|^2||_F / ||y||_F of `image`
  std::string solver;
};

/// A solve that produced NaN/Inf with nothing usable to return.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, LossTrace trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  const LossTrace& trace() const noexcept { return trace_; }

 private:
  LossTrace trace_;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace prtk
