#pragma once

// Thin FFTW wrapper for square 2D transforms.
//
// Both directions are unnormalized: forward uses exp(-2 pi i (ur + vc) / m),
// backward uses exp(+2 pi i ...). The normalized inverse DFT is backward / m^2.
// Plans are built with FFTW_ESTIMATE | FFTW_UNALIGNED so the same size always
// yields the same plan and therefore bitwise-identical results.

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "prtk/grid.hpp"

namespace prtk::fft {

enum class Direction { forward, backward };

namespace detail {

inline std::mutex& planner_mutex() {
  static std::mutex mtx;
  return mtx;
}

class PlanCache {
 public:
  PlanCache() = default;
  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;
  ~PlanCache() {
    std::lock_guard lock(planner_mutex());
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t m, Direction dir) {
    const auto key = std::make_pair(m, dir);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::lock_guard lock(planner_mutex());
    auto* buf = fftw_alloc_complex(m * m);
    const int sign = dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(m), static_cast<int>(m), buf, buf, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::map<std::pair<std::size_t, Direction>, fftw_plan> plans_;
};

inline PlanCache& plans() {
  thread_local PlanCache cache;
  return cache;
}

}  // namespace detail

/// In-place unnormalized 2D DFT of a square complex grid.
inline void transform(ComplexImage& a, Direction dir) {
  if (a.empty()) return;
  auto* ptr = reinterpret_cast<fftw_complex*>(a.values().data());
  fftw_execute_dft(detail::plans().get(a.side(), dir), ptr, ptr);
}

inline ComplexImage forward(ComplexImage a) {
  transform(a, Direction::forward);
  return a;
}

/// Unnormalized backward transform; equals the adjoint of `forward`.
inline ComplexImage adjoint(ComplexImage a) {
  transform(a, Direction::backward);
  return a;
}

/// Normalized inverse DFT.
inline ComplexImage inverse(ComplexImage a) {
  transform(a, Direction::backward);
  const double scale = 1.0 / static_cast<double>(a.size());
  for (auto& v : a) v *= scale;
  return a;
}

}  // namespace prtk::fft
