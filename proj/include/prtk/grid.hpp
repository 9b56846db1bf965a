#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prtk/errors.hpp"

namespace prtk {

using cplx = std::complex<double>;

/// Dense square array, row-major. Base for the image/pattern/mask types.
template <typename T>
class SquareGrid {
 public:
  SquareGrid() = default;
  explicit SquareGrid(std::size_t side, T fill = T{})
      : side_(side), data_(side * side, fill) {}
  SquareGrid(std::size_t side, std::vector<T> data)
      : side_(side), data_(std::move(data)) {
    if (data_.size() != side_ * side_) {
      throw DimensionError("grid data length " + std::to_string(data_.size()) +
                           " does not match side " + std::to_string(side_) + "^2");
    }
  }

  std::size_t side() const noexcept { return side_; }
  std::size_t rows() const noexcept { return side_; }
  std::size_t cols() const noexcept { return side_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * side_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * side_ + c]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  const std::vector<T>& vector() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  friend bool operator==(const SquareGrid&, const SquareGrid&) = default;

 private:
  std::size_t side_ = 0;
  std::vector<T> data_;
};

/// n x n complex object (or an m x m padded iterate/spectrum).
class ComplexImage : public SquareGrid<cplx> {
 public:
  using SquareGrid<cplx>::SquareGrid;
  ComplexImage(std::size_t side, std::vector<cplx> data) : SquareGrid(side, std::move(data)) {
    if (!all_finite()) throw ValidationError("complex image contains non-finite entries");
  }

  bool all_finite() const {
    for (const auto& v : *this) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
  }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& v : *this) s += std::norm(v);
    return s;
  }
};

/// m x m nonnegative Fourier intensities.
class DiffractionPattern : public SquareGrid<double> {
 public:
  using SquareGrid<double>::SquareGrid;
  DiffractionPattern(std::size_t side, std::vector<double> data)
      : SquareGrid(side, std::move(data)) {
    for (double v : *this) {
      if (!std::isfinite(v) || v < 0.0) {
        throw ValidationError("diffraction pattern entries must be finite and >= 0");
      }
    }
  }

  double squared_norm() const {
    double s = 0.0;
    for (double v : *this) s += v * v;
    return s;
  }
};

/// m x m boolean mask; stored as bytes so spans work.
class SupportMask : public SquareGrid<std::uint8_t> {
 public:
  using SquareGrid<std::uint8_t>::SquareGrid;

  std::size_t count() const {
    std::size_t c = 0;
    for (auto v : *this) c += v ? 1 : 0;
    return c;
  }
};

/// Copies `x` into the top-left corner of an m x m zero frame.
inline ComplexImage embed(const ComplexImage& x, std::size_t m) {
  if (m < x.side()) throw DimensionError("cannot embed a larger image into a smaller frame");
  ComplexImage out(m);
  for (std::size_t r = 0; r < x.side(); ++r)
    for (std::size_t c = 0; c < x.side(); ++c) out(r, c) = x(r, c);
  return out;
}

/// n x n window of `x` starting at (r0, c0), wrapping cyclically.
inline ComplexImage crop_cyclic(const ComplexImage& x, std::size_t n, std::size_t r0 = 0,
                                std::size_t c0 = 0) {
  const std::size_t m = x.side();
  if (n > m) throw DimensionError("crop size exceeds frame");
  ComplexImage out(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out(r, c) = x((r0 + r) % m, (c0 + c) % m);
  return out;
}

/// y(r) = x(r - shift), cyclically.
inline ComplexImage cyclic_shift(const ComplexImage& x, std::ptrdiff_t dr, std::ptrdiff_t dc) {
  const auto m = static_cast<std::ptrdiff_t>(x.side());
  ComplexImage out(x.side());
  auto wrap = [m](std::ptrdiff_t v) { return static_cast<std::size_t>(((v % m) + m) % m); };
  for (std::ptrdiff_t r = 0; r < m; ++r)
    for (std::ptrdiff_t c = 0; c < m; ++c) out(wrap(r + dr), wrap(c + dc)) = x(wrap(r), wrap(c));
  return out;
}

/// x'(r) = conj(x((-r) mod m)).
inline ComplexImage conjugate_flip(const ComplexImage& x) {
  const std::size_t m = x.side();
  ComplexImage out(m);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < m; ++c) out(r, c) = std::conj(x((m - r) % m, (m - c) % m));
  return out;
}

}  // namespace prtk
