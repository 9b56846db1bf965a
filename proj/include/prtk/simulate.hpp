#pragma once

// Synthetic test objects:
//  - crystal: unit-modulus shape from random scattering points, with a phase
//    given by a defect displacement field projected on a scalar momentum
//    transfer (a screw-dislocation style winding model).
//  - toy: real image in [0, 1] made of filled convex shapes, translated
//    randomly inside the frame.
// Each generator returns the ground truth and Y at m = 2 * frame.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <queue>
#include <random>
#include <utility>
#include <vector>

#include "prtk/field.hpp"

namespace prtk::simulate {

enum class ShapeKind { convex, concave };

struct CrystalParams {
  std::size_t frame = 128;
  std::size_t region = 110;
  std::size_t min_points = 6;
  std::size_t max_points = 12;
  ShapeKind shape = ShapeKind::convex;
  std::size_t num_defects = 2;
  double min_strength = 0.5;  // |b| range of the winding amplitude
  double max_strength = 1.5;
  double momentum_transfer = 2.0 * std::numbers::pi;  // scalar q, phase = q * u
  double noise_photons = 0.0;  // > 0 enables Poisson noise with this peak count
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (frame == 0 || region == 0 || region > frame) {
      throw ValidationError("crystal region must be positive and fit in the frame");
    }
    if (min_points < 3 || max_points < min_points) {
      throw ValidationError("crystal needs at least 3 scattering points");
    }
    if (min_strength < 0.0 || max_strength < min_strength) {
      throw ValidationError("defect strength range is invalid");
    }
    if (noise_photons < 0.0) throw ValidationError("noise_photons must be >= 0");
  }
};

struct ToyParams {
  std::size_t frame = 32;
  std::size_t num_shapes = 3;
  double min_intensity = 0.3;
  double max_intensity = 1.0;
  std::size_t max_offset = 8;  // translation range along each axis
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (frame < 4) throw ValidationError("toy frame must be at least 4");
    if (num_shapes == 0) throw ValidationError("toy needs at least one shape");
    if (max_offset + 4 > frame) throw ValidationError("toy translation range leaves no room");
    if (!(min_intensity >= 0.0 && max_intensity <= 1.0 && min_intensity <= max_intensity)) {
      throw ValidationError("toy intensity range must lie in [0, 1]");
    }
  }
};

struct SimulatedData {
  ComplexImage ground_truth;
  DiffractionPattern measurement;
};

namespace geometry {

struct Point {
  double r, c;
};

inline double cross(const Point& o, const Point& a, const Point& b) {
  return (a.r - o.r) * (b.c - o.c) - (a.c - o.c) * (b.r - o.r);
}

/// Andrew's monotone chain; returns hull vertices counter-clockwise.
inline std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(),
            [](const Point& a, const Point& b) { return a.r < b.r || (a.r == b.r && a.c < b.c); });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point& a, const Point& b) { return a.r == b.r && a.c == b.c; }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

/// Simple polygon through all points, ordered by angle about their centroid.
inline std::vector<Point> star_polygon(std::vector<Point> pts) {
  Point centroid{0.0, 0.0};
  for (const auto& p : pts) {
    centroid.r += p.r;
    centroid.c += p.c;
  }
  centroid.r /= static_cast<double>(pts.size());
  centroid.c /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&](const Point& a, const Point& b) {
    const double ta = std::atan2(a.r - centroid.r, a.c - centroid.c);
    const double tb = std::atan2(b.r - centroid.r, b.c - centroid.c);
    if (ta != tb) return ta < tb;
    return std::hypot(a.r - centroid.r, a.c - centroid.c) <
           std::hypot(b.r - centroid.r, b.c - centroid.c);
  });
  return pts;
}

inline double polygon_area(const std::vector<Point>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    a += p.r * q.c - q.r * p.c;
  }
  return 0.5 * std::abs(a);
}

/// Even-odd test, points on an edge count as inside.
inline bool inside(const std::vector<Point>& poly, const Point& p) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    const double cr = cross(a, b, p);
    if (std::abs(cr) < 1e-12 && std::min(a.r, b.r) <= p.r && p.r <= std::max(a.r, b.r) &&
        std::min(a.c, b.c) <= p.c && p.c <= std::max(a.c, b.c)) {
      return true;
    }
    if ((a.r > p.r) != (b.r > p.r)) {
      const double c_at = a.c + (p.r - a.r) * (b.c - a.c) / (b.r - a.r);
      if (p.c < c_at) in = !in;
    }
  }
  return in;
}

/// Rasterizes a polygon over pixel centres (r, c) of a frame x frame grid.
inline std::vector<std::uint8_t> rasterize(const std::vector<Point>& poly, std::size_t frame) {
  std::vector<std::uint8_t> mask(frame * frame, 0);
  for (std::size_t r = 0; r < frame; ++r)
    for (std::size_t c = 0; c < frame; ++c)
      mask[r * frame + c] =
          inside(poly, {static_cast<double>(r), static_cast<double>(c)}) ? 1 : 0;
  return mask;
}

/// Keeps only the largest 4-connected component of a mask.
inline std::size_t keep_largest_component(std::vector<std::uint8_t>& mask, std::size_t frame) {
  std::vector<int> label(mask.size(), -1);
  std::vector<std::size_t> sizes;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask[start] || label[start] >= 0) continue;
    const int id = static_cast<int>(sizes.size());
    std::size_t count = 0;
    std::queue<std::size_t> q;
    q.push(start);
    label[start] = id;
    while (!q.empty()) {
      const auto cur = q.front();
      q.pop();
      ++count;
      const std::size_t r = cur / frame, c = cur % frame;
      const std::array<std::pair<long, long>, 4> nbrs{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
      for (const auto& [dr, dc] : nbrs) {
        const long nr = static_cast<long>(r) + dr, nc = static_cast<long>(c) + dc;
        if (nr < 0 || nc < 0 || nr >= static_cast<long>(frame) || nc >= static_cast<long>(frame))
          continue;
        const auto idx = static_cast<std::size_t>(nr) * frame + static_cast<std::size_t>(nc);
        if (mask[idx] && label[idx] < 0) {
          label[idx] = id;
          q.push(idx);
        }
      }
    }
    sizes.push_back(count);
  }
  if (sizes.empty()) return 0;
  const auto keep = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = label[i] == keep ? 1 : 0;
  return sizes[static_cast<std::size_t>(keep)];
}

}  // namespace geometry

namespace detail {

inline DiffractionPattern add_poisson_noise(const DiffractionPattern& y, double peak,
                                            std::mt19937_64& rng) {
  const double ymax = *std::max_element(y.begin(), y.end());
  if (!(ymax > 0.0)) return y;
  const double scale = peak / ymax;
  DiffractionPattern out(y.side());
  for (std::size_t i = 0; i < y.size(); ++i) {
    std::poisson_distribution<long long> draw(y[i] * scale);
    out[i] = y[i] > 0.0 ? static_cast<double>(draw(rng)) / scale : 0.0;
  }
  return out;
}

}  // namespace detail

inline constexpr int kMaxShapeAttempts = 64;

/// Support of a crystal shape: the filled hull (convex) or angular-sorted
/// star polygon (concave) of random points in the centred region.
inline std::vector<std::uint8_t> crystal_support(const CrystalParams& p, std::mt19937_64& rng) {
  const std::size_t offset = (p.frame - p.region) / 2;
  std::uniform_int_distribution<std::size_t> count(p.min_points, p.max_points);
  std::uniform_int_distribution<std::size_t> coord(offset, offset + p.region - 1);
  const double min_area = std::max(4.0, 0.02 * static_cast<double>(p.region * p.region));

  for (int attempt = 0; attempt < kMaxShapeAttempts; ++attempt) {
    const std::size_t npts = count(rng);
    std::vector<geometry::Point> pts(npts);
    for (auto& pt : pts) {
      const auto r = coord(rng);
      const auto c = coord(rng);
      pt = {static_cast<double>(r), static_cast<double>(c)};
    }
    auto poly = p.shape == ShapeKind::convex ? geometry::convex_hull(pts)
                                             : geometry::star_polygon(pts);
    if (poly.size() < 3 || geometry::polygon_area(poly) < min_area) continue;
    auto mask = geometry::rasterize(poly, p.frame);
    if (geometry::keep_largest_component(mask, p.frame) < 4) continue;
    return mask;
  }
  throw ValidationError("could not sample a non-degenerate crystal shape");
}

inline SimulatedData simulate_crystal(const CrystalParams& p) {
  p.validate();
  std::mt19937_64 rng(p.rng_seed);
  const auto support = crystal_support(p, rng);

  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < support.size(); ++i)
    if (support[i]) members.push_back(i);

  struct Defect {
    double r, c, b;
  };
  std::vector<Defect> defects;
  std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
  std::uniform_real_distribution<double> jitter(-0.5, 0.5);
  std::uniform_real_distribution<double> strength(p.min_strength, p.max_strength);
  std::bernoulli_distribution negative(0.5);
  for (std::size_t j = 0; j < p.num_defects; ++j) {
    const auto idx = members[pick(rng)];
    const double r = static_cast<double>(idx / p.frame) + jitter(rng);
    const double c = static_cast<double>(idx % p.frame) + jitter(rng);
    const double b = strength(rng) * (negative(rng) ? -1.0 : 1.0);
    defects.push_back({r, c, b});
  }

  ComplexImage x(p.frame);
  for (std::size_t idx : members) {
    const double r = static_cast<double>(idx / p.frame);
    const double c = static_cast<double>(idx % p.frame);
    double u = 0.0;
    for (const auto& d : defects) u += d.b * std::atan2(r - d.r, c - d.c) / (2.0 * std::numbers::pi);
    double phase = std::remainder(p.momentum_transfer * u, 2.0 * std::numbers::pi);
    if (phase >= std::numbers::pi) phase -= 2.0 * std::numbers::pi;
    x[idx] = defects.empty() ? cplx(1.0, 0.0) : std::polar(1.0, phase);
  }

  auto y = field::forward_intensities(x, field::default_oversampling(p.frame));
  if (p.noise_photons > 0.0) y = detail::add_poisson_noise(y, p.noise_photons, rng);
  return {std::move(x), std::move(y)};
}

/// Untranslated toy content: shapes drawn in the top-left
/// (frame - max_offset)^2 box. Consumes the first draws of the seed's stream.
inline ComplexImage toy_content(const ToyParams& p, std::mt19937_64& rng) {
  p.validate();
  const std::size_t box = p.frame - p.max_offset;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> level(p.min_intensity, p.max_intensity);
  std::uniform_int_distribution<int> vertex_count(3, 6);

  std::vector<double> img(p.frame * p.frame, 0.0);
  const double bmax = static_cast<double>(box - 1);
  for (std::size_t s = 0; s < p.num_shapes; ++s) {
    const double value = level(rng);
    std::vector<std::uint8_t> mask;
    for (int attempt = 0; attempt < kMaxShapeAttempts; ++attempt) {
      // Random convex polygon: hull of points around a random centre.
      const double cr = bmax * (0.2 + 0.6 * unit(rng));
      const double cc = bmax * (0.2 + 0.6 * unit(rng));
      const double radius = bmax * (0.15 + 0.2 * unit(rng));
      const int nv = vertex_count(rng);
      std::vector<geometry::Point> pts;
      for (int v = 0; v < nv; ++v) {
        const double ang = 2.0 * std::numbers::pi * unit(rng);
        const double rad = radius * (0.5 + 0.5 * unit(rng));
        pts.push_back({std::clamp(cr + rad * std::sin(ang), 0.0, bmax),
                       std::clamp(cc + rad * std::cos(ang), 0.0, bmax)});
      }
      auto hull = geometry::convex_hull(pts);
      if (hull.size() < 3 || geometry::polygon_area(hull) < 2.0) continue;
      mask = geometry::rasterize(hull, p.frame);
      if (std::count(mask.begin(), mask.end(), 1) >= 3) break;
      mask.clear();
    }
    if (mask.empty()) throw ValidationError("could not sample a non-degenerate toy shape");
    for (std::size_t i = 0; i < img.size(); ++i)
      if (mask[i]) img[i] = std::max(img[i], value);
  }
  ComplexImage x(p.frame);
  for (std::size_t i = 0; i < img.size(); ++i) x[i] = img[i];
  return x;
}

/// Toy image translated by a uniform offset in [0, max_offset]^2 (no wrap).
inline SimulatedData simulate_toy(const ToyParams& p) {
  p.validate();
  std::mt19937_64 rng(p.rng_seed);
  const auto content = toy_content(p, rng);
  std::uniform_int_distribution<std::size_t> offset(0, p.max_offset);
  const auto dr = offset(rng);
  const auto dc = offset(rng);
  ComplexImage x(p.frame);
  for (std::size_t r = 0; r + dr < p.frame; ++r)
    for (std::size_t c = 0; c + dc < p.frame; ++c) x(r + dr, c + dc) = content(r, c);
  auto y = field::forward_intensities(x, field::default_oversampling(p.frame));
  return {std::move(x), std::move(y)};
}

/// Mask of nonzero pixels of x, embedded top-left in an m x m frame.
inline SupportMask exact_support(const ComplexImage& x, std::size_t m) {
  SupportMask mask(m);
  for (std::size_t r = 0; r < x.side(); ++r)
    for (std::size_t c = 0; c < x.side(); ++c) mask(r, c) = std::abs(x(r, c)) > 0.0 ? 1 : 0;
  return mask;
}

}  // namespace prtk::simulate
