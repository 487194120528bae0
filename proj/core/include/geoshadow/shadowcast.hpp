#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "geoshadow/raster.hpp"
#include "geoshadow/solar.hpp"

namespace geoshadow {

struct PathStep {
  int col = 0;
  int row = 0;
  // Continuous position on the march line; within 0.5 px of (col, row).
  double x = 0.0;
  double y = 0.0;
};

/// Pixels visited by one shadow-march ray, ordered away from the sun.
struct RayPath {
  std::vector<PathStep> steps;
};

/// Decomposition of a W x H grid into march lines along (p, q).
///
/// Each line advances one pixel per step along the dominant axis of (p, q); the
/// minor coordinate is tracked continuously and rounded to the nearest row or
/// column. Lines are seeded on the grid edges the march direction enters
/// through, so every pixel belongs to exactly one path.
class PathLayout {
 public:
  /// Throws ArgumentError for an empty grid or when p = q = 0.
  PathLayout(int width, int height, double p, double q);
  PathLayout(int width, int height, const SunGeometry& sun) : PathLayout(width, height, sun.p, sun.q) {}

  std::size_t size() const noexcept { return count_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  /// Calls `visit(const PathStep&)` for each step of path `index`, in order.
  template <class Visitor>
  void walk(std::size_t index, Visitor&& visit) const;

  RayPath path(std::size_t index) const;

 private:
  int width_;
  int height_;
  bool x_major_;
  int major_len_;
  int minor_len_;
  int major_start_;
  int major_step_;
  double slope_;       // minor advance per major step
  long lowest_offset_;  // minor coordinate of the first path at major step 0
  std::size_t count_;

  long minor_shift(long k) const noexcept;
  long first_step(long offset) const noexcept;
};

std::vector<RayPath> compute_paths(int width, int height, const SunGeometry& sun);

/// Binary shadow mask plus the samples it could not evaluate.
struct ShadowCast {
  Raster shadow;   // 1 = shadow, at the upsampled resolution
  Raster valid;    // 0 where the DSM sample was nodata
  Raster surface;  // the upsampled DSM the mask was computed on
};

struct CastOptions {
  int upscale = 4;
  // 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// Single-occluder sweep shadow casting.
///
/// The DSM is upsampled first. Along each march path the first valid sample is
/// lit and becomes the occluder; a later sample at horizontal distance d (pixels)
/// is shadow iff d < (Z_occ - Z) / (pixel_size * tan(elevation)), otherwise it
/// becomes the new occluder. Nodata samples are neither shadow nor occluders.
///
/// Throws ArgumentError for anisotropic pixels or upscale < 1 and
/// ProcessingError for an all-nodata DSM. At the zenith the mask is all zero.
ShadowCast cast_shadows(const Raster& dsm, const SunGeometry& sun, const CastOptions& options = {});

/// Exhaustive reference for cast_shadows at upscale 1: a sample is shadow iff any
/// earlier valid sample on its path casts over it. Quadratic per path.
Raster cast_shadows_oracle(const Raster& dsm, const SunGeometry& sun);

// ---------------------------------------------------------------------------

inline long PathLayout::minor_shift(long k) const noexcept {
  return static_cast<long>(std::floor(slope_ * static_cast<double>(k) + 0.5));
}

template <class Visitor>
void PathLayout::walk(std::size_t index, Visitor&& visit) const {
  const long offset = lowest_offset_ + static_cast<long>(index);
  for (long k = first_step(offset); k < major_len_; ++k) {
    const long minor = offset + minor_shift(k);
    if (minor < 0 || minor >= minor_len_) break;
    const long major = major_start_ + major_step_ * k;
    const double minor_pos = static_cast<double>(offset) + slope_ * static_cast<double>(k);
    PathStep step;
    if (x_major_) {
      step = {static_cast<int>(major), static_cast<int>(minor), static_cast<double>(major), minor_pos};
    } else {
      step = {static_cast<int>(minor), static_cast<int>(major), minor_pos, static_cast<double>(major)};
    }
    visit(step);
  }
}

}  // namespace geoshadow
