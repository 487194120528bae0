#include "geoshadow/shadowcast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "geoshadow/error.hpp"
#include "parallel.hpp"

namespace geoshadow {

PathLayout::PathLayout(int width, int height, double p, double q)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) throw ArgumentError("path layout needs a non-empty grid");
  if (!std::isfinite(p) || !std::isfinite(q) || (p == 0.0 && q == 0.0)) {
    throw ArgumentError("degenerate march direction (p = q = 0); use the zenith fast path");
  }
  x_major_ = std::fabs(p) >= std::fabs(q);
  const double major = x_major_ ? p : q;
  const double minor = x_major_ ? q : p;
  major_len_ = x_major_ ? width : height;
  minor_len_ = x_major_ ? height : width;
  major_step_ = major > 0.0 ? 1 : -1;
  major_start_ = major > 0.0 ? 0 : major_len_ - 1;
  slope_ = minor / std::fabs(major);

  const long total_shift = minor_shift(major_len_ - 1);
  lowest_offset_ = std::min(0L, -total_shift);
  count_ = static_cast<std::size_t>(minor_len_) + static_cast<std::size_t>(std::labs(total_shift));
}

long PathLayout::first_step(long offset) const noexcept {
  if (offset >= 0 && offset < minor_len_) return 0;
  // Paths seeded outside the grid enter through the edge the minor component
  // points into; find the first step that lands inside.
  const auto outside = [&](long k) {
    const long m = offset + minor_shift(k);
    return offset < 0 ? m < 0 : m >= minor_len_;
  };
  const double excess = offset < 0 ? static_cast<double>(-offset) : static_cast<double>(offset - (minor_len_ - 1));
  long k = std::clamp(static_cast<long>(excess / std::fabs(slope_)), 0L, static_cast<long>(major_len_));
  while (k > 0 && !outside(k - 1)) --k;
  while (k < major_len_ && outside(k)) ++k;
  return k;
}

RayPath PathLayout::path(std::size_t index) const {
  RayPath out;
  walk(index, [&](const PathStep& step) { out.steps.push_back(step); });
  return out;
}

std::vector<RayPath> compute_paths(int width, int height, const SunGeometry& sun) {
  const PathLayout layout(width, height, sun);
  std::vector<RayPath> paths;
  paths.reserve(layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i) paths.push_back(layout.path(i));
  return paths;
}

namespace {

double square_pixel_size(const Raster& dsm) {
  const double sx = std::fabs(dsm.geotransform().pixel_size_x);
  const double sy = std::fabs(dsm.geotransform().pixel_size_y);
  if (std::fabs(sx - sy) > 1e-9 * std::max(sx, sy)) {
    throw ArgumentError("shadow casting needs square pixels, got " + std::to_string(sx) + " x " +
                        std::to_string(sy));
  }
  return sx;
}

// Samples the DSM at a path position. Positions on the first/last row or
// column can sit up to half a pixel outside the sampled domain.
std::optional<double> sample_at(const Raster& dsm, const PathStep& step) {
  const double x = std::clamp(step.x, 0.0, static_cast<double>(dsm.width() - 1));
  const double y = std::clamp(step.y, 0.0, static_cast<double>(dsm.height() - 1));
  return bilinear_sample(dsm, x, y);
}

double horizontal_distance(const PathStep& a, const PathStep& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  return std::sqrt(dx * dx + dy * dy);
}

// Shadow test between an occluder and a later sample; elevations are in
// meters, distances in pixels.
bool casts_over(double z_occluder, double z_current, double distance_px, double pixel_size, double slope) {
  const double shadow_length = ((z_occluder - z_current) / pixel_size) / slope;
  return distance_px < shadow_length;
}

std::size_t linear_index(const Raster& r, const PathStep& step) {
  return static_cast<std::size_t>(step.row) * static_cast<std::size_t>(r.width()) +
         static_cast<std::size_t>(step.col);
}

}  // namespace

ShadowCast cast_shadows(const Raster& dsm, const SunGeometry& sun, const CastOptions& options) {
  if (options.upscale < 1) throw ArgumentError("upscale must be >= 1, got " + std::to_string(options.upscale));
  square_pixel_size(dsm);
  if (dsm.count_valid() == 0) throw ProcessingError("DSM has no valid samples");

  Raster surface = upsample(dsm, options.upscale);
  const double pixel_size = square_pixel_size(surface);

  std::vector<double> shadow(surface.size(), 0.0);
  std::vector<double> valid(surface.size(), 1.0);
  for (std::size_t i = 0; i < surface.size(); ++i) {
    if (surface.is_nodata(surface.samples()[i])) valid[i] = 0.0;
  }

  if (!sun.at_zenith()) {
    const PathLayout layout(surface.width(), surface.height(), sun);
    // Paths partition the grid, so writes from different paths never alias.
    detail::parallel_for(layout.size(), options.threads, [&](std::size_t path_index) {
      bool have_occluder = false;
      PathStep occluder;
      double z_occluder = 0.0;
      layout.walk(path_index, [&](const PathStep& step) {
        const std::optional<double> z = sample_at(surface, step);
        const std::size_t idx = linear_index(surface, step);
        if (!z) {
          valid[idx] = 0.0;
          return;
        }
        if (have_occluder &&
            casts_over(z_occluder, *z, horizontal_distance(occluder, step), pixel_size, sun.slope)) {
          shadow[idx] = 1.0;
          return;
        }
        have_occluder = true;
        occluder = step;
        z_occluder = *z;
      });
    });
  }

  return {surface.with_samples(std::move(shadow)), surface.with_samples(std::move(valid)), std::move(surface)};
}

Raster cast_shadows_oracle(const Raster& dsm, const SunGeometry& sun) {
  const double pixel_size = square_pixel_size(dsm);
  if (dsm.count_valid() == 0) throw ProcessingError("DSM has no valid samples");

  std::vector<double> shadow(dsm.size(), 0.0);
  if (sun.at_zenith()) return dsm.with_samples(std::move(shadow));

  const PathLayout layout(dsm.width(), dsm.height(), sun);
  for (std::size_t i = 0; i < layout.size(); ++i) {
    std::vector<PathStep> earlier;
    std::vector<double> earlier_z;
    layout.walk(i, [&](const PathStep& step) {
      const std::optional<double> z = sample_at(dsm, step);
      if (!z) return;
      for (std::size_t s = 0; s < earlier.size(); ++s) {
        if (casts_over(earlier_z[s], *z, horizontal_distance(earlier[s], step), pixel_size, sun.slope)) {
          shadow[linear_index(dsm, step)] = 1.0;
          break;
        }
      }
      earlier.push_back(step);
      earlier_z.push_back(*z);
    });
  }
  return dsm.with_samples(std::move(shadow));
}

}  // namespace geoshadow
