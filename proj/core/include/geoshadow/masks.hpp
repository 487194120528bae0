#pragma once

#include <optional>
#include <span>

#include "geoshadow/raster.hpp"

namespace geoshadow {

/// Clears 8-connected components of 1-pixels whose area is below
/// `min_area_px`. Components of exactly `min_area_px` pixels survive.
Raster remove_small_regions(const Raster& mask, int min_area_px);

/// Sets 4-connected holes (0-components not touching the border) smaller than
/// `max_hole_px` to 1. Not part of the default pipeline.
Raster fill_small_holes(const Raster& mask, int max_hole_px);

/// Grows 1-pixels by a disk of the given radius in pixels; radius 0 is the identity.
Raster dilate(const Raster& mask, int radius_px);

/// (NIR - Red) / (NIR + Red). Output nodata is NaN, set where either band is
/// nodata or the denominator is zero. Throws ArgumentError on shape mismatch.
Raster ndvi(const Raster& nir, const Raster& red);

/// A binary mask together with the pixels it could be evaluated on.
struct ValidatedMask {
  Raster mask;
  Raster valid;  // 0 where the input was nodata
};

/// 1 where ndvi > threshold; nodata pixels become 0 and are flagged invalid.
ValidatedMask vegetation_mask(const Raster& ndvi_raster, double threshold = 0.0);

/// Training labels derived from the DSM Min and DSM Max shadow masks.
///
/// `supervision` marks pixels where both masks agree and both are certain,
/// `label` carries the agreed shadow value there (0 elsewhere), and `ignore` is
/// the complement of `supervision`:
///   ignore = (shadow_min xor shadow_max) or uncertainty_min or uncertainty_max.
struct SupervisionBundle {
  Raster shadow_min;
  Raster shadow_max;
  Raster supervision;
  Raster label;
  Raster ignore;
  std::optional<Raster> vegetation;
};

/// Throws ArgumentError unless the four rasters share dimensions.
SupervisionBundle agreement_masks(const Raster& shadow_min, const Raster& shadow_max,
                                  const Raster& uncertainty_min, const Raster& uncertainty_max);

/// Shadow supervision loss that penalizes only false negatives.
///
/// lambda = sum(gt) / N and the result is mean_i(lambda * gt_i * (pred_i - gt_i)^2).
/// Throws ArgumentError for N = 0, mismatched lengths, pred outside [0, 1] or
/// non-binary gt.
double shadow_loss(std::span<const double> pred, std::span<const double> gt);

}  // namespace geoshadow
