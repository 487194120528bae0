#pragma once

#include "geoshadow/raster.hpp"
#include "geoshadow/rpc.hpp"

namespace geoshadow {

/// Shadow labels in image coordinates.
///
/// `uncertainty` is 1 where no DSM cell projected; such pixels are always
/// non-shadow.
struct ShadowProduct {
  Raster shadow;
  Raster uncertainty;
};

struct ProjectOptions {
  // 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// Projects a DSM-space shadow mask into an image through its RPC with a z-buffer.
///
/// Every valid DSM cell is georeferenced (converting UTM to geographic when the
/// DSM's CRS is UTM), projected with the RPC and rounded to the nearest pixel.
/// The highest cell landing on a pixel wins; exactly equal heights go to the
/// lowest (row, col) cell, which makes the output independent of visiting order.
///
/// Throws ArgumentError when the grids differ, the image is empty or the DSM
/// CRS is PixelOnly; RPC errors propagate.
ShadowProduct project_shadows(const Raster& dsm, const Raster& shadow_dsm, const RpcModel& rpc, int image_height,
                              int image_width, const ProjectOptions& options = {});

struct FinalizeOptions {
  int min_region_px = 50;
  // Off unless requested; fills shadow holes smaller than this many pixels.
  int fill_holes_px = 0;
};

/// Removes small shadow regions (and optionally fills small holes); the
/// uncertainty channel is passed through. Filled pixels never land on
/// uncertain pixels.
ShadowProduct finalize(const ShadowProduct& product, const FinalizeOptions& options);

/// World (lon, lat) in degrees for a pixel center of a Geographic or UTM raster.
std::pair<double, double> pixel_to_lonlat(const Raster& raster, int col, int row);

}  // namespace geoshadow
