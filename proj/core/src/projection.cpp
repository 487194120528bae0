#include "geoshadow/projection.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "geoshadow/error.hpp"
#include "geoshadow/masks.hpp"
#include "geoshadow/utm.hpp"
#include "parallel.hpp"

namespace geoshadow {

std::pair<double, double> pixel_to_lonlat(const Raster& raster, int col, int row) {
  const auto [x, y] = raster.geotransform().to_world(col, row);
  switch (raster.crs().kind) {
    case Crs::Kind::Geographic:
      return {x, y};
    case Crs::Kind::Utm: {
      const LonLat ll = utm_to_geographic(x, y, raster.crs().zone, raster.crs().hemisphere);
      return {ll.lon_deg, ll.lat_deg};
    }
    case Crs::Kind::PixelOnly:
      break;
  }
  throw ArgumentError("DSM has no geographic reference (CRS is pixel-only)");
}

ShadowProduct project_shadows(const Raster& dsm, const Raster& shadow_dsm, const RpcModel& rpc, int image_height,
                              int image_width, const ProjectOptions& options) {
  if (image_height < 1 || image_width < 1) {
    throw ArgumentError("image size must be positive, got " + std::to_string(image_width) + "x" +
                        std::to_string(image_height));
  }
  if (!dsm.same_grid(shadow_dsm)) throw ArgumentError("DSM and shadow mask are not on the same grid");
  if (dsm.crs().kind == Crs::Kind::PixelOnly) {
    throw ArgumentError("DSM has no geographic reference (CRS is pixel-only)");
  }
  rpc.validate();

  constexpr std::int64_t kNoTarget = -1;
  const std::size_t cells = dsm.size();
  const std::size_t pixels = static_cast<std::size_t>(image_width) * static_cast<std::size_t>(image_height);

  // Projection is the expensive part and is embarrassingly parallel; the
  // z-buffer merge below runs sequentially in cell order.
  std::vector<std::int64_t> target(cells, kNoTarget);
  const int w = dsm.width();
  detail::parallel_for(static_cast<std::size_t>(dsm.height()), options.threads, [&](std::size_t row_index) {
    const int row = static_cast<int>(row_index);
    for (int col = 0; col < w; ++col) {
      const std::size_t cell = row_index * static_cast<std::size_t>(w) + static_cast<std::size_t>(col);
      const double z = dsm.samples()[cell];
      if (dsm.is_nodata(z) || !std::isfinite(z)) continue;
      const auto [lon, lat] = pixel_to_lonlat(dsm, col, row);
      const ImagePoint ip = eval_rational(rpc, lon, lat, z);
      const double sample = std::round(ip.sample);
      const double line = std::round(ip.line);
      if (!(sample >= 0.0 && sample < image_width && line >= 0.0 && line < image_height)) continue;
      target[cell] = static_cast<std::int64_t>(line) * image_width + static_cast<std::int64_t>(sample);
    }
  }, 1);

  std::vector<double> shadow(pixels, 0.0);
  std::vector<double> uncertainty(pixels, 1.0);
  std::vector<double> zbuffer(pixels, -std::numeric_limits<double>::infinity());
  // Cells are visited in increasing (row, col), so strict > leaves equal-height
  // ties with the lowest index.
  for (std::size_t cell = 0; cell < cells; ++cell) {
    if (target[cell] == kNoTarget) continue;
    const auto pixel = static_cast<std::size_t>(target[cell]);
    const double z = dsm.samples()[cell];
    if (z > zbuffer[pixel]) {
      zbuffer[pixel] = z;
      shadow[pixel] = shadow_dsm.samples()[cell] == 1.0 ? 1.0 : 0.0;
      uncertainty[pixel] = 0.0;
    }
  }

  GeoTransform image_grid{};
  return {Raster(image_width, image_height, std::move(shadow), image_grid),
          Raster(image_width, image_height, std::move(uncertainty), image_grid)};
}

ShadowProduct finalize(const ShadowProduct& product, const FinalizeOptions& options) {
  if (options.min_region_px < 0) throw ArgumentError("min_region_px must be >= 0");
  Raster shadow = remove_small_regions(product.shadow, options.min_region_px);
  if (options.fill_holes_px > 0) {
    Raster filled = fill_small_holes(shadow, options.fill_holes_px);
    std::vector<double> samples(filled.samples().begin(), filled.samples().end());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (product.uncertainty.samples()[i] == 1.0) samples[i] = 0.0;
    }
    shadow = shadow.with_samples(std::move(samples));
  }
  return {std::move(shadow), product.uncertainty};
}

}  // namespace geoshadow
