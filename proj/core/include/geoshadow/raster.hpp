#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace geoshadow {

/// Affine map from pixel centers to world coordinates.
///
/// The pixel center of (col, row) maps to
///   x = origin_x + col * pixel_size_x
///   y = origin_y + row * pixel_size_y
/// so origin_* is the center of pixel (0, 0), not its corner. pixel_size_y is
/// negative for north-up rasters.
struct GeoTransform {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double pixel_size_x = 1.0;
  double pixel_size_y = 1.0;

  std::pair<double, double> to_world(double col, double row) const {
    return {origin_x + col * pixel_size_x, origin_y + row * pixel_size_y};
  }
  std::pair<double, double> to_pixel(double x, double y) const {
    return {(x - origin_x) / pixel_size_x, (y - origin_y) / pixel_size_y};
  }

  bool operator==(const GeoTransform&) const = default;
};

enum class Hemisphere { North, South };

/// Coordinate reference of a raster's world coordinates.
struct Crs {
  enum class Kind { PixelOnly, Geographic, Utm };

  Kind kind = Kind::PixelOnly;
  int zone = 0;
  Hemisphere hemisphere = Hemisphere::North;

  static Crs pixel_only() { return {}; }
  static Crs geographic() { return {Kind::Geographic, 0, Hemisphere::North}; }
  static Crs utm(int zone, Hemisphere hemisphere) { return {Kind::Utm, zone, hemisphere}; }

  bool operator==(const Crs&) const = default;
};

/// Georeferenced 2-D grid of double samples stored row-major.
///
/// Rasters are immutable once constructed; operations return new rasters.
/// Binary masks use the values {0, 1}.
class Raster {
 public:
  Raster(int width, int height, std::vector<double> samples, GeoTransform geotransform = {},
         std::optional<double> nodata = std::nullopt, Crs crs = Crs::pixel_only());

  /// Raster of the given shape with every sample set to `value`.
  static Raster filled(int width, int height, double value, GeoTransform geotransform = {},
                       std::optional<double> nodata = std::nullopt, Crs crs = Crs::pixel_only());

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return samples_.size(); }

  double operator()(int col, int row) const {
    return samples_[static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
                    static_cast<std::size_t>(col)];
  }
  std::span<const double> samples() const noexcept { return samples_; }

  const GeoTransform& geotransform() const noexcept { return geotransform_; }
  const std::optional<double>& nodata() const noexcept { return nodata_; }
  const Crs& crs() const noexcept { return crs_; }

  /// True when `value` equals the nodata sentinel (NaN sentinels match any NaN).
  bool is_nodata(double value) const noexcept;
  bool is_valid(int col, int row) const noexcept { return !is_nodata((*this)(col, row)); }
  std::size_t count_valid() const noexcept;

  /// Same grid, georeferencing and CRS with new samples and nodata.
  Raster with_samples(std::vector<double> samples,
                      std::optional<double> nodata = std::nullopt) const;
  Raster with_crs(Crs crs) const;
  Raster with_nodata(std::optional<double> nodata) const;

  /// Same dimensions and geotransform.
  bool same_grid(const Raster& other) const noexcept;

  bool operator==(const Raster& other) const;

 private:
  int width_;
  int height_;
  std::vector<double> samples_;
  GeoTransform geotransform_;
  std::optional<double> nodata_;
  Crs crs_;
};

/// Bilinear blend of the pixel-center values around fractional (x = col, y = row).
///
/// Requires 0 <= x <= width-1 and 0 <= y <= height-1 (BoundsError otherwise).
/// Returns nullopt when a neighbor carrying nonzero weight is nodata. A query
/// exactly at a pixel center returns the stored value bit-for-bit.
std::optional<double> bilinear_sample(const Raster& raster, double x, double y);

/// Bilinear upsampling by an integer factor.
///
/// Output pixel (i, j) samples the input at (min(i/f, W-1), min(j/f, H-1)); the
/// first pixel center keeps its world position and pixel sizes shrink by f.
/// The trailing f-1 columns/rows replicate the last input column/row.
Raster upsample(const Raster& raster, int factor);

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Axis-aligned world rectangle [min_x, max_x) x [min_y, max_y).
struct BoundingBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;
};

enum class Aggregation { Min, Max };

inline constexpr double kDefaultNodata = -9999.0;

/// Grids a point cloud into a north-up raster at `resolution` world units per pixel.
///
/// Columns run from min_x, row 0 is the northernmost band. Cells are half-open
/// in both axes; points outside the box are dropped; empty cells hold `nodata`.
Raster grid_points(std::span<const Point3> points, const BoundingBox& bbox, double resolution,
                   Aggregation aggregation, double nodata = kDefaultNodata);

}  // namespace geoshadow
