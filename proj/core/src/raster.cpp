#include "geoshadow/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "geoshadow/error.hpp"

namespace geoshadow {

namespace {

bool same_value(double a, double b) noexcept {
  return a == b || (std::isnan(a) && std::isnan(b));
}

bool same_nodata(const std::optional<double>& a, const std::optional<double>& b) noexcept {
  if (a.has_value() != b.has_value()) return false;
  return !a || same_value(*a, *b);
}

}  // namespace

Raster::Raster(int width, int height, std::vector<double> samples, GeoTransform geotransform,
               std::optional<double> nodata, Crs crs)
    : width_(width),
      height_(height),
      samples_(std::move(samples)),
      geotransform_(geotransform),
      nodata_(nodata),
      crs_(crs) {
  if (width < 1 || height < 1) {
    throw ArgumentError("raster dimensions must be positive, got " + std::to_string(width) + "x" +
                        std::to_string(height));
  }
  if (samples_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw ArgumentError("raster sample count " + std::to_string(samples_.size()) + " does not match " +
                        std::to_string(width) + "x" + std::to_string(height));
  }
  if (!(geotransform.pixel_size_x > 0.0) || !std::isfinite(geotransform.pixel_size_x)) {
    throw ArgumentError("pixel_size_x must be positive and finite");
  }
  if (geotransform.pixel_size_y == 0.0 || !std::isfinite(geotransform.pixel_size_y)) {
    throw ArgumentError("pixel_size_y must be nonzero and finite");
  }
}

Raster Raster::filled(int width, int height, double value, GeoTransform geotransform,
                      std::optional<double> nodata, Crs crs) {
  if (width < 1 || height < 1) {
    throw ArgumentError("raster dimensions must be positive");
  }
  std::vector<double> samples(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), value);
  return Raster(width, height, std::move(samples), geotransform, nodata, crs);
}

bool Raster::is_nodata(double value) const noexcept {
  return nodata_ && same_value(value, *nodata_);
}

std::size_t Raster::count_valid() const noexcept {
  if (!nodata_) return samples_.size();
  return static_cast<std::size_t>(
      std::count_if(samples_.begin(), samples_.end(), [this](double v) { return !is_nodata(v); }));
}

Raster Raster::with_samples(std::vector<double> samples, std::optional<double> nodata) const {
  return Raster(width_, height_, std::move(samples), geotransform_, nodata, crs_);
}

Raster Raster::with_crs(Crs crs) const {
  Raster copy = *this;
  copy.crs_ = crs;
  return copy;
}

Raster Raster::with_nodata(std::optional<double> nodata) const {
  Raster copy = *this;
  copy.nodata_ = nodata;
  return copy;
}

bool Raster::same_grid(const Raster& other) const noexcept {
  return width_ == other.width_ && height_ == other.height_ && geotransform_ == other.geotransform_;
}

bool Raster::operator==(const Raster& other) const {
  if (!same_grid(other) || crs_ != other.crs_ || !same_nodata(nodata_, other.nodata_)) return false;
  return std::equal(samples_.begin(), samples_.end(), other.samples_.begin(), same_value);
}

std::optional<double> bilinear_sample(const Raster& raster, double x, double y) {
  const int w = raster.width();
  const int h = raster.height();
  if (!(x >= 0.0 && x <= w - 1) || !(y >= 0.0 && y <= h - 1)) {
    throw BoundsError("bilinear query (" + std::to_string(x) + ", " + std::to_string(y) +
                      ") outside [0, " + std::to_string(w - 1) + "] x [0, " + std::to_string(h - 1) + "]");
  }
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const double fx = x - x0;
  const double fy = y - y0;
  const int x1 = fx > 0.0 ? x0 + 1 : x0;
  const int y1 = fy > 0.0 ? y0 + 1 : y0;

  const double v00 = raster(x0, y0);
  const double v10 = raster(x1, y0);
  const double v01 = raster(x0, y1);
  const double v11 = raster(x1, y1);
  if (raster.is_nodata(v00) || raster.is_nodata(v10) || raster.is_nodata(v01) || raster.is_nodata(v11)) {
    return std::nullopt;
  }
  // Zero-weight neighbors are aliased to the base pixel above, so an exact
  // center query reduces to v00 without touching its neighbors.
  const double top = fx > 0.0 ? v00 + fx * (v10 - v00) : v00;
  const double bottom = fx > 0.0 ? v01 + fx * (v11 - v01) : v01;
  return fy > 0.0 ? top + fy * (bottom - top) : top;
}

Raster upsample(const Raster& raster, int factor) {
  if (factor < 1) throw ArgumentError("upsample factor must be >= 1, got " + std::to_string(factor));
  if (factor == 1) return raster;

  const int w = raster.width();
  const int h = raster.height();
  const int out_w = w * factor;
  const int out_h = h * factor;
  const double nodata_value = raster.nodata().value_or(std::numeric_limits<double>::quiet_NaN());

  std::vector<double> samples(static_cast<std::size_t>(out_w) * static_cast<std::size_t>(out_h));
  for (int row = 0; row < out_h; ++row) {
    const double y = std::min(static_cast<double>(row) / factor, static_cast<double>(h - 1));
    for (int col = 0; col < out_w; ++col) {
      const double x = std::min(static_cast<double>(col) / factor, static_cast<double>(w - 1));
      samples[static_cast<std::size_t>(row) * out_w + col] = bilinear_sample(raster, x, y).value_or(nodata_value);
    }
  }

  GeoTransform gt = raster.geotransform();
  gt.pixel_size_x /= factor;
  gt.pixel_size_y /= factor;
  return Raster(out_w, out_h, std::move(samples), gt, raster.nodata(), raster.crs());
}

Raster grid_points(std::span<const Point3> points, const BoundingBox& bbox, double resolution,
                   Aggregation aggregation, double nodata) {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw ArgumentError("grid resolution must be positive");
  }
  if (!(bbox.max_x > bbox.min_x) || !(bbox.max_y > bbox.min_y)) {
    throw ArgumentError("grid bounding box is degenerate");
  }
  const double cols_f = std::ceil((bbox.max_x - bbox.min_x) / resolution);
  const double rows_f = std::ceil((bbox.max_y - bbox.min_y) / resolution);
  if (cols_f > 1 << 20 || rows_f > 1 << 20) throw ArgumentError("grid would exceed 2^20 pixels per side");
  const int cols = std::max(1, static_cast<int>(cols_f));
  const int rows = std::max(1, static_cast<int>(rows_f));

  std::vector<double> samples(static_cast<std::size_t>(cols) * rows, nodata);
  std::vector<bool> filled(samples.size(), false);
  for (const Point3& pt : points) {
    if (!(pt.x >= bbox.min_x && pt.x < bbox.max_x && pt.y >= bbox.min_y && pt.y < bbox.max_y)) continue;
    if (!std::isfinite(pt.z)) continue;
    const int col = static_cast<int>(std::floor((pt.x - bbox.min_x) / resolution));
    const int from_bottom = static_cast<int>(std::floor((pt.y - bbox.min_y) / resolution));
    if (col < 0 || col >= cols || from_bottom < 0 || from_bottom >= rows) continue;
    const std::size_t idx = static_cast<std::size_t>(rows - 1 - from_bottom) * cols + col;
    if (!filled[idx]) {
      samples[idx] = pt.z;
      filled[idx] = true;
    } else if (aggregation == Aggregation::Min) {
      samples[idx] = std::min(samples[idx], pt.z);
    } else {
      samples[idx] = std::max(samples[idx], pt.z);
    }
  }

  const double top = bbox.min_y + rows * resolution;
  GeoTransform gt{bbox.min_x + 0.5 * resolution, top - 0.5 * resolution, resolution, -resolution};
  return Raster(cols, rows, std::move(samples), gt, nodata);
}

}  // namespace geoshadow
