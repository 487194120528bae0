#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geoshadow/raster.hpp"

namespace geoshadow {

enum class SampleType { UInt8, Int16, UInt16, Float32, Float64 };

enum class TiffCompression : std::uint16_t { None = 1, Deflate = 8 };

struct GeoTiffWriteOptions {
  SampleType sample_type = SampleType::Float32;
  TiffCompression compression = TiffCompression::None;
  // Striped layout unless set; tile edges must be multiples of 16.
  std::optional<int> tile_size;
};

struct GeoTiffReadResult {
  Raster raster;
  std::vector<std::string> warnings;
};

/// Decodes a single-band GeoTIFF held in memory.
///
/// Supported: classic TIFF in either byte order, striped or tiled, uint8,
/// int16, uint16, float32 or float64 samples, no compression or Deflate.
/// The geotransform comes from ModelPixelScale + ModelTiepoint, nodata from the
/// GDAL_NODATA ASCII tag. GeoKeys are ignored (a warning is recorded); the
/// raster's CRS is `crs`. Throws FormatError naming the offending tag.
GeoTiffReadResult decode_geotiff(std::span<const std::uint8_t> bytes, Crs crs = Crs::pixel_only());

/// Reads a file with decode_geotiff. Throws IoError when the file is unreadable.
Raster read_geotiff(const std::filesystem::path& path, Crs crs = Crs::pixel_only(),
                    std::vector<std::string>* warnings = nullptr);

/// Encodes a raster as a single-band GeoTIFF.
///
/// Integer sample types require integral in-range values (ArgumentError
/// otherwise); Float32 rounds. A GeoKey directory is written for Geographic and
/// UTM rasters.
std::vector<std::uint8_t> encode_geotiff(const Raster& raster, const GeoTiffWriteOptions& options = {});

/// Writes encode_geotiff output atomically (temp file + rename). Throws IoError
/// with the path on failure.
void write_geotiff(const Raster& raster, const std::filesystem::path& path, const GeoTiffWriteOptions& options = {});

/// Write options for binary masks: uint8, striped, uncompressed.
inline GeoTiffWriteOptions mask_write_options() { return {SampleType::UInt8, TiffCompression::None, std::nullopt}; }

}  // namespace geoshadow
