#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "geoshadow/raster.hpp"

namespace geoshadow {

/// Optional vegetation inputs (two single-band rasters on the DSM grid or the image grid).
struct NdviInputs {
  std::filesystem::path nir;
  std::filesystem::path red;
  double threshold = 0.0;
  int dilation_px = 0;
};

struct RunOutputs {
  std::filesystem::path shadow_dsm;
  std::filesystem::path shadow_image;
  std::filesystem::path uncertainty;
  // Written only when the matching inputs exist and the path is set.
  std::optional<std::filesystem::path> shadow_dsm_max;
  std::optional<std::filesystem::path> shadow_image_max;
  std::optional<std::filesystem::path> uncertainty_max;
  std::optional<std::filesystem::path> supervision;
  std::optional<std::filesystem::path> label;
  std::optional<std::filesystem::path> ignore;
  std::optional<std::filesystem::path> ndvi;
  std::optional<std::filesystem::path> vegetation;
};

/// Everything needed to produce the masks for one image of one tile.
struct RunConfig {
  std::string tile_id;
  std::filesystem::path dsm;
  std::optional<std::filesystem::path> dsm_max;
  Crs crs;
  std::filesystem::path rpc;
  int image_width = 0;
  int image_height = 0;
  double sun_azimuth_deg = 0.0;
  double sun_elevation_deg = 0.0;
  int upscale = 4;
  int min_region_px = 50;
  int fill_holes_px = 0;
  std::optional<NdviInputs> ndvi;
  RunOutputs outputs;

  /// Throws ParseError naming the first violated constraint.
  void validate() const;
};

/// Parses "geographic", "pixel" or "utm:<zone><N|S>" (e.g. "utm:11N").
Crs parse_crs(std::string_view text);
std::string format_crs(const Crs& crs);

/// Parses a run-configuration JSON document. Relative paths are resolved
/// against `base_dir`.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir = {});

/// Reads a run configuration; relative paths resolve against the file's directory.
RunConfig read_run_config(const std::filesystem::path& path);

}  // namespace geoshadow
