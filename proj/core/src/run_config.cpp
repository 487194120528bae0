#include "geoshadow/run_config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "geoshadow/error.hpp"
#include "json.hpp"

namespace geoshadow {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw ParseError("run config: " + what, 0); }

const json& require_key(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) config_error(std::string("missing required key '") + key + "'");
  return *it;
}

std::filesystem::path path_value(const json& v, const char* key, const std::filesystem::path& base) {
  if (!v.is_string() || v.get<std::string>().empty()) config_error(std::string(key) + " must be a non-empty string");
  std::filesystem::path p(v.get<std::string>());
  return p.is_relative() && !base.empty() ? base / p : p;
}

std::optional<std::filesystem::path> optional_path(const json& obj, const char* key, const std::filesystem::path& base) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return path_value(*it, key, base);
}

double number_value(const json& obj, const char* key) {
  const json& v = require_key(obj, key);
  if (!v.is_number()) config_error(std::string(key) + " must be a number");
  return v.get<double>();
}

int int_value(const json& obj, const char* key, int fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) config_error(std::string(key) + " must be an integer");
  const auto v = it->get<long long>();
  if (v < -(1LL << 31) || v >= (1LL << 31)) config_error(std::string(key) + " is out of range");
  return static_cast<int>(v);
}

}  // namespace

Crs parse_crs(std::string_view text) {
  std::string s(text);
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "geographic" || s == "epsg:4326") return Crs::geographic();
  if (s == "pixel") return Crs::pixel_only();
  if (s.rfind("utm:", 0) == 0 && s.size() >= 6) {
    const char hemi = s.back();
    const std::string zone_text = s.substr(4, s.size() - 5);
    if ((hemi == 'n' || hemi == 's') && !zone_text.empty() && zone_text.size() <= 2 &&
        std::isdigit(static_cast<unsigned char>(zone_text.front())) &&
        std::isdigit(static_cast<unsigned char>(zone_text.back()))) {
      const int zone = std::stoi(zone_text);
      if (zone >= 1 && zone <= 60) return Crs::utm(zone, hemi == 'n' ? Hemisphere::North : Hemisphere::South);
    }
  }
  throw ParseError("unrecognised CRS '" + std::string(text) + "' (expected geographic, pixel or utm:<zone><N|S>)", 0);
}

std::string format_crs(const Crs& crs) {
  switch (crs.kind) {
    case Crs::Kind::Geographic: return "geographic";
    case Crs::Kind::PixelOnly: return "pixel";
    case Crs::Kind::Utm: return "utm:" + std::to_string(crs.zone) + (crs.hemisphere == Hemisphere::North ? "N" : "S");
  }
  return "pixel";
}

void RunConfig::validate() const {
  if (dsm.empty()) config_error("dsm path is empty");
  if (rpc.empty()) config_error("rpc path is empty");
  if (image_width < 1 || image_height < 1) config_error("image dimensions must be positive");
  if (!(sun_elevation_deg > 0.0 && sun_elevation_deg <= 90.0)) config_error("sun elevation must lie in (0, 90]");
  if (!(sun_azimuth_deg >= 0.0 && sun_azimuth_deg < 360.0)) config_error("sun azimuth must lie in [0, 360)");
  if (upscale < 1 || upscale > 16) config_error("upscale must lie in 1..16");
  if (min_region_px < 0) config_error("min_region_px must be >= 0");
  if (fill_holes_px < 0) config_error("fill_holes_px must be >= 0");
  if (crs.kind == Crs::Kind::PixelOnly) config_error("crs must be geographic or utm for projection");
  if (outputs.shadow_dsm.empty() || outputs.shadow_image.empty() || outputs.uncertainty.empty()) {
    config_error("outputs.shadow_dsm, outputs.shadow_image and outputs.uncertainty are required");
  }
  if (ndvi && ndvi->dilation_px < 0) config_error("ndvi.dilation_px must be >= 0");
}

RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::exception& e) {
    throw ParseError(std::string("run config is not valid JSON: ") + e.what(), 0);
  }
  if (!doc.is_object()) config_error("document must be a JSON object");

  RunConfig cfg;
  if (const auto it = doc.find("tile_id"); it != doc.end()) {
    if (!it->is_string()) config_error("tile_id must be a string");
    cfg.tile_id = it->get<std::string>();
  }
  cfg.dsm = path_value(require_key(doc, "dsm"), "dsm", base_dir);
  cfg.dsm_max = optional_path(doc, "dsm_max", base_dir);
  const json& crs = require_key(doc, "crs");
  if (!crs.is_string()) config_error("crs must be a string");
  cfg.crs = parse_crs(crs.get<std::string>());
  cfg.rpc = path_value(require_key(doc, "rpc"), "rpc", base_dir);

  const json& image = require_key(doc, "image");
  if (!image.is_object()) config_error("image must be an object");
  cfg.image_width = int_value(image, "width", 0);
  cfg.image_height = int_value(image, "height", 0);

  const json& sun = require_key(doc, "sun");
  if (!sun.is_object()) config_error("sun must be an object");
  cfg.sun_azimuth_deg = number_value(sun, "azimuth");
  cfg.sun_elevation_deg = number_value(sun, "elevation");

  cfg.upscale = int_value(doc, "upscale", 4);
  cfg.min_region_px = int_value(doc, "min_region_px", 50);
  cfg.fill_holes_px = int_value(doc, "fill_holes_px", 0);

  if (const auto it = doc.find("ndvi"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) config_error("ndvi must be an object");
    NdviInputs n;
    n.nir = path_value(require_key(*it, "nir"), "ndvi.nir", base_dir);
    n.red = path_value(require_key(*it, "red"), "ndvi.red", base_dir);
    if (it->contains("threshold")) n.threshold = number_value(*it, "threshold");
    n.dilation_px = int_value(*it, "dilation_px", 0);
    cfg.ndvi = n;
  }

  const json& out = require_key(doc, "outputs");
  if (!out.is_object()) config_error("outputs must be an object");
  cfg.outputs.shadow_dsm = path_value(require_key(out, "shadow_dsm"), "outputs.shadow_dsm", base_dir);
  cfg.outputs.shadow_image = path_value(require_key(out, "shadow_image"), "outputs.shadow_image", base_dir);
  cfg.outputs.uncertainty = path_value(require_key(out, "uncertainty"), "outputs.uncertainty", base_dir);
  cfg.outputs.shadow_dsm_max = optional_path(out, "shadow_dsm_max", base_dir);
  cfg.outputs.shadow_image_max = optional_path(out, "shadow_image_max", base_dir);
  cfg.outputs.uncertainty_max = optional_path(out, "uncertainty_max", base_dir);
  cfg.outputs.supervision = optional_path(out, "supervision", base_dir);
  cfg.outputs.label = optional_path(out, "label", base_dir);
  cfg.outputs.ignore = optional_path(out, "ignore", base_dir);
  cfg.outputs.ndvi = optional_path(out, "ndvi", base_dir);
  cfg.outputs.vegetation = optional_path(out, "vegetation", base_dir);

  cfg.validate();
  return cfg;
}

RunConfig read_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_run_config(buf.str(), path.parent_path());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

}  // namespace geoshadow
