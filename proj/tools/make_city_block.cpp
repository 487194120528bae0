// Writes the synthetic "city block" tile: DSM Min/Max, an RPC for a slightly
// off-nadir 0.3 m image, NIR/red bands, a run configuration and a manifest.
//
//   make_city_block <output-dir>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include "geoshadow/geotiff.hpp"
#include "geoshadow/rpc.hpp"
#include "geoshadow/rpc_io.hpp"
#include "geoshadow/utm.hpp"

namespace fs = std::filesystem;
using namespace geoshadow;

namespace {

constexpr int kZone = 11;
constexpr double kWest = 484000.0;    // easting of the west edge
constexpr double kNorth = 3620080.0;  // northing of the north edge
constexpr double kDsmRes = 0.5;
constexpr int kDsmSize = 160;  // 80 m
constexpr double kImageGsd = 0.3;
constexpr int kImageSize = 300;

struct Box {
  double e0, n0, e1, n1;  // metres from the north-west corner: east, south
  double height;
};

// Footprints in metres east/south of the tile corner.
const Box kBuildings[] = {
    {8, 6, 30, 24, 18.0},   {40, 8, 52, 40, 9.0},  {58, 10, 74, 22, 24.0}, {10, 36, 22, 70, 6.0},
    {22, 56, 34, 70, 12.0}, {50, 52, 70, 72, 15.0}, {44, 48, 47, 51, 3.0},
};

struct Tree {
  double e, n, radius, height;
};
const Tree kTrees[] = {{36, 30, 3.0, 8.0}, {40, 74, 2.5, 7.0}, {76, 46, 2.0, 6.0}};

double ground(double e, double n) { return 20.0 + 0.02 * e - 0.01 * n; }

double surface(double e, double n, bool dilate) {
  double z = ground(e, n);
  const double grow = dilate ? 0.5 : 0.0;
  for (const Box& b : kBuildings) {
    if (e >= b.e0 - grow && e < b.e1 + grow && n >= b.n0 - grow && n < b.n1 + grow) z = std::max(z, ground(e, n) + b.height);
  }
  if (dilate) {
    // Canopies only survive the max aggregation.
    for (const Tree& t : kTrees) {
      const double r = std::hypot(e - t.e, n - t.n);
      if (r < t.radius) z = std::max(z, ground(e, n) + t.height * std::sqrt(1.0 - (r / t.radius) * (r / t.radius)));
    }
  }
  return z;
}

Raster make_dsm(bool dilate) {
  std::vector<double> z(static_cast<std::size_t>(kDsmSize) * kDsmSize);
  for (int row = 0; row < kDsmSize; ++row) {
    for (int col = 0; col < kDsmSize; ++col) {
      const double e = (col + 0.5) * kDsmRes;
      const double n = (row + 0.5) * kDsmRes;
      double v = surface(e, n, dilate);
      // A LiDAR dropout on one roof.
      if (e >= 60 && e < 63 && n >= 14 && n < 17) v = kDefaultNodata;
      z[static_cast<std::size_t>(row) * kDsmSize + col] = std::round(v * 64.0) / 64.0;
    }
  }
  const GeoTransform gt{kWest + 0.5 * kDsmRes, kNorth - 0.5 * kDsmRes, kDsmRes, -kDsmRes};
  return Raster(kDsmSize, kDsmSize, std::move(z), gt, kDefaultNodata, Crs::utm(kZone, Hemisphere::North));
}

// Linear camera in UTM, expressed as an RPC in lon/lat by local differentiation.
RpcModel make_rpc() {
  const double e_c = kWest + 40.0, n_c = kNorth - 40.0;
  const LonLat c = utm_to_geographic(e_c, n_c, kZone, Hemisphere::North);
  const double d = 1e-4;
  const UtmCoordinate east = geographic_to_utm(c.lon_deg + d, c.lat_deg, kZone, Hemisphere::North);
  const UtmCoordinate west = geographic_to_utm(c.lon_deg - d, c.lat_deg, kZone, Hemisphere::North);
  const UtmCoordinate north = geographic_to_utm(c.lon_deg, c.lat_deg + d, kZone, Hemisphere::North);
  const UtmCoordinate south = geographic_to_utm(c.lon_deg, c.lat_deg - d, kZone, Hemisphere::North);
  const double de_dlon = (east.easting - west.easting) / (2 * d), dn_dlon = (east.northing - west.northing) / (2 * d);
  const double de_dlat = (north.easting - south.easting) / (2 * d), dn_dlat = (north.northing - south.northing) / (2 * d);

  RpcModel m;
  m.lon_off = c.lon_deg;
  m.lat_off = c.lat_deg;
  m.height_off = 30.0;
  m.lon_scale = 0.001;
  m.lat_scale = 0.001;
  m.height_scale = 50.0;
  m.samp_off = 40.0 / kImageGsd + 8.0;
  m.line_off = 40.0 / kImageGsd + 10.0;
  m.samp_scale = 200.0;
  m.line_scale = 200.0;
  // sample = (e - e_c)/gsd + lean_e * h ; line = (n_c - n)/gsd + lean_n * h
  const double lean_e = 0.12 / kImageGsd;  // metres of lean per metre of height, in pixels
  const double lean_n = -0.08 / kImageGsd;
  m.samp_num[1] = de_dlon * m.lon_scale / kImageGsd / m.samp_scale;
  m.samp_num[2] = de_dlat * m.lat_scale / kImageGsd / m.samp_scale;
  m.samp_num[3] = lean_e * m.height_scale / m.samp_scale;
  m.samp_num[0] = lean_e * m.height_off / m.samp_scale;
  m.line_num[1] = -dn_dlon * m.lon_scale / kImageGsd / m.line_scale;
  m.line_num[2] = -dn_dlat * m.lat_scale / kImageGsd / m.line_scale;
  m.line_num[3] = lean_n * m.height_scale / m.line_scale;
  m.line_num[0] = lean_n * m.height_off / m.line_scale;
  m.samp_num[7] = 1e-4;  // mild lens/terrain curvature
  m.line_num[8] = -1e-4;
  m.samp_den[0] = 1.0;
  m.line_den[0] = 1.0;
  m.samp_den[3] = 1e-5;
  m.line_den[3] = 1e-5;
  return m;
}

// NIR/red digital numbers on the image grid; trees and a lawn read as vegetation.
void make_bands(Raster& nir, Raster& red) {
  std::vector<double> n(static_cast<std::size_t>(kImageSize) * kImageSize), r(n.size());
  for (int row = 0; row < kImageSize; ++row) {
    for (int col = 0; col < kImageSize; ++col) {
      const double e = col * kImageGsd - 2.0, s = row * kImageGsd - 3.0;
      bool veg = e > 76 && s > 60;  // lawn in the south-east corner
      for (const Tree& t : kTrees) veg = veg || std::hypot(e - t.e, s - t.n) < t.radius;
      const std::size_t i = static_cast<std::size_t>(row) * kImageSize + col;
      n[i] = veg ? 3200 : 1200 + (col * 7 + row * 3) % 200;
      r[i] = veg ? 900 : 1500 + (col * 5 + row * 11) % 200;
    }
  }
  nir = Raster(kImageSize, kImageSize, std::move(n));
  red = Raster(kImageSize, kImageSize, std::move(r));
}

const char* kRunConfig = R"({
  "tile_id": "city_block",
  "dsm": "dsm_min.tif",
  "dsm_max": "dsm_max.tif",
  "crs": "utm:11N",
  "rpc": "image.rpc",
  "image": {"width": 300, "height": 300},
  "sun": {"azimuth": 135.0, "elevation": 40.0},
  "upscale": 4,
  "min_region_px": 50,
  "ndvi": {"nir": "nir.tif", "red": "red.tif", "threshold": 0.0},
  "outputs": {
    "shadow_dsm": "out/shadow_dsm.tif",
    "shadow_image": "out/shadow_image.tif",
    "uncertainty": "out/uncertainty.tif",
    "shadow_dsm_max": "out/shadow_dsm_max.tif",
    "shadow_image_max": "out/shadow_image_max.tif",
    "uncertainty_max": "out/uncertainty_max.tif",
    "supervision": "out/supervision.tif",
    "label": "out/label.tif",
    "ignore": "out/ignore.tif",
    "ndvi": "out/ndvi.tif",
    "vegetation": "out/vegetation.tif"
  }
}
)";

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_city_block <output-dir>\n";
    return 2;
  }
  const fs::path dir = argv[1];
  fs::create_directories(dir);
  const GeoTiffWriteOptions dsm_opts{SampleType::Float32, TiffCompression::Deflate, std::nullopt};
  write_geotiff(make_dsm(false), dir / "dsm_min.tif", dsm_opts);
  write_geotiff(make_dsm(true), dir / "dsm_max.tif", dsm_opts);
  write_rpc(make_rpc(), dir / "image.rpc");
  Raster nir = Raster::filled(1, 1, 0), red = nir;
  make_bands(nir, red);
  write_geotiff(nir, dir / "nir.tif", {SampleType::UInt16, TiffCompression::None, std::nullopt});
  write_geotiff(red, dir / "red.tif", {SampleType::UInt16, TiffCompression::None, std::nullopt});
  std::ofstream(dir / "run.json") << kRunConfig;
  std::ofstream(dir / "manifest.txt") << "# tile-id  run-config\ncity_block  run.json\n";
  return 0;
}
