#pragma once

#include "geoshadow/raster.hpp"

namespace geoshadow {

struct LonLat {
  double lon_deg = 0.0;
  double lat_deg = 0.0;
};

struct UtmCoordinate {
  double easting = 0.0;
  double northing = 0.0;
};

/// Inverse UTM on WGS84 (Krueger series to sixth order in n).
/// Throws DomainError for easting outside [100000, 900000], northing outside
/// [0, 10000000] or a zone outside 1..60.
LonLat utm_to_geographic(double easting, double northing, int zone, Hemisphere hemisphere);

/// Forward UTM on WGS84 in the given zone (no zone selection).
UtmCoordinate geographic_to_utm(double lon_deg, double lat_deg, int zone, Hemisphere hemisphere);

}  // namespace geoshadow
