#pragma once

#include <limits>

namespace geoshadow {

/// Sun position and the derived shadow-march quantities.
///
/// Azimuth is clockwise from grid north. (p, q) is the horizontal direction in
/// which shadows extend, in array axes (x = column eastward, y = row southward),
/// with p^2 + q^2 = cos^2(elevation). `slope` is tan(elevation); it is +inf at
/// the zenith, where p = q = 0.
struct SunGeometry {
  double azimuth_deg = 0.0;
  double elevation_deg = 90.0;
  double p = 0.0;
  double q = 0.0;
  double slope = std::numeric_limits<double>::infinity();

  bool at_zenith() const noexcept { return p == 0.0 && q == 0.0; }
};

/// Throws DomainError unless 0 < elevation <= 90 and 0 <= azimuth < 360.
SunGeometry sun_direction(double azimuth_deg, double elevation_deg);

/// sin and cos of an angle in degrees, exact at multiples of 30 and 45 degrees.
void sincos_degrees(double degrees, double& sine, double& cosine);

}  // namespace geoshadow
