#include "geoshadow/solar.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "geoshadow/error.hpp"

namespace geoshadow {

void sincos_degrees(double degrees, double& sine, double& cosine) {
  // Reduce to r in [-45, 45] plus a quadrant so cardinal and diagonal angles
  // come out exact (cos 90 == 0, sin 45 == cos 45).
  int quadrant = 0;
  double r = std::remquo(degrees, 90.0, &quadrant);
  double s = 0.0;
  double c = 1.0;
  if (r == 0.0) {
    s = 0.0;
    c = 1.0;
  } else if (std::fabs(r) == 45.0) {
    s = std::copysign(std::sqrt(0.5), r);
    c = std::sqrt(0.5);
  } else if (std::fabs(r) == 30.0) {
    s = std::copysign(0.5, r);
    c = std::sqrt(3.0) / 2.0;
  } else {
    const double rad = r * (std::numbers::pi / 180.0);
    s = std::sin(rad);
    c = std::cos(rad);
  }
  switch (static_cast<unsigned>(quadrant) & 3u) {
    case 0: sine = s; cosine = c; break;
    case 1: sine = c; cosine = -s; break;
    case 2: sine = -s; cosine = -c; break;
    default: sine = -c; cosine = s; break;
  }
  // Normalize -0 so mirrored directions compare cleanly.
  sine += 0.0;
  cosine += 0.0;
}

SunGeometry sun_direction(double azimuth_deg, double elevation_deg) {
  if (!(elevation_deg > 0.0)) {
    throw DomainError("sun elevation must be above the horizon, got " + std::to_string(elevation_deg));
  }
  if (!(elevation_deg <= 90.0)) {
    throw DomainError("sun elevation must be <= 90 degrees, got " + std::to_string(elevation_deg));
  }
  if (!(azimuth_deg >= 0.0 && azimuth_deg < 360.0)) {
    throw DomainError("sun azimuth must lie in [0, 360), got " + std::to_string(azimuth_deg));
  }

  SunGeometry sun;
  sun.azimuth_deg = azimuth_deg;
  sun.elevation_deg = elevation_deg;
  if (elevation_deg == 90.0) return sun;

  double sin_az = 0.0, cos_az = 0.0, sin_el = 0.0, cos_el = 0.0;
  sincos_degrees(azimuth_deg, sin_az, cos_az);
  sincos_degrees(elevation_deg, sin_el, cos_el);
  sun.p = -sin_az * cos_el + 0.0;
  sun.q = cos_az * cos_el + 0.0;
  sun.slope = sin_el / cos_el;
  return sun;
}

}  // namespace geoshadow
