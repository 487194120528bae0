#include "geoshadow/utm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "geoshadow/error.hpp"

namespace geoshadow {

namespace {

constexpr double kSemiMajor = 6378137.0;
constexpr double kFlattening = 1.0 / 298.257223563;
constexpr double kScale = 0.9996;
constexpr double kFalseEasting = 500000.0;
constexpr double kFalseNorthingSouth = 10000000.0;
constexpr double kDeg = std::numbers::pi / 180.0;

struct Series {
  double rectifying_radius;  // A
  double eccentricity;
  std::array<double, 6> alpha;
  std::array<double, 6> beta;
};

Series make_series() {
  const double n = kFlattening / (2.0 - kFlattening);
  const double n2 = n * n, n3 = n2 * n, n4 = n3 * n, n5 = n4 * n, n6 = n5 * n;
  Series s{};
  s.rectifying_radius = kSemiMajor / (1.0 + n) * (1.0 + n2 / 4.0 + n4 / 64.0 + n6 / 256.0);
  s.eccentricity = std::sqrt(kFlattening * (2.0 - kFlattening));
  s.alpha = {
      n / 2.0 - 2.0 * n2 / 3.0 + 5.0 * n3 / 16.0 + 41.0 * n4 / 180.0 - 127.0 * n5 / 288.0 + 7891.0 * n6 / 37800.0,
      13.0 * n2 / 48.0 - 3.0 * n3 / 5.0 + 557.0 * n4 / 1440.0 + 281.0 * n5 / 630.0 - 1983433.0 * n6 / 1935360.0,
      61.0 * n3 / 240.0 - 103.0 * n4 / 140.0 + 15061.0 * n5 / 26880.0 + 167603.0 * n6 / 181440.0,
      49561.0 * n4 / 161280.0 - 179.0 * n5 / 168.0 + 6601661.0 * n6 / 7257600.0,
      34729.0 * n5 / 80640.0 - 3418889.0 * n6 / 1995840.0,
      212378941.0 * n6 / 319334400.0,
  };
  s.beta = {
      n / 2.0 - 2.0 * n2 / 3.0 + 37.0 * n3 / 96.0 - n4 / 360.0 - 81.0 * n5 / 512.0 + 96199.0 * n6 / 604800.0,
      n2 / 48.0 + n3 / 15.0 - 437.0 * n4 / 1440.0 + 46.0 * n5 / 105.0 - 1118711.0 * n6 / 3870720.0,
      17.0 * n3 / 480.0 - 37.0 * n4 / 840.0 - 209.0 * n5 / 4480.0 + 5569.0 * n6 / 90720.0,
      4397.0 * n4 / 161280.0 - 11.0 * n5 / 504.0 - 830251.0 * n6 / 7257600.0,
      4583.0 * n5 / 161280.0 - 108847.0 * n6 / 3991680.0,
      20648693.0 * n6 / 638668800.0,
  };
  return s;
}

const Series& series() {
  static const Series s = make_series();
  return s;
}

double central_meridian(int zone) { return (zone * 6.0 - 183.0) * kDeg; }

void check_zone(int zone) {
  if (zone < 1 || zone > 60) throw DomainError("UTM zone must be in 1..60, got " + std::to_string(zone));
}

// tan of conformal latitude from tan of geodetic latitude.
double conformal_tan(double tau, double e) {
  const double sigma = std::sinh(e * std::atanh(e * tau / std::hypot(1.0, tau)));
  return tau * std::hypot(1.0, sigma) - sigma * std::hypot(1.0, tau);
}

// Inverse of conformal_tan by Newton iteration.
double geodetic_tan(double tau_prime, double e) {
  const double e2m = 1.0 - e * e;
  double tau = tau_prime;
  for (int i = 0; i < 8; ++i) {
    const double tp = conformal_tan(tau, e);
    const double dtau = (tau_prime - tp) * (1.0 + e2m * tau * tau) /
                        (e2m * std::hypot(1.0, tau) * std::hypot(1.0, tp));
    tau += dtau;
    if (std::fabs(dtau) < 1e-15 * std::max(1.0, std::fabs(tau))) break;
  }
  return tau;
}

}  // namespace

LonLat utm_to_geographic(double easting, double northing, int zone, Hemisphere hemisphere) {
  check_zone(zone);
  if (!(easting >= 100000.0 && easting <= 900000.0)) {
    throw DomainError("UTM easting " + std::to_string(easting) + " outside [100000, 900000]");
  }
  if (!(northing >= 0.0 && northing <= 10000000.0)) {
    throw DomainError("UTM northing " + std::to_string(northing) + " outside [0, 10000000]");
  }
  const Series& s = series();
  const double false_northing = hemisphere == Hemisphere::South ? kFalseNorthingSouth : 0.0;
  const double xi = (northing - false_northing) / (kScale * s.rectifying_radius);
  const double eta = (easting - kFalseEasting) / (kScale * s.rectifying_radius);

  double xi_p = xi;
  double eta_p = eta;
  for (int j = 1; j <= 6; ++j) {
    const double b = s.beta[static_cast<std::size_t>(j - 1)];
    xi_p -= b * std::sin(2.0 * j * xi) * std::cosh(2.0 * j * eta);
    eta_p -= b * std::cos(2.0 * j * xi) * std::sinh(2.0 * j * eta);
  }
  const double tau_prime = std::sin(xi_p) / std::hypot(std::sinh(eta_p), std::cos(xi_p));
  const double lambda = std::atan2(std::sinh(eta_p), std::cos(xi_p));
  const double tau = geodetic_tan(tau_prime, s.eccentricity);
  return {(central_meridian(zone) + lambda) / kDeg, std::atan(tau) / kDeg};
}

UtmCoordinate geographic_to_utm(double lon_deg, double lat_deg, int zone, Hemisphere hemisphere) {
  check_zone(zone);
  if (!(std::fabs(lat_deg) < 90.0)) throw DomainError("latitude must lie in (-90, 90)");
  const Series& s = series();
  double lambda = lon_deg * kDeg - central_meridian(zone);
  lambda = std::remainder(lambda, 2.0 * std::numbers::pi);
  const double tau = std::tan(lat_deg * kDeg);
  const double tau_prime = conformal_tan(tau, s.eccentricity);
  const double xi_p = std::atan2(tau_prime, std::cos(lambda));
  const double eta_p = std::asinh(std::sin(lambda) / std::hypot(tau_prime, std::cos(lambda)));

  double xi = xi_p;
  double eta = eta_p;
  for (int j = 1; j <= 6; ++j) {
    const double a = s.alpha[static_cast<std::size_t>(j - 1)];
    xi += a * std::sin(2.0 * j * xi_p) * std::cosh(2.0 * j * eta_p);
    eta += a * std::cos(2.0 * j * xi_p) * std::sinh(2.0 * j * eta_p);
  }
  const double false_northing = hemisphere == Hemisphere::South ? kFalseNorthingSouth : 0.0;
  return {kFalseEasting + kScale * s.rectifying_radius * eta,
          false_northing + kScale * s.rectifying_radius * xi};
}

}  // namespace geoshadow
