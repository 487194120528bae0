#include <cmath>
#include <random>

#include "doctest.h"
#include "geoshadow/error.hpp"
#include "geoshadow/utm.hpp"
#include "oracles.hpp"

using namespace geoshadow;

namespace {
constexpr double kMetersPerDegree = 111320.0;
}

TEST_CASE("central meridian on the equator") {
  const LonLat ll = utm_to_geographic(500000.0, 0.0, 31, Hemisphere::North);
  CHECK(ll.lon_deg == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(std::fabs(ll.lat_deg) < 1e-15);
  const LonLat south = utm_to_geographic(500000.0, 10000000.0, 31, Hemisphere::South);
  CHECK(south.lon_deg == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(std::fabs(south.lat_deg) < 1e-9);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(utm_to_geographic(99999.0, 0.0, 31, Hemisphere::North), DomainError);
  CHECK_THROWS_AS(utm_to_geographic(900001.0, 0.0, 31, Hemisphere::North), DomainError);
  CHECK_THROWS_AS(utm_to_geographic(500000.0, -1.0, 31, Hemisphere::North), DomainError);
  CHECK_THROWS_AS(utm_to_geographic(500000.0, 0.0, 0, Hemisphere::North), DomainError);
  CHECK_THROWS_AS(utm_to_geographic(500000.0, 0.0, 61, Hemisphere::North), DomainError);
  CHECK_THROWS_AS(utm_to_geographic(NAN, 0.0, 31, Hemisphere::North), DomainError);
}

TEST_CASE("forward and inverse round trip") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> dlon(-3.0, 3.0), lat(-80.0, 84.0);
  std::uniform_int_distribution<int> zone(1, 60);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int z = zone(rng);
    const double lon0 = z * 6.0 - 183.0 + dlon(rng), lat0 = lat(rng);
    const Hemisphere hemi = lat0 >= 0 ? Hemisphere::North : Hemisphere::South;
    const UtmCoordinate utm = geographic_to_utm(lon0, lat0, z, hemi);
    const LonLat back = utm_to_geographic(utm.easting, utm.northing, z, hemi);
    worst = std::max({worst, std::fabs(back.lon_deg - lon0), std::fabs(back.lat_deg - lat0)});
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("agrees with the textbook footpoint-latitude series") {
  struct Case {
    double e, n;
    int zone;
    bool north;
  };
  const Case cases[] = {
      {484000.0, 3620080.0, 11, true},  {612345.6, 5432109.8, 33, true}, {350000.0, 1000000.0, 18, true},
      {400000.0, 7000000.0, 23, false}, {560000.0, 9990000.0, 50, false},
  };
  for (const Case& c : cases) {
    const LonLat ours = utm_to_geographic(c.e, c.n, c.zone, c.north ? Hemisphere::North : Hemisphere::South);
    const auto [lon, lat] = geoshadow::testing::snyder_utm_inverse(c.e, c.n, c.zone, c.north);
    const double dx = (ours.lon_deg - lon) * kMetersPerDegree * std::cos(lat * M_PI / 180.0);
    const double dy = (ours.lat_deg - lat) * kMetersPerDegree;
    CHECK(std::hypot(dx, dy) < 1e-3);
  }
}

TEST_CASE("known forward value") {
  // Projecting a zone's central meridian gives the false easting.
  const UtmCoordinate c = geographic_to_utm(-117.0, 32.7, 11, Hemisphere::North);
  CHECK(c.easting == doctest::Approx(500000.0).epsilon(1e-12));
  CHECK(c.northing > 3.6e6);
  CHECK(c.northing < 3.7e6);
}
