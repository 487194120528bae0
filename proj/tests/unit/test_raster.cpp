#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "geoshadow/error.hpp"
#include "geoshadow/raster.hpp"

using namespace geoshadow;

namespace {

double lerp(double a, double b, double t) { return a * (1.0 - t) + b * t; }

Raster ramp(int w, int h, double gx, double gy, double c = 0.0) {
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  for (int r = 0; r < h; ++r)
    for (int col = 0; col < w; ++col) v[static_cast<std::size_t>(r) * w + col] = c + gx * col + gy * r;
  return Raster(w, h, std::move(v), GeoTransform{10.0, 20.0, 2.0, -2.0});
}

}  // namespace

TEST_CASE("raster construction validates shape and geotransform") {
  CHECK_THROWS_AS(Raster(0, 1, {}), ArgumentError);
  CHECK_THROWS_AS(Raster(2, 2, {1.0, 2.0, 3.0}), ArgumentError);
  CHECK_THROWS_AS(Raster(1, 1, {1.0}, GeoTransform{0, 0, -1.0, 1.0}), ArgumentError);
  CHECK_THROWS_AS(Raster(1, 1, {1.0}, GeoTransform{0, 0, 1.0, 0.0}), ArgumentError);
  const Raster r(2, 1, {1.0, -9999.0}, GeoTransform{}, -9999.0);
  CHECK(r.count_valid() == 1);
  CHECK_FALSE(r.is_valid(1, 0));
  const Raster nan_nodata(2, 1, {1.0, NAN}, GeoTransform{}, NAN);
  CHECK(nan_nodata.count_valid() == 1);
}

TEST_CASE("geotransform maps pixel centers") {
  const GeoTransform gt{500.0, 1000.0, 0.5, -0.5};
  const auto [x, y] = gt.to_world(2, 4);
  CHECK(x == 501.0);
  CHECK(y == 998.0);
  const auto [c, r] = gt.to_pixel(x, y);
  CHECK(c == 2.0);
  CHECK(r == 4.0);
}

TEST_CASE("bilinear_sample on a 2x2 grid") {
  const Raster r(2, 2, {0.0, 1.0, 2.0, 3.0});
  CHECK(*bilinear_sample(r, 0.5, 0.5) == 1.5);
  CHECK(*bilinear_sample(r, 0.0, 0.0) == 0.0);
  CHECK(*bilinear_sample(r, 1.0, 1.0) == 3.0);
  CHECK_THROWS_AS((void)bilinear_sample(r, -0.01, 0.0), BoundsError);
  CHECK_THROWS_AS((void)bilinear_sample(r, 0.0, 1.01), BoundsError);
  CHECK_THROWS_AS((void)bilinear_sample(r, NAN, 0.0), BoundsError);
}

TEST_CASE("bilinear_sample matches two-stage linear interpolation") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(9);
    for (double& x : v) x = u(rng);
    const Raster r(3, 3, v);
    // (1.25, 0.75): columns 1..2 at rows 0 and 1, then blend rows.
    const double top = lerp(v[1], v[2], 0.25);
    const double bottom = lerp(v[4], v[5], 0.25);
    CHECK(*bilinear_sample(r, 1.25, 0.75) == doctest::Approx(lerp(top, bottom, 0.75)).epsilon(1e-14));
  }
}

TEST_CASE("pixel-center queries are bit-exact") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  std::vector<double> v(35);
  for (double& x : v) x = u(rng);
  const Raster r(7, 5, v);
  for (int row = 0; row < 5; ++row)
    for (int col = 0; col < 7; ++col) CHECK(*bilinear_sample(r, col, row) == r(col, row));
}

TEST_CASE("nodata neighbors poison a sample only when weighted") {
  const Raster r(3, 2, {1.0, 2.0, -1.0, 4.0, 5.0, 6.0}, GeoTransform{}, -1.0);
  CHECK_FALSE(bilinear_sample(r, 1.5, 0.5).has_value());
  CHECK_FALSE(bilinear_sample(r, 2.0, 0.0).has_value());
  CHECK(*bilinear_sample(r, 0.5, 0.5) == 3.0);
  CHECK(*bilinear_sample(r, 1.0, 0.5) == 3.5);
}

TEST_CASE("bilinear_sample is continuous") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<double> v(64);
  for (double& x : v) x = u(rng);
  const Raster r(8, 8, v);
  double max_gradient = 0.0;
  for (int row = 0; row < 8; ++row) {
    for (int col = 0; col < 8; ++col) {
      if (col + 1 < 8) max_gradient = std::max(max_gradient, std::fabs(r(col + 1, row) - r(col, row)));
      if (row + 1 < 8) max_gradient = std::max(max_gradient, std::fabs(r(col, row + 1) - r(col, row)));
    }
  }
  std::uniform_real_distribution<double> pos(0.0, 7.0 - 1e-3);
  const double eps = 1e-4;
  for (int i = 0; i < 2000; ++i) {
    const double x = pos(rng), y = pos(rng);
    const double a = *bilinear_sample(r, x, y);
    const double b = *bilinear_sample(r, x + eps, y);
    const double c = *bilinear_sample(r, x, y + eps);
    CHECK(std::fabs(a - b) <= eps * max_gradient * 2);
    CHECK(std::fabs(a - c) <= eps * max_gradient * 2);
  }
}

TEST_CASE("upsample") {
  const Raster r = ramp(3, 2, 1.5, -4.0, 2.0);
  SUBCASE("factor 1 is the identity") { CHECK(upsample(r, 1) == r); }
  SUBCASE("factor 0 is rejected") { CHECK_THROWS_AS(upsample(r, 0), ArgumentError); }
  SUBCASE("constant stays constant") {
    const Raster c = Raster::filled(5, 3, 7.0);
    const Raster up = upsample(c, 4);
    CHECK(up.width() == 20);
    CHECK(up.height() == 12);
    for (double v : up.samples()) CHECK(v == 7.0);
  }
  SUBCASE("2x2 ramp samples bilinear_sample at the mapped coordinate") {
    const Raster small = ramp(2, 2, 3.0, 5.0);
    const Raster up = upsample(small, 2);
    for (int row = 0; row < 4; ++row) {
      for (int col = 0; col < 4; ++col) {
        const double x = std::min(col / 2.0, 1.0), y = std::min(row / 2.0, 1.0);
        CHECK(up(col, row) == *bilinear_sample(small, x, y));
      }
    }
  }
  SUBCASE("geotransform keeps the first center and divides pixel sizes") {
    const Raster up = upsample(r, 4);
    CHECK(up.geotransform().origin_x == r.geotransform().origin_x);
    CHECK(up.geotransform().origin_y == r.geotransform().origin_y);
    CHECK(up.geotransform().pixel_size_x == 0.5);
    CHECK(up.geotransform().pixel_size_y == -0.5);
    // Input pixel centers land on output pixels with the same value.
    for (int row = 0; row < r.height(); ++row)
      for (int col = 0; col < r.width(); ++col) CHECK(up(col * 4, row * 4) == r(col, row));
  }
  SUBCASE("nodata propagates") {
    const Raster holes(2, 2, {1.0, 2.0, -5.0, 4.0}, GeoTransform{}, -5.0);
    const Raster up = upsample(holes, 2);
    CHECK(up.nodata() == -5.0);
    CHECK(up(0, 0) == 1.0);
    CHECK(up.is_nodata(up(1, 1)));
    CHECK(up(2, 0) == 2.0);
  }
}

TEST_CASE("upsample composes for constant and ramp rasters") {
  const std::vector<Raster> inputs{Raster::filled(4, 3, -2.5), ramp(4, 3, 0.75, 0.0), ramp(4, 3, 0.0, -1.25, 3.0),
                                   ramp(5, 4, 2.0, 3.0, 1.0)};
  const std::vector<std::pair<int, int>> factors{{2, 2}, {2, 3}, {3, 2}, {4, 2}};
  for (const Raster& r : inputs) {
    for (auto [a, b] : factors) {
      const Raster direct = upsample(r, a * b);
      const Raster staged = upsample(upsample(r, a), b);
      REQUIRE(direct.width() == staged.width());
      REQUIRE(direct.height() == staged.height());
      for (std::size_t i = 0; i < direct.size(); ++i) CHECK(direct.samples()[i] == doctest::Approx(staged.samples()[i]).epsilon(1e-9));
      CHECK(direct.geotransform() == staged.geotransform());
    }
  }
}

TEST_CASE("grid_points aggregates with min and max") {
  const BoundingBox box{0.0, 0.0, 2.0, 2.0};
  const std::vector<Point3> pts{{0.5, 0.5, 3.0}, {0.6, 0.7, 9.0}};
  const Raster lo = grid_points(pts, box, 1.0, Aggregation::Min);
  const Raster hi = grid_points(pts, box, 1.0, Aggregation::Max);
  // Row 1 is the southern band.
  CHECK(lo(0, 1) == 3.0);
  CHECK(hi(0, 1) == 9.0);
  CHECK(lo.is_nodata(lo(0, 0)));
  CHECK(lo.count_valid() == 1);
  CHECK(lo.geotransform() == GeoTransform{0.5, 1.5, 1.0, -1.0});
}

TEST_CASE("grid_points edge cases") {
  const BoundingBox box{0.0, 0.0, 4.0, 2.0};
  const Raster empty = grid_points({}, box, 1.0, Aggregation::Min);
  CHECK(empty.width() == 4);
  CHECK(empty.height() == 2);
  CHECK(empty.count_valid() == 0);
  CHECK_THROWS_AS(grid_points({}, box, 0.0, Aggregation::Min), ArgumentError);
  CHECK_THROWS_AS(grid_points({}, BoundingBox{0, 0, 0, 1}, 1.0, Aggregation::Min), ArgumentError);
  // Half-open cells: x = 1 belongs to column 1, x = max_x is outside.
  const std::vector<Point3> pts{{1.0, 0.0, 5.0}, {4.0, 1.0, 6.0}, {0.0, 2.0, 7.0}};
  const Raster r = grid_points(pts, box, 1.0, Aggregation::Max);
  CHECK(r(1, 1) == 5.0);
  CHECK(r.count_valid() == 1);
}

TEST_CASE("grid_points matches a brute-force per-cell scan") {
  std::mt19937_64 rng(42);
  // Dyadic coordinates keep cell-boundary arithmetic exact.
  std::uniform_int_distribution<int> coord(0, 10 * 64 - 1);
  std::uniform_real_distribution<double> elev(0.0, 30.0);
  std::vector<Point3> pts(1000);
  for (Point3& p : pts) p = {100.0 + coord(rng) / 64.0, 200.0 + coord(rng) / 64.0, elev(rng)};
  const BoundingBox box{100.0, 200.0, 110.0, 210.0};
  for (Aggregation agg : {Aggregation::Min, Aggregation::Max}) {
    const Raster r = grid_points(pts, box, 1.0, agg, -1.0);
    REQUIRE(r.width() == 10);
    REQUIRE(r.height() == 10);
    for (int row = 0; row < 10; ++row) {
      for (int col = 0; col < 10; ++col) {
        const double x0 = 100.0 + col, y1 = 210.0 - row;
        bool any = false;
        double best = 0.0;
        for (const Point3& p : pts) {
          if (p.x >= x0 && p.x < x0 + 1.0 && p.y >= y1 - 1.0 && p.y < y1) {
            best = !any ? p.z : (agg == Aggregation::Min ? std::min(best, p.z) : std::max(best, p.z));
            any = true;
          }
        }
        CHECK(r(col, row) == (any ? best : -1.0));
      }
    }
  }
}

TEST_CASE("grid_points min never exceeds max") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> xy(0.0, 25.0), z(-10.0, 10.0);
  std::vector<Point3> pts(3000);
  for (Point3& p : pts) p = {xy(rng), xy(rng), z(rng)};
  const BoundingBox box{0.0, 0.0, 25.0, 25.0};
  const Raster lo = grid_points(pts, box, 0.5, Aggregation::Min);
  const Raster hi = grid_points(pts, box, 0.5, Aggregation::Max);
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!lo.is_nodata(lo.samples()[i]) && !hi.is_nodata(hi.samples()[i])) CHECK(lo.samples()[i] <= hi.samples()[i]);
  }
}
