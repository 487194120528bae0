#include <random>

#include "cli_harness.hpp"
#include "doctest.h"
#include "geoshadow/geotiff.hpp"
#include "geoshadow/projection.hpp"
#include "geoshadow/rpc_io.hpp"
#include "geoshadow/shadowcast.hpp"
#include "oracles.hpp"

using namespace geoshadow;
using geoshadow::testing::run_cli;
using geoshadow::testing::ScratchDir;

TEST_CASE("usage errors exit 2") {
  CHECK(run_cli({}).code == cli::kExitInputError);
  CHECK(run_cli({"frobnicate"}).code == cli::kExitInputError);
  CHECK(run_cli({"cast", "--azimuth", "10", "--elevation", "45", "--out", "x.tif"}).code == cli::kExitInputError);
  CHECK(run_cli({"cast", "--dsm", "a.tif", "--azimuth", "ten", "--elevation", "45", "--out", "x.tif"}).code ==
        cli::kExitInputError);
  CHECK(run_cli({"pipeline", "--manifest", "m.txt", "--jobs", "0"}).code == cli::kExitInputError);
  const auto help = run_cli({"--help"});
  CHECK(help.code == cli::kExitOk);
  CHECK(help.out.find("cast") != std::string::npos);
  CHECK(run_cli({"cast", "--help"}).code == cli::kExitOk);
}

TEST_CASE("cast") {
  ScratchDir dir("geoshadow_cli_cast");
  SUBCASE("flat DSM gives an all-zero mask") {
    write_geotiff(Raster::filled(12, 9, 5.0, GeoTransform{0.5, 8.5, 1.0, -1.0}), dir / "flat.tif");
    const auto r = run_cli({"cast", "--dsm", dir / "flat.tif", "--azimuth", "135", "--elevation", "30", "--out",
                            dir / "out/flat_mask.tif"});
    CHECK(r.code == cli::kExitOk);
    const Raster mask = read_geotiff(dir / "out/flat_mask.tif");
    CHECK(mask.width() == 48);
    for (double v : mask.samples()) CHECK(v == 0.0);
  }
  SUBCASE("pillar strip matches the hand-evaluated shadow") {
    std::vector<double> z(64, 0.0);
    z[0] = 10.0;
    write_geotiff(Raster(64, 1, z, GeoTransform{0.5, 0.5, 1.0, -1.0}), dir / "pillar.tif");
    const auto r = run_cli({"cast", "--dsm", dir / "pillar.tif", "--azimuth", "270", "--elevation", "45", "--upscale",
                            "1", "--out", dir / "pillar_mask.tif"});
    REQUIRE(r.code == cli::kExitOk);
    const Raster mask = read_geotiff(dir / "pillar_mask.tif");
    for (int col = 0; col < 64; ++col) CHECK(mask(col, 0) == ((col >= 1 && col <= 9) ? 1.0 : 0.0));
  }
  SUBCASE("input errors exit 2 with a one-line diagnostic") {
    const auto missing = run_cli({"cast", "--dsm", dir / "nope.tif", "--azimuth", "0", "--elevation", "45", "--out",
                                  dir / "m.tif"});
    CHECK(missing.code == cli::kExitInputError);
    CHECK(missing.err.find("nope.tif") != std::string::npos);
    CHECK(std::count(missing.err.begin(), missing.err.end(), '\n') == 1);
    write_geotiff(Raster::filled(4, 4, 0.0), dir / "ok.tif");
    CHECK(run_cli({"cast", "--dsm", dir / "ok.tif", "--azimuth", "0", "--elevation", "-3", "--out", dir / "m.tif"})
              .code == cli::kExitInputError);
    CHECK(run_cli({"cast", "--dsm", dir / "ok.tif", "--azimuth", "0", "--elevation", "45", "--upscale", "0", "--out",
                   dir / "m.tif"})
              .code == cli::kExitInputError);
    CHECK(run_cli({"cast", "--dsm", dir / "ok.tif", "--azimuth", "0", "--elevation", "45", "--crs", "lambert",
                   "--out", dir / "m.tif"})
              .code == cli::kExitInputError);
  }
  SUBCASE("processing errors exit 3") {
    write_geotiff(Raster::filled(4, 4, -9999.0, GeoTransform{}, -9999.0), dir / "holes.tif");
    const auto r = run_cli({"cast", "--dsm", dir / "holes.tif", "--azimuth", "0", "--elevation", "45", "--out",
                            dir / "m.tif"});
    CHECK(r.code == cli::kExitProcessingError);
    write_geotiff(Raster::filled(4, 4, 0.0, GeoTransform{0, 0, 1.0, -2.0}), dir / "aniso.tif");
    CHECK(run_cli({"cast", "--dsm", dir / "aniso.tif", "--azimuth", "0", "--elevation", "45", "--out", dir / "m.tif"})
              .code == cli::kExitProcessingError);
  }
}

TEST_CASE("project") {
  ScratchDir dir("geoshadow_cli_project");
  std::mt19937_64 rng(3);
  std::bernoulli_distribution coin(0.3);
  std::vector<double> s(30 * 20);
  for (double& v : s) v = coin(rng) ? 1.0 : 0.0;
  const Raster dsm(30, 20, std::vector<double>(600, 1.0), GeoTransform{0.0, 0.0, 1.0, 1.0}, std::nullopt,
                   Crs::geographic());
  write_geotiff(dsm, dir / "dsm.tif");
  write_geotiff(dsm.with_samples(s), dir / "shadow.tif", mask_write_options());
  write_rpc(geoshadow::testing::identity_rpc(), dir / "identity.rpc");

  SUBCASE("identity RPC reproduces the DSM mask on certain pixels") {
    const auto r = run_cli({"project", "--dsm", dir / "dsm.tif", "--shadows", dir / "shadow.tif", "--rpc",
                            dir / "identity.rpc", "--width", "32", "--height", "22", "--min-region", "0", "--crs",
                            "geographic", "--out", dir / "img.tif", "--out-uncertainty", dir / "unc.tif"});
    REQUIRE(r.code == cli::kExitOk);
    const Raster img = read_geotiff(dir / "img.tif"), unc = read_geotiff(dir / "unc.tif");
    for (int row = 0; row < 22; ++row) {
      for (int col = 0; col < 32; ++col) {
        const bool inside = col < 30 && row < 20;
        CHECK(unc(col, row) == (inside ? 0.0 : 1.0));
        CHECK(img(col, row) == (inside ? s[static_cast<std::size_t>(row) * 30 + col] : 0.0));
      }
    }
  }
  SUBCASE("corrupt RPC names the missing key") {
    std::string text = geoshadow::format_rpc_text(geoshadow::testing::identity_rpc());
    const auto pos = text.find("LINE_NUM_COEFF_13:");
    text.erase(pos, text.find('\n', pos) - pos + 1);
    std::ofstream(dir / "corrupt.rpc") << text;
    const auto r = run_cli({"project", "--dsm", dir / "dsm.tif", "--shadows", dir / "shadow.tif", "--rpc",
                            dir / "corrupt.rpc", "--width", "32", "--height", "22", "--crs", "geographic", "--out",
                            dir / "img.tif", "--out-uncertainty", dir / "unc.tif"});
    CHECK(r.code == cli::kExitInputError);
    CHECK(r.err.find("LINE_NUM_COEFF_13") != std::string::npos);
  }
  SUBCASE("grid mismatch and bad sizes are input errors") {
    write_geotiff(Raster::filled(7, 3, 0.0), dir / "odd.tif", mask_write_options());
    CHECK(run_cli({"project", "--dsm", dir / "dsm.tif", "--shadows", dir / "odd.tif", "--rpc", dir / "identity.rpc",
                   "--width", "32", "--height", "22", "--crs", "geographic", "--out", dir / "img.tif",
                   "--out-uncertainty", dir / "unc.tif"})
              .code == cli::kExitInputError);
    CHECK(run_cli({"project", "--dsm", dir / "dsm.tif", "--shadows", dir / "shadow.tif", "--rpc", dir / "identity.rpc",
                   "--width", "0", "--height", "22", "--crs", "geographic", "--out", dir / "img.tif",
                   "--out-uncertainty", dir / "unc.tif"})
              .code == cli::kExitInputError);
    CHECK(run_cli({"project", "--dsm", dir / "dsm.tif", "--shadows", dir / "shadow.tif", "--rpc", dir / "identity.rpc",
                   "--width", "3", "--height", "2", "--crs", "pixel", "--out", dir / "img.tif", "--out-uncertainty",
                   dir / "unc.tif"})
              .code == cli::kExitInputError);
  }
}

TEST_CASE("cast then project on a pillar scene matches the projection oracle") {
  ScratchDir dir("geoshadow_cli_scene");
  std::mt19937_64 rng(21);
  const auto scene = geoshadow::testing::pillar_scene(rng);
  write_geotiff(scene.dsm, dir / "dsm.tif", {SampleType::Float64, TiffCompression::None, std::nullopt});
  write_rpc(scene.rpc, dir / "cam.rpc");
  REQUIRE(run_cli({"cast", "--dsm", dir / "dsm.tif", "--azimuth", "200", "--elevation", "40", "--upscale", "2",
                   "--crs", "geographic", "--out", dir / "s_dsm.tif"})
              .code == cli::kExitOk);
  REQUIRE(run_cli({"project", "--dsm", dir / "dsm.tif", "--shadows", dir / "s_dsm.tif", "--rpc", dir / "cam.rpc",
                   "--width", std::to_string(scene.image_width), "--height", std::to_string(scene.image_height),
                   "--min-region", "0", "--crs", "geographic", "--out", dir / "img.tif", "--out-uncertainty",
                   dir / "unc.tif"})
              .code == cli::kExitOk);
  const ShadowCast cast = cast_shadows(scene.dsm, sun_direction(200, 40), {.upscale = 2});
  const ShadowProduct want = geoshadow::testing::exhaustive_projection(cast.surface, cast.shadow, scene.rpc,
                                                                       scene.image_height, scene.image_width);
  const Raster img = read_geotiff(dir / "img.tif"), unc = read_geotiff(dir / "unc.tif");
  CHECK(std::equal(img.samples().begin(), img.samples().end(), want.shadow.samples().begin()));
  CHECK(std::equal(unc.samples().begin(), unc.samples().end(), want.uncertainty.samples().begin()));
}
