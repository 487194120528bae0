#include <cstdlib>
#include <random>

#include "cli/pipeline.hpp"
#include "cli_harness.hpp"
#include "doctest.h"
#include "geoshadow/error.hpp"
#include "geoshadow/geotiff.hpp"
#include "geoshadow/rpc_io.hpp"
#include "geoshadow/utm.hpp"
#include "json.hpp"

using namespace geoshadow;
using geoshadow::testing::read_bytes;
using geoshadow::testing::run_cli;
using geoshadow::testing::ScratchDir;
namespace fs = std::filesystem;

namespace {

const char* const kOutputs[] = {"shadow_dsm", "shadow_image", "uncertainty", "shadow_dsm_max", "shadow_image_max",
                                "uncertainty_max", "supervision", "label", "ignore"};

// A 40x40 UTM tile at 0.5 m with a few blocks and a nadir-ish camera.
void write_tile(const fs::path& dir, unsigned seed) {
  fs::create_directories(dir);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pos(2, 30), size(2, 8), height(4, 20);
  std::vector<double> lo(1600, 100.0);
  for (int b = 0; b < 4; ++b) {
    const int c0 = pos(rng), r0 = pos(rng), w = size(rng), h = size(rng), z = height(rng);
    for (int r = r0; r < std::min(40, r0 + h); ++r)
      for (int c = c0; c < std::min(40, c0 + w); ++c) lo[static_cast<std::size_t>(r) * 40 + c] = 100.0 + z;
  }
  std::vector<double> hi = lo;
  for (int c = 5; c < 9; ++c) hi[static_cast<std::size_t>(20) * 40 + c] = 106.0;
  const GeoTransform gt{484000.25, 3620019.75, 0.5, -0.5};
  const Crs crs = Crs::utm(11, Hemisphere::North);
  write_geotiff(Raster(40, 40, lo, gt, std::nullopt, crs), dir / "dsm_min.tif");
  write_geotiff(Raster(40, 40, hi, gt, std::nullopt, crs), dir / "dsm_max.tif");

  const LonLat center = utm_to_geographic(484010.0, 3620010.0, 11, Hemisphere::North);
  const LonLat east = utm_to_geographic(484030.0, 3620010.0, 11, Hemisphere::North);
  const LonLat north = utm_to_geographic(484010.0, 3620030.0, 11, Hemisphere::North);
  RpcModel m;
  m.lon_off = center.lon_deg;
  m.lat_off = center.lat_deg;
  m.lon_scale = east.lon_deg - center.lon_deg;
  m.lat_scale = north.lat_deg - center.lat_deg;
  m.height_off = 110.0;
  m.height_scale = 20.0;
  m.samp_off = 30.0;
  m.line_off = 30.0;
  m.samp_scale = 40.0;
  m.line_scale = 40.0;
  m.samp_num[1] = 1.0;
  m.samp_num[3] = 0.05;
  m.line_num[2] = -1.0;
  m.samp_den[0] = 1.0;
  m.line_den[0] = 1.0;
  write_rpc(m, dir / "cam.rpc");

  nlohmann::json cfg = {{"dsm", "dsm_min.tif"},
                        {"dsm_max", "dsm_max.tif"},
                        {"crs", "utm:11N"},
                        {"rpc", "cam.rpc"},
                        {"image", {{"width", 60}, {"height", 60}}},
                        {"sun", {{"azimuth", 150.0}, {"elevation", 35.0}}},
                        {"upscale", 2},
                        {"min_region_px", 4}};
  for (const char* name : kOutputs) cfg["outputs"][name] = std::string("out/") + name + ".tif";
  std::ofstream(dir / "run.json") << cfg.dump(2);
}

}  // namespace

TEST_CASE("manifest parsing") {
  const auto jobs = cli::parse_manifest("# comment\n\na  a/run.json\nb /abs/run.json  # trailing\n", "/base");
  REQUIRE(jobs.size() == 2);
  CHECK(jobs[0].id == "a");
  CHECK(jobs[0].config_path == fs::path("/base/a/run.json"));
  CHECK(jobs[1].config_path == fs::path("/abs/run.json"));
  CHECK(jobs[0].status == cli::JobStatus::Pending);
  try {
    (void)cli::parse_manifest("a x.json\nb y.json\na z.json\n");
    FAIL("expected duplicate id error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS((void)cli::parse_manifest("lonely\n"), ParseError);
  CHECK_THROWS_AS((void)cli::parse_manifest("a b c\n"), ParseError);
  CHECK(cli::parse_manifest("").empty());
}

TEST_CASE("pipeline over three tiles") {
  ScratchDir dir("geoshadow_pipeline");
  for (unsigned i = 0; i < 3; ++i) write_tile(dir.path() / ("t" + std::to_string(i)), 100 + i);
  std::ofstream(dir / "manifest.txt") << "t0 t0/run.json\nt1 t1/run.json\nt2 t2/run.json\n";

  const auto r = run_cli({"pipeline", "--manifest", dir / "manifest.txt", "--jobs", "3", "--summary-json",
                          dir / "summary.jsonl"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("3/3 tiles succeeded") != std::string::npos);
  for (int i = 0; i < 3; ++i)
    for (const char* name : kOutputs)
      CHECK(fs::exists(dir.path() / ("t" + std::to_string(i)) / "out" / (std::string(name) + ".tif")));
  std::ifstream summary(dir / "summary.jsonl");
  std::string line;
  int lines = 0;
  while (std::getline(summary, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j["status"] == "done");
    ++lines;
  }
  CHECK(lines == 3);
}

TEST_CASE("a failing tile does not stop the batch") {
  ScratchDir dir("geoshadow_pipeline_fail");
  for (unsigned i = 0; i < 3; ++i) write_tile(dir.path() / ("t" + std::to_string(i)), 200 + i);
  fs::remove(dir.path() / "t1" / "dsm_min.tif");
  std::ofstream(dir / "manifest.txt") << "t0 t0/run.json\nt1 t1/run.json\nt2 t2/run.json\n";
  const auto r = run_cli({"pipeline", "--manifest", dir / "manifest.txt", "--jobs", "2", "--summary-json",
                          dir / "summary.jsonl"});
  CHECK(r.code == cli::kExitPartialFailure);
  CHECK(r.out.find("FAILED") != std::string::npos);
  CHECK(r.out.find("dsm_min.tif") != std::string::npos);
  CHECK(r.out.find("2/3 tiles succeeded") != std::string::npos);
  CHECK(fs::exists(dir.path() / "t0" / "out" / "shadow_image.tif"));
  CHECK(fs::exists(dir.path() / "t2" / "out" / "shadow_image.tif"));
  CHECK_FALSE(fs::exists(dir.path() / "t1" / "out"));
  std::ifstream summary(dir / "summary.jsonl");
  std::string line;
  int failed = 0;
  while (std::getline(summary, line)) {
    const auto j = nlohmann::json::parse(line);
    if (j["status"] == "failed") {
      ++failed;
      CHECK(j["tile"] == "t1");
      CHECK(j["reason"].get<std::string>().find("dsm_min.tif") != std::string::npos);
    }
  }
  CHECK(failed == 1);
}

TEST_CASE("outputs are byte-identical for --jobs 1 and 8") {
  ScratchDir dir("geoshadow_pipeline_det");
  std::string manifest;
  for (unsigned i = 0; i < 4; ++i) {
    write_tile(dir.path() / ("t" + std::to_string(i)), 300 + i);
    manifest += "t" + std::to_string(i) + " t" + std::to_string(i) + "/run.json\n";
  }
  std::ofstream(dir / "manifest.txt") << manifest;
  REQUIRE(run_cli({"pipeline", "--manifest", dir / "manifest.txt", "--jobs", "1"}).code == cli::kExitOk);
  std::vector<std::string> first;
  for (unsigned i = 0; i < 4; ++i)
    for (const char* name : kOutputs)
      first.push_back(read_bytes(dir.path() / ("t" + std::to_string(i)) / "out" / (std::string(name) + ".tif")));
  for (unsigned i = 0; i < 4; ++i) fs::remove_all(dir.path() / ("t" + std::to_string(i)) / "out");
  REQUIRE(run_cli({"pipeline", "--manifest", dir / "manifest.txt", "--jobs", "8"}).code == cli::kExitOk);
  std::size_t k = 0;
  for (unsigned i = 0; i < 4; ++i)
    for (const char* name : kOutputs)
      CHECK(read_bytes(dir.path() / ("t" + std::to_string(i)) / "out" / (std::string(name) + ".tif")) == first[k++]);
}

TEST_CASE("manifest problems exit 2") {
  ScratchDir dir("geoshadow_pipeline_bad");
  CHECK(run_cli({"pipeline", "--manifest", dir / "missing.txt"}).code == cli::kExitInputError);
  std::ofstream(dir / "dup.txt") << "a x.json\na y.json\n";
  const auto r = run_cli({"pipeline", "--manifest", dir / "dup.txt"});
  CHECK(r.code == cli::kExitInputError);
  CHECK(r.err.find("duplicate") != std::string::npos);
}

TEST_CASE("GEOSHADOW_JOBS sets the default job count") {
  ScratchDir dir("geoshadow_pipeline_env");
  std::ofstream(dir / "empty.txt") << "# nothing\n";
  ::setenv("GEOSHADOW_JOBS", "5", 1);
  const auto r = run_cli({"pipeline", "--manifest", dir / "empty.txt"});
  ::unsetenv("GEOSHADOW_JOBS");
  CHECK(r.code == cli::kExitOk);
  CHECK(r.err.find("5 job(s)") != std::string::npos);
}
