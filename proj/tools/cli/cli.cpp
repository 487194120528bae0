#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "geoshadow/error.hpp"
#include "geoshadow/geotiff.hpp"
#include "geoshadow/projection.hpp"
#include "geoshadow/rpc_io.hpp"
#include "geoshadow/run_config.hpp"
#include "geoshadow/shadowcast.hpp"
#include "geoshadow/solar.hpp"
#include "pipeline.hpp"

namespace geoshadow::cli {

namespace fs = std::filesystem;

namespace {

struct CastArgs {
  std::string dsm;
  double azimuth = 0.0;
  double elevation = 0.0;
  int upscale = 4;
  std::string out;
  std::string crs;
  unsigned threads = 0;
};

struct ProjectArgs {
  std::string dsm;
  std::string shadows;
  std::string rpc;
  int width = 0;
  int height = 0;
  int min_region = 50;
  int fill_holes = 0;
  std::string out;
  std::string out_uncertainty;
  std::string crs;
  unsigned threads = 0;
};

struct PipelineArgs {
  std::string manifest;
  unsigned jobs = 1;
  std::string summary_json;
};

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
}

int cmd_cast(const CastArgs& args, std::ostream& err) {
  Raster dsm = Raster::filled(1, 1, 0.0);
  SunGeometry sun;
  try {
    sun = sun_direction(args.azimuth, args.elevation);
    if (args.upscale < 1) throw ArgumentError("--upscale must be >= 1");
    const Crs crs = args.crs.empty() ? Crs::pixel_only() : parse_crs(args.crs);
    dsm = read_geotiff(args.dsm, crs);
  } catch (const Error& e) {
    err << "geoshadow cast: " << e.what() << "\n";
    return kExitInputError;
  }
  try {
    const ShadowCast cast = cast_shadows(dsm, sun, {args.upscale, args.threads});
    ensure_parent(args.out);
    write_geotiff(cast.shadow, args.out, mask_write_options());
  } catch (const std::exception& e) {
    err << "geoshadow cast: " << e.what() << "\n";
    return kExitProcessingError;
  }
  return kExitOk;
}

int cmd_project(const ProjectArgs& args, std::ostream& err) {
  Raster dsm = Raster::filled(1, 1, 0.0);
  Raster shadows = dsm;
  RpcModel rpc;
  try {
    if (args.width < 1 || args.height < 1) throw ArgumentError("--width and --height must be positive");
    if (args.min_region < 0) throw ArgumentError("--min-region must be >= 0");
    const Crs crs = parse_crs(args.crs);
    if (crs.kind == Crs::Kind::PixelOnly) throw ArgumentError("--crs must be geographic or utm:<zone><N|S>");
    dsm = read_geotiff(args.dsm, crs);
    shadows = read_geotiff(args.shadows, crs);
    rpc = read_rpc(args.rpc);
    // A mask written by `cast` sits on the upsampled grid; bring the DSM onto it.
    if (!dsm.same_grid(shadows) && shadows.width() % dsm.width() == 0 &&
        shadows.width() / dsm.width() == shadows.height() / dsm.height() &&
        shadows.height() % dsm.height() == 0) {
      dsm = upsample(dsm, shadows.width() / dsm.width());
    }
    if (!dsm.same_grid(shadows)) {
      throw ArgumentError("--shadows is not on the DSM grid or an integer upsampling of it");
    }
  } catch (const Error& e) {
    err << "geoshadow project: " << e.what() << "\n";
    return kExitInputError;
  }
  try {
    ShadowProduct product = project_shadows(dsm, shadows, rpc, args.height, args.width, {args.threads});
    product = finalize(product, {args.min_region, args.fill_holes});
    ensure_parent(args.out);
    ensure_parent(args.out_uncertainty);
    write_geotiff(product.shadow, args.out, mask_write_options());
    write_geotiff(product.uncertainty, args.out_uncertainty, mask_write_options());
  } catch (const std::exception& e) {
    err << "geoshadow project: " << e.what() << "\n";
    return kExitProcessingError;
  }
  return kExitOk;
}

int cmd_pipeline(const PipelineArgs& args, std::ostream& out, std::ostream& err) {
  std::vector<TileJob> tiles;
  try {
    tiles = read_manifest(args.manifest);
  } catch (const Error& e) {
    err << "geoshadow pipeline: " << e.what() << "\n";
    return kExitInputError;
  }
  err << "geoshadow pipeline: " << tiles.size() << " tile(s), " << args.jobs << " job(s)\n";
  run_jobs(tiles, args.jobs);

  std::size_t failed = 0;
  out << std::left << std::setw(24) << "tile" << std::setw(8) << "status" << "detail\n";
  for (const TileJob& job : tiles) {
    const bool ok = job.status == JobStatus::Done;
    failed += ok ? 0 : 1;
    out << std::left << std::setw(24) << job.id << std::setw(8) << (ok ? "done" : "FAILED")
        << (ok ? "" : job.reason) << "\n";
  }
  out << tiles.size() - failed << "/" << tiles.size() << " tiles succeeded\n";

  if (!args.summary_json.empty()) {
    std::ofstream summary(args.summary_json, std::ios::binary | std::ios::trunc);
    summary << summary_json_lines(tiles);
    if (!summary) {
      err << "geoshadow pipeline: cannot write " << args.summary_json << "\n";
      return kExitProcessingError;
    }
  }
  return failed == 0 ? kExitOk : kExitPartialFailure;
}

unsigned default_jobs() {
  if (const char* env = std::getenv("GEOSHADOW_JOBS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<unsigned>(v);
  }
  return 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometric shadow masks for satellite images from a DSM, the sun position and an RPC camera",
               "geoshadow"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "geoshadow 0.3.0");

  CastArgs cast;
  auto* cast_cmd = app.add_subcommand("cast", "Cast shadows over a DSM (writes the DSM-space mask)");
  cast_cmd->add_option("--dsm", cast.dsm, "Input DSM GeoTIFF")->required();
  cast_cmd->add_option("--azimuth", cast.azimuth, "Sun azimuth, degrees clockwise from north")->required();
  cast_cmd->add_option("--elevation", cast.elevation, "Sun elevation, degrees above the horizon")->required();
  cast_cmd->add_option("--upscale", cast.upscale, "DSM upsampling factor before casting")->capture_default_str();
  cast_cmd->add_option("--out", cast.out, "Output mask GeoTIFF")->required();
  cast_cmd->add_option("--crs", cast.crs, "CRS tag for the output (geographic | utm:<zone><N|S>)");
  cast_cmd->add_option("--threads", cast.threads, "Worker threads (0 = all cores)");

  ProjectArgs project;
  auto* project_cmd = app.add_subcommand("project", "Project a DSM-space shadow mask into an image");
  project_cmd->add_option("--dsm", project.dsm, "Input DSM GeoTIFF")->required();
  project_cmd->add_option("--shadows", project.shadows, "Shadow mask from `cast`")->required();
  project_cmd->add_option("--rpc", project.rpc, "RPC file (keyword text or JSON)")->required();
  project_cmd->add_option("--width", project.width, "Image width in pixels")->required();
  project_cmd->add_option("--height", project.height, "Image height in pixels")->required();
  project_cmd->add_option("--min-region", project.min_region, "Smallest shadow region kept, pixels")
      ->capture_default_str();
  project_cmd->add_option("--fill-holes", project.fill_holes, "Fill shadow holes below this many pixels");
  project_cmd->add_option("--out", project.out, "Output image shadow mask")->required();
  project_cmd->add_option("--out-uncertainty", project.out_uncertainty, "Output uncertainty mask")->required();
  project_cmd->add_option("--crs", project.crs, "DSM CRS (geographic | utm:<zone><N|S>)")->required();
  project_cmd->add_option("--threads", project.threads, "Worker threads (0 = all cores)");

  PipelineArgs pipeline;
  pipeline.jobs = default_jobs();
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run every tile of a manifest");
  pipeline_cmd->add_option("--manifest", pipeline.manifest, "Manifest of `<tile-id> <run-config>` lines")
      ->required();
  pipeline_cmd->add_option("--jobs,-j", pipeline.jobs, "Tiles processed concurrently (default $GEOSHADOW_JOBS or 1)")
      ->check(CLI::Range(1u, 1024u));
  pipeline_cmd->add_option("--summary-json", pipeline.summary_json, "Write one JSON object per tile here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (*cast_cmd) return cmd_cast(cast, err);
  if (*project_cmd) return cmd_project(project, err);
  return cmd_pipeline(pipeline, out, err);
}

}  // namespace geoshadow::cli
