#include "pipeline.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "geoshadow/error.hpp"
#include "geoshadow/geotiff.hpp"
#include "geoshadow/masks.hpp"
#include "geoshadow/projection.hpp"
#include "geoshadow/rpc_io.hpp"
#include "geoshadow/shadowcast.hpp"
#include "geoshadow/solar.hpp"
#include "json.hpp"

namespace geoshadow::cli {

namespace fs = std::filesystem;

namespace {

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  }
}

void write_mask(const Raster& mask, const fs::path& path) {
  ensure_parent(path);
  write_geotiff(mask, path, mask_write_options());
}

struct Projected {
  ShadowCast cast;
  ShadowProduct product;
};

Projected cast_and_project(const Raster& dsm, const SunGeometry& sun, const RpcModel& rpc, const RunConfig& cfg,
                           unsigned threads) {
  ShadowCast cast = cast_shadows(dsm, sun, {cfg.upscale, threads});
  ShadowProduct product =
      project_shadows(cast.surface, cast.shadow, rpc, cfg.image_height, cfg.image_width, {threads});
  product = finalize(product, {cfg.min_region_px, cfg.fill_holes_px});
  return {std::move(cast), std::move(product)};
}

}  // namespace

std::vector<TileJob> parse_manifest(std::string_view text, const fs::path& base_dir) {
  std::vector<TileJob> jobs;
  std::set<std::string> ids;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string id;
    if (!(fields >> id) || id.front() == '#') continue;
    std::string config;
    if (!(fields >> config)) throw ParseError("manifest entry '" + id + "' has no run-config path", line_no);
    std::string extra;
    if (fields >> extra && extra.front() != '#') throw ParseError("unexpected text after run-config path", line_no);
    if (!ids.insert(id).second) throw ParseError("duplicate tile id '" + id + "'", line_no);
    fs::path p(config);
    TileJob job;
    job.id = id;
    job.config_path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    jobs.push_back(std::move(job));
  }
  return jobs;
}

std::vector<TileJob> read_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_manifest(buf.str(), path.parent_path());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

void run_tile(const RunConfig& cfg, unsigned threads) {
  cfg.validate();
  const SunGeometry sun = sun_direction(cfg.sun_azimuth_deg, cfg.sun_elevation_deg);

  // Load every input before producing anything.
  const Raster dsm = read_geotiff(cfg.dsm, cfg.crs);
  const RpcModel rpc = read_rpc(cfg.rpc);
  std::optional<Raster> dsm_max;
  if (cfg.dsm_max) dsm_max = read_geotiff(*cfg.dsm_max, cfg.crs);
  std::optional<Raster> nir, red;
  if (cfg.ndvi) {
    nir = read_geotiff(cfg.ndvi->nir, cfg.crs);
    red = read_geotiff(cfg.ndvi->red, cfg.crs);
  }

  const Projected low = cast_and_project(dsm, sun, rpc, cfg, threads);
  write_mask(low.cast.shadow, cfg.outputs.shadow_dsm);
  write_mask(low.product.shadow, cfg.outputs.shadow_image);
  write_mask(low.product.uncertainty, cfg.outputs.uncertainty);

  if (dsm_max) {
    const Projected high = cast_and_project(*dsm_max, sun, rpc, cfg, threads);
    if (cfg.outputs.shadow_dsm_max) write_mask(high.cast.shadow, *cfg.outputs.shadow_dsm_max);
    if (cfg.outputs.shadow_image_max) write_mask(high.product.shadow, *cfg.outputs.shadow_image_max);
    if (cfg.outputs.uncertainty_max) write_mask(high.product.uncertainty, *cfg.outputs.uncertainty_max);
    const SupervisionBundle bundle = agreement_masks(low.product.shadow, high.product.shadow,
                                                     low.product.uncertainty, high.product.uncertainty);
    if (cfg.outputs.supervision) write_mask(bundle.supervision, *cfg.outputs.supervision);
    if (cfg.outputs.label) write_mask(bundle.label, *cfg.outputs.label);
    if (cfg.outputs.ignore) write_mask(bundle.ignore, *cfg.outputs.ignore);
  }

  if (nir && red) {
    const Raster index = ndvi(*nir, *red);
    const ValidatedMask veg = vegetation_mask(index, cfg.ndvi->threshold);
    if (cfg.outputs.ndvi) {
      ensure_parent(*cfg.outputs.ndvi);
      write_geotiff(index, *cfg.outputs.ndvi, {SampleType::Float32, TiffCompression::None, std::nullopt});
    }
    if (cfg.outputs.vegetation) write_mask(dilate(veg.mask, cfg.ndvi->dilation_px), *cfg.outputs.vegetation);
  }
}

void run_jobs(std::vector<TileJob>& tiles, unsigned jobs) {
  if (jobs == 0) jobs = 1;
  const unsigned inner_threads = jobs == 1 ? 0 : 1;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tiles.size(); i = next++) {
      TileJob& job = tiles[i];
      const auto start = std::chrono::steady_clock::now();
      try {
        RunConfig cfg = read_run_config(job.config_path);
        if (cfg.tile_id.empty()) cfg.tile_id = job.id;
        run_tile(cfg, inner_threads);
        job.status = JobStatus::Done;
      } catch (const std::exception& e) {
        job.status = JobStatus::Failed;
        job.reason = e.what();
      }
      job.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(tiles.size(), 1)));
  if (workers <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
}

std::string summary_json_lines(const std::vector<TileJob>& tiles) {
  std::string out;
  for (const TileJob& job : tiles) {
    nlohmann::ordered_json j;
    j["tile"] = job.id;
    j["config"] = job.config_path.string();
    j["status"] = job.status == JobStatus::Done ? "done" : job.status == JobStatus::Failed ? "failed" : "pending";
    if (!job.reason.empty()) j["reason"] = job.reason;
    j["seconds"] = job.seconds;
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace geoshadow::cli
