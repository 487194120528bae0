#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "geoshadow/run_config.hpp"

namespace geoshadow::cli {

enum class JobStatus { Pending, Done, Failed };

struct TileJob {
  std::string id;
  std::filesystem::path config_path;
  JobStatus status = JobStatus::Pending;
  std::string reason;
  double seconds = 0.0;
};

/// Parses a manifest: one `<tile-id> <run-config-path>` pair per line, blank
/// lines and `#` comments ignored. Relative paths resolve against `base_dir`.
/// Throws ParseError with the line number for malformed lines or duplicate ids.
std::vector<TileJob> parse_manifest(std::string_view text, const std::filesystem::path& base_dir = {});
std::vector<TileJob> read_manifest(const std::filesystem::path& path);

/// Runs cast -> project -> finalize -> (agreement) -> (ndvi) for one tile and
/// writes every configured output. Throws on the first failure.
void run_tile(const RunConfig& config, unsigned threads = 0);

/// Runs every job with up to `jobs` tiles in flight. Failures are recorded on
/// the job and never stop the batch.
void run_jobs(std::vector<TileJob>& tiles, unsigned jobs);

/// One JSON object per line describing each job's outcome.
std::string summary_json_lines(const std::vector<TileJob>& tiles);

}  // namespace geoshadow::cli
