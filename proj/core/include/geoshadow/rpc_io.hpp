#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "geoshadow/rpc.hpp"

namespace geoshadow {

/// Parses the keyword/value RPC text form:
///
///   LINE_OFF: 2047.5 pixels
///   ...
///   LINE_NUM_COEFF_1: 1.2e-03
///
/// One `KEY: value [unit]` per line (`KEY = value` and `KEY value` are also
/// accepted); keys are case-sensitive; unknown keys are ignored. Every one of
/// the 10 offset/scale keys and the 80 coefficient keys must appear exactly
/// once. Missing keys raise a ParseError listing all of them; bad numbers and
/// out-of-range coefficient indices raise a ParseError with the line number.
RpcModel parse_rpc_text(std::string_view text);

/// Parses the JSON mirror: an object with the lower-case offset/scale names
/// (line_off, samp_off, lat_off, long_off, height_off, *_scale) and four
/// 20-element arrays line_num_coeff, line_den_coeff, samp_num_coeff,
/// samp_den_coeff.
RpcModel parse_rpc_json(std::string_view text);

/// Dispatches on content: JSON if the first non-blank character is '{'.
RpcModel parse_rpc(std::string_view text);

/// Reads and parses an RPC file. Throws IoError or ParseError (which also
/// covers models failing RpcModel::validate).
RpcModel read_rpc(const std::filesystem::path& path);

/// Text form with 17 significant digits, so parse_rpc_text round-trips exactly.
std::string format_rpc_text(const RpcModel& model);
std::string format_rpc_json(const RpcModel& model);

void write_rpc(const RpcModel& model, const std::filesystem::path& path);

}  // namespace geoshadow
