#include "geoshadow/rpc_io.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "geoshadow/error.hpp"
#include "json.hpp"

namespace geoshadow {

namespace {

struct ScalarKey {
  const char* text_name;
  const char* json_name;
  double RpcModel::*field;
};

constexpr std::array<ScalarKey, 10> kScalarKeys{{
    {"LINE_OFF", "line_off", &RpcModel::line_off},
    {"SAMP_OFF", "samp_off", &RpcModel::samp_off},
    {"LAT_OFF", "lat_off", &RpcModel::lat_off},
    {"LONG_OFF", "long_off", &RpcModel::lon_off},
    {"HEIGHT_OFF", "height_off", &RpcModel::height_off},
    {"LINE_SCALE", "line_scale", &RpcModel::line_scale},
    {"SAMP_SCALE", "samp_scale", &RpcModel::samp_scale},
    {"LAT_SCALE", "lat_scale", &RpcModel::lat_scale},
    {"LONG_SCALE", "long_scale", &RpcModel::lon_scale},
    {"HEIGHT_SCALE", "height_scale", &RpcModel::height_scale},
}};

struct CoefficientKey {
  const char* text_prefix;  // followed by 1..20
  const char* json_name;
  RpcModel::Coefficients RpcModel::*field;
};

constexpr std::array<CoefficientKey, 4> kCoefficientKeys{{
    {"LINE_NUM_COEFF_", "line_num_coeff", &RpcModel::line_num},
    {"LINE_DEN_COEFF_", "line_den_coeff", &RpcModel::line_den},
    {"SAMP_NUM_COEFF_", "samp_num_coeff", &RpcModel::samp_num},
    {"SAMP_DEN_COEFF_", "samp_den_coeff", &RpcModel::samp_den},
}};

std::string_view trim(std::string_view s) {
  const auto blank = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; };
  while (!s.empty() && blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && blank(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view token) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

void validate_or_parse_error(const RpcModel& model) {
  try {
    model.validate();
  } catch (const ArgumentError& e) {
    throw ParseError(e.what(), 0);
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RpcModel parse_rpc_text(std::string_view text) {
  RpcModel model;
  std::array<std::size_t, kScalarKeys.size()> scalar_line{};
  std::array<std::array<std::size_t, 20>, kCoefficientKeys.size()> coeff_line{};

  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (line.empty() || line.front() == '#') continue;

    const std::size_t key_end = line.find_first_of(":= \t");
    const std::string_view key = line.substr(0, key_end);
    std::string_view rest = key_end == std::string_view::npos ? std::string_view{} : trim(line.substr(key_end));
    if (!rest.empty() && (rest.front() == ':' || rest.front() == '=')) rest = trim(rest.substr(1));
    const std::string_view token = rest.substr(0, rest.find_first_of(" \t"));

    double* target = nullptr;
    std::size_t* seen = nullptr;
    for (std::size_t k = 0; k < kScalarKeys.size(); ++k) {
      if (key == kScalarKeys[k].text_name) {
        target = &(model.*kScalarKeys[k].field);
        seen = &scalar_line[k];
      }
    }
    for (std::size_t k = 0; k < kCoefficientKeys.size() && !target; ++k) {
      const std::string_view prefix = kCoefficientKeys[k].text_prefix;
      if (key.substr(0, prefix.size()) != prefix) continue;
      const std::string_view index_text = key.substr(prefix.size());
      int index = 0;
      const auto [ptr, ec] = std::from_chars(index_text.data(), index_text.data() + index_text.size(), index);
      if (index_text.empty() || ec != std::errc{} || ptr != index_text.data() + index_text.size() || index < 1 || index > 20) {
        throw ParseError("coefficient key " + std::string(key) + " is outside 1..20", line_no);
      }
      target = &((model.*kCoefficientKeys[k].field)[static_cast<std::size_t>(index - 1)]);
      seen = &coeff_line[k][static_cast<std::size_t>(index - 1)];
    }
    if (!target) continue;

    if (*seen) {
      throw ParseError("duplicate key " + std::string(key) + " (first seen on line " + std::to_string(*seen) + ")", line_no);
    }
    const std::optional<double> value = parse_number(token);
    if (!value) throw ParseError("value '" + std::string(token) + "' for " + std::string(key) + " is not a number", line_no);
    *target = *value;
    *seen = line_no;
  }

  std::vector<std::string> missing;
  for (std::size_t k = 0; k < kScalarKeys.size(); ++k) {
    if (!scalar_line[k]) missing.emplace_back(kScalarKeys[k].text_name);
  }
  for (std::size_t k = 0; k < kCoefficientKeys.size(); ++k) {
    for (std::size_t i = 0; i < 20; ++i) {
      if (!coeff_line[k][i]) missing.push_back(kCoefficientKeys[k].text_prefix + std::to_string(i + 1));
    }
  }
  if (!missing.empty()) throw ParseError("missing RPC keys: " + join(missing), 0);
  validate_or_parse_error(model);
  return model;
}

RpcModel parse_rpc_json(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid RPC JSON: ") + e.what(), 0);
  }
  if (!doc.is_object()) throw ParseError("RPC JSON must be an object", 0);

  RpcModel model;
  std::vector<std::string> missing;
  for (const ScalarKey& key : kScalarKeys) {
    const auto it = doc.find(key.json_name);
    if (it == doc.end()) {
      missing.emplace_back(key.json_name);
      continue;
    }
    if (!it->is_number()) throw ParseError(std::string(key.json_name) + " must be a number", 0);
    model.*key.field = it->get<double>();
  }
  for (const CoefficientKey& key : kCoefficientKeys) {
    const auto it = doc.find(key.json_name);
    if (it == doc.end()) {
      missing.emplace_back(key.json_name);
      continue;
    }
    if (!it->is_array() || it->size() != 20) {
      throw ParseError(std::string(key.json_name) + " must be an array of 20 numbers", 0);
    }
    for (std::size_t i = 0; i < 20; ++i) {
      if (!(*it)[i].is_number()) throw ParseError(std::string(key.json_name) + " holds a non-numeric value", 0);
      (model.*key.field)[i] = (*it)[i].get<double>();
    }
  }
  if (!missing.empty()) throw ParseError("missing RPC keys: " + join(missing), 0);
  validate_or_parse_error(model);
  return model;
}

RpcModel parse_rpc(std::string_view text) {
  const std::string_view body = trim(text);
  if (!body.empty() && body.front() == '{') return parse_rpc_json(text);
  return parse_rpc_text(text);
}

RpcModel read_rpc(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_rpc(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

std::string format_rpc_text(const RpcModel& model) {
  std::string out;
  for (const ScalarKey& key : kScalarKeys) {
    out += std::string(key.text_name) + ": " + format_double(model.*key.field) + "\n";
  }
  for (const CoefficientKey& key : kCoefficientKeys) {
    for (std::size_t i = 0; i < 20; ++i) {
      out += key.text_prefix + std::to_string(i + 1) + ": " + format_double((model.*key.field)[i]) + "\n";
    }
  }
  return out;
}

std::string format_rpc_json(const RpcModel& model) {
  nlohmann::ordered_json doc;
  for (const ScalarKey& key : kScalarKeys) doc[key.json_name] = model.*key.field;
  for (const CoefficientKey& key : kCoefficientKeys) doc[key.json_name] = model.*key.field;
  return doc.dump(2) + "\n";
}

void write_rpc(const RpcModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << (path.extension() == ".json" ? format_rpc_json(model) : format_rpc_text(model));
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace geoshadow
