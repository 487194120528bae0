#include "geoshadow/geotiff.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <system_error>

#include "geoshadow/error.hpp"

namespace geoshadow {

namespace {

namespace tag {
constexpr std::uint16_t kImageWidth = 256;
constexpr std::uint16_t kImageLength = 257;
constexpr std::uint16_t kBitsPerSample = 258;
constexpr std::uint16_t kCompression = 259;
constexpr std::uint16_t kPhotometric = 262;
constexpr std::uint16_t kStripOffsets = 273;
constexpr std::uint16_t kSamplesPerPixel = 277;
constexpr std::uint16_t kRowsPerStrip = 278;
constexpr std::uint16_t kStripByteCounts = 279;
constexpr std::uint16_t kPlanarConfiguration = 284;
constexpr std::uint16_t kPredictor = 317;
constexpr std::uint16_t kTileWidth = 322;
constexpr std::uint16_t kTileLength = 323;
constexpr std::uint16_t kTileOffsets = 324;
constexpr std::uint16_t kTileByteCounts = 325;
constexpr std::uint16_t kSampleFormat = 339;
constexpr std::uint16_t kModelPixelScale = 33550;
constexpr std::uint16_t kModelTiepoint = 33922;
constexpr std::uint16_t kModelTransformation = 34264;
constexpr std::uint16_t kGeoKeyDirectory = 34735;
constexpr std::uint16_t kGdalNodata = 42113;
}  // namespace tag

const char* tag_name(std::uint16_t id) {
  switch (id) {
    case tag::kImageWidth: return "ImageWidth";
    case tag::kImageLength: return "ImageLength";
    case tag::kBitsPerSample: return "BitsPerSample";
    case tag::kCompression: return "Compression";
    case tag::kStripOffsets: return "StripOffsets";
    case tag::kSamplesPerPixel: return "SamplesPerPixel";
    case tag::kRowsPerStrip: return "RowsPerStrip";
    case tag::kStripByteCounts: return "StripByteCounts";
    case tag::kPlanarConfiguration: return "PlanarConfiguration";
    case tag::kPredictor: return "Predictor";
    case tag::kTileWidth: return "TileWidth";
    case tag::kTileLength: return "TileLength";
    case tag::kTileOffsets: return "TileOffsets";
    case tag::kTileByteCounts: return "TileByteCounts";
    case tag::kSampleFormat: return "SampleFormat";
    case tag::kModelPixelScale: return "ModelPixelScaleTag";
    case tag::kModelTiepoint: return "ModelTiepointTag";
    case tag::kModelTransformation: return "ModelTransformationTag";
    case tag::kGeoKeyDirectory: return "GeoKeyDirectoryTag";
    case tag::kGdalNodata: return "GDAL_NODATA";
    default: return "unknown tag";
  }
}

[[noreturn]] void format_error(std::uint16_t id, const std::string& what) {
  throw FormatError(std::string(tag_name(id)) + " (" + std::to_string(id) + "): " + what);
}

enum FieldType : std::uint16_t {
  kByte = 1, kAscii = 2, kShort = 3, kLong = 4, kRational = 5, kSByte = 6, kUndefined = 7,
  kSShort = 8, kSLong = 9, kSRational = 10, kFloat = 11, kDouble = 12,
};

std::size_t field_size(std::uint16_t type) {
  switch (type) {
    case kByte: case kAscii: case kSByte: case kUndefined: return 1;
    case kShort: case kSShort: return 2;
    case kLong: case kSLong: case kFloat: return 4;
    case kRational: case kSRational: case kDouble: return 8;
    default: return 0;
  }
}

// Bounds-checked view of the file with the file's byte order.
class ByteView {
 public:
  ByteView(std::span<const std::uint8_t> bytes, bool little) : bytes_(bytes), little_(little) {}

  std::size_t size() const { return bytes_.size(); }
  bool little_endian() const { return little_; }

  void require(std::uint64_t offset, std::uint64_t length, const char* what) const {
    if (offset > bytes_.size() || length > bytes_.size() - offset) {
      throw FormatError(std::string(what) + " extends past end of file (offset " + std::to_string(offset) +
                        ", length " + std::to_string(length) + ", file size " + std::to_string(bytes_.size()) + ")");
    }
  }

  std::uint64_t uint(std::uint64_t offset, std::size_t width) const {
    require(offset, width, "field");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) {
      const std::uint64_t b = bytes_[static_cast<std::size_t>(offset) + (little_ ? i : width - 1 - i)];
      v |= b << (8 * i);
    }
    return v;
  }
  std::uint16_t u16(std::uint64_t offset) const { return static_cast<std::uint16_t>(uint(offset, 2)); }
  std::uint32_t u32(std::uint64_t offset) const { return static_cast<std::uint32_t>(uint(offset, 4)); }

  const std::uint8_t* data(std::uint64_t offset) const { return bytes_.data() + offset; }

 private:
  std::span<const std::uint8_t> bytes_;
  bool little_;
};

struct Entry {
  std::uint16_t id = 0;
  std::uint16_t type = 0;
  std::uint32_t count = 0;
  std::uint64_t value_offset = 0;  // absolute offset of the value bytes
};

class Ifd {
 public:
  Ifd(const ByteView& view, std::uint32_t offset) : view_(view) {
    if (offset < 8 || offset % 2 != 0) throw FormatError("IFD offset " + std::to_string(offset) + " is invalid");
    const std::uint16_t n = view.u16(offset);
    if (n == 0) throw FormatError("IFD has no entries");
    view.require(offset + 2, static_cast<std::uint64_t>(n) * 12, "IFD");
    for (std::uint16_t i = 0; i < n; ++i) {
      const std::uint64_t at = offset + 2 + static_cast<std::uint64_t>(i) * 12;
      Entry e;
      e.id = view.u16(at);
      e.type = view.u16(at + 2);
      e.count = view.u32(at + 4);
      const std::size_t size = field_size(e.type);
      if (size == 0) continue;  // unknown field types are skipped per TIFF 6.0
      const std::uint64_t bytes = static_cast<std::uint64_t>(size) * e.count;
      e.value_offset = bytes <= 4 ? at + 8 : view.u32(at + 8);
      view.require(e.value_offset, bytes, tag_name(e.id));
      entries_[e.id] = e;
    }
  }

  bool has(std::uint16_t id) const { return entries_.count(id) != 0; }
  const Entry* find(std::uint16_t id) const {
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second;
  }

  double number(const Entry& e, std::uint32_t index) const {
    const std::uint64_t at = e.value_offset + static_cast<std::uint64_t>(index) * field_size(e.type);
    switch (e.type) {
      case kByte: case kUndefined: return static_cast<double>(view_.uint(at, 1));
      case kSByte: return static_cast<double>(static_cast<std::int8_t>(view_.uint(at, 1)));
      case kShort: return static_cast<double>(view_.uint(at, 2));
      case kSShort: return static_cast<double>(static_cast<std::int16_t>(view_.uint(at, 2)));
      case kLong: return static_cast<double>(view_.uint(at, 4));
      case kSLong: return static_cast<double>(static_cast<std::int32_t>(view_.uint(at, 4)));
      case kFloat: return static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(view_.uint(at, 4))));
      case kDouble: return std::bit_cast<double>(view_.uint(at, 8));
      case kRational: {
        const double den = static_cast<double>(view_.uint(at + 4, 4));
        return den == 0.0 ? 0.0 : static_cast<double>(view_.uint(at, 4)) / den;
      }
      case kSRational: {
        const double den = static_cast<double>(static_cast<std::int32_t>(view_.uint(at + 4, 4)));
        return den == 0.0 ? 0.0 : static_cast<double>(static_cast<std::int32_t>(view_.uint(at, 4))) / den;
      }
      default: format_error(e.id, "unsupported field type " + std::to_string(e.type));
    }
  }

  std::vector<double> numbers(std::uint16_t id) const {
    const Entry* e = find(id);
    if (!e) return {};
    if (e->type == kAscii) format_error(id, "expected numeric values, found ASCII");
    std::vector<double> out;
    out.reserve(e->count);
    for (std::uint32_t i = 0; i < e->count; ++i) out.push_back(number(*e, i));
    return out;
  }

  std::uint64_t integer(std::uint16_t id, std::uint64_t fallback) const {
    const Entry* e = find(id);
    if (!e) return fallback;
    if (e->count < 1) format_error(id, "empty value");
    if (e->type != kByte && e->type != kShort && e->type != kLong) format_error(id, "expected an unsigned integer");
    return static_cast<std::uint64_t>(number(*e, 0));
  }

  // Every element must agree (BitsPerSample and SampleFormat repeat per band).
  std::uint64_t uniform_integer(std::uint16_t id, std::uint64_t fallback) const {
    const Entry* e = find(id);
    if (!e) return fallback;
    const std::uint64_t first = integer(id, fallback);
    for (std::uint32_t i = 1; i < e->count; ++i) {
      if (static_cast<std::uint64_t>(number(*e, i)) != first) format_error(id, "differs between samples");
    }
    return first;
  }

  std::string ascii(std::uint16_t id) const {
    const Entry* e = find(id);
    if (!e) return {};
    if (e->type != kAscii) format_error(id, "expected ASCII");
    std::string s(reinterpret_cast<const char*>(view_.data(e->value_offset)), e->count);
    const auto end = s.find('\0');
    if (end != std::string::npos) s.resize(end);
    return s;
  }

 private:
  const ByteView& view_;
  std::map<std::uint16_t, Entry> entries_;
};

struct Layout {
  std::uint64_t block_width = 0;
  std::uint64_t block_height = 0;
  std::uint64_t blocks_across = 0;
  std::uint64_t blocks_down = 0;
  bool tiled = false;
  std::vector<double> offsets;
  std::vector<double> byte_counts;
};

std::size_t bytes_per_sample(SampleType t) {
  switch (t) {
    case SampleType::UInt8: return 1;
    case SampleType::Int16: case SampleType::UInt16: return 2;
    case SampleType::Float32: return 4;
    case SampleType::Float64: return 8;
  }
  return 0;
}

SampleType resolve_sample_type(std::uint64_t bits, std::uint64_t format) {
  if (format == 1 && bits == 8) return SampleType::UInt8;
  if (format == 1 && bits == 16) return SampleType::UInt16;
  if (format == 2 && bits == 16) return SampleType::Int16;
  if (format == 3 && bits == 32) return SampleType::Float32;
  if (format == 3 && bits == 64) return SampleType::Float64;
  if (format != 1 && format != 2 && format != 3) {
    format_error(tag::kSampleFormat, "unsupported value " + std::to_string(format));
  }
  format_error(tag::kBitsPerSample, "unsupported " + std::to_string(bits) + "-bit samples with SampleFormat " +
                                        std::to_string(format));
}

double decode_sample(const std::uint8_t* p, SampleType type, bool little) {
  const std::size_t n = bytes_per_sample(type);
  std::uint64_t raw = 0;
  for (std::size_t i = 0; i < n; ++i) raw |= static_cast<std::uint64_t>(p[little ? i : n - 1 - i]) << (8 * i);
  switch (type) {
    case SampleType::UInt8: return static_cast<double>(raw);
    case SampleType::UInt16: return static_cast<double>(raw);
    case SampleType::Int16: return static_cast<double>(static_cast<std::int16_t>(raw));
    case SampleType::Float32: return static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(raw)));
    case SampleType::Float64: return std::bit_cast<double>(raw);
  }
  return 0.0;
}

std::vector<std::uint8_t> inflate_block(const std::uint8_t* src, std::size_t src_len, std::size_t expected,
                                        std::uint16_t offsets_tag) {
  std::vector<std::uint8_t> out(expected);
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) throw FormatError("zlib initialisation failed");
  zs.next_in = const_cast<Bytef*>(src);
  zs.avail_in = static_cast<uInt>(src_len);
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const std::size_t produced = out.size() - zs.avail_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END && !(rc == Z_BUF_ERROR && produced == expected) && !(rc == Z_OK && produced == expected)) {
    format_error(offsets_tag, "corrupt Deflate stream (zlib status " + std::to_string(rc) + ")");
  }
  if (produced < expected) {
    format_error(offsets_tag, "Deflate block decodes to " + std::to_string(produced) + " bytes, expected " +
                                  std::to_string(expected));
  }
  return out;
}

double parse_nodata(const std::string& text) {
  std::string s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  s = s.substr(start);
  if (s.empty()) format_error(tag::kGdalNodata, "empty value");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) format_error(tag::kGdalNodata, "'" + s + "' is not a number");
  return v;
}

GeoTransform read_geotransform(const Ifd& ifd, std::vector<std::string>& warnings) {
  const std::vector<double> scale = ifd.numbers(tag::kModelPixelScale);
  const std::vector<double> tie = ifd.numbers(tag::kModelTiepoint);
  if (scale.empty() && tie.empty()) {
    if (ifd.has(tag::kModelTransformation)) {
      format_error(tag::kModelTransformation, "not supported; use ModelPixelScale + ModelTiepoint");
    }
    warnings.emplace_back("no georeferencing tags; using the pixel grid as world coordinates");
    return {};
  }
  if (scale.size() < 2) format_error(tag::kModelPixelScale, "needs at least 2 values");
  if (tie.size() < 6) format_error(tag::kModelTiepoint, "needs at least 6 values");
  const double sx = scale[0];
  const double sy = scale[1];
  if (!(sx > 0.0) || !std::isfinite(sx)) format_error(tag::kModelPixelScale, "X scale must be positive");
  if (sy == 0.0 || !std::isfinite(sy)) format_error(tag::kModelPixelScale, "Y scale must be nonzero");
  for (int i = 0; i < 6; ++i) {
    if (!std::isfinite(tie[static_cast<std::size_t>(i)])) format_error(tag::kModelTiepoint, "non-finite value");
  }
  // Raster space puts pixel (0, 0)'s corner at (0, 0) and its center at (0.5, 0.5).
  const double i = tie[0], j = tie[1], x = tie[3], y = tie[4];
  return {x + (0.5 - i) * sx, y - (0.5 - j) * sy, sx, -sy};
}

}  // namespace

GeoTiffReadResult decode_geotiff(std::span<const std::uint8_t> bytes, Crs crs) {
  if (bytes.size() < 8) throw FormatError("file too short for a TIFF header");
  bool little = true;
  if (bytes[0] == 'I' && bytes[1] == 'I') little = true;
  else if (bytes[0] == 'M' && bytes[1] == 'M') little = false;
  else throw FormatError("missing TIFF byte-order mark");
  const ByteView view(bytes, little);
  const std::uint16_t magic = view.u16(2);
  if (magic == 43) throw FormatError("BigTIFF is not supported");
  if (magic != 42) throw FormatError("bad TIFF magic number " + std::to_string(magic));

  const Ifd ifd(view, view.u32(4));
  std::vector<std::string> warnings;

  const std::uint64_t width = ifd.integer(tag::kImageWidth, 0);
  const std::uint64_t height = ifd.integer(tag::kImageLength, 0);
  if (width == 0) format_error(tag::kImageWidth, "missing or zero");
  if (height == 0) format_error(tag::kImageLength, "missing or zero");
  if (width > (1u << 20) || height > (1u << 20) || width * height > (1ull << 31)) {
    format_error(tag::kImageWidth, "image of " + std::to_string(width) + "x" + std::to_string(height) + " is too large");
  }

  const std::uint64_t bands = ifd.integer(tag::kSamplesPerPixel, 1);
  if (bands != 1) format_error(tag::kSamplesPerPixel, "only single-band images are supported, found " + std::to_string(bands) + " bands");

  const std::uint64_t compression = ifd.integer(tag::kCompression, 1);
  if (compression != 1 && compression != 8) {
    format_error(tag::kCompression, "unsupported compression " + std::to_string(compression) + " (only 1 = none and 8 = Deflate)");
  }
  const std::uint64_t predictor = ifd.integer(tag::kPredictor, 1);
  if (predictor != 1) format_error(tag::kPredictor, "predictor " + std::to_string(predictor) + " is not supported");

  const SampleType type = resolve_sample_type(ifd.uniform_integer(tag::kBitsPerSample, 1),
                                              ifd.uniform_integer(tag::kSampleFormat, 1));
  const std::size_t bps = bytes_per_sample(type);

  Layout layout;
  std::uint16_t offsets_tag = tag::kStripOffsets;
  std::uint16_t counts_tag = tag::kStripByteCounts;
  if (ifd.has(tag::kTileOffsets)) {
    layout.tiled = true;
    offsets_tag = tag::kTileOffsets;
    counts_tag = tag::kTileByteCounts;
    layout.block_width = ifd.integer(tag::kTileWidth, 0);
    layout.block_height = ifd.integer(tag::kTileLength, 0);
    if (layout.block_width == 0 || layout.block_width > (1u << 16)) format_error(tag::kTileWidth, "missing or invalid");
    if (layout.block_height == 0 || layout.block_height > (1u << 16)) format_error(tag::kTileLength, "missing or invalid");
  } else {
    if (!ifd.has(tag::kStripOffsets)) format_error(tag::kStripOffsets, "missing (neither strips nor tiles present)");
    layout.block_width = width;
    layout.block_height = std::min<std::uint64_t>(ifd.integer(tag::kRowsPerStrip, height), height);
    if (layout.block_height == 0) format_error(tag::kRowsPerStrip, "must be positive");
  }
  layout.blocks_across = (width + layout.block_width - 1) / layout.block_width;
  layout.blocks_down = (height + layout.block_height - 1) / layout.block_height;
  layout.offsets = ifd.numbers(offsets_tag);
  layout.byte_counts = ifd.numbers(counts_tag);
  const std::uint64_t blocks = layout.blocks_across * layout.blocks_down;
  if (layout.offsets.size() != blocks) {
    format_error(offsets_tag, "has " + std::to_string(layout.offsets.size()) + " entries, expected " + std::to_string(blocks));
  }
  if (layout.byte_counts.size() != blocks) {
    format_error(counts_tag, "has " + std::to_string(layout.byte_counts.size()) + " entries, expected " + std::to_string(blocks));
  }

  // Validate every block against the file before allocating the raster.
  const std::uint64_t block_bytes_full = layout.block_width * layout.block_height * bps;
  std::uint64_t decoded_total = 0;
  std::uint64_t compressed_total = 0;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    const auto off = static_cast<std::uint64_t>(layout.offsets[b]);
    const auto len = static_cast<std::uint64_t>(layout.byte_counts[b]);
    view.require(off, len, tag_name(offsets_tag));
    const std::uint64_t rows = layout.tiled ? layout.block_height
                                            : std::min(layout.block_height, height - (b * layout.block_height));
    const std::uint64_t needed = layout.tiled ? block_bytes_full : rows * width * bps;
    if (compression == 1 && len < needed) {
      format_error(counts_tag, "block " + std::to_string(b) + " holds " + std::to_string(len) + " bytes, needs " +
                                   std::to_string(needed));
    }
    decoded_total += needed;
    compressed_total += len;
  }
  // Deflate cannot exceed ~1032:1, which bounds what a small file may claim.
  if (compression == 8 && decoded_total > 1100 * (compressed_total + 64)) {
    format_error(counts_tag, "declared image size is inconsistent with the compressed data size");
  }

  std::optional<double> nodata;
  if (ifd.has(tag::kGdalNodata)) {
    nodata = parse_nodata(ifd.ascii(tag::kGdalNodata));
    // Samples decode through float, so the sentinel must as well to compare equal.
    if (type == SampleType::Float32) nodata = static_cast<double>(static_cast<float>(*nodata));
  }
  if (ifd.has(tag::kGeoKeyDirectory)) {
    warnings.emplace_back("GeoKeyDirectory ignored; CRS is taken from the run configuration");
  }
  const GeoTransform gt = read_geotransform(ifd, warnings);

  std::vector<double> samples(static_cast<std::size_t>(width * height));
  for (std::uint64_t b = 0; b < blocks; ++b) {
    const auto off = static_cast<std::uint64_t>(layout.offsets[b]);
    const auto len = static_cast<std::uint64_t>(layout.byte_counts[b]);
    const std::uint64_t bx = (b % layout.blocks_across) * layout.block_width;
    const std::uint64_t by = (b / layout.blocks_across) * layout.block_height;
    const std::uint64_t rows_stored = layout.tiled ? layout.block_height : std::min(layout.block_height, height - by);
    const std::uint64_t needed = layout.block_width * rows_stored * bps;

    std::vector<std::uint8_t> inflated;
    const std::uint8_t* block = view.data(off);
    if (compression == 8) {
      inflated = inflate_block(block, static_cast<std::size_t>(len), static_cast<std::size_t>(needed), offsets_tag);
      block = inflated.data();
    }
    const std::uint64_t rows = std::min(rows_stored, height - by);
    const std::uint64_t cols = std::min(layout.block_width, width - bx);
    for (std::uint64_t r = 0; r < rows; ++r) {
      const std::uint8_t* src = block + r * layout.block_width * bps;
      double* dst = samples.data() + (by + r) * width + bx;
      for (std::uint64_t c = 0; c < cols; ++c) dst[c] = decode_sample(src + c * bps, type, little);
    }
  }

  return {Raster(static_cast<int>(width), static_cast<int>(height), std::move(samples), gt, nodata, crs),
          std::move(warnings)};
}

Raster read_geotiff(const std::filesystem::path& path, Crs crs, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading " + path.string());
  try {
    GeoTiffReadResult result = decode_geotiff(bytes, crs);
    if (warnings) *warnings = std::move(result.warnings);
    return std::move(result.raster);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  void align() {
    if (buf_.size() % 2) buf_.push_back(0);
  }
  std::size_t size() const { return buf_.size(); }
  void patch_u32(std::size_t at, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_[at + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v >> (8 * i));
  }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> buf_;
};

struct OutEntry {
  std::uint16_t id;
  std::uint16_t type;
  std::uint32_t count;
  std::vector<std::uint8_t> payload;  // little-endian value bytes
};

template <class T>
OutEntry make_entry(std::uint16_t id, std::uint16_t type, const std::vector<T>& values) {
  Writer w;
  for (T v : values) {
    if constexpr (std::is_same_v<T, double>) w.u64(std::bit_cast<std::uint64_t>(v));
    else if constexpr (sizeof(T) == 2) w.u16(static_cast<std::uint16_t>(v));
    else w.u32(static_cast<std::uint32_t>(v));
  }
  return {id, type, static_cast<std::uint32_t>(values.size()), w.take()};
}

OutEntry make_ascii(std::uint16_t id, const std::string& s) {
  std::vector<std::uint8_t> payload(s.begin(), s.end());
  payload.push_back(0);
  return {id, kAscii, static_cast<std::uint32_t>(payload.size()), std::move(payload)};
}

std::uint16_t sample_format(SampleType t) {
  switch (t) {
    case SampleType::UInt8: case SampleType::UInt16: return 1;
    case SampleType::Int16: return 2;
    case SampleType::Float32: case SampleType::Float64: return 3;
  }
  return 1;
}

void encode_sample(double v, SampleType t, std::vector<std::uint8_t>& out) {
  auto put = [&](std::uint64_t raw, int n) {
    for (int i = 0; i < n; ++i) out.push_back(static_cast<std::uint8_t>(raw >> (8 * i)));
  };
  switch (t) {
    case SampleType::UInt8: put(static_cast<std::uint8_t>(v), 1); break;
    case SampleType::UInt16: put(static_cast<std::uint16_t>(v), 2); break;
    case SampleType::Int16: put(static_cast<std::uint16_t>(static_cast<std::int16_t>(v)), 2); break;
    case SampleType::Float32: put(std::bit_cast<std::uint32_t>(static_cast<float>(v)), 4); break;
    case SampleType::Float64: put(std::bit_cast<std::uint64_t>(v), 8); break;
  }
}

void check_representable(double v, SampleType t) {
  double lo = 0.0, hi = 0.0;
  switch (t) {
    case SampleType::UInt8: lo = 0; hi = 255; break;
    case SampleType::UInt16: lo = 0; hi = 65535; break;
    case SampleType::Int16: lo = -32768; hi = 32767; break;
    case SampleType::Float32:
      if (std::isfinite(v) && std::fabs(v) > std::numeric_limits<float>::max()) {
        throw ArgumentError("value " + std::to_string(v) + " overflows float32");
      }
      return;
    case SampleType::Float64: return;
  }
  if (!(v >= lo && v <= hi) || v != std::floor(v)) {
    throw ArgumentError("value " + std::to_string(v) + " is not representable in the integer sample type");
  }
}

std::string format_nodata(double v, SampleType t) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  if (t == SampleType::Float32) {
    std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(static_cast<float>(v)));
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", v);
  }
  return buf;
}

std::vector<std::uint8_t> deflate_block(const std::vector<std::uint8_t>& raw) {
  uLongf len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> out(len);
  if (compress2(out.data(), &len, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK) {
    throw Error("zlib compression failed");
  }
  out.resize(len);
  return out;
}

std::vector<std::uint16_t> geokeys_for(const Crs& crs) {
  switch (crs.kind) {
    case Crs::Kind::Geographic:
      return {1, 1, 0, 3, 1024, 0, 1, 2, 1025, 0, 1, 1, 2048, 0, 1, 4326};
    case Crs::Kind::Utm: {
      const auto code = static_cast<std::uint16_t>((crs.hemisphere == Hemisphere::North ? 32600 : 32700) + crs.zone);
      return {1, 1, 0, 3, 1024, 0, 1, 1, 1025, 0, 1, 1, 3072, 0, 1, code};
    }
    case Crs::Kind::PixelOnly:
      break;
  }
  return {};
}

}  // namespace

std::vector<std::uint8_t> encode_geotiff(const Raster& raster, const GeoTiffWriteOptions& options) {
  const SampleType type = options.sample_type;
  const std::size_t bps = bytes_per_sample(type);
  const auto width = static_cast<std::size_t>(raster.width());
  const auto height = static_cast<std::size_t>(raster.height());
  for (double v : raster.samples()) {
    if (!raster.is_nodata(v)) check_representable(v, type);
  }
  if (raster.nodata() && !std::isnan(*raster.nodata())) check_representable(*raster.nodata(), type);
  if (raster.nodata() && std::isnan(*raster.nodata()) && type != SampleType::Float32 && type != SampleType::Float64) {
    throw ArgumentError("NaN nodata needs a floating-point sample type");
  }

  std::size_t block_w = width;
  std::size_t block_h = std::clamp<std::size_t>(65536 / std::max<std::size_t>(width * bps, 1), 1, height);
  const bool tiled = options.tile_size.has_value();
  if (tiled) {
    const int t = *options.tile_size;
    if (t < 16 || t % 16 != 0) throw ArgumentError("tile size must be a positive multiple of 16");
    block_w = block_h = static_cast<std::size_t>(t);
  }
  const std::size_t across = (width + block_w - 1) / block_w;
  const std::size_t down = (height + block_h - 1) / block_h;

  std::vector<std::vector<std::uint8_t>> blocks;
  blocks.reserve(across * down);
  const auto samples = raster.samples();
  for (std::size_t by = 0; by < down; ++by) {
    for (std::size_t bx = 0; bx < across; ++bx) {
      const std::size_t rows = tiled ? block_h : std::min(block_h, height - by * block_h);
      std::vector<std::uint8_t> raw;
      raw.reserve(rows * block_w * bps);
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t y = by * block_h + r;
        for (std::size_t c = 0; c < block_w; ++c) {
          const std::size_t x = bx * block_w + c;
          const double v = (x < width && y < height) ? samples[y * width + x] : 0.0;
          encode_sample(v, type, raw);
        }
      }
      blocks.push_back(options.compression == TiffCompression::Deflate ? deflate_block(raw) : std::move(raw));
    }
  }

  Writer w;
  w.u8('I');
  w.u8('I');
  w.u16(42);
  w.u32(0);  // IFD offset, patched below
  std::vector<std::uint32_t> offsets, counts;
  for (const auto& b : blocks) {
    offsets.push_back(static_cast<std::uint32_t>(w.size()));
    counts.push_back(static_cast<std::uint32_t>(b.size()));
    w.bytes(b);
    w.align();
  }

  const GeoTransform& gt = raster.geotransform();
  std::vector<OutEntry> entries;
  entries.push_back(make_entry<std::uint32_t>(tag::kImageWidth, kLong, {static_cast<std::uint32_t>(width)}));
  entries.push_back(make_entry<std::uint32_t>(tag::kImageLength, kLong, {static_cast<std::uint32_t>(height)}));
  entries.push_back(make_entry<std::uint16_t>(tag::kBitsPerSample, kShort, {static_cast<std::uint16_t>(bps * 8)}));
  entries.push_back(make_entry<std::uint16_t>(tag::kCompression, kShort, {static_cast<std::uint16_t>(options.compression)}));
  entries.push_back(make_entry<std::uint16_t>(tag::kPhotometric, kShort, {1}));
  if (!tiled) entries.push_back(make_entry<std::uint32_t>(tag::kStripOffsets, kLong, offsets));
  entries.push_back(make_entry<std::uint16_t>(tag::kSamplesPerPixel, kShort, {1}));
  if (!tiled) {
    entries.push_back(make_entry<std::uint32_t>(tag::kRowsPerStrip, kLong, {static_cast<std::uint32_t>(block_h)}));
    entries.push_back(make_entry<std::uint32_t>(tag::kStripByteCounts, kLong, counts));
  }
  entries.push_back(make_entry<std::uint16_t>(tag::kPlanarConfiguration, kShort, {1}));
  if (tiled) {
    entries.push_back(make_entry<std::uint32_t>(tag::kTileWidth, kLong, {static_cast<std::uint32_t>(block_w)}));
    entries.push_back(make_entry<std::uint32_t>(tag::kTileLength, kLong, {static_cast<std::uint32_t>(block_h)}));
    entries.push_back(make_entry<std::uint32_t>(tag::kTileOffsets, kLong, offsets));
    entries.push_back(make_entry<std::uint32_t>(tag::kTileByteCounts, kLong, counts));
  }
  entries.push_back(make_entry<std::uint16_t>(tag::kSampleFormat, kShort, {sample_format(type)}));
  // Tie the first pixel's center so the origin round-trips without arithmetic.
  entries.push_back(make_entry<double>(tag::kModelPixelScale, kDouble, {gt.pixel_size_x, -gt.pixel_size_y, 0.0}));
  entries.push_back(make_entry<double>(tag::kModelTiepoint, kDouble, {0.5, 0.5, 0.0, gt.origin_x, gt.origin_y, 0.0}));
  if (const auto keys = geokeys_for(raster.crs()); !keys.empty()) {
    entries.push_back(make_entry<std::uint16_t>(tag::kGeoKeyDirectory, kShort, keys));
  }
  if (raster.nodata()) entries.push_back(make_ascii(tag::kGdalNodata, format_nodata(*raster.nodata(), type)));

  const std::size_t ifd_offset = w.size();
  w.patch_u32(4, static_cast<std::uint32_t>(ifd_offset));
  std::size_t extra = ifd_offset + 2 + entries.size() * 12 + 4;
  w.u16(static_cast<std::uint16_t>(entries.size()));
  for (const OutEntry& e : entries) {
    w.u16(e.id);
    w.u16(e.type);
    w.u32(e.count);
    if (e.payload.size() <= 4) {
      std::vector<std::uint8_t> inline_value = e.payload;
      inline_value.resize(4, 0);
      w.bytes(inline_value);
    } else {
      w.u32(static_cast<std::uint32_t>(extra));
      extra += e.payload.size() + (e.payload.size() % 2);
    }
  }
  w.u32(0);  // no further IFDs
  for (const OutEntry& e : entries) {
    if (e.payload.size() > 4) {
      w.bytes(e.payload);
      w.align();
    }
  }
  if (w.size() > std::numeric_limits<std::uint32_t>::max()) throw ArgumentError("raster too large for classic TIFF");
  return w.take();
}

void write_geotiff(const Raster& raster, const std::filesystem::path& path, const GeoTiffWriteOptions& options) {
  const std::vector<std::uint8_t> bytes = encode_geotiff(raster, options);
  std::filesystem::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("error writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

}  // namespace geoshadow
