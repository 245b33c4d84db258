#include "segrefine/io.hpp"

#include <png.h>

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace segrefine::io {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Files

std::vector<std::uint8_t> read_file(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::FileNotFound, path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string read_text(const fs::path& path) {
  const auto bytes = read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

// ---------------------------------------------------------------------------
// PMF1 / PMB1

namespace {

constexpr std::array<std::uint8_t, 4> kFloatMagic = {'P', 'M', 'F', '1'};
constexpr std::array<std::uint8_t, 4> kByteMagic = {'P', 'M', 'B', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
  return std::uint32_t(b[off]) | std::uint32_t(b[off + 1]) << 8 | std::uint32_t(b[off + 2]) << 16 |
         std::uint32_t(b[off + 3]) << 24;
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xffffffffu) throw Error(ErrorCode::InvalidArgument, std::string(what) + " exceeds 2^32");
  return static_cast<std::uint32_t>(v);
}

struct Header {
  std::size_t height, width, channels;
  std::size_t values() const { return height * width * channels; }
};

std::vector<std::uint8_t> encode_header(const std::array<std::uint8_t, 4>& magic, std::size_t h,
                                        std::size_t w, std::size_t c, std::size_t value_bytes) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + h * w * c * value_bytes);
  out.insert(out.end(), magic.begin(), magic.end());
  put_u32(out, checked_u32(h, "height"));
  put_u32(out, checked_u32(w, "width"));
  put_u32(out, checked_u32(c, "channels"));
  return out;
}

Header decode_header(std::span<const std::uint8_t> bytes, const std::array<std::uint8_t, 4>& magic,
                     std::size_t value_bytes) {
  if (bytes.size() < 4 || !std::equal(magic.begin(), magic.end(), bytes.begin())) {
    if (bytes.size() < 4) throw Error(ErrorCode::TruncatedFile, "file shorter than its magic");
    throw Error(ErrorCode::BadMagic, "expected " + std::string(magic.begin(), magic.end()));
  }
  if (bytes.size() < kHeaderBytes) throw Error(ErrorCode::TruncatedFile, "incomplete header");
  const Header h{get_u32(bytes, 4), get_u32(bytes, 8), get_u32(bytes, 12)};
  const std::size_t expected = kHeaderBytes + h.values() * value_bytes;
  if (bytes.size() < expected) {
    throw Error(ErrorCode::TruncatedFile, "payload has " + std::to_string(bytes.size() - kHeaderBytes) +
                                              " bytes, header requires " +
                                              std::to_string(expected - kHeaderBytes));
  }
  if (bytes.size() > expected) {
    throw Error(ErrorCode::TruncatedFile, "payload longer than the header declares");
  }
  return h;
}

}  // namespace

std::vector<std::uint8_t> encode_pmap(const ProbMap& probs) {
  auto out = encode_header(kFloatMagic, probs.height(), probs.width(), probs.channels(), 4);
  for (float v : probs.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "cannot store NaN or infinity");
    put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

ProbMap decode_pmap(std::span<const std::uint8_t> bytes) {
  const Header h = decode_header(bytes, kFloatMagic, 4);
  std::vector<float> values(h.values());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<float>(get_u32(bytes, kHeaderBytes + 4 * i));
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::NonFiniteValue, "value " + std::to_string(i) + " is not finite");
    }
  }
  return ProbMap(h.height, h.width, h.channels, std::move(values));
}

void write_pmap(const ProbMap& probs, const fs::path& path) { write_file(path, encode_pmap(probs)); }

ProbMap read_pmap(const fs::path& path) { return decode_pmap(read_file(path)); }

std::vector<std::uint8_t> encode_byte_raster(const Raster<std::uint8_t>& r) {
  auto out = encode_header(kByteMagic, r.height(), r.width(), r.channels(), 1);
  out.insert(out.end(), r.data().begin(), r.data().end());
  return out;
}

Raster<std::uint8_t> decode_byte_raster(std::span<const std::uint8_t> bytes) {
  const Header h = decode_header(bytes, kByteMagic, 1);
  return Raster<std::uint8_t>(h.height, h.width, h.channels,
                              std::vector<std::uint8_t>(bytes.begin() + kHeaderBytes, bytes.end()));
}

void write_byte_raster(const Raster<std::uint8_t>& r, const fs::path& path) {
  write_file(path, encode_byte_raster(r));
}

Raster<std::uint8_t> read_byte_raster(const fs::path& path) {
  return decode_byte_raster(read_file(path));
}

void write_segments(const slic::SegmentMap& seg, const fs::path& path) {
  if (seg.n_segments > (1 << 24)) {
    throw Error(ErrorCode::InvalidArgument, "too many segments for float32 ids");
  }
  ProbMap ids(seg.height(), seg.width(), 1);
  for (std::size_t i = 0; i < ids.data().size(); ++i) {
    ids.data()[i] = static_cast<float>(seg.ids.data()[i]);
  }
  write_pmap(ids, path);
}

slic::SegmentMap read_segments(const fs::path& path) {
  const ProbMap ids = read_pmap(path);
  if (ids.channels() != 1) throw Error(ErrorCode::WrongChannelCount, "segment map must have 1 channel");
  Raster<std::int32_t> out(ids.height(), ids.width(), 1);
  for (std::size_t i = 0; i < ids.data().size(); ++i) {
    const float v = ids.data()[i];
    if (v < 0.0f || v != std::floor(v)) {
      throw Error(ErrorCode::InvalidArgument, "segment ids must be non-negative integers");
    }
    out.data()[i] = static_cast<std::int32_t>(v);
  }
  return slic::make_segment_map(std::move(out));
}

// ---------------------------------------------------------------------------
// PNG

namespace {

struct PngImage {
  png_image image{};
  PngImage() {
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

void begin_read(PngImage& png, const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::FileNotFound, path.string());
  if (!png_image_begin_read_from_file(&png.image, path.c_str())) {
    throw Error(ErrorCode::UnsupportedPngLayout, path.string() + ": " + png.image.message);
  }
}

// Bit depth and color type straight from IHDR; the simplified API hides them.
std::pair<int, int> png_depth_and_type(const fs::path& path) {
  const auto bytes = read_file(path);
  static constexpr std::array<std::uint8_t, 8> sig = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() < 26 || !std::equal(sig.begin(), sig.end(), bytes.begin()) ||
      std::memcmp(&bytes[12], "IHDR", 4) != 0) {
    throw Error(ErrorCode::UnsupportedPngLayout, path.string() + " is not a PNG file");
  }
  return {bytes[24], bytes[25]};
}

void write_png(const fs::path& path, std::size_t h, std::size_t w, png_uint_32 format,
               const std::uint8_t* data) {
  PngImage png;
  png.image.width = static_cast<png_uint_32>(w);
  png.image.height = static_cast<png_uint_32>(h);
  png.image.format = format;
  if (!png_image_write_to_file(&png.image, path.c_str(), 0, data, 0, nullptr)) {
    throw Error(ErrorCode::IoError, path.string() + ": " + png.image.message);
  }
}

}  // namespace

LabelMap read_label_png(const fs::path& path, std::size_t n_classes) {
  if (!fs::exists(path)) throw Error(ErrorCode::FileNotFound, path.string());
  const auto [depth, type] = png_depth_and_type(path);
  if (depth != 8 || type != 0) {
    throw Error(ErrorCode::UnsupportedPngLayout,
                path.string() + ": label maps must be 8-bit grayscale without alpha");
  }
  PngImage png;
  begin_read(png, path);
  png.image.format = PNG_FORMAT_GRAY;
  LabelMap labels(png.image.height, png.image.width, 1);
  if (!png_image_finish_read(&png.image, nullptr, labels.data().data(), 0, nullptr)) {
    throw Error(ErrorCode::IoError, path.string() + ": " + png.image.message);
  }
  for (std::uint8_t v : labels.data()) {
    if (v != kVoidLabel && v >= n_classes) {
      throw Error(ErrorCode::InvalidLabelValue, path.string() + ": value " + std::to_string(v) +
                                                    " with " + std::to_string(n_classes) +
                                                    " classes");
    }
  }
  return labels;
}

void write_label_png(const LabelMap& labels, const fs::path& path) {
  if (labels.channels() != 1) throw Error(ErrorCode::WrongChannelCount, "label map must have 1 channel");
  write_png(path, labels.height(), labels.width(), PNG_FORMAT_GRAY, labels.data().data());
}

RgbImage read_rgb_png(const fs::path& path) {
  PngImage png;
  begin_read(png, path);
  png.image.format = PNG_FORMAT_RGBA;
  const std::size_t h = png.image.height, w = png.image.width;
  std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(png.image));
  if (!png_image_finish_read(&png.image, nullptr, rgba.data(), 0, nullptr)) {
    throw Error(ErrorCode::IoError, path.string() + ": " + png.image.message);
  }
  RgbImage img(h, w, 3);
  for (std::size_t i = 0; i < h * w; ++i) {
    for (std::size_t c = 0; c < 3; ++c) img.data()[3 * i + c] = rgba[4 * i + c];
  }
  return img;
}

void write_rgb_png(const RgbImage& img, const fs::path& path) {
  if (img.channels() != 3) throw Error(ErrorCode::WrongChannelCount, "RGB image must have 3 channels");
  write_png(path, img.height(), img.width(), PNG_FORMAT_RGB, img.data().data());
}

// ---------------------------------------------------------------------------
// Augmentation

std::uint8_t scale_probability(float p) noexcept {
  const double v = std::round(255.0 * static_cast<double>(p));  // std::round: half away from zero
  if (!(v > 0.0)) return 0;
  if (v > 255.0) return 255;
  return static_cast<std::uint8_t>(v);
}

Raster<std::uint8_t> augment_input(const ProbMap& scene, const RgbImage& rgb) {
  if (scene.channels() != 10) {
    throw Error(ErrorCode::WrongChannelCount,
                "scene probabilities need 10 channels, got " + std::to_string(scene.channels()));
  }
  if (rgb.channels() != 3) throw Error(ErrorCode::WrongChannelCount, "RGB image must have 3 channels");
  require_same_shape(scene, rgb, "augment_input");

  Raster<std::uint8_t> out(rgb.height(), rgb.width(), 12);
  for (std::size_t i = 0; i < rgb.pixel_count(); ++i) {
    auto dst = out.pixel(i);
    const auto src = rgb.pixel(i);
    const auto p = scene.pixel(i);
    dst[0] = src[0];
    dst[1] = src[1];
    dst[2] = src[2];
    for (std::size_t c = 0; c < 9; ++c) dst[3 + c] = scale_probability(p[c]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Weights

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, '\t')) out.push_back(cell);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

NamedWeights parse_weights(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_tabs(trim(line));
    for (auto& c : cells) c = trim(c);
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw Error(ErrorCode::InvalidWeights, "empty weight file");

  NamedWeights named;
  named.class_names = rows.front();
  const std::size_t n = named.class_names.size();
  if (rows.size() != n + 1) {
    throw Error(ErrorCode::InvalidWeights, "expected " + std::to_string(n) + " rows, got " +
                                               std::to_string(rows.size() - 1));
  }
  std::vector<double> values;
  values.reserve(n * n);
  for (std::size_t r = 1; r <= n; ++r) {
    if (rows[r].size() != n) {
      throw Error(ErrorCode::InvalidWeights, "row " + std::to_string(r) + " has " +
                                                 std::to_string(rows[r].size()) + " columns");
    }
    for (const auto& cell : rows[r]) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cell.size()) {
        throw Error(ErrorCode::InvalidWeights, "not a number: '" + cell + "'");
      }
      values.push_back(v);
    }
  }
  named.weights = crf::WeightMatrix(n, std::move(values));
  named.weights.validate();
  return named;
}

NamedWeights read_weights(const fs::path& path) { return parse_weights(read_text(path)); }

std::string format_weights(const NamedWeights& named) {
  std::ostringstream out;
  const std::size_t n = named.weights.size();
  for (std::size_t i = 0; i < n; ++i) out << (i ? "\t" : "") << named.class_names.at(i);
  out << '\n';
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) out << (b ? "\t" : "") << named.weights(a, b);
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Report

void Report::add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }

void Report::add(const std::string& key, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  add(key, std::string(buf));
}

void Report::add(const std::string& key, std::int64_t value) { add(key, std::to_string(value)); }

std::string Report::str() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

void Report::write(const fs::path& path) const { write_text(path, str()); }

Report Report::parse(const std::string& text) {
  Report r;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    r.add(line.substr(0, eq), trim(line.substr(eq + 3)));
  }
  return r;
}

Report Report::read(const fs::path& path) { return parse(read_text(path)); }

const std::string& Report::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  throw Error(ErrorCode::InvalidArgument, "report has no key '" + key + "'");
}

}  // namespace segrefine::io
