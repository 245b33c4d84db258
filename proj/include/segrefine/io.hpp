#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "segrefine/crf.hpp"
#include "segrefine/raster.hpp"
#include "segrefine/slic.hpp"

namespace segrefine::io {

// PMF1 layout, all integers and floats little-endian:
//   bytes 0..3   "PMF1"
//   bytes 4..15  height, width, channels (uint32 each)
//   bytes 16..   height * width * channels IEEE-754 float32, row-major, channel-interleaved
// PMB1 is the same layout with magic "PMB1" and one unsigned byte per value.
inline constexpr std::size_t kHeaderBytes = 16;

std::vector<std::uint8_t> encode_pmap(const ProbMap& probs);
ProbMap decode_pmap(std::span<const std::uint8_t> bytes);
void write_pmap(const ProbMap& probs, const std::filesystem::path& path);
ProbMap read_pmap(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_byte_raster(const Raster<std::uint8_t>& raster);
Raster<std::uint8_t> decode_byte_raster(std::span<const std::uint8_t> bytes);
void write_byte_raster(const Raster<std::uint8_t>& raster, const std::filesystem::path& path);
Raster<std::uint8_t> read_byte_raster(const std::filesystem::path& path);

/// Segment ids stored as a one-channel PMF1 (exact for ids below 2^24).
void write_segments(const slic::SegmentMap& seg, const std::filesystem::path& path);
slic::SegmentMap read_segments(const std::filesystem::path& path);

/// 8-bit grayscale PNG; value = class index, 255 = void.
LabelMap read_label_png(const std::filesystem::path& path, std::size_t n_classes);
void write_label_png(const LabelMap& labels, const std::filesystem::path& path);

/// 8-bit PNG, any color layout; alpha is dropped, gray is replicated.
RgbImage read_rgb_png(const std::filesystem::path& path);
void write_rgb_png(const RgbImage& img, const std::filesystem::path& path);

/// RGB bytes followed by round(255 p) of scene classes 0-8 (class 9 dropped); 12 channels.
Raster<std::uint8_t> augment_input(const ProbMap& scene_probs, const RgbImage& rgb);

/// Round half away from zero of 255 * p, clamped to [0, 255].
std::uint8_t scale_probability(float p) noexcept;

/// Weight matrix file: header row of class names, then L rows of L tab-separated
/// floats. The matrix is validated on load.
struct NamedWeights {
  std::vector<std::string> class_names;
  crf::WeightMatrix weights;
};
NamedWeights parse_weights(const std::string& text);
NamedWeights read_weights(const std::filesystem::path& path);
std::string format_weights(const NamedWeights& named);

/// "key = value" lines, in insertion order.
class Report {
 public:
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void add(const std::string& key, std::int64_t value);
  void add(const std::string& key, int value) { add(key, static_cast<std::int64_t>(value)); }
  void add(const std::string& key, std::size_t value) { add(key, static_cast<std::int64_t>(value)); }

  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

  static Report parse(const std::string& text);
  static Report read(const std::filesystem::path& path);
  /// Value for `key`; throws InvalidArgument if absent.
  const std::string& get(const std::string& key) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace segrefine::io
