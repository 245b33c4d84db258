#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "segrefine/error.hpp"

namespace segrefine {

/// Dense H x W x C grid, row-major with interleaved channels.
template <typename T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(std::size_t height, std::size_t width, std::size_t channels = 1, T fill = T{})
      : height_(height), width_(width), channels_(channels),
        data_(height * width * channels, fill) {}
  Raster(std::size_t height, std::size_t width, std::size_t channels, std::vector<T> data)
      : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
    if (data_.size() != height_ * width_ * channels_) {
      throw Error(ErrorCode::DimensionMismatch, "raster payload does not match its shape");
    }
  }

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept { return height_ * width_; }
  bool empty() const noexcept { return pixel_count() == 0; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  std::vector<T>& storage() noexcept { return data_; }
  const std::vector<T>& storage() const noexcept { return data_; }

  T& at(std::size_t y, std::size_t x, std::size_t c = 0) noexcept {
    return data_[(y * width_ + x) * channels_ + c];
  }
  const T& at(std::size_t y, std::size_t x, std::size_t c = 0) const noexcept {
    return data_[(y * width_ + x) * channels_ + c];
  }

  /// Channel vector of the pixel at flat index `i` (= y * width + x).
  std::span<T> pixel(std::size_t i) noexcept {
    return std::span<T>(data_).subspan(i * channels_, channels_);
  }
  std::span<const T> pixel(std::size_t i) const noexcept {
    return std::span<const T>(data_).subspan(i * channels_, channels_);
  }

  bool same_shape(const auto& other) const noexcept {
    return height_ == other.height() && width_ == other.width();
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<T> data_;
};

/// 8-bit sRGB, 3 channels.
using RgbImage = Raster<std::uint8_t>;
/// CIELAB (L*, a*, b*), 3 channels.
using LabImage = Raster<double>;
/// Nonnegative per-pixel gradient magnitude, 1 channel.
using GradientField = Raster<double>;
/// Per-pixel class probabilities, one channel per class.
using ProbMap = Raster<float>;
/// Per-pixel class index, 1 channel; kVoidLabel marks unlabeled pixels.
using LabelMap = Raster<std::uint8_t>;

inline constexpr std::uint8_t kVoidLabel = 255;

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const std::string& context) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw Error(ErrorCode::DimensionMismatch,
                context + ": " + std::to_string(a.height()) + "x" + std::to_string(a.width()) +
                    " vs " + std::to_string(b.height()) + "x" + std::to_string(b.width()));
  }
}

}  // namespace segrefine
