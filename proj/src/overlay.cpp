#include "segrefine/overlay.hpp"

#include <algorithm>

namespace segrefine::overlay {

std::array<std::uint8_t, 3> label_color(std::uint8_t label) noexcept {
  static constexpr std::array<std::array<std::uint8_t, 3>, 12> kPalette = {{
      {128, 128, 128}, {230, 25, 75},  {60, 180, 75},   {255, 225, 25},
      {0, 130, 200},   {245, 130, 48}, {145, 30, 180},  {70, 240, 240},
      {240, 50, 230},  {210, 245, 60}, {250, 190, 212}, {0, 128, 128},
  }};
  if (label == kVoidLabel) return {0, 0, 0};
  return kPalette[label % kPalette.size()];
}

RgbImage draw_boundaries(const RgbImage& rgb, const slic::SegmentMap& seg,
                         std::array<std::uint8_t, 3> color) {
  require_same_shape(rgb, seg.ids, "draw_boundaries");
  RgbImage out = rgb;
  const std::size_t h = seg.height(), w = seg.width();
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const auto id = seg.ids.at(y, x);
      const bool edge = (x + 1 < w && seg.ids.at(y, x + 1) != id) ||
                        (y + 1 < h && seg.ids.at(y + 1, x) != id);
      if (edge) std::copy(color.begin(), color.end(), out.pixel(y * w + x).begin());
    }
  }
  return out;
}

RgbImage colorize(const LabelMap& labels) {
  RgbImage out(labels.height(), labels.width(), 3);
  for (std::size_t i = 0; i < labels.pixel_count(); ++i) {
    const auto c = label_color(labels.data()[i]);
    std::copy(c.begin(), c.end(), out.pixel(i).begin());
  }
  return out;
}

}  // namespace segrefine::overlay
