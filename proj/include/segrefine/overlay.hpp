#pragma once

#include <array>
#include <cstdint>

#include "segrefine/raster.hpp"
#include "segrefine/slic.hpp"

namespace segrefine::overlay {

/// Fixed palette; void maps to black.
std::array<std::uint8_t, 3> label_color(std::uint8_t label) noexcept;

/// Copy of `rgb` with pixels on a segment boundary painted in `color`.
RgbImage draw_boundaries(const RgbImage& rgb, const slic::SegmentMap& seg,
                         std::array<std::uint8_t, 3> color = {255, 0, 0});

/// Label map rendered with label_color.
RgbImage colorize(const LabelMap& labels);

}  // namespace segrefine::overlay
