#pragma once

#include <array>
#include <cstdint>

#include "segrefine/raster.hpp"

namespace segrefine::color {

/// CIELAB triple of one 8-bit sRGB color (D65 white, sRGB primaries).
std::array<double, 3> srgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;

/// Per-pixel sRGB -> linear sRGB -> XYZ (D65) -> CIELAB.
LabImage srgb_to_lab(const RgbImage& img);

/// Central-difference gradient magnitude of a single-channel field; one-sided
/// differences on the border, zero along a dimension of extent 1.
GradientField gradient_magnitude(const Raster<double>& scalar);

/// Gradient magnitude of the L* channel of `img`, in raw L* units.
GradientField luminance_gradient(const RgbImage& img);

/// Euclidean CIELAB distance.
double delta_e(const std::array<double, 3>& a, const std::array<double, 3>& b) noexcept;

}  // namespace segrefine::color
