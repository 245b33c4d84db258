#include "segrefine/color.hpp"

#include <cmath>

namespace segrefine::color {
namespace {

// D65 reference white.
constexpr double kXn = 0.95047;
constexpr double kYn = 1.0;
constexpr double kZn = 1.08883;

constexpr double kDelta = 6.0 / 29.0;

double srgb_to_linear(std::uint8_t v) noexcept {
  const double c = v / 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) noexcept {
  if (t > kDelta * kDelta * kDelta) return std::cbrt(t);
  return t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

struct LinearTable {
  std::array<double, 256> v{};
  LinearTable() {
    for (int i = 0; i < 256; ++i) v[i] = srgb_to_linear(static_cast<std::uint8_t>(i));
  }
};

const LinearTable& linear_table() {
  static const LinearTable table;
  return table;
}

}  // namespace

std::array<double, 3> srgb_to_lab(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) noexcept {
  const auto& lin = linear_table().v;
  const double r = lin[r8], g = lin[g8], b = lin[b8];

  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;

  const double fx = lab_f(x / kXn);
  const double fy = lab_f(y / kYn);
  const double fz = lab_f(z / kZn);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

LabImage srgb_to_lab(const RgbImage& img) {
  if (img.channels() != 3) {
    throw Error(ErrorCode::WrongChannelCount, "srgb_to_lab expects 3 channels");
  }
  LabImage lab(img.height(), img.width(), 3);
  const std::size_t n = img.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    const auto px = img.pixel(i);
    const auto v = srgb_to_lab(px[0], px[1], px[2]);
    auto out = lab.pixel(i);
    out[0] = v[0];
    out[1] = v[1];
    out[2] = v[2];
  }
  return lab;
}

GradientField gradient_magnitude(const Raster<double>& f) {
  const std::size_t h = f.height(), w = f.width();
  GradientField g(h, w, 1);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double gx = 0.0, gy = 0.0;
      if (w > 1) {
        if (x == 0) gx = f.at(y, 1) - f.at(y, 0);
        else if (x == w - 1) gx = f.at(y, x) - f.at(y, x - 1);
        else gx = 0.5 * (f.at(y, x + 1) - f.at(y, x - 1));
      }
      if (h > 1) {
        if (y == 0) gy = f.at(1, x) - f.at(0, x);
        else if (y == h - 1) gy = f.at(y, x) - f.at(y - 1, x);
        else gy = 0.5 * (f.at(y + 1, x) - f.at(y - 1, x));
      }
      g.at(y, x) = std::sqrt(gx * gx + gy * gy);
    }
  }
  return g;
}

GradientField luminance_gradient(const RgbImage& img) {
  const LabImage lab = srgb_to_lab(img);
  Raster<double> lum(img.height(), img.width(), 1);
  for (std::size_t i = 0; i < lab.pixel_count(); ++i) lum.data()[i] = lab.pixel(i)[0];
  return gradient_magnitude(lum);
}

double delta_e(const std::array<double, 3>& a, const std::array<double, 3>& b) noexcept {
  const double d0 = a[0] - b[0], d1 = a[1] - b[1], d2 = a[2] - b[2];
  return std::sqrt(d0 * d0 + d1 * d1 + d2 * d2);
}

}  // namespace segrefine::color
