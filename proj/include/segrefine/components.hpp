#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "segrefine/raster.hpp"

namespace segrefine {

/// 4-connected components of equal-valued pixels. Component indices follow the
/// raster-scan order of each component's first pixel.
struct Components {
  Raster<std::int32_t> ids;
  std::vector<std::size_t> sizes;

  std::size_t count() const noexcept { return sizes.size(); }
};

template <typename T>
Components label_components(const Raster<T>& values) {
  const std::size_t h = values.height(), w = values.width();
  Components out{Raster<std::int32_t>(h, w, 1, -1), {}};
  auto ids = out.ids.data();
  const auto v = values.data();
  const std::size_t c = values.channels();
  std::vector<std::size_t> stack;

  for (std::size_t start = 0; start < h * w; ++start) {
    if (ids[start] >= 0) continue;
    const auto label = static_cast<std::int32_t>(out.sizes.size());
    const T value = v[start * c];
    std::size_t size = 0;
    ids[start] = label;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++size;
      const std::size_t y = p / w, x = p % w;
      auto visit = [&](std::size_t q) {
        if (ids[q] < 0 && v[q * c] == value) {
          ids[q] = label;
          stack.push_back(q);
        }
      };
      if (x > 0) visit(p - 1);
      if (x + 1 < w) visit(p + 1);
      if (y > 0) visit(p - w);
      if (y + 1 < h) visit(p + w);
    }
    out.sizes.push_back(size);
  }
  return out;
}

/// Number of 4-connected equal-valued regions with fewer than `min_area` pixels.
template <typename T>
std::size_t count_small_regions(const Raster<T>& values, std::size_t min_area) {
  std::size_t n = 0;
  for (std::size_t s : label_components(values).sizes) n += (s < min_area) ? 1 : 0;
  return n;
}

}  // namespace segrefine
