#include "segrefine/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "segrefine/color.hpp"

namespace segrefine::synth {

std::uint64_t SplitMix64::below(std::uint64_t n) noexcept {
  // Rejection sampling removes the modulo bias.
  const std::uint64_t threshold = (0 - n) % n;
  while (true) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % n;
  }
}

namespace {

std::vector<std::array<std::uint8_t, 3>> pick_colors(SplitMix64& rng, std::size_t n) {
  std::vector<std::array<std::uint8_t, 3>> colors;
  std::vector<std::array<double, 3>> labs;
  for (std::size_t c = 0; c < n; ++c) {
    bool placed = false;
    for (int attempt = 0; attempt < 100000 && !placed; ++attempt) {
      const std::array<std::uint8_t, 3> rgb = {static_cast<std::uint8_t>(rng.below(256)),
                                               static_cast<std::uint8_t>(rng.below(256)),
                                               static_cast<std::uint8_t>(rng.below(256))};
      const auto lab = color::srgb_to_lab(rgb[0], rgb[1], rgb[2]);
      const bool far = std::all_of(labs.begin(), labs.end(), [&](const auto& other) {
        return color::delta_e(lab, other) >= kMinColorDistance;
      });
      if (far) {
        colors.push_back(rgb);
        labs.push_back(lab);
        placed = true;
      }
    }
    if (!placed) {
      throw Error(ErrorCode::InvalidArgument,
                  "cannot find " + std::to_string(n) + " mutually distinct class colors");
    }
  }
  return colors;
}

struct Point {
  double x, y;
};

bool inside(const std::vector<Point>& poly, double x, double y) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y > y) != (b.y > y) && x < (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

void paint_regions(SplitMix64& rng, LabelMap& truth, std::size_t n_classes) {
  const long h = static_cast<long>(truth.height()), w = static_cast<long>(truth.width());
  const long min_w = std::max(1L, std::lround(0.08 * w)), max_w = std::max(min_w, std::lround(0.25 * w));
  const long min_h = std::max(1L, std::lround(0.08 * h)), max_h = std::max(min_h, std::lround(0.25 * h));

  for (std::size_t c = 1; c < n_classes; ++c) {
    const long count = rng.range(3, 8);
    for (long r = 0; r < count; ++r) {
      const long rw = rng.range(min_w, max_w), rh = rng.range(min_h, max_h);
      const long x0 = rng.range(0, w - rw), y0 = rng.range(0, h - rh);
      const auto value = static_cast<std::uint8_t>(c);

      if (rng.uniform() < 0.5) {
        for (long y = y0; y < y0 + rh; ++y) {
          for (long x = x0; x < x0 + rw; ++x) truth.at(std::size_t(y), std::size_t(x)) = value;
        }
        continue;
      }

      // Star-shaped polygon inscribed in the box.
      const long vertices = rng.range(3, 7);
      std::vector<double> angles;
      for (long v = 0; v < vertices; ++v) angles.push_back(rng.uniform() * 2.0 * std::numbers::pi);
      std::sort(angles.begin(), angles.end());
      const double cx = x0 + rw / 2.0, cy = y0 + rh / 2.0;
      std::vector<Point> poly;
      for (double a : angles) {
        const double radius = 0.6 + 0.4 * rng.uniform();
        poly.push_back({cx + radius * rw / 2.0 * std::cos(a), cy + radius * rh / 2.0 * std::sin(a)});
      }
      for (long y = y0; y < y0 + rh; ++y) {
        for (long x = x0; x < x0 + rw; ++x) {
          if (inside(poly, x + 0.5, y + 0.5)) truth.at(std::size_t(y), std::size_t(x)) = value;
        }
      }
    }
  }
}

void smear(ProbMap& probs, double sigma) {
  const auto radius = static_cast<long>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (long k = -radius; k <= radius; ++k) {
    const double v = std::exp(-0.5 * double(k * k) / (sigma * sigma));
    kernel[std::size_t(k + radius)] = v;
    sum += v;
  }
  for (double& v : kernel) v /= sum;

  const long h = long(probs.height()), w = long(probs.width());
  const std::size_t nc = probs.channels();
  ProbMap tmp(probs.height(), probs.width(), nc);
  auto pass = [&](const ProbMap& src, ProbMap& dst, bool horizontal) {
    for (long y = 0; y < h; ++y) {
      for (long x = 0; x < w; ++x) {
        for (std::size_t c = 0; c < nc; ++c) {
          double acc = 0.0;
          for (long k = -radius; k <= radius; ++k) {
            const long xx = horizontal ? std::clamp(x + k, 0L, w - 1) : x;
            const long yy = horizontal ? y : std::clamp(y + k, 0L, h - 1);
            acc += kernel[std::size_t(k + radius)] * src.at(std::size_t(yy), std::size_t(xx), c);
          }
          dst.at(std::size_t(y), std::size_t(x), c) = static_cast<float>(acc);
        }
      }
    }
  };
  pass(probs, tmp, true);
  pass(tmp, probs, false);

  for (std::size_t i = 0; i < probs.pixel_count(); ++i) {
    auto px = probs.pixel(i);
    double s = 0.0;
    for (float v : px) s += v;
    for (float& v : px) v = static_cast<float>(v / s);
  }
}

}  // namespace

SynthScene gen_scene(std::uint64_t seed, std::size_t height, std::size_t width,
                     std::size_t n_classes, NoiseSpec noise) {
  if (height == 0 || width == 0) throw Error(ErrorCode::EmptyImage, "scene must be non-empty");
  if (n_classes < 2 || n_classes >= kVoidLabel) {
    throw Error(ErrorCode::InvalidArgument, "n_classes must lie in [2, 254]");
  }
  if (!(noise.flip_rate >= 0.0 && noise.flip_rate < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "flip_rate must lie in [0, 1)");
  }
  if (!(noise.smear_sigma >= 0.0) || !std::isfinite(noise.smear_sigma)) {
    throw Error(ErrorCode::InvalidArgument, "smear_sigma must be finite and >= 0");
  }

  SplitMix64 rng(seed);
  SynthScene s;
  s.seed = seed;
  s.class_colors = pick_colors(rng, n_classes);

  s.truth = LabelMap(height, width, 1, 0);
  paint_regions(rng, s.truth, n_classes);

  s.rgb = RgbImage(height, width, 3);
  for (std::size_t i = 0; i < s.truth.pixel_count(); ++i) {
    const auto& col = s.class_colors[s.truth.data()[i]];
    std::copy(col.begin(), col.end(), s.rgb.pixel(i).begin());
  }

  const auto off = static_cast<float>((1.0 - kTrueClassMass) / double(n_classes - 1));
  s.probs = ProbMap(height, width, n_classes, off);
  for (std::size_t i = 0; i < s.truth.pixel_count(); ++i) {
    s.probs.pixel(i)[s.truth.data()[i]] = static_cast<float>(kTrueClassMass);
  }

  if (noise.smear_sigma > 0.0) smear(s.probs, noise.smear_sigma);

  for (std::size_t i = 0; i < s.truth.pixel_count(); ++i) {
    const bool flip = rng.uniform() < noise.flip_rate;
    if (!flip) continue;
    const std::size_t t = s.truth.data()[i];
    std::size_t wrong = static_cast<std::size_t>(rng.below(n_classes - 1));
    if (wrong >= t) ++wrong;
    auto px = s.probs.pixel(i);
    std::swap(px[t], px[wrong]);
  }
  return s;
}

BruteForceResult brute_force_crf(const crf::UnaryCosts& unary, const crf::AdjacencyGraph& graph,
                                 const crf::CrfParams& params) {
  const std::size_t n = unary.n_segments, nc = unary.n_classes;
  if (n > kMaxBruteForceSegments) {
    throw Error(ErrorCode::InstanceTooLarge, std::to_string(n) + " segments");
  }
  std::uint64_t count = 1;
  for (std::size_t j = 0; j < n; ++j) {
    count *= nc;
    if (count > kMaxBruteForceLabelings) {
      throw Error(ErrorCode::InstanceTooLarge, "more than 1e7 labelings");
    }
  }

  BruteForceResult best;
  best.energy = std::numeric_limits<double>::infinity();
  crf::Labeling labels(n, 0);
  for (std::uint64_t k = 0; k < count; ++k) {
    const double e = crf::total_energy(labels, unary, graph, params);
    if (e < best.energy) {
      best.energy = e;
      best.labels = labels;
    }
    // Odometer with the last segment least significant gives lexicographic order.
    for (std::size_t j = n; j-- > 0;) {
      if (static_cast<std::size_t>(++labels[j]) < nc) break;
      labels[j] = 0;
    }
  }
  return best;
}

BruteForceResult brute_force_crf(const crf::SegmentProbTable& table,
                                 const crf::AdjacencyGraph& graph, const crf::Labeling& initial,
                                 const crf::CrfParams& params) {
  return brute_force_crf(crf::make_unary_costs(table, initial, params.alpha), graph, params);
}

}  // namespace segrefine::synth
