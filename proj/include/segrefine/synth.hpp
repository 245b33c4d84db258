#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "segrefine/crf.hpp"
#include "segrefine/raster.hpp"

namespace segrefine::synth {

/// SplitMix64 (Steele, Lea & Flood 2014): 64-bit state, additive Weyl sequence
/// followed by a variant-13 finalizer. Fully specified, so seeds reproduce across
/// platforms and standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) noexcept;

  /// Uniform integer in [lo, hi].
  long range(long lo, long hi) noexcept {
    return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

 private:
  std::uint64_t state_;
};

struct NoiseSpec {
  double flip_rate = 0.0;    ///< fraction of pixels whose mass moves to a wrong class
  double smear_sigma = 0.0;  ///< Gaussian blur of the probability maps, in pixels
};

/// Probability kept by the true class before noise; the rest spreads evenly.
inline constexpr double kTrueClassMass = 0.7;

/// Minimum CIELAB distance between any two class colors.
inline constexpr double kMinColorDistance = 25.0;

struct SynthScene {
  RgbImage rgb;
  LabelMap truth;
  ProbMap probs;
  std::uint64_t seed = 0;
  std::vector<std::array<std::uint8_t, 3>> class_colors;
};

/// Flat-colored scene: class-0 background with 3-8 rectangles or convex polygons per
/// remaining class, softened one-hot probabilities, then optional smear and flips.
SynthScene gen_scene(std::uint64_t seed, std::size_t height, std::size_t width,
                     std::size_t n_classes, NoiseSpec noise = {});

struct BruteForceResult {
  crf::Labeling labels;
  double energy = 0.0;
};

inline constexpr std::uint64_t kMaxBruteForceLabelings = 10'000'000;
inline constexpr std::size_t kMaxBruteForceSegments = 10;

/// Exhaustive global minimizer of the CRF energy; the first minimum in lexicographic
/// order (segment 0 most significant) wins ties.
BruteForceResult brute_force_crf(const crf::UnaryCosts& unary, const crf::AdjacencyGraph& graph,
                                 const crf::CrfParams& params);

BruteForceResult brute_force_crf(const crf::SegmentProbTable& table,
                                 const crf::AdjacencyGraph& graph, const crf::Labeling& initial,
                                 const crf::CrfParams& params);

}  // namespace segrefine::synth
