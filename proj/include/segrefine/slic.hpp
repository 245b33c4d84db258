#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "segrefine/raster.hpp"

namespace segrefine::slic {

struct SlicParams {
  int target_segments = 500;   ///< K, approximate number of superpixels
  double compactness = 5.0;    ///< m, weight of spatial proximity
  int iterations = 50;
  bool enforce_connectivity = true;
  /// Stop once no center moves more than `early_exit_shift` pixels.
  bool early_exit = false;
  double early_exit_shift = 0.5;

  void validate(std::size_t pixel_count) const;
};

struct ClusterCenter {
  double l = 0, a = 0, b = 0;
  double x = 0, y = 0;
};

/// Superpixel partition. Ids are dense in [0, n_segments).
struct SegmentMap {
  Raster<std::int32_t> ids;
  std::int32_t n_segments = 0;

  std::size_t height() const noexcept { return ids.height(); }
  std::size_t width() const noexcept { return ids.width(); }
  std::size_t pixel_count() const noexcept { return ids.pixel_count(); }

  std::vector<std::size_t> sizes() const;
  std::vector<std::vector<std::size_t>> pixel_lists() const;
};

/// Builds a SegmentMap from arbitrary non-negative ids, renumbering them densely in
/// raster-scan order of first appearance.
SegmentMap make_segment_map(Raster<std::int32_t> ids);

/// sqrt(d_c^2 + (d_s / S)^2 m^2), d_c in CIELAB, d_s in pixels.
double slic_distance(const ClusterCenter& center, const std::array<double, 3>& lab, double x,
                     double y, double grid_interval, double compactness) noexcept;

/// S = sqrt(N / K).
double grid_interval(std::size_t pixel_count, int target_segments);

/// Regular-grid seeds at interval ~S. With `perturb`, each seed moves to the
/// lowest-gradient pixel of its 3x3 neighborhood (strict improvement only).
std::vector<ClusterCenter> init_clusters(const LabImage& lab, int target_segments,
                                         bool perturb = true);

/// Per-iteration record of the clustering objective sum_p D(p, center(label p)).
struct SlicTrace {
  std::vector<double> objective_before;  ///< previous labels scored against the current centers
  std::vector<double> objective_after;   ///< after the assignment step, same centers
  std::vector<double> squared_objective; ///< sum of D^2 after the assignment step
  int iterations_run = 0;
  std::vector<ClusterCenter> centers;    ///< centers used by the final assignment
  SegmentMap unenforced;                 ///< labels before connectivity enforcement
};

SegmentMap slic_segment(const LabImage& lab, const SlicParams& params, SlicTrace* trace = nullptr);

/// Splits every segment into its 4-connected pieces; non-largest pieces smaller
/// than `min_size` merge into the neighbor sharing the longest boundary (ties: lowest
/// component index). Output ids are renumbered in raster-scan order.
SegmentMap enforce_connectivity(const SegmentMap& seg, std::size_t min_size);

/// Same with min_size = N / (4 * n_segments).
SegmentMap enforce_connectivity(const SegmentMap& seg);

}  // namespace segrefine::slic
