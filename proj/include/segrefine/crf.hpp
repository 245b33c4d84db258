#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "segrefine/raster.hpp"
#include "segrefine/slic.hpp"

namespace segrefine::crf {

/// Per-segment mean class probabilities and segment sizes |S_j|.
struct SegmentProbTable {
  std::size_t n_segments = 0;
  std::size_t n_classes = 0;
  std::vector<double> probs;  ///< n_segments x n_classes, row-major
  std::vector<std::size_t> sizes;

  std::span<const double> row(std::size_t j) const {
    return std::span<const double>(probs).subspan(j * n_classes, n_classes);
  }
};

/// Class index per segment.
using Labeling = std::vector<std::int32_t>;

struct Edge {
  std::int32_t i;  ///< i < j
  std::int32_t j;
  double strength; ///< sum over straddling pixel pairs of exp(-beta (|grad p| + |grad q|) / 2)

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct AdjacencyGraph {
  std::size_t n_segments = 0;
  std::vector<Edge> edges;  ///< sorted by (i, j), each pair once
};

/// Symmetric label-pair weights with zero diagonal.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  WeightMatrix(std::size_t n_classes, std::vector<double> values);

  /// 1 off the diagonal, 0 on it.
  static WeightMatrix uniform(std::size_t n_classes);
  /// Tuned weights for the five bridge component classes (Non-Bridge, Columns,
  /// Beams & Slabs, Other structural, Other nonstructural).
  static WeightMatrix bridge_components();

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t a, std::size_t b) const noexcept { return w_[a * n_ + b]; }
  const std::vector<double>& values() const noexcept { return w_; }

  /// Throws InvalidWeights unless the matrix is finite, nonnegative, symmetric, has
  /// a zero diagonal and satisfies w[a][c] <= w[a][b] + w[b][c]. The last condition
  /// keeps every expansion move graph-representable.
  void validate() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> w_;
};

enum class UnaryMode {
  SegmentAveraged,  ///< |S_j| * exp(-alpha * mean probability)
  PerPixel,         ///< sum over the segment's pixels of exp(-alpha * pixel probability)
};

struct CrfParams {
  double alpha = 0.1;
  double beta = 20.0;
  double gamma = 10.0;
  WeightMatrix weights;
  int max_sweeps = 10;
  UnaryMode unary_mode = UnaryMode::SegmentAveraged;

  /// Tuned defaults; the bridge weight matrix for five classes, uniform otherwise.
  static CrfParams defaults(std::size_t n_classes);

  void validate(std::size_t n_classes) const;
};

/// Dense n_segments x n_classes unary table. Entries for the initial label are 0.
struct UnaryCosts {
  std::size_t n_segments = 0;
  std::size_t n_classes = 0;
  std::vector<double> cost;

  double operator()(std::size_t j, std::size_t l) const noexcept { return cost[j * n_classes + l]; }
};

SegmentProbTable superpixel_average(const ProbMap& probs, const slic::SegmentMap& seg);

/// Argmax per row; ties go to the lowest class index.
Labeling segment_argmax(const SegmentProbTable& table);

AdjacencyGraph build_adjacency(const slic::SegmentMap& seg, const GradientField& grad, double beta);

double unary_cost(std::size_t j, std::size_t l, const SegmentProbTable& table,
                  const Labeling& initial, double alpha);

UnaryCosts make_unary_costs(const SegmentProbTable& table, const Labeling& initial, double alpha);

UnaryCosts make_unary_costs_per_pixel(const ProbMap& probs, const slic::SegmentMap& seg,
                                      const Labeling& initial, double alpha);

double total_energy(const Labeling& labels, const UnaryCosts& unary, const AdjacencyGraph& graph,
                    const CrfParams& params);

double total_energy(const Labeling& labels, const SegmentProbTable& table,
                    const AdjacencyGraph& graph, const Labeling& initial, const CrfParams& params);

/// Optimal labeling among those where every segment keeps its label or takes
/// `expand_label`, found with one min-cut.
Labeling expansion_move(const Labeling& current, std::int32_t expand_label, const UnaryCosts& unary,
                        const AdjacencyGraph& graph, const CrfParams& params);

Labeling expansion_move(const Labeling& current, std::int32_t expand_label,
                        const SegmentProbTable& table, const AdjacencyGraph& graph,
                        const Labeling& initial, const CrfParams& params);

struct ExpansionResult {
  Labeling labels;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  int sweeps = 0;
  int moves_accepted = 0;
  bool converged = false;
  std::vector<double> energy_trace;  ///< energy after every accepted move, starting with the initial
};

ExpansionResult alpha_expansion(const UnaryCosts& unary, const AdjacencyGraph& graph,
                                const Labeling& initial, const CrfParams& params);

ExpansionResult alpha_expansion(const SegmentProbTable& table, const AdjacencyGraph& graph,
                                const Labeling& initial, const CrfParams& params);

/// Per-pixel label map from a per-segment labeling.
LabelMap paint(const slic::SegmentMap& seg, const Labeling& labels);

/// Per-pixel argmax of a probability map; ties go to the lowest class index.
LabelMap pixel_argmax(const ProbMap& probs);

struct RefineResult {
  LabelMap labels;           ///< refined per-pixel labels
  LabelMap averaged_labels;  ///< superpixel-averaged argmax, before the CRF
  slic::SegmentMap segments;
  SegmentProbTable table;
  AdjacencyGraph graph;
  Labeling initial;
  ExpansionResult crf;
};

/// CRF stage only, on an existing superpixel map.
RefineResult refine_segments(const ProbMap& probs, const RgbImage& rgb, slic::SegmentMap segments,
                             const CrfParams& crf_params);

/// Full post-processing: SLIC superpixels, averaging, CRF energy minimization.
RefineResult refine(const ProbMap& probs, const RgbImage& rgb, const slic::SlicParams& slic_params,
                    const CrfParams& crf_params);

}  // namespace segrefine::crf
