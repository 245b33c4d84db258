#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "segrefine/raster.hpp"

namespace segrefine::metrics {

/// Rows are ground truth, columns are predictions. Void predictions on labeled
/// pixels are tallied per row in `unassigned` and count as errors.
struct ConfusionMatrix {
  std::size_t n_classes = 0;
  std::vector<std::uint64_t> counts;
  std::vector<std::uint64_t> unassigned;

  explicit ConfusionMatrix(std::size_t n = 0) : n_classes(n), counts(n * n, 0), unassigned(n, 0) {}

  std::uint64_t& at(std::size_t truth, std::size_t pred) { return counts[truth * n_classes + pred]; }
  std::uint64_t at(std::size_t truth, std::size_t pred) const {
    return counts[truth * n_classes + pred];
  }
  std::uint64_t row_total(std::size_t truth) const;
  std::uint64_t trace() const;
  std::uint64_t total() const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion(const LabelMap& pred, const LabelMap& truth, std::size_t n_classes);

/// trace / total; throws EmptyMatrix when nothing was evaluated.
double pixel_accuracy(const ConfusionMatrix& cm);

/// Per-class recall; classes without ground-truth pixels have no value.
std::vector<std::optional<double>> class_accuracies(const ConfusionMatrix& cm);

/// Among pixels whose scene truth is `scene_class`, the fraction predicted as any
/// label in `bridge_labels`.
double bridge_false_positive_rate(const LabelMap& pred, const LabelMap& scene_truth,
                                  const std::set<std::uint8_t>& bridge_labels,
                                  std::uint8_t scene_class);

/// freq(c) = pixels of c / labeled pixels of images containing c;
/// weight(c) = median(freq) / freq(c), 0 for classes that never occur.
std::vector<double> median_frequency_weights(const std::vector<LabelMap>& truths,
                                             std::size_t n_classes);

/// Tab-separated table with a header row of class names; the last column holds void
/// predictions.
std::string to_tsv(const ConfusionMatrix& cm, const std::vector<std::string>& class_names);

}  // namespace segrefine::metrics
