#include "segrefine/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace segrefine::metrics {

std::uint64_t ConfusionMatrix::row_total(std::size_t t) const {
  std::uint64_t s = unassigned[t];
  for (std::size_t p = 0; p < n_classes; ++p) s += at(t, p);
  return s;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t s = 0;
  for (std::size_t c = 0; c < n_classes; ++c) s += at(c, c);
  return s;
}

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}) +
         std::accumulate(unassigned.begin(), unassigned.end(), std::uint64_t{0});
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.n_classes != n_classes) {
    throw Error(ErrorCode::DimensionMismatch, "cannot add confusion matrices of different sizes");
  }
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  for (std::size_t i = 0; i < unassigned.size(); ++i) unassigned[i] += other.unassigned[i];
  return *this;
}

ConfusionMatrix confusion(const LabelMap& pred, const LabelMap& truth, std::size_t n_classes) {
  require_same_shape(pred, truth, "confusion");
  ConfusionMatrix cm(n_classes);
  const auto p = pred.data();
  const auto t = truth.data();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == kVoidLabel) continue;
    if (t[i] >= n_classes) {
      throw Error(ErrorCode::InvalidLabelValue,
                  "ground-truth value " + std::to_string(t[i]) + " outside the class range");
    }
    if (p[i] == kVoidLabel) {
      ++cm.unassigned[t[i]];
    } else if (p[i] >= n_classes) {
      throw Error(ErrorCode::InvalidLabelValue,
                  "predicted value " + std::to_string(p[i]) + " outside the class range");
    } else {
      ++cm.at(t[i], p[i]);
    }
  }
  return cm;
}

double pixel_accuracy(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) throw Error(ErrorCode::EmptyMatrix, "no evaluated pixels");
  return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

std::vector<std::optional<double>> class_accuracies(const ConfusionMatrix& cm) {
  std::vector<std::optional<double>> acc(cm.n_classes);
  for (std::size_t c = 0; c < cm.n_classes; ++c) {
    const std::uint64_t row = cm.row_total(c);
    if (row > 0) acc[c] = static_cast<double>(cm.at(c, c)) / static_cast<double>(row);
  }
  return acc;
}

double bridge_false_positive_rate(const LabelMap& pred, const LabelMap& scene_truth,
                                  const std::set<std::uint8_t>& bridge_labels,
                                  std::uint8_t scene_class) {
  require_same_shape(pred, scene_truth, "bridge_false_positive_rate");
  const auto p = pred.data();
  const auto t = scene_truth.data();
  std::uint64_t pixels = 0, positives = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] != scene_class) continue;
    ++pixels;
    if (bridge_labels.contains(p[i])) ++positives;
  }
  if (pixels == 0) {
    throw Error(ErrorCode::NoPixelsOfClass,
                "scene class " + std::to_string(scene_class) + " does not occur in the truth map");
  }
  return static_cast<double>(positives) / static_cast<double>(pixels);
}

std::vector<double> median_frequency_weights(const std::vector<LabelMap>& truths,
                                             std::size_t n_classes) {
  std::vector<std::uint64_t> class_pixels(n_classes, 0);
  std::vector<std::uint64_t> image_pixels(n_classes, 0);  // labeled pixels of images containing c
  std::uint64_t labeled_total = 0;

  std::vector<std::uint64_t> local(n_classes);
  for (const LabelMap& truth : truths) {
    std::fill(local.begin(), local.end(), 0);
    std::uint64_t labeled = 0;
    for (std::uint8_t v : truth.data()) {
      if (v == kVoidLabel) continue;
      if (v >= n_classes) {
        throw Error(ErrorCode::InvalidLabelValue,
                    "ground-truth value " + std::to_string(v) + " outside the class range");
      }
      ++local[v];
      ++labeled;
    }
    labeled_total += labeled;
    for (std::size_t c = 0; c < n_classes; ++c) {
      if (local[c] == 0) continue;
      class_pixels[c] += local[c];
      image_pixels[c] += labeled;
    }
  }
  if (labeled_total == 0) throw Error(ErrorCode::EmptyDataset, "no labeled pixels");

  std::vector<double> freq(n_classes, 0.0);
  std::vector<double> present;
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (class_pixels[c] == 0) continue;
    freq[c] = static_cast<double>(class_pixels[c]) / static_cast<double>(image_pixels[c]);
    present.push_back(freq[c]);
  }
  std::sort(present.begin(), present.end());
  const std::size_t k = present.size();
  const double median = k % 2 == 1 ? present[k / 2] : 0.5 * (present[k / 2 - 1] + present[k / 2]);

  std::vector<double> weights(n_classes, 0.0);
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (class_pixels[c] > 0) weights[c] = median / freq[c];
  }
  return weights;
}

std::string to_tsv(const ConfusionMatrix& cm, const std::vector<std::string>& names) {
  if (names.size() != cm.n_classes) {
    throw Error(ErrorCode::InvalidArgument, "need one class name per class");
  }
  std::ostringstream out;
  out << "truth\\pred";
  for (const auto& n : names) out << '\t' << n;
  out << "\tvoid\n";
  for (std::size_t t = 0; t < cm.n_classes; ++t) {
    out << names[t];
    for (std::size_t p = 0; p < cm.n_classes; ++p) out << '\t' << cm.at(t, p);
    out << '\t' << cm.unassigned[t] << '\n';
  }
  return out.str();
}

}  // namespace segrefine::metrics
