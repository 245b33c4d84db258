#include "segrefine/crf.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "segrefine/color.hpp"
#include "segrefine/maxflow.hpp"

namespace segrefine::crf {

// ---------------------------------------------------------------------------
// Parameters

WeightMatrix::WeightMatrix(std::size_t n_classes, std::vector<double> values)
    : n_(n_classes), w_(std::move(values)) {
  if (w_.size() != n_ * n_) {
    throw Error(ErrorCode::InvalidWeights, "weight matrix must have " + std::to_string(n_ * n_) +
                                               " entries, got " + std::to_string(w_.size()));
  }
}

WeightMatrix WeightMatrix::uniform(std::size_t n_classes) {
  std::vector<double> w(n_classes * n_classes, 1.0);
  for (std::size_t l = 0; l < n_classes; ++l) w[l * n_classes + l] = 0.0;
  return WeightMatrix(n_classes, std::move(w));
}

WeightMatrix WeightMatrix::bridge_components() {
  return WeightMatrix(5, {
                             0.0, 0.5, 1.0, 1.0, 0.5,  //
                             0.5, 0.0, 1.0, 0.5, 1.0,  //
                             1.0, 1.0, 0.0, 0.5, 0.5,  //
                             1.0, 0.5, 0.5, 0.0, 1.0,  //
                             0.5, 1.0, 0.5, 1.0, 0.0,  //
                         });
}

void WeightMatrix::validate() const {
  constexpr double tol = 1e-12;
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidWeights, why); };
  if (n_ == 0) fail("empty weight matrix");
  for (std::size_t a = 0; a < n_; ++a) {
    for (std::size_t b = 0; b < n_; ++b) {
      const double v = (*this)(a, b);
      const std::string at = "[" + std::to_string(a) + "][" + std::to_string(b) + "]";
      if (!std::isfinite(v) || v < 0.0) fail("entry " + at + " must be finite and >= 0");
      if (a == b && v != 0.0) fail("diagonal entry " + at + " must be 0");
      if (std::abs(v - (*this)(b, a)) > tol) fail("matrix is not symmetric at " + at);
    }
  }
  for (std::size_t a = 0; a < n_; ++a) {
    for (std::size_t b = 0; b < n_; ++b) {
      for (std::size_t c = 0; c < n_; ++c) {
        if ((*this)(a, c) > (*this)(a, b) + (*this)(b, c) + tol) {
          fail("triangle inequality violated: w[" + std::to_string(a) + "][" + std::to_string(c) +
               "] > w[" + std::to_string(a) + "][" + std::to_string(b) + "] + w[" +
               std::to_string(b) + "][" + std::to_string(c) + "]");
        }
      }
    }
  }
}

CrfParams CrfParams::defaults(std::size_t n_classes) {
  CrfParams p;
  p.weights = n_classes == 5 ? WeightMatrix::bridge_components() : WeightMatrix::uniform(n_classes);
  return p;
}

void CrfParams::validate(std::size_t n_classes) const {
  auto nonneg = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be finite and >= 0");
    }
  };
  nonneg(alpha, "alpha");
  nonneg(beta, "beta");
  nonneg(gamma, "gamma");
  if (max_sweeps < 1) throw Error(ErrorCode::InvalidArgument, "max_sweeps must be >= 1");
  if (weights.size() != n_classes) {
    throw Error(ErrorCode::InvalidWeights, "weight matrix is " + std::to_string(weights.size()) +
                                               "x" + std::to_string(weights.size()) + " but there are " +
                                               std::to_string(n_classes) + " classes");
  }
  weights.validate();
}

// ---------------------------------------------------------------------------
// Model construction

SegmentProbTable superpixel_average(const ProbMap& probs, const slic::SegmentMap& seg) {
  require_same_shape(probs, seg.ids, "superpixel_average");
  SegmentProbTable t;
  t.n_segments = static_cast<std::size_t>(seg.n_segments);
  t.n_classes = probs.channels();
  t.probs.assign(t.n_segments * t.n_classes, 0.0);
  t.sizes.assign(t.n_segments, 0);

  const auto ids = seg.ids.data();
  const auto p = probs.data();
  const std::size_t nc = t.n_classes;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto j = static_cast<std::size_t>(ids[i]);
    double* row = &t.probs[j * nc];
    for (std::size_t l = 0; l < nc; ++l) row[l] += p[i * nc + l];
    ++t.sizes[j];
  }
  for (std::size_t j = 0; j < t.n_segments; ++j) {
    if (t.sizes[j] == 0) continue;
    const double inv = 1.0 / static_cast<double>(t.sizes[j]);
    for (std::size_t l = 0; l < nc; ++l) t.probs[j * nc + l] *= inv;
  }
  return t;
}

Labeling segment_argmax(const SegmentProbTable& table) {
  Labeling labels(table.n_segments, 0);
  for (std::size_t j = 0; j < table.n_segments; ++j) {
    const auto row = table.row(j);
    std::size_t best = 0;
    for (std::size_t l = 1; l < row.size(); ++l) {
      if (row[l] > row[best]) best = l;
    }
    labels[j] = static_cast<std::int32_t>(best);
  }
  return labels;
}

AdjacencyGraph build_adjacency(const slic::SegmentMap& seg, const GradientField& grad, double beta) {
  require_same_shape(seg.ids, grad, "build_adjacency");
  if (!std::isfinite(beta) || beta < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "beta must be finite and >= 0");
  }
  const std::size_t h = seg.height(), w = seg.width();
  const auto ids = seg.ids.data();
  const auto g = grad.data();

  std::unordered_map<std::uint64_t, double> acc;
  auto add = [&](std::size_t p, std::size_t q) {
    std::int32_t a = ids[p], b = ids[q];
    if (a == b) return;
    if (a > b) std::swap(a, b);
    const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
    acc[key] += std::exp(-beta * (g[p] + g[q]) / 2.0);
  };
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t p = y * w + x;
      if (x + 1 < w) add(p, p + 1);
      if (y + 1 < h) add(p, p + w);
    }
  }

  AdjacencyGraph graph;
  graph.n_segments = static_cast<std::size_t>(seg.n_segments);
  graph.edges.reserve(acc.size());
  for (const auto& [key, strength] : acc) {
    if (strength <= 0.0) continue;  // fully attenuated by a strong edge
    graph.edges.push_back(Edge{static_cast<std::int32_t>(key >> 32),
                               static_cast<std::int32_t>(key & 0xffffffffu), strength});
  }
  std::sort(graph.edges.begin(), graph.edges.end(),
            [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  return graph;
}

double unary_cost(std::size_t j, std::size_t l, const SegmentProbTable& table,
                  const Labeling& initial, double alpha) {
  if (static_cast<std::int32_t>(l) == initial[j]) return 0.0;
  return static_cast<double>(table.sizes[j]) * std::exp(-alpha * table.row(j)[l]);
}

UnaryCosts make_unary_costs(const SegmentProbTable& table, const Labeling& initial, double alpha) {
  if (initial.size() != table.n_segments) {
    throw Error(ErrorCode::DimensionMismatch, "initial labeling size does not match the table");
  }
  UnaryCosts u{table.n_segments, table.n_classes, std::vector<double>(table.probs.size())};
  for (std::size_t j = 0; j < table.n_segments; ++j) {
    for (std::size_t l = 0; l < table.n_classes; ++l) {
      u.cost[j * table.n_classes + l] = unary_cost(j, l, table, initial, alpha);
    }
  }
  return u;
}

UnaryCosts make_unary_costs_per_pixel(const ProbMap& probs, const slic::SegmentMap& seg,
                                      const Labeling& initial, double alpha) {
  require_same_shape(probs, seg.ids, "make_unary_costs_per_pixel");
  const auto ns = static_cast<std::size_t>(seg.n_segments);
  const std::size_t nc = probs.channels();
  if (initial.size() != ns) {
    throw Error(ErrorCode::DimensionMismatch, "initial labeling size does not match the segments");
  }
  UnaryCosts u{ns, nc, std::vector<double>(ns * nc, 0.0)};
  const auto ids = seg.ids.data();
  const auto p = probs.data();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto j = static_cast<std::size_t>(ids[i]);
    for (std::size_t l = 0; l < nc; ++l) u.cost[j * nc + l] += std::exp(-alpha * p[i * nc + l]);
  }
  for (std::size_t j = 0; j < ns; ++j) u.cost[j * nc + static_cast<std::size_t>(initial[j])] = 0.0;
  return u;
}

// ---------------------------------------------------------------------------
// Energy

namespace {

double pair_cost(const CrfParams& params, std::int32_t a, std::int32_t b, double strength) {
  if (a == b) return 0.0;
  return params.gamma * params.weights(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) *
         strength;
}

void check_labeling(const Labeling& labels, const UnaryCosts& unary, const AdjacencyGraph& graph) {
  if (labels.size() != unary.n_segments || graph.n_segments != unary.n_segments) {
    throw Error(ErrorCode::DimensionMismatch, "labeling, unary table and graph disagree on size");
  }
  for (std::int32_t l : labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= unary.n_classes) {
      throw Error(ErrorCode::InvalidArgument, "label out of range");
    }
  }
}

}  // namespace

double total_energy(const Labeling& labels, const UnaryCosts& unary, const AdjacencyGraph& graph,
                    const CrfParams& params) {
  check_labeling(labels, unary, graph);
  double e = 0.0;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    e += unary(j, static_cast<std::size_t>(labels[j]));
  }
  for (const Edge& edge : graph.edges) {
    e += pair_cost(params, labels[static_cast<std::size_t>(edge.i)],
                   labels[static_cast<std::size_t>(edge.j)], edge.strength);
  }
  return e;
}

double total_energy(const Labeling& labels, const SegmentProbTable& table,
                    const AdjacencyGraph& graph, const Labeling& initial, const CrfParams& params) {
  return total_energy(labels, make_unary_costs(table, initial, params.alpha), graph, params);
}

// ---------------------------------------------------------------------------
// Minimization

// Binary choice per segment: source side keeps the current label, sink side takes
// `expand`. Segments already holding `expand` have nothing to decide; their edges
// fold into the neighbor's keep cost. Edges between two segments with different
// current labels get an auxiliary node so that the cut reproduces all four cases.
Labeling expansion_move(const Labeling& current, std::int32_t expand, const UnaryCosts& unary,
                        const AdjacencyGraph& graph, const CrfParams& params) {
  check_labeling(current, unary, graph);
  if (expand < 0 || static_cast<std::size_t>(expand) >= unary.n_classes) {
    throw Error(ErrorCode::InvalidArgument, "expansion label out of range");
  }
  if (params.weights.size() != unary.n_classes) {
    throw Error(ErrorCode::InvalidWeights, "weight matrix size does not match the class count");
  }
  params.weights.validate();

  const std::size_t n = current.size();
  std::vector<double> keep(n, 0.0), take(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    keep[j] = unary(j, static_cast<std::size_t>(current[j]));
    take[j] = unary(j, static_cast<std::size_t>(expand));
  }

  flow::BkMaxflow g(n + graph.edges.size(), 2 * graph.edges.size());
  g.add_node(n);
  for (const Edge& e : graph.edges) {
    const auto i = static_cast<std::size_t>(e.i), j = static_cast<std::size_t>(e.j);
    const std::int32_t ci = current[i], cj = current[j];
    if (ci == expand && cj == expand) continue;
    if (ci == expand) {
      keep[j] += pair_cost(params, cj, expand, e.strength);
    } else if (cj == expand) {
      keep[i] += pair_cost(params, ci, expand, e.strength);
    } else if (ci == cj) {
      const double v = pair_cost(params, ci, expand, e.strength);
      g.add_edge(e.i, e.j, v, v);
    } else {
      const double vi = pair_cost(params, ci, expand, e.strength);
      const double vj = pair_cost(params, expand, cj, e.strength);
      const int aux = g.add_node();
      g.add_edge(e.i, aux, vi, vi);
      g.add_edge(aux, e.j, vj, vj);
      g.add_tweights(aux, 0.0, pair_cost(params, ci, cj, e.strength));
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (current[j] != expand) g.add_tweights(static_cast<int>(j), take[j], keep[j]);
  }
  g.solve();

  Labeling next = current;
  for (std::size_t j = 0; j < n; ++j) {
    if (current[j] != expand && g.on_sink_side(static_cast<int>(j))) next[j] = expand;
  }
  return next;
}

Labeling expansion_move(const Labeling& current, std::int32_t expand, const SegmentProbTable& table,
                        const AdjacencyGraph& graph, const Labeling& initial,
                        const CrfParams& params) {
  return expansion_move(current, expand, make_unary_costs(table, initial, params.alpha), graph,
                        params);
}

ExpansionResult alpha_expansion(const UnaryCosts& unary, const AdjacencyGraph& graph,
                                const Labeling& initial, const CrfParams& params) {
  params.validate(unary.n_classes);
  check_labeling(initial, unary, graph);

  ExpansionResult r;
  r.labels = initial;
  r.initial_energy = total_energy(initial, unary, graph, params);
  r.final_energy = r.initial_energy;
  r.energy_trace.push_back(r.initial_energy);

  for (int sweep = 1; sweep <= params.max_sweeps; ++sweep) {
    bool improved = false;
    for (std::size_t l = 0; l < unary.n_classes; ++l) {
      Labeling candidate =
          expansion_move(r.labels, static_cast<std::int32_t>(l), unary, graph, params);
      const double e = total_energy(candidate, unary, graph, params);
      if (e < r.final_energy - 1e-12 * std::max(1.0, std::abs(r.final_energy))) {
        r.labels = std::move(candidate);
        r.final_energy = e;
        r.energy_trace.push_back(e);
        ++r.moves_accepted;
        improved = true;
      }
    }
    r.sweeps = sweep;
    if (!improved) {
      r.converged = true;
      break;
    }
  }
  return r;
}

ExpansionResult alpha_expansion(const SegmentProbTable& table, const AdjacencyGraph& graph,
                                const Labeling& initial, const CrfParams& params) {
  return alpha_expansion(make_unary_costs(table, initial, params.alpha), graph, initial, params);
}

// ---------------------------------------------------------------------------
// Pipeline

LabelMap paint(const slic::SegmentMap& seg, const Labeling& labels) {
  if (labels.size() != static_cast<std::size_t>(seg.n_segments)) {
    throw Error(ErrorCode::DimensionMismatch, "labeling size does not match the segment map");
  }
  LabelMap out(seg.height(), seg.width(), 1);
  const auto ids = seg.ids.data();
  auto o = out.data();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    o[i] = static_cast<std::uint8_t>(labels[static_cast<std::size_t>(ids[i])]);
  }
  return out;
}

LabelMap pixel_argmax(const ProbMap& probs) {
  LabelMap out(probs.height(), probs.width(), 1);
  const std::size_t nc = probs.channels();
  for (std::size_t i = 0; i < probs.pixel_count(); ++i) {
    const auto px = probs.pixel(i);
    std::size_t best = 0;
    for (std::size_t l = 1; l < nc; ++l) {
      if (px[l] > px[best]) best = l;
    }
    out.data()[i] = static_cast<std::uint8_t>(best);
  }
  return out;
}

RefineResult refine_segments(const ProbMap& probs, const RgbImage& rgb, slic::SegmentMap segments,
                             const CrfParams& crf_params) {
  require_same_shape(probs, rgb, "refine");
  require_same_shape(probs, segments.ids, "refine");
  const std::size_t nc = probs.channels();
  if (nc < 1 || nc >= kVoidLabel) {
    throw Error(ErrorCode::WrongChannelCount, "class count must lie in [1, 254]");
  }
  CrfParams params = crf_params;
  if (params.weights.size() == 0) params.weights = CrfParams::defaults(nc).weights;
  params.validate(nc);

  RefineResult r;
  r.segments = std::move(segments);
  r.table = superpixel_average(probs, r.segments);
  r.initial = segment_argmax(r.table);
  r.graph = build_adjacency(r.segments, color::luminance_gradient(rgb), params.beta);
  const UnaryCosts unary =
      params.unary_mode == UnaryMode::PerPixel
          ? make_unary_costs_per_pixel(probs, r.segments, r.initial, params.alpha)
          : make_unary_costs(r.table, r.initial, params.alpha);
  r.crf = alpha_expansion(unary, r.graph, r.initial, params);
  r.labels = paint(r.segments, r.crf.labels);
  r.averaged_labels = paint(r.segments, r.initial);
  return r;
}

RefineResult refine(const ProbMap& probs, const RgbImage& rgb, const slic::SlicParams& slic_params,
                    const CrfParams& crf_params) {
  require_same_shape(probs, rgb, "refine");
  slic::SegmentMap seg = slic::slic_segment(color::srgb_to_lab(rgb), slic_params);
  return refine_segments(probs, rgb, std::move(seg), crf_params);
}

}  // namespace segrefine::crf
