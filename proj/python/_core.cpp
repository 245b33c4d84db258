#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>
#include <string>

#include "segrefine/color.hpp"
#include "segrefine/crf.hpp"
#include "segrefine/error.hpp"
#include "segrefine/io.hpp"
#include "segrefine/maxflow.hpp"
#include "segrefine/metrics.hpp"
#include "segrefine/slic.hpp"
#include "segrefine/synth.hpp"

namespace py = pybind11;
using namespace segrefine;

namespace {

template <typename T>
using CArray = py::array_t<T, py::array::c_style | py::array::forcecast>;

/// Copies a 2-D or 3-D array into a Raster; 2-D arrays get one channel.
template <typename T>
Raster<T> to_raster(const CArray<T>& a, std::optional<std::size_t> channels = std::nullopt) {
  if (a.ndim() != 2 && a.ndim() != 3) throw Error(ErrorCode::InvalidArgument, "expected a 2-D or 3-D array");
  const auto h = static_cast<std::size_t>(a.shape(0)), w = static_cast<std::size_t>(a.shape(1));
  const std::size_t c = a.ndim() == 3 ? static_cast<std::size_t>(a.shape(2)) : 1;
  if (channels && c != *channels) {
    throw Error(ErrorCode::WrongChannelCount, "expected " + std::to_string(*channels) + " channels, got " +
                                                  std::to_string(c));
  }
  std::vector<T> data(a.data(), a.data() + h * w * c);
  return Raster<T>(h, w, c, std::move(data));
}

template <typename T>
py::array_t<T> to_array(const Raster<T>& r, bool squeeze = false) {
  std::vector<py::ssize_t> shape{py::ssize_t(r.height()), py::ssize_t(r.width())};
  if (!(squeeze && r.channels() == 1)) shape.push_back(py::ssize_t(r.channels()));
  py::array_t<T> out(shape);
  std::memcpy(out.mutable_data(), r.data().data(), r.data().size() * sizeof(T));
  return out;
}

slic::SegmentMap to_segments(const CArray<std::int32_t>& ids) {
  return slic::make_segment_map(to_raster(ids, 1));
}

crf::CrfParams make_crf(std::size_t n_classes, double alpha, double beta, double gamma,
                        std::optional<CArray<double>> weights, int max_sweeps, const std::string& unary_mode) {
  auto p = crf::CrfParams::defaults(n_classes);
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = gamma;
  p.max_sweeps = max_sweeps;
  if (unary_mode == "pixel") p.unary_mode = crf::UnaryMode::PerPixel;
  else if (unary_mode != "segment") throw Error(ErrorCode::InvalidArgument, "unary_mode must be 'segment' or 'pixel'");
  if (weights) {
    const auto& w = *weights;
    if (w.ndim() != 2 || w.shape(0) != w.shape(1)) throw Error(ErrorCode::InvalidWeights, "weights must be square");
    p.weights = crf::WeightMatrix(std::size_t(w.shape(0)), std::vector<double>(w.data(), w.data() + w.size()));
  }
  p.validate(n_classes);
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Superpixel averaging and CRF refinement of per-pixel class probabilities";

  // SegrefineError carries the error class name in `code`.
  static PyObject* error_type =
      PyErr_NewException("segrefine._core.SegrefineError", PyExc_RuntimeError, nullptr);
  m.add_object("SegrefineError", py::reinterpret_borrow<py::object>(error_type));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_steal<py::object>(PyObject_CallFunction(error_type, "s", e.what()));
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  m.def("srgb_to_lab", [](const CArray<std::uint8_t>& rgb) {
    return to_array(color::srgb_to_lab(to_raster(rgb, 3)));
  }, py::arg("rgb"), "HxWx3 uint8 sRGB to HxWx3 float64 CIELAB (D65).");

  m.def("luminance_gradient", [](const CArray<std::uint8_t>& rgb) {
    return to_array(color::luminance_gradient(to_raster(rgb, 3)), true);
  }, py::arg("rgb"), "Gradient magnitude of L*, central differences.");

  m.def("slic", [](const CArray<std::uint8_t>& rgb, int k, double m_, int iters, bool enforce, bool early_exit) {
    slic::SlicParams p;
    p.target_segments = k;
    p.compactness = m_;
    p.iterations = iters;
    p.enforce_connectivity = enforce;
    p.early_exit = early_exit;
    return to_array(slic::slic_segment(color::srgb_to_lab(to_raster(rgb, 3)), p).ids, true);
  }, py::arg("rgb"), py::arg("k") = 500, py::arg("m") = 5.0, py::arg("iters") = 50,
     py::arg("enforce_connectivity") = true, py::arg("early_exit") = false,
     "SLIC superpixels; returns HxW int32 segment ids.");

  m.def("superpixel_average", [](const CArray<float>& probs, const CArray<std::int32_t>& segments) {
    const auto table = crf::superpixel_average(to_raster(probs), to_segments(segments));
    py::array_t<double> out({py::ssize_t(table.n_segments), py::ssize_t(table.n_classes)});
    std::memcpy(out.mutable_data(), table.probs.data(), table.probs.size() * sizeof(double));
    return py::make_tuple(out, table.sizes);
  }, py::arg("probs"), py::arg("segments"), "Per-segment mean probabilities and segment sizes.");

  m.def("refine", [](const CArray<float>& probs, const CArray<std::uint8_t>& rgb,
                     std::optional<CArray<std::int32_t>> segments, int k, double m_, int iters, double alpha,
                     double beta, double gamma, std::optional<CArray<double>> weights, int max_sweeps,
                     const std::string& unary_mode) {
    const auto p = to_raster(probs);
    const auto img = to_raster(rgb, 3);
    const auto params = make_crf(p.channels(), alpha, beta, gamma, weights, max_sweeps, unary_mode);
    crf::RefineResult r;
    if (segments) {
      r = crf::refine_segments(p, img, to_segments(*segments), params);
    } else {
      slic::SlicParams sp;
      sp.target_segments = k;
      sp.compactness = m_;
      sp.iterations = iters;
      r = crf::refine(p, img, sp, params);
    }
    py::dict out;
    out["labels"] = to_array(r.labels, true);
    out["averaged_labels"] = to_array(r.averaged_labels, true);
    out["segments"] = to_array(r.segments.ids, true);
    out["initial_energy"] = r.crf.initial_energy;
    out["final_energy"] = r.crf.final_energy;
    out["sweeps"] = r.crf.sweeps;
    out["moves_accepted"] = r.crf.moves_accepted;
    out["converged"] = r.crf.converged;
    out["energy_trace"] = r.crf.energy_trace;
    return out;
  }, py::arg("probs"), py::arg("rgb"), py::arg("segments") = py::none(), py::arg("k") = 500, py::arg("m") = 5.0,
     py::arg("iters") = 50, py::arg("alpha") = 0.1, py::arg("beta") = 20.0, py::arg("gamma") = 10.0,
     py::arg("weights") = py::none(), py::arg("max_sweeps") = 10, py::arg("unary_mode") = "segment",
     "SLIC (unless segments are given), superpixel averaging and CRF refinement.");

  m.def("bridge_weights", [] {
    const auto& w = crf::WeightMatrix::bridge_components();
    py::array_t<double> out({py::ssize_t(5), py::ssize_t(5)});
    std::memcpy(out.mutable_data(), w.values().data(), 25 * sizeof(double));
    return out;
  }, "Tuned label-pair weights for the five bridge component classes.");

  m.def("max_flow", [](std::size_t n, const std::vector<std::tuple<int, int, double>>& edges, int s, int t) {
    flow::FlowNetwork net(n);
    for (const auto& [a, b, c] : edges) net.add_edge(a, b, c);
    const auto r = flow::max_flow(net, s, t);
    return py::make_tuple(r.value, std::vector<bool>(r.source_side.begin(), r.source_side.end()));
  }, py::arg("n_nodes"), py::arg("edges"), py::arg("source"), py::arg("sink"),
     "Maximum s-t flow value and the source side of a minimum cut.");

  m.def("confusion", [](const CArray<std::uint8_t>& pred, const CArray<std::uint8_t>& truth, std::size_t n) {
    const auto cm = metrics::confusion(to_raster(pred, 1), to_raster(truth, 1), n);
    py::array_t<std::uint64_t> out({py::ssize_t(n), py::ssize_t(n)});
    std::memcpy(out.mutable_data(), cm.counts.data(), cm.counts.size() * sizeof(std::uint64_t));
    return py::make_tuple(out, cm.unassigned);
  }, py::arg("pred"), py::arg("truth"), py::arg("n_classes"),
     "Confusion counts (rows: truth) and per-row void predictions.");

  m.def("pixel_accuracy", [](const CArray<std::uint8_t>& pred, const CArray<std::uint8_t>& truth, std::size_t n) {
    return metrics::pixel_accuracy(metrics::confusion(to_raster(pred, 1), to_raster(truth, 1), n));
  }, py::arg("pred"), py::arg("truth"), py::arg("n_classes"));

  m.def("median_frequency_weights", [](const std::vector<CArray<std::uint8_t>>& truths, std::size_t n) {
    std::vector<LabelMap> maps;
    for (const auto& t : truths) maps.push_back(to_raster(t, 1));
    return metrics::median_frequency_weights(maps, n);
  }, py::arg("truths"), py::arg("n_classes"));

  m.def("read_pmap", [](const std::string& path) { return to_array(io::read_pmap(path)); }, py::arg("path"));
  m.def("write_pmap", [](const CArray<float>& probs, const std::string& path) {
    io::write_pmap(to_raster(probs), path);
  }, py::arg("probs"), py::arg("path"));
  m.def("read_label_png", [](const std::string& path, std::size_t n) {
    return to_array(io::read_label_png(path, n), true);
  }, py::arg("path"), py::arg("n_classes"));
  m.def("write_label_png", [](const CArray<std::uint8_t>& labels, const std::string& path) {
    io::write_label_png(to_raster(labels, 1), path);
  }, py::arg("labels"), py::arg("path"));
  m.def("augment_input", [](const CArray<float>& scene, const CArray<std::uint8_t>& rgb) {
    return to_array(io::augment_input(to_raster(scene), to_raster(rgb, 3)));
  }, py::arg("scene_probs"), py::arg("rgb"));

  m.def("gen_scene", [](std::uint64_t seed, std::size_t h, std::size_t w, std::size_t n, double flip, double smear) {
    const auto s = synth::gen_scene(seed, h, w, n, {flip, smear});
    py::dict out;
    out["rgb"] = to_array(s.rgb);
    out["truth"] = to_array(s.truth, true);
    out["probs"] = to_array(s.probs);
    return out;
  }, py::arg("seed"), py::arg("height") = 320, py::arg("width") = 320, py::arg("n_classes") = 5,
     py::arg("flip_rate") = 0.0, py::arg("smear_sigma") = 0.0, "Deterministic synthetic scene.");
}
