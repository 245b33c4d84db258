// segrefine command-line tool. Every pipeline stage is a subcommand; flags can also
// come from a TOML/INI file given with --config (command-line values win).

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "segrefine/classes.hpp"
#include "segrefine/color.hpp"
#include "segrefine/crf.hpp"
#include "segrefine/error.hpp"
#include "segrefine/io.hpp"
#include "segrefine/metrics.hpp"
#include "segrefine/overlay.hpp"
#include "segrefine/slic.hpp"
#include "segrefine/synth.hpp"

namespace fs = std::filesystem;
using namespace segrefine;

namespace {

constexpr int kUsageExit = 2;
constexpr int kUnexpectedExit = 1;

/// Exit status for a library error: 10 + position in ErrorCode.
int exit_code(ErrorCode code) { return 10 + static_cast<int>(code); }

struct Paths {
  std::string image, probs, segments, pred, truth, scene_truth;
  std::string out, out_dir, report, table, segments_out, mfb_out;
};

struct RunConfig {
  slic::SlicParams slic;
  crf::CrfParams crf;
  std::string weights_file;
  std::string unary_mode = "segment";
  std::vector<std::string> class_names;
  Paths paths;
  bool emit_overlays = false;

  // eval
  std::size_t n_classes = 0;
  int scene_class = 9;
  std::vector<int> bridge_labels{1, 2, 3, 4};

  // synth
  std::uint64_t seed = 0;
  std::size_t height = 320, width = 320, synth_classes = 5;
  double flip_rate = 0.05, smear = 0.0;
};

// ---------------------------------------------------------------------------
// Output helpers. Every file is read back and compared before we report success.

void verified_pmap(const ProbMap& p, const fs::path& path) {
  io::write_pmap(p, path);
  if (!(io::read_pmap(path) == p)) throw Error(ErrorCode::IoError, "verification failed for " + path.string());
}

void verified_bytes(const Raster<std::uint8_t>& r, const fs::path& path) {
  io::write_byte_raster(r, path);
  if (!(io::read_byte_raster(path) == r)) throw Error(ErrorCode::IoError, "verification failed for " + path.string());
}

void verified_segments(const slic::SegmentMap& seg, const fs::path& path) {
  io::write_segments(seg, path);
  if (!(io::read_segments(path).ids == seg.ids)) {
    throw Error(ErrorCode::IoError, "verification failed for " + path.string());
  }
}

void verified_labels(const LabelMap& labels, const fs::path& path) {
  io::write_label_png(labels, path);
  if (!(io::read_label_png(path, kVoidLabel) == labels)) {
    throw Error(ErrorCode::IoError, "verification failed for " + path.string());
  }
}

void verified_rgb(const RgbImage& rgb, const fs::path& path) {
  io::write_rgb_png(rgb, path);
  if (!(io::read_rgb_png(path) == rgb)) throw Error(ErrorCode::IoError, "verification failed for " + path.string());
}

void verified_text(const std::string& text, const fs::path& path) {
  io::write_text(path, text);
  if (io::read_text(path) != text) throw Error(ErrorCode::IoError, "verification failed for " + path.string());
}

fs::path sibling(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_extension();
  return p.string() + suffix;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

// ---------------------------------------------------------------------------

std::vector<std::string> resolve_names(const RunConfig& cfg, std::size_t n_classes,
                                       const std::vector<std::string>& from_weights = {}) {
  std::vector<std::string> names = cfg.class_names;
  if (names.empty()) names = from_weights.empty() ? default_class_names(n_classes) : from_weights;
  if (names.size() != n_classes) {
    throw Error(ErrorCode::InvalidArgument, std::to_string(names.size()) + " class names for " +
                                                std::to_string(n_classes) + " classes");
  }
  return names;
}

crf::CrfParams resolve_crf(const RunConfig& cfg, std::size_t n_classes, std::vector<std::string>& names) {
  crf::CrfParams p = cfg.crf;
  p.unary_mode = cfg.unary_mode == "pixel" ? crf::UnaryMode::PerPixel : crf::UnaryMode::SegmentAveraged;
  std::vector<std::string> weight_names;
  if (!cfg.weights_file.empty()) {
    auto named = io::read_weights(cfg.weights_file);
    if (named.weights.size() != n_classes) {
      throw Error(ErrorCode::InvalidWeights, "weight matrix has " + std::to_string(named.weights.size()) +
                                                 " classes, probabilities have " + std::to_string(n_classes));
    }
    p.weights = std::move(named.weights);
    weight_names = std::move(named.class_names);
  } else {
    p.weights = crf::CrfParams::defaults(n_classes).weights;
  }
  names = resolve_names(cfg, n_classes, weight_names);
  p.validate(n_classes);
  return p;
}

void add_crf_report(io::Report& r, const crf::CrfParams& p, const crf::RefineResult& res,
                    const std::vector<std::string>& names) {
  std::string joined;
  for (const auto& n : names) joined += (joined.empty() ? "" : ",") + n;
  r.add("class_names", joined);
  r.add("n_classes", res.table.n_classes);
  r.add("n_segments", res.table.n_segments);
  r.add("n_edges", res.graph.edges.size());
  r.add("alpha", p.alpha);
  r.add("beta", p.beta);
  r.add("gamma", p.gamma);
  r.add("unary_mode", std::string(p.unary_mode == crf::UnaryMode::PerPixel ? "pixel" : "segment"));
  r.add("max_sweeps", p.max_sweeps);
  r.add("initial_energy", res.crf.initial_energy);
  r.add("final_energy", res.crf.final_energy);
  r.add("sweeps", res.crf.sweeps);
  r.add("moves_accepted", res.crf.moves_accepted);
  r.add("converged", std::string(res.crf.converged ? "true" : "false"));
  std::size_t changed = 0;
  for (std::size_t j = 0; j < res.initial.size(); ++j) changed += res.initial[j] != res.crf.labels[j];
  r.add("segments_changed", changed);
}

void finish_report(const io::Report& r, const std::string& path) {
  std::cout << r.str();
  if (!path.empty()) {
    ensure_parent(path);
    verified_text(r.str(), path);
  }
}

slic::SegmentMap segments_for(const RunConfig& cfg, const RgbImage& rgb) {
  return slic::slic_segment(color::srgb_to_lab(rgb), cfg.slic);
}

// ---------------------------------------------------------------------------
// Subcommands

void cmd_slic(const RunConfig& cfg) {
  const RgbImage rgb = io::read_rgb_png(cfg.paths.image);
  slic::SlicTrace trace;
  const auto seg = slic::slic_segment(color::srgb_to_lab(rgb), cfg.slic, &trace);
  ensure_parent(cfg.paths.out);
  verified_segments(seg, cfg.paths.out);
  if (cfg.emit_overlays) verified_rgb(overlay::draw_boundaries(rgb, seg), sibling(cfg.paths.out, ".boundaries.png"));

  io::Report r;
  r.add("height", rgb.height());
  r.add("width", rgb.width());
  r.add("k", cfg.slic.target_segments);
  r.add("m", cfg.slic.compactness);
  r.add("iterations_run", trace.iterations_run);
  r.add("n_segments", static_cast<std::int64_t>(seg.n_segments));
  r.add("n_segments_before_enforcement", static_cast<std::int64_t>(trace.unenforced.n_segments));
  if (!trace.squared_objective.empty()) r.add("final_objective", trace.objective_after.back());
  finish_report(r, cfg.paths.report);
}

void cmd_avg(const RunConfig& cfg) {
  const ProbMap probs = io::read_pmap(cfg.paths.probs);
  slic::SegmentMap seg;
  std::optional<RgbImage> rgb;
  if (!cfg.paths.segments.empty()) {
    seg = io::read_segments(cfg.paths.segments);
  } else {
    if (cfg.paths.image.empty()) throw Error(ErrorCode::InvalidArgument, "avg needs --segments or --image");
    rgb = io::read_rgb_png(cfg.paths.image);
    require_same_shape(probs, *rgb, "avg");
    seg = segments_for(cfg, *rgb);
  }
  require_same_shape(probs, seg.ids, "avg");
  const auto table = crf::superpixel_average(probs, seg);
  const auto labels = crf::paint(seg, crf::segment_argmax(table));
  ensure_parent(cfg.paths.out);
  verified_labels(labels, cfg.paths.out);
  if (!cfg.paths.segments_out.empty()) verified_segments(seg, cfg.paths.segments_out);
  if (cfg.emit_overlays) verified_rgb(overlay::colorize(labels), sibling(cfg.paths.out, ".labels.png"));

  io::Report r;
  r.add("n_classes", probs.channels());
  r.add("n_segments", static_cast<std::int64_t>(seg.n_segments));
  finish_report(r, cfg.paths.report);
}

void run_crf_stage(const RunConfig& cfg, const ProbMap& probs, const RgbImage& rgb, slic::SegmentMap seg) {
  std::vector<std::string> names;
  const auto params = resolve_crf(cfg, probs.channels(), names);
  const auto res = crf::refine_segments(probs, rgb, std::move(seg), params);

  ensure_parent(cfg.paths.out);
  verified_labels(res.labels, cfg.paths.out);
  if (!cfg.paths.segments_out.empty()) verified_segments(res.segments, cfg.paths.segments_out);
  if (cfg.emit_overlays) {
    verified_rgb(overlay::colorize(res.labels), sibling(cfg.paths.out, ".labels.png"));
    verified_rgb(overlay::colorize(res.averaged_labels), sibling(cfg.paths.out, ".averaged.png"));
    verified_rgb(overlay::draw_boundaries(rgb, res.segments), sibling(cfg.paths.out, ".boundaries.png"));
  }

  io::Report r;
  add_crf_report(r, params, res, names);
  finish_report(r, cfg.paths.report);
}

void cmd_crf(const RunConfig& cfg) {
  const ProbMap probs = io::read_pmap(cfg.paths.probs);
  const RgbImage rgb = io::read_rgb_png(cfg.paths.image);
  run_crf_stage(cfg, probs, rgb, io::read_segments(cfg.paths.segments));
}

void cmd_refine(const RunConfig& cfg) {
  const ProbMap probs = io::read_pmap(cfg.paths.probs);
  const RgbImage rgb = io::read_rgb_png(cfg.paths.image);
  require_same_shape(probs, rgb, "refine");
  run_crf_stage(cfg, probs, rgb, segments_for(cfg, rgb));
}

std::vector<std::pair<fs::path, fs::path>> pair_inputs(const fs::path& pred, const fs::path& truth) {
  if (!fs::exists(pred)) throw Error(ErrorCode::FileNotFound, pred.string());
  if (!fs::exists(truth)) throw Error(ErrorCode::FileNotFound, truth.string());
  if (!fs::is_directory(pred)) return {{pred, truth}};
  if (!fs::is_directory(truth)) throw Error(ErrorCode::InvalidArgument, "--pred is a directory but --truth is not");
  std::vector<std::pair<fs::path, fs::path>> pairs;
  for (const auto& entry : fs::directory_iterator(pred)) {
    if (entry.path().extension() != ".png") continue;
    pairs.emplace_back(entry.path(), truth / entry.path().filename());
  }
  std::sort(pairs.begin(), pairs.end());
  if (pairs.empty()) throw Error(ErrorCode::EmptyDataset, "no PNG files in " + pred.string());
  return pairs;
}

void cmd_eval(const RunConfig& cfg) {
  std::size_t n = cfg.n_classes ? cfg.n_classes : cfg.class_names.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "eval needs --n-classes or --class-names");
  const auto names = resolve_names(cfg, n);

  metrics::ConfusionMatrix cm(n);
  std::vector<LabelMap> truths;
  std::uint64_t fp_pixels = 0, scene_pixels = 0;
  const bool want_fp = !cfg.paths.scene_truth.empty();
  std::set<std::uint8_t> bridge;
  for (int b : cfg.bridge_labels) bridge.insert(static_cast<std::uint8_t>(b));

  const auto pairs = pair_inputs(cfg.paths.pred, cfg.paths.truth);
  const bool dir_mode = fs::is_directory(cfg.paths.pred);
  for (const auto& [pred_path, truth_path] : pairs) {
    const LabelMap pred = io::read_label_png(pred_path, n);
    const LabelMap truth = io::read_label_png(truth_path, n);
    cm += metrics::confusion(pred, truth, n);
    if (!cfg.paths.mfb_out.empty()) truths.push_back(truth);
    if (want_fp) {
      const fs::path scene_path =
          dir_mode ? fs::path(cfg.paths.scene_truth) / pred_path.filename() : fs::path(cfg.paths.scene_truth);
      const LabelMap scene = io::read_label_png(scene_path, kVoidLabel);
      require_same_shape(pred, scene, "eval");
      const auto sc = static_cast<std::uint8_t>(cfg.scene_class);
      for (std::size_t i = 0; i < scene.pixel_count(); ++i) {
        if (scene.data()[i] != sc) continue;
        ++scene_pixels;
        fp_pixels += bridge.count(pred.data()[i]);
      }
    }
  }

  if (!cfg.paths.table.empty()) {
    ensure_parent(cfg.paths.table);
    verified_text(metrics::to_tsv(cm, names), cfg.paths.table);
  }

  io::Report r;
  r.add("images", pairs.size());
  r.add("evaluated_pixels", static_cast<std::int64_t>(cm.total()));
  r.add("pixel_accuracy", metrics::pixel_accuracy(cm));
  const auto acc = metrics::class_accuracies(cm);
  for (std::size_t c = 0; c < n; ++c) {
    if (acc[c]) r.add("class_accuracy." + names[c], *acc[c]);
    else r.add("class_accuracy." + names[c], std::string("n/a"));
  }
  if (want_fp) {
    if (scene_pixels == 0) {
      throw Error(ErrorCode::NoPixelsOfClass, "no pixels of scene class " + std::to_string(cfg.scene_class));
    }
    r.add("scene_class", cfg.scene_class);
    r.add("false_positive_rate", double(fp_pixels) / double(scene_pixels));
  }
  if (!cfg.paths.mfb_out.empty()) {
    const auto w = metrics::median_frequency_weights(truths, n);
    std::string text;
    for (std::size_t c = 0; c < n; ++c) text += (c ? "\t" : "") + names[c];
    text += "\n";
    for (std::size_t c = 0; c < n; ++c) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", w[c]);
      text += (c ? "\t" : "") + std::string(buf);
    }
    text += "\n";
    ensure_parent(cfg.paths.mfb_out);
    verified_text(text, cfg.paths.mfb_out);
  }
  finish_report(r, cfg.paths.report);
}

void cmd_augment(const RunConfig& cfg) {
  const ProbMap probs = io::read_pmap(cfg.paths.probs);
  const RgbImage rgb = io::read_rgb_png(cfg.paths.image);
  const auto out = io::augment_input(probs, rgb);
  ensure_parent(cfg.paths.out);
  verified_bytes(out, cfg.paths.out);
  io::Report r;
  r.add("height", out.height());
  r.add("width", out.width());
  r.add("channels", out.channels());
  finish_report(r, cfg.paths.report);
}

void cmd_synth(const RunConfig& cfg) {
  const auto scene = synth::gen_scene(cfg.seed, cfg.height, cfg.width, cfg.synth_classes,
                                      {cfg.flip_rate, cfg.smear});
  const fs::path dir = cfg.paths.out_dir;
  fs::create_directories(dir);
  verified_rgb(scene.rgb, dir / "rgb.png");
  verified_labels(scene.truth, dir / "truth.png");
  verified_pmap(scene.probs, dir / "probs.pmf");
  if (cfg.emit_overlays) {
    verified_rgb(overlay::colorize(scene.truth), dir / "truth.labels.png");
    verified_rgb(overlay::colorize(crf::pixel_argmax(scene.probs)), dir / "argmax.labels.png");
  }
  io::Report r;
  r.add("seed", static_cast<std::int64_t>(cfg.seed));
  r.add("height", cfg.height);
  r.add("width", cfg.width);
  r.add("n_classes", cfg.synth_classes);
  r.add("flip_rate", cfg.flip_rate);
  r.add("smear_sigma", cfg.smear);
  finish_report(r, cfg.paths.report.empty() ? (dir / "report.txt").string() : cfg.paths.report);
}

// ---------------------------------------------------------------------------
// Flag wiring

void add_slic_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--k", cfg.slic.target_segments, "Approximate number of superpixels")
      ->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--m", cfg.slic.compactness, "Compactness")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--iters", cfg.slic.iterations, "SLIC iterations")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_flag("--early-exit", cfg.slic.early_exit, "Stop once no center moves more than half a pixel");
}

void add_crf_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--alpha", cfg.crf.alpha, "Unary sharpness")->capture_default_str()->check(CLI::NonNegativeNumber);
  sub->add_option("--beta", cfg.crf.beta,
                  "Gradient attenuation; gradients are in raw L* units (0-100 per pixel step)")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  sub->add_option("--gamma", cfg.crf.gamma, "Binary term weight")->capture_default_str()->check(CLI::NonNegativeNumber);
  sub->add_option("--weights", cfg.weights_file,
                  "Label-pair weight file (header of class names, then an LxL tab-separated matrix); "
                  "defaults to the bridge-component matrix for 5 classes, uniform otherwise");
  sub->add_option("--max-sweeps", cfg.crf.max_sweeps, "Maximum alpha-expansion sweeps")
      ->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--unary-mode", cfg.unary_mode, "segment: |S| exp(-alpha mean p); pixel: sum of exp(-alpha p)")
      ->capture_default_str()->check(CLI::IsMember({"segment", "pixel"}));
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--class-names", cfg.class_names, "Comma-separated class names")->delimiter(',');
  sub->add_option("--report", cfg.paths.report, "Write the key = value report to this file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Superpixel averaging and CRF refinement of per-pixel class probabilities"};
  app.set_config("--config", "", "TOML/INI file with flag values; command-line flags take precedence");
  app.require_subcommand(1);
  RunConfig cfg;

  auto* slic_cmd = app.add_subcommand("slic", "SLIC superpixels of an RGB PNG");
  slic_cmd->add_option("--image", cfg.paths.image, "Input RGB PNG")->required();
  slic_cmd->add_option("--out", cfg.paths.out, "Output segment ids (PMF1)")->required();
  add_slic_flags(slic_cmd, cfg);
  add_common(slic_cmd, cfg);
  slic_cmd->add_flag("--emit-overlays", cfg.emit_overlays, "Also write <out>.boundaries.png");

  auto* avg_cmd = app.add_subcommand("avg", "Superpixel-averaged argmax labels");
  avg_cmd->add_option("--probs", cfg.paths.probs, "Probability map (PMF1)")->required();
  avg_cmd->add_option("--segments", cfg.paths.segments, "Segment ids (PMF1); computed from --image if absent");
  avg_cmd->add_option("--image", cfg.paths.image, "Input RGB PNG");
  avg_cmd->add_option("--out", cfg.paths.out, "Output label PNG")->required();
  avg_cmd->add_option("--segments-out", cfg.paths.segments_out, "Also write the segment ids used");
  add_slic_flags(avg_cmd, cfg);
  add_common(avg_cmd, cfg);
  avg_cmd->add_flag("--emit-overlays", cfg.emit_overlays, "Also write <out>.labels.png");

  auto* crf_cmd = app.add_subcommand("crf", "CRF refinement on existing superpixels");
  crf_cmd->add_option("--probs", cfg.paths.probs, "Probability map (PMF1)")->required();
  crf_cmd->add_option("--segments", cfg.paths.segments, "Segment ids (PMF1)")->required();
  crf_cmd->add_option("--image", cfg.paths.image, "RGB PNG used for gradients")->required();
  crf_cmd->add_option("--out", cfg.paths.out, "Output label PNG")->required();
  crf_cmd->add_option("--segments-out", cfg.paths.segments_out, "Also write the segment ids used");
  add_crf_flags(crf_cmd, cfg);
  add_common(crf_cmd, cfg);
  crf_cmd->add_flag("--emit-overlays", cfg.emit_overlays, "Also write label and boundary overlays");

  auto* refine_cmd = app.add_subcommand("refine", "SLIC, superpixel averaging and CRF refinement");
  refine_cmd->add_option("--probs", cfg.paths.probs, "Probability map (PMF1)")->required();
  refine_cmd->add_option("--image", cfg.paths.image, "Input RGB PNG")->required();
  refine_cmd->add_option("--out", cfg.paths.out, "Output label PNG")->required();
  refine_cmd->add_option("--segments-out", cfg.paths.segments_out, "Also write the segment ids used");
  add_slic_flags(refine_cmd, cfg);
  add_crf_flags(refine_cmd, cfg);
  add_common(refine_cmd, cfg);
  refine_cmd->add_flag("--emit-overlays", cfg.emit_overlays, "Also write label and boundary overlays");

  auto* eval_cmd = app.add_subcommand("eval", "Confusion matrix and accuracy of label PNGs");
  eval_cmd->add_option("--pred", cfg.paths.pred, "Predicted label PNG, or a directory of them")->required();
  eval_cmd->add_option("--truth", cfg.paths.truth, "Ground-truth label PNG, or a directory with matching names")
      ->required();
  eval_cmd->add_option("--n-classes", cfg.n_classes, "Number of classes (or give --class-names)");
  eval_cmd->add_option("--table", cfg.paths.table, "Write the confusion matrix as TSV");
  eval_cmd->add_option("--scene-truth", cfg.paths.scene_truth, "Scene label PNG (or directory) for the false-positive rate");
  eval_cmd->add_option("--scene-class", cfg.scene_class, "Scene class whose pixels count as negatives")
      ->capture_default_str()->check(CLI::Range(0, 254));
  eval_cmd->add_option("--bridge-labels", cfg.bridge_labels, "Predicted labels counted as bridge")
      ->delimiter(',')->capture_default_str()->check(CLI::Range(0, 254));
  eval_cmd->add_option("--mfb-out", cfg.paths.mfb_out, "Write median-frequency class weights of the truth set");
  add_common(eval_cmd, cfg);

  auto* augment_cmd = app.add_subcommand("augment", "12-channel RGB + scene-probability input (PMB1)");
  augment_cmd->add_option("--probs", cfg.paths.probs, "10-class scene probability map (PMF1)")->required();
  augment_cmd->add_option("--image", cfg.paths.image, "Input RGB PNG")->required();
  augment_cmd->add_option("--out", cfg.paths.out, "Output byte raster (PMB1)")->required();
  augment_cmd->add_option("--report", cfg.paths.report, "Write the key = value report to this file");

  auto* synth_cmd = app.add_subcommand("synth", "Synthetic scene with noisy class probabilities");
  synth_cmd->add_option("--seed", cfg.seed, "Random seed")->required();
  synth_cmd->add_option("--out-dir", cfg.paths.out_dir, "Directory for rgb.png, truth.png, probs.pmf")->required();
  synth_cmd->add_option("--height", cfg.height)->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--width", cfg.width)->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--n-classes", cfg.synth_classes)->capture_default_str()->check(CLI::Range(2, 254));
  synth_cmd->add_option("--flip-rate", cfg.flip_rate, "Fraction of pixels whose top class is swapped")
      ->capture_default_str()->check(CLI::Range(0.0, 0.999999));
  synth_cmd->add_option("--smear", cfg.smear, "Gaussian blur sigma of the probabilities")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--report", cfg.paths.report, "Report path (default <out-dir>/report.txt)");
  synth_cmd->add_flag("--emit-overlays", cfg.emit_overlays, "Also write colorized truth and argmax");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageExit;
  }

  try {
    if (*slic_cmd) cmd_slic(cfg);
    else if (*avg_cmd) cmd_avg(cfg);
    else if (*crf_cmd) cmd_crf(cfg);
    else if (*refine_cmd) cmd_refine(cfg);
    else if (*eval_cmd) cmd_eval(cfg);
    else if (*augment_cmd) cmd_augment(cfg);
    else if (*synth_cmd) cmd_synth(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(ErrorCode::IoError);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnexpectedExit;
  }
  return 0;
}
