#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "segrefine/color.hpp"
#include "segrefine/crf.hpp"
#include "segrefine/synth.hpp"

using namespace segrefine;
using crf::Labeling;

namespace {

slic::SegmentMap halves(std::size_t h, std::size_t w, std::size_t split) {
  std::vector<std::int32_t> ids(h * w);
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = (i % w) < split ? 0 : 1;
  return slic::make_segment_map(Raster<std::int32_t>(h, w, 1, std::move(ids)));
}

crf::CrfParams params_for(std::size_t nc, double gamma = 10.0) {
  auto p = crf::CrfParams::defaults(nc);
  p.gamma = gamma;
  return p;
}

}  // namespace

TEST_CASE("superpixel_average matches the per-segment mean") {
  synth::SplitMix64 rng(9);
  const std::size_t h = 12, w = 15, nc = 4, ns = 7;
  ProbMap probs(h, w, nc);
  for (std::size_t i = 0; i < probs.pixel_count(); ++i) {
    double s = 0;
    for (float& v : probs.pixel(i)) s += (v = float(rng.uniform() + 0.01));
    for (float& v : probs.pixel(i)) v = float(v / s);
  }
  std::vector<std::int32_t> ids(h * w);
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = std::int32_t(i < ns ? i : rng.below(ns));
  const auto seg = slic::make_segment_map(Raster<std::int32_t>(h, w, 1, ids));
  REQUIRE(seg.n_segments == std::int32_t(ns));

  const auto table = crf::superpixel_average(probs, seg);
  const auto expect = oracle::segment_means(probs.storage(), nc, seg.ids.storage(), ns);
  REQUIRE(table.probs.size() == expect.size());
  for (std::size_t k = 0; k < expect.size(); ++k) CHECK(table.probs[k] == doctest::Approx(expect[k]).epsilon(1e-9));
  std::size_t total = 0;
  for (std::size_t j = 0; j < ns; ++j) {
    double s = 0;
    for (double v : table.row(j)) s += v;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
    total += table.sizes[j];
  }
  CHECK(total == h * w);
}

TEST_CASE("segment_argmax breaks ties toward the lowest class") {
  crf::SegmentProbTable t{3, 3, {0.4, 0.4, 0.2, 0.1, 0.3, 0.6, 1.0 / 3, 1.0 / 3, 1.0 / 3}, {1, 1, 1}};
  CHECK(crf::segment_argmax(t) == Labeling{0, 2, 0});
}

TEST_CASE("build_adjacency") {
  const auto seg = halves(10, 4, 2);
  SUBCASE("flat gradient gives one unit per straddling pair") {
    const auto g = crf::build_adjacency(seg, GradientField(10, 4, 1, 0.0), 20.0);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].i == 0);
    CHECK(g.edges[0].j == 1);
    CHECK(g.edges[0].strength == doctest::Approx(10.0));
  }
  SUBCASE("gradient attenuates the link") {
    GradientField grad(10, 4, 1, 0.0);
    for (std::size_t y = 0; y < 10; ++y) grad.at(y, 1) = 0.1;  // one side of each pair
    const auto g = crf::build_adjacency(seg, grad, 20.0);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].strength == doctest::Approx(10.0 * std::exp(-1.0)));
  }
  SUBCASE("beta = 0 counts pairs") {
    GradientField grad(10, 4, 1, 50.0);
    const auto g = crf::build_adjacency(seg, grad, 0.0);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].strength == doctest::Approx(10.0));
  }
  SUBCASE("single segment has no edges") {
    const auto one = halves(5, 5, 5);
    CHECK(crf::build_adjacency(one, GradientField(5, 5, 1, 0.0), 20.0).edges.empty());
  }
  SUBCASE("diagonal contact is not adjacency") {
    const auto s = slic::make_segment_map(Raster<std::int32_t>(2, 2, 1, {0, 1, 2, 0}));
    const auto g = crf::build_adjacency(s, GradientField(2, 2, 1, 0.0), 0.0);
    // Segment 0 occupies two diagonal corners; 1 and 2 only touch 0.
    REQUIRE(g.edges.size() == 2);
    CHECK(g.edges[0] == crf::Edge{0, 1, 2.0});
    CHECK(g.edges[1] == crf::Edge{0, 2, 2.0});
  }
}

TEST_CASE("unary cost") {
  crf::SegmentProbTable t{1, 2, {0.0, 1.0}, {100}};
  const Labeling initial{1};
  CHECK(crf::unary_cost(0, 1, t, initial, 0.1) == 0.0);
  CHECK(crf::unary_cost(0, 0, t, initial, 0.1) == doctest::Approx(100.0));
  crf::SegmentProbTable u{1, 2, {1.0, 0.0}, {100}};
  CHECK(crf::unary_cost(0, 0, u, Labeling{1}, 0.1) == doctest::Approx(90.48374180359595).epsilon(1e-12));
}

TEST_CASE("per-pixel unary sums over pixels") {
  ProbMap probs(1, 2, 2);
  probs.at(0, 0, 0) = 1.0f;
  probs.at(0, 1, 1) = 1.0f;
  const auto seg = slic::make_segment_map(Raster<std::int32_t>(1, 2, 1, {0, 0}));
  const auto u = crf::make_unary_costs_per_pixel(probs, seg, Labeling{1}, 0.1);
  CHECK(u(0, 1) == 0.0);
  CHECK(u(0, 0) == doctest::Approx(std::exp(-0.1) + 1.0));
}

TEST_CASE("total energy") {
  SUBCASE("single cut edge") {
    crf::SegmentProbTable t{2, 2, {1, 0, 1, 0}, {1, 1}};
    crf::AdjacencyGraph g{2, {{0, 1, 5.0}}};
    auto p = params_for(2);
    p.alpha = 0.0;
    const Labeling initial{0, 0};
    CHECK(crf::total_energy(initial, t, g, initial, p) == 0.0);
    // Unary: |S| exp(0) = 1; binary: 10 * 1 * 5 = 50.
    CHECK(crf::total_energy(Labeling{0, 1}, t, g, initial, p) == doctest::Approx(51.0));
  }
  SUBCASE("agrees with direct evaluation") {
    synth::SplitMix64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
      const auto in = oracle::random_instance(rng, 6, 4);
      Labeling labels(6);
      for (auto& l : labels) l = std::int32_t(rng.below(4));
      CHECK(crf::total_energy(labels, in.table(), in.graph(), in.initial, in.params()) ==
            doctest::Approx(oracle::energy(in, labels)).epsilon(1e-12));
    }
  }
}

TEST_CASE("weight matrix validation") {
  CHECK_NOTHROW(crf::WeightMatrix::bridge_components().validate());
  CHECK_NOTHROW(crf::WeightMatrix::uniform(7).validate());
  const auto& bc = crf::WeightMatrix::bridge_components();
  CHECK(bc(0, 1) == 0.5);
  CHECK(bc(2, 3) == 0.5);
  CHECK(bc(1, 4) == 1.0);

  auto expect_invalid = [](std::size_t n, std::vector<double> v) {
    try {
      crf::WeightMatrix(n, std::move(v)).validate();
      FAIL("expected InvalidWeights");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidWeights);
    }
  };
  expect_invalid(2, {0, 1, 2, 0});                   // asymmetric
  expect_invalid(2, {1, 1, 1, 0});                   // diagonal
  expect_invalid(2, {0, -1, -1, 0});                 // negative
  expect_invalid(2, {0, NAN, NAN, 0});               // non-finite
  expect_invalid(3, {0, 1, 5, 1, 0, 1, 5, 1, 0});    // 5 > 1 + 1
  CHECK_THROWS_AS(crf::WeightMatrix(2, {0, 1, 1}), Error);
}

TEST_CASE("expansion move is the optimal move") {
  synth::SplitMix64 rng(4242);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng.below(7), nc = 2 + rng.below(3);
    const auto in = oracle::random_instance(rng, n, nc);
    Labeling current(n);
    for (auto& l : current) l = std::int32_t(rng.below(nc));
    const auto expand = std::int32_t(rng.below(nc));
    const Labeling moved =
        crf::expansion_move(current, expand, in.table(), in.graph(), in.initial, in.params());
    for (std::size_t j = 0; j < n; ++j) CHECK((moved[j] == current[j] || moved[j] == expand));
    CHECK(oracle::energy(in, moved) ==
          doctest::Approx(oracle::best_move_energy(in, current, expand)).epsilon(1e-9));
  }
}

TEST_CASE("alpha_expansion") {
  SUBCASE("gamma = 0 keeps the initial labeling") {
    synth::SplitMix64 rng(1);
    const auto in = oracle::random_instance(rng, 8, 5);
    auto p = in.params();
    p.gamma = 0.0;
    const auto r = crf::alpha_expansion(in.table(), in.graph(), in.initial, p);
    CHECK(r.labels == in.initial);
    CHECK(r.final_energy == 0.0);
    CHECK(r.converged);
    CHECK(r.sweeps == 1);
  }

  SUBCASE("monotone energy and local optimality") {
    synth::SplitMix64 rng(808);
    for (int trial = 0; trial < 25; ++trial) {
      const std::size_t n = 3 + rng.below(6), nc = 2 + rng.below(3);
      const auto in = oracle::random_instance(rng, n, nc);
      auto p = in.params();
      p.max_sweeps = 50;
      const auto r = crf::alpha_expansion(in.table(), in.graph(), in.initial, p);
      REQUIRE(r.converged);
      for (std::size_t k = 1; k < r.energy_trace.size(); ++k) CHECK(r.energy_trace[k] < r.energy_trace[k - 1]);
      CHECK(r.final_energy <= r.initial_energy);
      CHECK(r.final_energy == doctest::Approx(oracle::energy(in, r.labels)).epsilon(1e-12));
      // No single expansion improves the result.
      for (std::size_t l = 0; l < nc; ++l) {
        CHECK(oracle::best_move_energy(in, r.labels, std::int32_t(l)) >=
              r.final_energy - 1e-9 * std::max(1.0, r.final_energy));
      }
      // Within twice the global optimum (max w / min w = 2 for these weights).
      const double best = oracle::global_min_energy(in);
      CHECK(r.final_energy <= 2.0 * 2.0 * best + 1e-9);
      CHECK(r.final_energy >= best - 1e-9);
    }
  }

  SUBCASE("strong smoothing flattens a weak outlier") {
    // Three segments in a row, the middle one mildly prefers class 1.
    crf::SegmentProbTable t{3, 2, {0.9, 0.1, 0.45, 0.55, 0.9, 0.1}, {10, 10, 10}};
    crf::AdjacencyGraph g{3, {{0, 1, 5.0}, {1, 2, 5.0}}};
    const Labeling initial = crf::segment_argmax(t);
    REQUIRE(initial == Labeling{0, 1, 0});
    const auto r = crf::alpha_expansion(t, g, initial, params_for(2));
    CHECK(r.labels == Labeling{0, 0, 0});
    CHECK(r.final_energy == doctest::Approx(10.0 * std::exp(-0.1 * 0.45)));
    CHECK(r.initial_energy == doctest::Approx(100.0));
  }

  SUBCASE("invalid parameters") {
    crf::SegmentProbTable t{1, 2, {0.5, 0.5}, {1}};
    crf::AdjacencyGraph g{1, {}};
    auto p = params_for(2);
    p.weights = crf::WeightMatrix(2, {0, 1, 2, 0});
    CHECK_THROWS_AS(crf::alpha_expansion(t, g, Labeling{0}, p), Error);
    p = params_for(2);
    p.alpha = -1;
    CHECK_THROWS_AS(crf::alpha_expansion(t, g, Labeling{0}, p), Error);
    p = params_for(3);
    CHECK_THROWS_AS(crf::alpha_expansion(t, g, Labeling{0}, p), Error);
  }
}

TEST_CASE("brute force agrees with exhaustive search") {
  synth::SplitMix64 rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    const auto in = oracle::random_instance(rng, 5, 3);
    const auto bf = synth::brute_force_crf(in.table(), in.graph(), in.initial, in.params());
    CHECK(bf.energy == doctest::Approx(oracle::global_min_energy(in)).epsilon(1e-12));
    CHECK(bf.energy == doctest::Approx(oracle::energy(in, bf.labels)).epsilon(1e-12));
  }
}

TEST_CASE("refine on a synthetic scene") {
  const auto scene = synth::gen_scene(12, 120, 120, 5, {0.1, 0.0});
  slic::SlicParams sp;
  sp.target_segments = 150;
  sp.iterations = 10;
  const auto r = crf::refine(scene.probs, scene.rgb, sp, crf::CrfParams::defaults(5));
  CHECK(r.labels.height() == 120);
  CHECK(r.crf.final_energy <= r.crf.initial_energy);
  std::size_t raw = 0, refined = 0;
  const auto argmax = crf::pixel_argmax(scene.probs);
  for (std::size_t i = 0; i < argmax.pixel_count(); ++i) {
    raw += argmax.data()[i] == scene.truth.data()[i];
    refined += r.labels.data()[i] == scene.truth.data()[i];
  }
  CHECK(refined > raw);

  SUBCASE("gamma = 0 reproduces the averaged labels") {
    auto p = crf::CrfParams::defaults(5);
    p.gamma = 0;
    const auto r0 = crf::refine_segments(scene.probs, scene.rgb, r.segments, p);
    CHECK(r0.labels == r0.averaged_labels);
    CHECK(r0.averaged_labels == r.averaged_labels);
  }

  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(crf::refine(ProbMap(10, 10, 5), scene.rgb, sp, {}), Error);
  }
}

TEST_CASE("averaging examples") {
  SUBCASE("three pixels") {
    ProbMap probs(1, 3, 2);
    const float p0[3] = {0.2f, 0.4f, 0.6f};
    for (std::size_t x = 0; x < 3; ++x) {
      probs.at(0, x, 0) = p0[x];
      probs.at(0, x, 1) = 1.0f - p0[x];
    }
    const auto t = crf::superpixel_average(probs, slic::make_segment_map(Raster<std::int32_t>(1, 3, 1, {0, 0, 0})));
    CHECK(t.probs[0] == doctest::Approx(0.4).epsilon(1e-7));
    CHECK(t.sizes[0] == 3);
  }
  SUBCASE("constant vector") {
    ProbMap probs(4, 4, 3);
    for (std::size_t i = 0; i < 16; ++i) {
      probs.pixel(i)[0] = 0.25f;
      probs.pixel(i)[1] = 0.5f;
      probs.pixel(i)[2] = 0.25f;
    }
    const auto t = crf::superpixel_average(probs, halves(4, 4, 1));
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(t.row(j)[0] == 0.25);
      CHECK(t.row(j)[1] == 0.5);
      CHECK(t.row(j)[2] == 0.25);
    }
  }
  SUBCASE("argmax rows") {
    crf::SegmentProbTable t{2, 3, {0.1, 0.7, 0.2, 0.5, 0.5, 0.0}, {1, 1}};
    CHECK(crf::segment_argmax(t) == Labeling{1, 0});
  }
}

TEST_CASE("adjacency strength at beta = 0 counts differing 4-neighbor pairs") {
  synth::SplitMix64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t h = 3 + rng.below(10), w = 3 + rng.below(10);
    std::vector<std::int32_t> ids(h * w);
    for (auto& v : ids) v = std::int32_t(rng.below(5));
    const auto seg = slic::make_segment_map(Raster<std::int32_t>(h, w, 1, ids));
    std::size_t pairs = 0;
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        if (x + 1 < w) pairs += seg.ids.at(y, x) != seg.ids.at(y, x + 1);
        if (y + 1 < h) pairs += seg.ids.at(y, x) != seg.ids.at(y + 1, x);
      }
    }
    const auto g = crf::build_adjacency(seg, GradientField(h, w, 1, 7.0), 0.0);
    double total = 0;
    for (const auto& e : g.edges) {
      CHECK(e.i < e.j);
      total += e.strength;
    }
    CHECK(total == double(pairs));
  }
}

TEST_CASE("unary and energy examples") {
  crf::SegmentProbTable t{2, 2, {0.3, 0.7, 0.8, 0.2}, {42, 5}};
  const Labeling initial{1, 0};
  CHECK(crf::unary_cost(0, 0, t, initial, 0.0) == 42.0);

  // Labels (A, B) = their initials, one edge g = 10, gamma = 10, w = 0.5.
  crf::AdjacencyGraph g{2, {{0, 1, 10.0}}};
  auto p = params_for(2);
  p.weights = crf::WeightMatrix(2, {0, 0.5, 0.5, 0});
  CHECK(crf::total_energy(initial, t, g, initial, p) == doctest::Approx(50.0));
  // Same labels everywhere at the initial labeling: zero.
  crf::SegmentProbTable same{2, 2, {0.3, 0.7, 0.1, 0.9}, {4, 4}};
  CHECK(crf::total_energy(Labeling{1, 1}, same, g, Labeling{1, 1}, p) == 0.0);
}

TEST_CASE("expansion move examples") {
  synth::SplitMix64 rng(90);
  const auto in = oracle::random_instance(rng, 5, 3);
  const Labeling all_two(5, 2);
  CHECK(crf::expansion_move(all_two, 2, in.table(), in.graph(), in.initial, in.params()) == all_two);

  // Two segments, current (A, B), expanding A; the move switches iff that is cheaper.
  for (double g : {0.1, 1.0, 5.0, 50.0}) {
    crf::SegmentProbTable t{2, 2, {0.9, 0.1, 0.45, 0.55}, {10, 10}};
    const Labeling initial{0, 1};
    crf::AdjacencyGraph graph{2, {{0, 1, g}}};
    const auto p = params_for(2);
    const auto moved = crf::expansion_move(initial, 0, t, graph, initial, p);
    const double keep = crf::total_energy(initial, t, graph, initial, p);
    const double sw = crf::total_energy(Labeling{0, 0}, t, graph, initial, p);
    CHECK(moved == (sw < keep ? Labeling{0, 0} : Labeling{0, 1}));
  }
}

TEST_CASE("alpha_expansion trivial cases") {
  crf::SegmentProbTable one{1, 3, {0.2, 0.5, 0.3}, {9}};
  const auto r1 = crf::alpha_expansion(one, crf::AdjacencyGraph{1, {}}, Labeling{1}, params_for(3));
  CHECK(r1.labels == Labeling{1});
  CHECK(r1.final_energy == 0.0);

  SUBCASE("gamma = 0 on random instances") {
    synth::SplitMix64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
      const auto in = oracle::random_instance(rng, 1 + rng.below(8), 2 + rng.below(4));
      auto p = in.params();
      p.gamma = 0;
      CHECK(crf::alpha_expansion(in.table(), in.graph(), in.initial, p).labels == in.initial);
    }
  }

  SUBCASE("1-expansion optimality via expansion_move") {
    synth::SplitMix64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
      const auto in = oracle::random_instance(rng, 2 + rng.below(20), 2 + rng.below(4));
      const auto r = crf::alpha_expansion(in.table(), in.graph(), in.initial, in.params());
      if (!r.converged) continue;
      for (std::size_t l = 0; l < in.n_classes; ++l) {
        const auto moved = crf::expansion_move(r.labels, std::int32_t(l), in.table(), in.graph(), in.initial, in.params());
        CHECK(oracle::energy(in, moved) == doctest::Approx(r.final_energy).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("bridge weight matrix binding triangle") {
  const auto& w = crf::WeightMatrix::bridge_components();
  // Some triple must be tight: 0.5 + 0.5 = 1.
  bool binding = false;
  for (std::size_t a = 0; a < 5; ++a) {
    for (std::size_t b = 0; b < 5; ++b) {
      for (std::size_t c = 0; c < 5; ++c) {
        CHECK(w(a, c) <= w(a, b) + w(b, c));
        binding = binding || (a != b && b != c && a != c && w(a, c) == w(a, b) + w(b, c));
      }
      CHECK(w(a, b) == w(b, a));
    }
    CHECK(w(a, a) == 0.0);
  }
  CHECK(binding);
}

TEST_CASE("one-hot single-class input refines to a uniform map") {
  const auto scene = synth::gen_scene(8, 48, 48, 3);
  ProbMap probs(48, 48, 3, 0.0f);
  for (std::size_t i = 0; i < probs.pixel_count(); ++i) probs.pixel(i)[2] = 1.0f;
  slic::SlicParams sp;
  sp.target_segments = 30;
  const auto r = crf::refine(probs, scene.rgb, sp, crf::CrfParams::defaults(3));
  for (auto v : r.labels.data()) CHECK(v == 2);
  CHECK(r.crf.final_energy == 0.0);
}
