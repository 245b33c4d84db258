#include <doctest.h>

#include <cmath>
#include <set>

#include "segrefine/color.hpp"
#include "segrefine/crf.hpp"
#include "segrefine/synth.hpp"

using namespace segrefine;

namespace {

double argmax_accuracy(const synth::SynthScene& s) {
  const auto pred = crf::pixel_argmax(s.probs);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < pred.pixel_count(); ++i) hit += pred.data()[i] == s.truth.data()[i];
  return double(hit) / double(pred.pixel_count());
}

}  // namespace

TEST_CASE("SplitMix64 reference sequence") {
  // First outputs for seed 0 from the published reference implementation.
  synth::SplitMix64 rng(0);
  CHECK(rng.next() == 0xe220a8397b1dcdafull);
  CHECK(rng.next() == 0x6e789e6aa1b965f4ull);
  CHECK(rng.next() == 0x06c45d188009454full);
}

TEST_CASE("SplitMix64 helpers stay in range") {
  synth::SplitMix64 rng(17);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(rng.below(7) < 7);
    const long r = rng.range(-3, 3);
    CHECK((r >= -3 && r <= 3));
  }
}

TEST_CASE("clean scene") {
  const auto s = synth::gen_scene(1, 64, 80, 5);
  CHECK(s.rgb.height() == 64);
  CHECK(s.rgb.width() == 80);
  CHECK(s.probs.channels() == 5);
  CHECK(argmax_accuracy(s) == 1.0);
  for (std::size_t i = 0; i < s.probs.pixel_count(); ++i) {
    double sum = 0;
    for (float v : s.probs.pixel(i)) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s.probs.pixel(i)[s.truth.data()[i]] == doctest::Approx(synth::kTrueClassMass));
  }
  std::set<int> present(s.truth.data().begin(), s.truth.data().end());
  CHECK(present.size() >= 3);
  for (std::size_t a = 0; a < s.class_colors.size(); ++a) {
    for (std::size_t b = a + 1; b < s.class_colors.size(); ++b) {
      const auto& ca = s.class_colors[a];
      const auto& cb = s.class_colors[b];
      CHECK(color::delta_e(color::srgb_to_lab(ca[0], ca[1], ca[2]), color::srgb_to_lab(cb[0], cb[1], cb[2])) >=
            synth::kMinColorDistance);
    }
  }
}

TEST_CASE("flip rate controls argmax accuracy") {
  double sum = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) sum += argmax_accuracy(synth::gen_scene(seed, 96, 96, 5, {0.05, 0.0}));
  CHECK(std::abs(sum / 20 - 0.95) <= 0.01);
}

TEST_CASE("smear keeps the simplex") {
  const auto s = synth::gen_scene(2, 40, 40, 4, {0.0, 2.0});
  for (std::size_t i = 0; i < s.probs.pixel_count(); ++i) {
    double sum = 0;
    for (float v : s.probs.pixel(i)) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("same seed, same scene") {
  const auto a = synth::gen_scene(99, 50, 70, 6, {0.1, 1.0});
  const auto b = synth::gen_scene(99, 50, 70, 6, {0.1, 1.0});
  CHECK(a.rgb == b.rgb);
  CHECK(a.truth == b.truth);
  CHECK(a.probs == b.probs);
  const auto c = synth::gen_scene(100, 50, 70, 6, {0.1, 1.0});
  CHECK_FALSE(a.truth == c.truth);
}

TEST_CASE("gen_scene argument checks") {
  CHECK_THROWS_AS(synth::gen_scene(1, 0, 5, 3), Error);
  CHECK_THROWS_AS(synth::gen_scene(1, 5, 5, 1), Error);
  CHECK_THROWS_AS(synth::gen_scene(1, 5, 5, 3, {1.0, 0.0}), Error);
  CHECK_THROWS_AS(synth::gen_scene(1, 5, 5, 3, {0.0, -1.0}), Error);
}

TEST_CASE("brute_force_crf") {
  SUBCASE("two segments prefer agreement") {
    crf::SegmentProbTable t{2, 2, {0.9, 0.1, 0.4, 0.6}, {10, 1}};
    crf::AdjacencyGraph g{2, {{0, 1, 5.0}}};
    const crf::Labeling initial{0, 1};
    const auto r = synth::brute_force_crf(t, g, initial, crf::CrfParams::defaults(2));
    CHECK(r.labels == crf::Labeling{0, 0});
    CHECK(r.energy == doctest::Approx(std::exp(-0.1 * 0.4)));
  }
  SUBCASE("no edges keeps the initial labels") {
    crf::SegmentProbTable t{3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1}, {1, 1, 1}};
    const auto r = synth::brute_force_crf(t, crf::AdjacencyGraph{3, {}}, {0, 1, 2}, crf::CrfParams::defaults(3));
    CHECK(r.labels == crf::Labeling{0, 1, 2});
    CHECK(r.energy == 0.0);
  }
  SUBCASE("instance limits") {
    auto expect_too_large = [](std::size_t n, std::size_t nc) {
      crf::UnaryCosts u{n, nc, std::vector<double>(n * nc, 0.0)};
      try {
        synth::brute_force_crf(u, crf::AdjacencyGraph{n, {}}, crf::CrfParams::defaults(nc));
        FAIL("expected InstanceTooLarge");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InstanceTooLarge);
      }
    };
    expect_too_large(11, 2);
    expect_too_large(10, 6);  // 6^10 > 1e7
  }
}

TEST_CASE("brute_force_crf small instances") {
  crf::SegmentProbTable one{1, 3, {0.1, 0.6, 0.3}, {12}};
  const auto r1 = synth::brute_force_crf(one, crf::AdjacencyGraph{1, {}}, {1}, crf::CrfParams::defaults(3));
  CHECK(r1.labels == crf::Labeling{1});
  CHECK(r1.energy == 0.0);

  crf::SegmentProbTable two{2, 2, {0.6, 0.4, 0.3, 0.7}, {5, 8}};
  const auto r2 = synth::brute_force_crf(two, crf::AdjacencyGraph{2, {}}, {0, 1}, crf::CrfParams::defaults(2));
  CHECK(r2.labels == crf::Labeling{0, 1});

  synth::SplitMix64 rng(606);
  for (int trial = 0; trial < 20; ++trial) {
    crf::SegmentProbTable t{6, 3, {}, {}};
    for (std::size_t j = 0; j < 6; ++j) {
      double s = 0;
      double row[3];
      for (double& v : row) s += (v = rng.uniform() + 1e-3);
      for (double v : row) t.probs.push_back(v / s);
      t.sizes.push_back(1 + rng.below(100));
    }
    crf::AdjacencyGraph g{6, {}};
    for (std::int32_t i = 0; i < 6; ++i) {
      for (std::int32_t j = i + 1; j < 6; ++j) {
        if (rng.uniform() < 0.5) g.edges.push_back({i, j, 0.5 + 10 * rng.uniform()});
      }
    }
    auto p = crf::CrfParams::defaults(3);
    p.weights = crf::WeightMatrix(3, {0, .5, 1, .5, 0, .5, 1, .5, 0});
    const auto initial = crf::segment_argmax(t);
    const auto bf = synth::brute_force_crf(t, g, initial, p);
    const auto ax = crf::alpha_expansion(t, g, initial, p);
    CHECK(bf.energy <= ax.final_energy + 1e-9);
    for (int k = 0; k < 100; ++k) {
      crf::Labeling l(6);
      for (auto& v : l) v = std::int32_t(rng.below(3));
      CHECK(bf.energy <= crf::total_energy(l, t, g, initial, p) + 1e-12);
    }
  }
}
