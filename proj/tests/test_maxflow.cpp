#include <doctest.h>

#include "oracles.hpp"
#include "segrefine/maxflow.hpp"
#include "segrefine/synth.hpp"

using namespace segrefine;

TEST_CASE("single edge") {
  flow::FlowNetwork net(2);
  net.add_edge(0, 1, 3.0);
  const auto r = flow::max_flow(net, 0, 1);
  CHECK(r.value == doctest::Approx(3.0));
  CHECK(r.source_side[0]);
  CHECK_FALSE(r.source_side[1]);
}

TEST_CASE("diamond network") {
  // s=0, a=1, b=2, t=3; the cut {s} has capacity 5.
  flow::FlowNetwork net(4);
  net.add_edge(0, 1, 3.0);
  net.add_edge(0, 2, 2.0);
  net.add_edge(1, 3, 2.0);
  net.add_edge(2, 3, 3.0);
  net.add_edge(1, 2, 1.0);
  const auto r = flow::max_flow(net, 0, 3);
  CHECK(r.value == doctest::Approx(5.0));
  // {s} and {s, a} are both minimum cuts; either is acceptable.
  const std::vector<oracle::Edge> edges{{0, 1, 3}, {0, 2, 2}, {1, 3, 2}, {2, 3, 3}, {1, 2, 1}};
  CHECK(oracle::cut_capacity(edges, r.source_side) == doctest::Approx(5.0));
  CHECK(r.source_side[0]);
  CHECK_FALSE(r.source_side[3]);
}

TEST_CASE("disconnected sink carries no flow") {
  flow::FlowNetwork net(4);
  net.add_edge(0, 1, 7.0);
  net.add_edge(2, 3, 7.0);
  const auto r = flow::max_flow(net, 0, 3);
  CHECK(r.value == 0.0);
  CHECK(r.source_side[0]);
  CHECK_FALSE(r.source_side[3]);
}

TEST_CASE("direct source-sink edge and ignored arcs") {
  flow::FlowNetwork net(3);
  net.add_edge(0, 2, 1.5);
  net.add_edge(0, 1, 2.0);
  net.add_edge(1, 2, 1.0);
  net.add_edge(2, 0, 9.0);  // into the source
  net.add_edge(1, 1, 4.0);  // self loop
  CHECK(flow::max_flow(net, 0, 2).value == doctest::Approx(2.5));
}

TEST_CASE("random networks agree with Edmonds-Karp") {
  synth::SplitMix64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + int(rng.below(14));
    flow::FlowNetwork net{std::size_t(n)};
    std::vector<oracle::Edge> edges;
    const int m = int(rng.below(std::uint64_t(n * n)));
    for (int k = 0; k < m; ++k) {
      const int a = int(rng.below(std::uint64_t(n))), b = int(rng.below(std::uint64_t(n)));
      // Mix integer and fractional capacities.
      const double cap = rng.uniform() < 0.5 ? double(rng.below(10)) : 10.0 * rng.uniform();
      net.add_edge(a, b, cap);
      edges.push_back({a, b, cap});
    }
    const int s = 0, t = n - 1;
    const auto r = flow::max_flow(net, s, t);
    const double expected = oracle::ford_fulkerson(n, edges, s, t);
    CHECK(r.value == doctest::Approx(expected).epsilon(1e-9));
    REQUIRE(r.source_side.size() == std::size_t(n));
    CHECK(r.source_side[std::size_t(s)]);
    CHECK_FALSE(r.source_side[std::size_t(t)]);
    // The reported partition is a minimum cut.
    std::vector<oracle::Edge> inner;
    for (const auto& e : edges) {
      if (e.to != s && e.from != t) inner.push_back(e);
    }
    CHECK(oracle::cut_capacity(inner, r.source_side) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("BkMaxflow terminal weights accumulate") {
  flow::BkMaxflow g;
  const auto a = g.add_node(2);
  const auto b = a + 1;
  g.add_tweights(a, 4.0, 1.0);
  g.add_tweights(a, 0.0, 2.0);  // a: source 4, sink 3
  g.add_tweights(b, 0.0, 5.0);
  g.add_edge(a, b, 2.0, 0.0);
  // Paths: s->a->t (3), s->a->b->t (1 left over on s->a).
  CHECK(g.solve() == doctest::Approx(4.0));
  CHECK(g.on_sink_side(a));
  CHECK(g.on_sink_side(b));
}

TEST_CASE("BkMaxflow on grids matches Edmonds-Karp") {
  synth::SplitMix64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const int h = 2 + int(rng.below(5)), w = 2 + int(rng.below(5));
    const int n = h * w;
    flow::BkMaxflow g;
    g.add_node(std::size_t(n));
    std::vector<oracle::Edge> edges;  // oracle nodes: 0..n-1, source n, sink n+1
    for (int i = 0; i < n; ++i) {
      const double cs = 5.0 * rng.uniform(), ct = 5.0 * rng.uniform();
      g.add_tweights(i, cs, ct);
      edges.push_back({n, i, cs});
      edges.push_back({i, n + 1, ct});
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int i = y * w + x;
        if (x + 1 < w) {
          const double c = 3.0 * rng.uniform(), r = 3.0 * rng.uniform();
          g.add_edge(i, i + 1, c, r);
          edges.push_back({i, i + 1, c});
          edges.push_back({i + 1, i, r});
        }
        if (y + 1 < h) {
          const double c = 3.0 * rng.uniform(), r = 3.0 * rng.uniform();
          g.add_edge(i, i + w, c, r);
          edges.push_back({i, i + w, c});
          edges.push_back({i + w, i, r});
        }
      }
    }
    const double expected = oracle::ford_fulkerson(n + 2, edges, n, n + 1);
    CHECK(g.solve() == doctest::Approx(expected).epsilon(1e-9));
    std::vector<bool> side(std::size_t(n + 2));
    for (int i = 0; i < n; ++i) side[std::size_t(i)] = !g.on_sink_side(i);
    side[std::size_t(n)] = true;
    side[std::size_t(n + 1)] = false;
    CHECK(oracle::cut_capacity(edges, side) == doctest::Approx(expected).epsilon(1e-9));
  }
}
