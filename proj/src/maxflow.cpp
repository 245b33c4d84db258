#include "segrefine/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "segrefine/error.hpp"

namespace segrefine::flow {

namespace {
constexpr int kInfiniteDist = std::numeric_limits<int>::max();

void require_capacity(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::InvalidArgument, "capacities must be finite and >= 0");
  }
}
}  // namespace

BkMaxflow::BkMaxflow(std::size_t node_hint, std::size_t edge_hint) {
  nodes_.reserve(node_hint);
  arcs_.reserve(2 * edge_hint);
}

BkMaxflow::NodeId BkMaxflow::add_node(std::size_t count) {
  const auto first = static_cast<NodeId>(nodes_.size());
  nodes_.resize(nodes_.size() + count);
  return first;
}

void BkMaxflow::add_tweights(NodeId i, double source_cap, double sink_cap) {
  require_capacity(source_cap);
  require_capacity(sink_cap);
  Node& n = nodes_[static_cast<std::size_t>(i)];
  const double delta = n.tr_cap;
  if (delta > 0) source_cap += delta;
  else sink_cap -= delta;
  flow_ += std::min(source_cap, sink_cap);
  n.tr_cap = source_cap - sink_cap;
}

void BkMaxflow::add_edge(NodeId i, NodeId j, double cap, double rev_cap) {
  require_capacity(cap);
  require_capacity(rev_cap);
  const auto a = static_cast<int>(arcs_.size());
  const int b = a + 1;
  auto& ni = nodes_[static_cast<std::size_t>(i)];
  auto& nj = nodes_[static_cast<std::size_t>(j)];
  arcs_.push_back(Arc{j, ni.first, b, cap});
  arcs_.push_back(Arc{i, nj.first, a, rev_cap});
  ni.first = a;
  nj.first = b;
}

void BkMaxflow::activate(int i) {
  Node& n = nodes_[static_cast<std::size_t>(i)];
  if (!n.active) {
    n.active = true;
    active_.push_back(i);
  }
}

int BkMaxflow::next_active() {
  while (!active_.empty()) {
    const int i = active_.front();
    active_.pop_front();
    Node& n = nodes_[static_cast<std::size_t>(i)];
    n.active = false;
    if (n.parent != kNone) return i;
  }
  return kNone;
}

void BkMaxflow::augment(int middle) {
  auto node = [this](int i) -> Node& { return nodes_[static_cast<std::size_t>(i)]; };
  auto arc = [this](int a) -> Arc& { return arcs_[static_cast<std::size_t>(a)]; };

  double bottleneck = arc(middle).rcap;
  int i = tail(middle);
  for (int a = node(i).parent; a != kTerminal; a = node(i).parent) {
    bottleneck = std::min(bottleneck, arc(arc(a).sister).rcap);
    i = arc(a).head;
  }
  bottleneck = std::min(bottleneck, node(i).tr_cap);
  i = arc(middle).head;
  for (int a = node(i).parent; a != kTerminal; a = node(i).parent) {
    bottleneck = std::min(bottleneck, arc(a).rcap);
    i = arc(a).head;
  }
  bottleneck = std::min(bottleneck, -node(i).tr_cap);

  arc(arc(middle).sister).rcap += bottleneck;
  arc(middle).rcap -= bottleneck;

  i = tail(middle);
  for (int a = node(i).parent; a != kTerminal; a = node(i).parent) {
    arc(a).rcap += bottleneck;
    arc(arc(a).sister).rcap -= bottleneck;
    if (arc(arc(a).sister).rcap <= kEpsilon) {
      node(i).parent = kOrphan;
      orphans_.push_front(i);
    }
    i = arc(a).head;
  }
  node(i).tr_cap -= bottleneck;
  if (node(i).tr_cap <= kEpsilon) {
    node(i).parent = kOrphan;
    orphans_.push_front(i);
  }

  i = arc(middle).head;
  for (int a = node(i).parent; a != kTerminal; a = node(i).parent) {
    arc(arc(a).sister).rcap += bottleneck;
    arc(a).rcap -= bottleneck;
    if (arc(a).rcap <= kEpsilon) {
      node(i).parent = kOrphan;
      orphans_.push_front(i);
    }
    i = arc(a).head;
  }
  node(i).tr_cap += bottleneck;
  if (-node(i).tr_cap <= kEpsilon) {
    node(i).parent = kOrphan;
    orphans_.push_front(i);
  }

  flow_ += bottleneck;
}

// Finds a new parent for a source-tree orphan among neighbors whose path to the
// source is still intact, preferring the one closest to the terminal.
void BkMaxflow::adopt_source_orphan(int i) {
  auto node = [this](int k) -> Node& { return nodes_[static_cast<std::size_t>(k)]; };
  auto arc = [this](int a) -> Arc& { return arcs_[static_cast<std::size_t>(a)]; };

  int best = kNone;
  int best_dist = kInfiniteDist;
  for (int a0 = node(i).first; a0 != -1; a0 = arc(a0).next) {
    if (arc(arc(a0).sister).rcap <= kEpsilon) continue;
    int j = arc(a0).head;
    if (node(j).is_sink || node(j).parent == kNone) continue;

    int d = 0;
    while (true) {
      if (node(j).ts == time_) {
        d += node(j).dist;
        break;
      }
      const int a = node(j).parent;
      ++d;
      if (a == kTerminal) {
        node(j).ts = time_;
        node(j).dist = 1;
        break;
      }
      if (a == kOrphan) {
        d = kInfiniteDist;
        break;
      }
      j = arc(a).head;
    }
    if (d < kInfiniteDist) {
      if (d < best_dist) {
        best = a0;
        best_dist = d;
      }
      for (j = arc(a0).head; node(j).ts != time_; j = arc(node(j).parent).head) {
        node(j).ts = time_;
        node(j).dist = d--;
      }
    }
  }

  if (best != kNone) {
    node(i).parent = best;
    node(i).ts = time_;
    node(i).dist = best_dist + 1;
    return;
  }

  node(i).parent = kNone;
  for (int a0 = node(i).first; a0 != -1; a0 = arc(a0).next) {
    const int j = arc(a0).head;
    const int a = node(j).parent;
    if (node(j).is_sink || a == kNone) continue;
    if (arc(arc(a0).sister).rcap > kEpsilon) activate(j);
    if (a != kTerminal && a != kOrphan && arc(a).head == i) {
      node(j).parent = kOrphan;
      orphans_.push_back(j);
    }
  }
}

void BkMaxflow::adopt_sink_orphan(int i) {
  auto node = [this](int k) -> Node& { return nodes_[static_cast<std::size_t>(k)]; };
  auto arc = [this](int a) -> Arc& { return arcs_[static_cast<std::size_t>(a)]; };

  int best = kNone;
  int best_dist = kInfiniteDist;
  for (int a0 = node(i).first; a0 != -1; a0 = arc(a0).next) {
    if (arc(a0).rcap <= kEpsilon) continue;
    int j = arc(a0).head;
    if (!node(j).is_sink || node(j).parent == kNone) continue;

    int d = 0;
    while (true) {
      if (node(j).ts == time_) {
        d += node(j).dist;
        break;
      }
      const int a = node(j).parent;
      ++d;
      if (a == kTerminal) {
        node(j).ts = time_;
        node(j).dist = 1;
        break;
      }
      if (a == kOrphan) {
        d = kInfiniteDist;
        break;
      }
      j = arc(a).head;
    }
    if (d < kInfiniteDist) {
      if (d < best_dist) {
        best = a0;
        best_dist = d;
      }
      for (j = arc(a0).head; node(j).ts != time_; j = arc(node(j).parent).head) {
        node(j).ts = time_;
        node(j).dist = d--;
      }
    }
  }

  if (best != kNone) {
    node(i).parent = best;
    node(i).ts = time_;
    node(i).dist = best_dist + 1;
    return;
  }

  node(i).parent = kNone;
  for (int a0 = node(i).first; a0 != -1; a0 = arc(a0).next) {
    const int j = arc(a0).head;
    const int a = node(j).parent;
    if (!node(j).is_sink || a == kNone) continue;
    if (arc(a0).rcap > kEpsilon) activate(j);
    if (a != kTerminal && a != kOrphan && arc(a).head == i) {
      node(j).parent = kOrphan;
      orphans_.push_back(j);
    }
  }
}

double BkMaxflow::solve() {
  if (solved_) throw Error(ErrorCode::InvalidArgument, "BkMaxflow::solve called twice");
  solved_ = true;

  auto node = [this](int k) -> Node& { return nodes_[static_cast<std::size_t>(k)]; };
  auto arc = [this](int a) -> Arc& { return arcs_[static_cast<std::size_t>(a)]; };

  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    Node& n = nodes_[k];
    n.ts = 0;
    n.active = false;
    if (n.tr_cap > kEpsilon) {
      n.is_sink = false;
      n.parent = kTerminal;
      n.dist = 1;
      activate(static_cast<int>(k));
    } else if (n.tr_cap < -kEpsilon) {
      n.is_sink = true;
      n.parent = kTerminal;
      n.dist = 1;
      activate(static_cast<int>(k));
    } else {
      n.parent = kNone;
    }
  }

  int current = kNone;
  while (true) {
    int i = current;
    if (i != kNone) {
      node(i).active = false;
      if (node(i).parent == kNone) i = kNone;
    }
    if (i == kNone) {
      i = next_active();
      if (i == kNone) break;
    }

    int middle = kNone;
    if (!node(i).is_sink) {
      for (int a = node(i).first; a != -1; a = arc(a).next) {
        if (arc(a).rcap <= kEpsilon) continue;
        const int j = arc(a).head;
        Node& nj = node(j);
        if (nj.parent == kNone) {
          nj.is_sink = false;
          nj.parent = arc(a).sister;
          nj.ts = node(i).ts;
          nj.dist = node(i).dist + 1;
          activate(j);
        } else if (nj.is_sink) {
          middle = a;
          break;
        } else if (nj.ts <= node(i).ts && nj.dist > node(i).dist) {
          nj.parent = arc(a).sister;
          nj.ts = node(i).ts;
          nj.dist = node(i).dist + 1;
        }
      }
    } else {
      for (int a = node(i).first; a != -1; a = arc(a).next) {
        if (arc(arc(a).sister).rcap <= kEpsilon) continue;
        const int j = arc(a).head;
        Node& nj = node(j);
        if (nj.parent == kNone) {
          nj.is_sink = true;
          nj.parent = arc(a).sister;
          nj.ts = node(i).ts;
          nj.dist = node(i).dist + 1;
          activate(j);
        } else if (!nj.is_sink) {
          middle = arc(a).sister;
          break;
        } else if (nj.ts <= node(i).ts && nj.dist > node(i).dist) {
          nj.parent = arc(a).sister;
          nj.ts = node(i).ts;
          nj.dist = node(i).dist + 1;
        }
      }
    }

    ++time_;

    if (middle == kNone) {
      current = kNone;
      continue;
    }

    // Keep expanding from i after the augmentation; mark it so it is not queued twice.
    node(i).active = true;
    current = i;
    augment(middle);
    while (!orphans_.empty()) {
      const int o = orphans_.front();
      orphans_.pop_front();
      if (node(o).is_sink) adopt_sink_orphan(o);
      else adopt_source_orphan(o);
    }
  }
  return flow_;
}

bool BkMaxflow::on_sink_side(NodeId i) const {
  const Node& n = nodes_[static_cast<std::size_t>(i)];
  return n.parent != kNone && n.is_sink;
}

void FlowNetwork::add_edge(int from, int to, double capacity) {
  if (from < 0 || to < 0 || static_cast<std::size_t>(from) >= n_nodes_ ||
      static_cast<std::size_t>(to) >= n_nodes_) {
    throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
  }
  require_capacity(capacity);
  edges_.push_back(FlowEdge{from, to, capacity});
}

MaxFlowResult max_flow(const FlowNetwork& net, int source, int sink) {
  const auto n = net.node_count();
  if (source < 0 || sink < 0 || static_cast<std::size_t>(source) >= n ||
      static_cast<std::size_t>(sink) >= n || source == sink) {
    throw Error(ErrorCode::InvalidArgument, "source and sink must be distinct nodes");
  }

  // Inner nodes map onto solver nodes; the two terminals become implicit.
  std::vector<int> inner(n, -1);
  BkMaxflow solver(n, net.edges().size());
  for (std::size_t v = 0; v < n; ++v) {
    if (static_cast<int>(v) != source && static_cast<int>(v) != sink) {
      inner[v] = solver.add_node();
    }
  }

  double direct = 0.0;
  for (const FlowEdge& e : net.edges()) {
    if (e.from == e.to || e.to == source || e.from == sink) continue;
    if (e.from == source && e.to == sink) {
      direct += e.capacity;
    } else if (e.from == source) {
      solver.add_tweights(inner[static_cast<std::size_t>(e.to)], e.capacity, 0.0);
    } else if (e.to == sink) {
      solver.add_tweights(inner[static_cast<std::size_t>(e.from)], 0.0, e.capacity);
    } else {
      solver.add_edge(inner[static_cast<std::size_t>(e.from)], inner[static_cast<std::size_t>(e.to)],
                      e.capacity, 0.0);
    }
  }

  MaxFlowResult result;
  result.value = solver.solve() + direct;
  result.source_side.assign(n, false);
  for (std::size_t v = 0; v < n; ++v) {
    if (static_cast<int>(v) == source) result.source_side[v] = true;
    else if (inner[v] >= 0) result.source_side[v] = !solver.on_sink_side(inner[v]);
  }
  return result;
}

}  // namespace segrefine::flow
