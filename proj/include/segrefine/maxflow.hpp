#pragma once

#include <cstddef>
#include <deque>
#include <vector>

namespace segrefine::flow {

/// Boykov-Kolmogorov max-flow on a graph with implicit source and sink terminals.
///
/// Nodes are connected to the terminals through t-links (add_tweights) and to each
/// other through pairs of opposing arcs (add_edge). solve() grows a search tree
/// from each terminal, augments along the path found where the trees touch, and
/// re-adopts the orphans the augmentation creates. Trees are reused across
/// augmentations, which pays off on the short-path graphs that vision energies
/// produce. Residual capacities at or below `kEpsilon` count as saturated.
class BkMaxflow {
 public:
  using NodeId = int;
  static constexpr double kEpsilon = 1e-12;

  BkMaxflow() = default;
  BkMaxflow(std::size_t node_hint, std::size_t edge_hint);

  /// Adds `count` nodes, returning the id of the first.
  NodeId add_node(std::size_t count = 1);
  std::size_t node_count() const noexcept { return nodes_.size(); }

  /// Adds capacity source->node and node->sink. May be called repeatedly.
  void add_tweights(NodeId node, double source_cap, double sink_cap);

  /// Adds arc i->j with capacity `cap` and arc j->i with capacity `rev_cap`.
  void add_edge(NodeId i, NodeId j, double cap, double rev_cap);

  /// Computes the maximum flow; call once after building the graph.
  double solve();

  /// True if the node is in the sink search tree after solve(). Nodes left in
  /// neither tree belong to the source side of the reported cut.
  bool on_sink_side(NodeId node) const;

  double flow() const noexcept { return flow_; }

 private:
  static constexpr int kNone = -1;
  static constexpr int kTerminal = -2;
  static constexpr int kOrphan = -3;

  struct Arc {
    int head;
    int next;
    int sister;
    double rcap;
  };

  struct Node {
    int first = -1;
    int parent = kNone;
    long ts = 0;
    int dist = 0;
    bool is_sink = false;
    bool active = false;
    double tr_cap = 0.0;
  };

  void activate(int i);
  int next_active();
  void augment(int middle);
  void adopt_source_orphan(int i);
  void adopt_sink_orphan(int i);
  int tail(int arc) const { return arcs_[static_cast<std::size_t>(arcs_[static_cast<std::size_t>(arc)].sister)].head; }

  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::deque<int> active_;
  std::deque<int> orphans_;
  double flow_ = 0.0;
  long time_ = 0;
  bool solved_ = false;
};

struct FlowEdge {
  int from;
  int to;
  double capacity;
};

/// Directed network with explicit source and sink nodes.
class FlowNetwork {
 public:
  explicit FlowNetwork(std::size_t n_nodes) : n_nodes_(n_nodes) {}

  void add_edge(int from, int to, double capacity);
  std::size_t node_count() const noexcept { return n_nodes_; }
  const std::vector<FlowEdge>& edges() const noexcept { return edges_; }

 private:
  std::size_t n_nodes_;
  std::vector<FlowEdge> edges_;
};

struct MaxFlowResult {
  double value = 0.0;
  std::vector<bool> source_side;  ///< min-cut partition; source_side[source] is true
};

/// Exact maximum s-t flow and a corresponding minimum cut.
MaxFlowResult max_flow(const FlowNetwork& network, int source, int sink);

}  // namespace segrefine::flow
