#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gsim {

using NodeId = std::int32_t;
using Label = std::int32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Labeled undirected simple graph. Nodes are 0..N-1, `labels[i]` indexes
/// the dataset alphabet, and `edges` holds (u, v) with u < v in sorted order.
///
/// The struct itself does not enforce anything; use validate() or
/// make_graph() when the input is untrusted.
struct Graph {
  std::string id;
  std::vector<Label> labels;
  std::vector<Edge> edges;

  NodeId num_nodes() const { return static_cast<NodeId>(labels.size()); }
  std::size_t num_edges() const { return edges.size(); }
  bool has_edge(NodeId u, NodeId v) const;
  /// Sorted neighbor lists.
  std::vector<std::vector<NodeId>> adjacency() const;
  std::vector<int> degrees() const;

  friend bool operator==(const Graph&, const Graph&) = default;
};

/// Returns every violated invariant, empty when the graph is valid.
std::vector<std::string> validate(const Graph& g);

/// Orders each edge as (min, max) and sorts the edge list. Does not remove
/// duplicates or self-loops; validate() reports those.
void normalize_edges(Graph& g);

/// Normalizes and validates; throws std::invalid_argument listing violations.
Graph make_graph(std::string id, std::vector<Label> labels, std::vector<Edge> edges);

/// Erdos-Renyi G(n, p) with labels drawn uniformly from [0, alphabet_size).
/// Labels are drawn first (node order), then each pair (u < v) in
/// lexicographic order is kept when uniform() < p.
Graph generate_er(NodeId n, double p, int alphabet_size, std::uint64_t seed);

struct PerturbResult {
  Graph graph;
  int applied = 0;  // edit operations actually performed (<= k)
  int skipped = 0;  // steps where no operator fit the remaining budget
};

/// Applies k random unit-cost edits. Each step picks an operator kind
/// uniformly among those applicable (node insert/delete/relabel, edge
/// insert/delete), then an operand uniformly. Deleting a node first deletes
/// its incident edges, each counted against k, so it is only applicable
/// while 1 + degree edits remain. The result has true GED <= k from g.
PerturbResult perturb(const Graph& g, int k, int alphabet_size, std::uint64_t seed);

/// Node i of g becomes node pi[i] of the result.
Graph permute(const Graph& g, const std::vector<NodeId>& pi);

/// Uniform random permutation of 0..n-1.
std::vector<NodeId> random_permutation(NodeId n, std::uint64_t seed);

/// Induced subgraph of a parent graph plus the embedding of its nodes.
struct SubgraphExtraction {
  std::string parent_id;
  Graph subgraph;
  std::vector<NodeId> node_map;  // subgraph node -> parent node
};

/// Induced subgraph on `nodes` (ascending parent ids). Subgraph node i is
/// parent node nodes[i].
SubgraphExtraction induced_subgraph(const Graph& g, std::vector<NodeId> nodes);

/// Checks injectivity of node_map and the induced-edge property.
std::vector<std::string> validate_extraction(const Graph& parent, const SubgraphExtraction& ex);

/// Simple random walk of max(1, floor(N/2)) steps from a uniform start node;
/// each step moves to a uniform neighbor and halts at an isolated node. The
/// extraction is the subgraph induced by the distinct visited nodes.
SubgraphExtraction random_walk_subgraph(const Graph& g, std::uint64_t seed);

/// Deletes every parent edge covered by the extraction's subgraph, then all
/// isolated nodes, renumbering survivors in order. Returns nullopt when no
/// node survives.
std::optional<Graph> remaining_subgraph(const Graph& g, const SubgraphExtraction& ex);

}  // namespace gsim
