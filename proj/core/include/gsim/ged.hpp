#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsim/graph.hpp"

namespace gsim {

/// Unit-cost edit operations. Node ids live in a stable working id space:
/// nodes of the source graph keep their ids, inserted nodes get ids N1,
/// N1+1, ... in insertion order, and deleted nodes are compacted away only
/// when the path has been applied completely.
struct EditOp {
  enum class Kind { kNodeInsert, kNodeDelete, kNodeRelabel, kEdgeInsert, kEdgeDelete };
  Kind kind;
  NodeId u = -1;     // node (node ops) or first endpoint (edge ops)
  NodeId v = -1;     // second endpoint for edge ops
  Label label = -1;  // new label for insert/relabel

  friend bool operator==(const EditOp&, const EditOp&) = default;
};

std::string to_string(EditOp::Kind kind);
EditOp::Kind edit_kind_from_string(const std::string& s);

/// Outcome of the exact search. When `exact` is false the search ran out of
/// node expansions and `cost`/`path`/`mapping` describe the best complete
/// solution found so far (an upper bound).
struct GedResult {
  int cost = 0;
  std::vector<EditOp> path;
  /// mapping[u] = node of g2 matched to g1 node u, or -1 when u is deleted.
  /// g2 nodes absent from the image are inserted.
  std::vector<NodeId> mapping;
  bool exact = true;
  std::uint64_t expansions = 0;
};

inline constexpr std::uint64_t kDefaultGedBudget = 5'000'000;
inline constexpr NodeId kMaxExactGedNodes = 32;

/// Exact GED by best-first (A*) search over partial node assignments.
///
/// Nodes of g1 are assigned in a fixed order (degree descending, then id);
/// each step maps the next node to an unused g2 node or deletes it. The
/// frontier is ordered by (f ascending, g descending, assignment vector
/// lexicographic with deletion ranked after every real target). The
/// heuristic is the label-multiset bound applied to the unassigned part, see
/// lower_bound_labels().
///
/// Throws std::invalid_argument for invalid graphs or graphs with more than
/// kMaxExactGedNodes nodes.
GedResult ged_exact(const Graph& g1, const Graph& g2, std::uint64_t budget = kDefaultGedBudget);

/// Enumerates every injective partial map from g1 into g2 and returns the
/// cheapest induced edit cost. Independent of ged_exact; limited to graphs
/// of at most 6 nodes.
int ged_bruteforce(const Graph& g1, const Graph& g2);

/// Admissible lower bound on GED:
///
///     max(N1, N2) - |L1 ∩ L2|  +  | |E1| - |E2| |
///
/// where L1, L2 are the node-label multisets. Proof sketch: any edit path
/// induces a partial node map. Each g1 node is either matched (cost 0 only
/// when labels agree) or deleted, each unmatched g2 node is inserted, so
/// node costs are at least max(N1, N2) minus the number of label-preserving
/// matches, which cannot exceed the multiset intersection. Edge operations
/// are disjoint from node operations; each matched edge pair accounts for
/// one edge on either side and every other edge costs 1, so edge costs are
/// at least the difference of edge counts.
int lower_bound_labels(const Graph& g1, const Graph& g2);

/// Unit edit cost induced by a partial node map (mapping[u] in g2 or -1):
/// relabeled matched nodes + deleted + inserted nodes + edges of either graph
/// that have no counterpart under the map.
int mapping_cost(const Graph& g1, const Graph& g2, const std::vector<NodeId>& mapping);

/// The edit path realizing `mapping`, ordered relabels, edge deletions, node
/// deletions, node insertions, edge insertions.
std::vector<EditOp> edit_path_from_mapping(const Graph& g1, const Graph& g2,
                                           const std::vector<NodeId>& mapping);

/// Replays a path onto g and compacts deleted nodes. Throws on an op that
/// does not apply (missing node or edge, duplicate edge).
Graph apply_edit_path(const Graph& g, const std::vector<EditOp>& path);

/// GED normalized by the mean node count.
double nged(int cost, NodeId n1, NodeId n2);

/// exp(-nged); throws on negative input.
double similarity(double nged_value);

}  // namespace gsim
