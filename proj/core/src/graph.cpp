#include "gsim/graph.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gsim/rng.hpp"

namespace gsim {

bool Graph::has_edge(NodeId u, NodeId v) const {
  const Edge e = u < v ? Edge{u, v} : Edge{v, u};
  return std::binary_search(edges.begin(), edges.end(), e);
}

std::vector<std::vector<NodeId>> Graph::adjacency() const {
  std::vector<std::vector<NodeId>> adj(labels.size());
  for (const auto& [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
  return adj;
}

std::vector<int> Graph::degrees() const {
  std::vector<int> deg(labels.size(), 0);
  for (const auto& [u, v] : edges) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

std::vector<std::string> validate(const Graph& g) {
  std::vector<std::string> violations;
  const NodeId n = g.num_nodes();
  if (n < 1) violations.emplace_back("graph has no nodes");
  for (NodeId i = 0; i < n; ++i) {
    if (g.labels[i] < 0) violations.push_back("negative label at node " + std::to_string(i));
  }
  std::set<Edge> seen;
  for (const auto& [u, v] : g.edges) {
    const std::string tag = "(" + std::to_string(u) + "," + std::to_string(v) + ")";
    if (u == v) violations.push_back("self-loop " + tag);
    if (u < 0 || v < 0 || u >= n || v >= n) violations.push_back("endpoint out of range " + tag);
    if (u > v) violations.push_back("edge not normalized (u > v) " + tag);
    const Edge key{std::min(u, v), std::max(u, v)};
    if (!seen.insert(key).second) violations.push_back("duplicate edge " + tag);
  }
  if (!std::is_sorted(g.edges.begin(), g.edges.end())) violations.emplace_back("edges not sorted");
  return violations;
}

void normalize_edges(Graph& g) {
  for (auto& [u, v] : g.edges) {
    if (u > v) std::swap(u, v);
  }
  std::sort(g.edges.begin(), g.edges.end());
}

Graph make_graph(std::string id, std::vector<Label> labels, std::vector<Edge> edges) {
  Graph g{std::move(id), std::move(labels), std::move(edges)};
  normalize_edges(g);
  if (auto v = validate(g); !v.empty()) {
    std::ostringstream msg;
    msg << "invalid graph '" << g.id << "':";
    for (const auto& s : v) msg << ' ' << s << ';';
    throw std::invalid_argument(msg.str());
  }
  return g;
}

Graph generate_er(NodeId n, double p, int alphabet_size, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_er: n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("generate_er: p must lie in [0, 1]");
  if (alphabet_size < 1) throw std::invalid_argument("generate_er: alphabet_size must be >= 1");
  SplitMix64 rng(seed);
  Graph g;
  g.labels.resize(n);
  for (auto& l : g.labels) l = static_cast<Label>(rng.below(alphabet_size));
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (rng.uniform() < p) g.edges.emplace_back(u, v);
    }
  }
  return g;
}

namespace {

enum class EditKind { kNodeInsert, kNodeDelete, kNodeRelabel, kEdgeInsert, kEdgeDelete };

Graph delete_node(const Graph& g, NodeId victim) {
  Graph out;
  out.id = g.id;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    if (i != victim) out.labels.push_back(g.labels[i]);
  }
  const auto shift = [victim](NodeId x) { return x > victim ? x - 1 : x; };
  for (const auto& [u, v] : g.edges) {
    if (u != victim && v != victim) out.edges.emplace_back(shift(u), shift(v));
  }
  return out;
}

}  // namespace

PerturbResult perturb(const Graph& g, int k, int alphabet_size, std::uint64_t seed) {
  if (k < 0) throw std::invalid_argument("perturb: k must be >= 0");
  if (alphabet_size < 1) throw std::invalid_argument("perturb: alphabet_size must be >= 1");
  SplitMix64 rng(seed);
  PerturbResult res{g, 0, 0};
  Graph& cur = res.graph;
  int budget = k;
  while (budget > 0) {
    const NodeId n = cur.num_nodes();
    const auto max_edges = static_cast<std::size_t>(n) * (n - 1) / 2;
    const auto deg = cur.degrees();
    std::vector<NodeId> deletable;
    if (n >= 2) {
      for (NodeId i = 0; i < n; ++i) {
        if (1 + deg[i] <= budget) deletable.push_back(i);
      }
    }
    std::vector<EditKind> kinds{EditKind::kNodeInsert};
    if (!deletable.empty()) kinds.push_back(EditKind::kNodeDelete);
    if (alphabet_size >= 2) kinds.push_back(EditKind::kNodeRelabel);
    if (cur.num_edges() < max_edges) kinds.push_back(EditKind::kEdgeInsert);
    if (cur.num_edges() > 0) kinds.push_back(EditKind::kEdgeDelete);

    switch (kinds[rng.below(kinds.size())]) {
      case EditKind::kNodeInsert:
        cur.labels.push_back(static_cast<Label>(rng.below(alphabet_size)));
        budget -= 1;
        res.applied += 1;
        break;
      case EditKind::kNodeDelete: {
        const NodeId victim = deletable[rng.below(deletable.size())];
        budget -= 1 + deg[victim];
        res.applied += 1 + deg[victim];
        cur = delete_node(cur, victim);
        break;
      }
      case EditKind::kNodeRelabel: {
        const auto node = static_cast<NodeId>(rng.below(n));
        // Uniform over the other alphabet_size - 1 labels.
        auto lbl = static_cast<Label>(rng.below(alphabet_size - 1));
        if (lbl >= cur.labels[node]) ++lbl;
        cur.labels[node] = lbl;
        budget -= 1;
        res.applied += 1;
        break;
      }
      case EditKind::kEdgeInsert: {
        std::vector<Edge> absent;
        for (NodeId u = 0; u < n; ++u) {
          for (NodeId v = u + 1; v < n; ++v) {
            if (!cur.has_edge(u, v)) absent.emplace_back(u, v);
          }
        }
        cur.edges.push_back(absent[rng.below(absent.size())]);
        std::sort(cur.edges.begin(), cur.edges.end());
        budget -= 1;
        res.applied += 1;
        break;
      }
      case EditKind::kEdgeDelete:
        cur.edges.erase(cur.edges.begin() + static_cast<std::ptrdiff_t>(rng.below(cur.num_edges())));
        budget -= 1;
        res.applied += 1;
        break;
    }
  }
  // Node insertion is always applicable, so every step finds an operator;
  // `skipped` stays part of the result for callers that cap graph size.
  return res;
}

Graph permute(const Graph& g, const std::vector<NodeId>& pi) {
  const NodeId n = g.num_nodes();
  if (static_cast<NodeId>(pi.size()) != n) throw std::invalid_argument("permute: size mismatch");
  std::vector<bool> hit(n, false);
  for (NodeId x : pi) {
    if (x < 0 || x >= n || hit[x]) throw std::invalid_argument("permute: pi is not a bijection");
    hit[x] = true;
  }
  Graph out;
  out.id = g.id;
  out.labels.resize(n);
  for (NodeId i = 0; i < n; ++i) out.labels[pi[i]] = g.labels[i];
  out.edges.reserve(g.edges.size());
  for (const auto& [u, v] : g.edges) out.edges.emplace_back(pi[u], pi[v]);
  normalize_edges(out);
  return out;
}

std::vector<NodeId> random_permutation(NodeId n, std::uint64_t seed) {
  std::vector<NodeId> pi(n);
  for (NodeId i = 0; i < n; ++i) pi[i] = i;
  SplitMix64 rng(seed);
  rng.shuffle(std::span<NodeId>(pi));
  return pi;
}

SubgraphExtraction induced_subgraph(const Graph& g, std::vector<NodeId> nodes) {
  std::sort(nodes.begin(), nodes.end());
  std::vector<NodeId> local(g.num_nodes(), -1);
  SubgraphExtraction ex;
  ex.parent_id = g.id;
  ex.subgraph.id = g.id + "/sub";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    local[nodes[i]] = static_cast<NodeId>(i);
    ex.subgraph.labels.push_back(g.labels[nodes[i]]);
  }
  for (const auto& [u, v] : g.edges) {
    if (local[u] >= 0 && local[v] >= 0) ex.subgraph.edges.emplace_back(local[u], local[v]);
  }
  normalize_edges(ex.subgraph);
  ex.node_map = std::move(nodes);
  return ex;
}

std::vector<std::string> validate_extraction(const Graph& parent, const SubgraphExtraction& ex) {
  std::vector<std::string> out;
  const auto& sub = ex.subgraph;
  if (ex.parent_id != parent.id) out.emplace_back("parent id mismatch");
  if (ex.node_map.size() != sub.labels.size()) {
    out.emplace_back("node_map size differs from subgraph node count");
    return out;
  }
  std::set<NodeId> image;
  for (NodeId x : ex.node_map) {
    if (x < 0 || x >= parent.num_nodes()) {
      out.emplace_back("node_map entry out of range");
      return out;
    }
    if (!image.insert(x).second) out.emplace_back("node_map not injective");
  }
  for (NodeId i = 0; i < sub.num_nodes(); ++i) {
    if (sub.labels[i] != parent.labels[ex.node_map[i]]) {
      out.push_back("label mismatch at subgraph node " + std::to_string(i));
    }
  }
  for (NodeId a = 0; a < sub.num_nodes(); ++a) {
    for (NodeId b = a + 1; b < sub.num_nodes(); ++b) {
      if (sub.has_edge(a, b) != parent.has_edge(ex.node_map[a], ex.node_map[b])) {
        out.push_back("edge set not induced at (" + std::to_string(a) + "," + std::to_string(b) + ")");
      }
    }
  }
  return out;
}

SubgraphExtraction random_walk_subgraph(const Graph& g, std::uint64_t seed) {
  const NodeId n = g.num_nodes();
  if (n < 2) throw std::invalid_argument("random_walk_subgraph: graph needs at least 2 nodes");
  const auto adj = g.adjacency();
  SplitMix64 rng(seed);
  const int steps = std::max(1, n / 2);
  auto cur = static_cast<NodeId>(rng.below(n));
  std::vector<bool> visited(n, false);
  visited[cur] = true;
  for (int s = 0; s < steps; ++s) {
    const auto& nbrs = adj[cur];
    if (nbrs.empty()) break;
    cur = nbrs[rng.below(nbrs.size())];
    visited[cur] = true;
  }
  std::vector<NodeId> nodes;
  for (NodeId i = 0; i < n; ++i) {
    if (visited[i]) nodes.push_back(i);
  }
  return induced_subgraph(g, std::move(nodes));
}

std::optional<Graph> remaining_subgraph(const Graph& g, const SubgraphExtraction& ex) {
  if (ex.parent_id != g.id) {
    throw std::invalid_argument("remaining_subgraph: extraction parent '" + ex.parent_id +
                                "' does not match graph '" + g.id + "'");
  }
  std::set<Edge> removed;
  for (const auto& [a, b] : ex.subgraph.edges) {
    const NodeId u = ex.node_map.at(a);
    const NodeId v = ex.node_map.at(b);
    removed.insert({std::min(u, v), std::max(u, v)});
  }
  std::vector<Edge> kept;
  std::vector<bool> touched(g.num_nodes(), false);
  for (const auto& e : g.edges) {
    if (removed.count(e)) continue;
    kept.push_back(e);
    touched[e.first] = touched[e.second] = true;
  }
  std::vector<NodeId> renum(g.num_nodes(), -1);
  Graph out;
  out.id = g.id + "/rem";
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    if (!touched[i]) continue;
    renum[i] = static_cast<NodeId>(out.labels.size());
    out.labels.push_back(g.labels[i]);
  }
  if (out.labels.empty()) return std::nullopt;
  for (const auto& [u, v] : kept) out.edges.emplace_back(renum[u], renum[v]);
  normalize_edges(out);
  return out;
}

}  // namespace gsim
