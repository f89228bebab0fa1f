#include "gsim/ged.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>

namespace gsim {

std::string to_string(EditOp::Kind kind) {
  switch (kind) {
    case EditOp::Kind::kNodeInsert: return "node-insert";
    case EditOp::Kind::kNodeDelete: return "node-delete";
    case EditOp::Kind::kNodeRelabel: return "node-relabel";
    case EditOp::Kind::kEdgeInsert: return "edge-insert";
    case EditOp::Kind::kEdgeDelete: return "edge-delete";
  }
  return "?";
}

EditOp::Kind edit_kind_from_string(const std::string& s) {
  for (auto k : {EditOp::Kind::kNodeInsert, EditOp::Kind::kNodeDelete, EditOp::Kind::kNodeRelabel,
                 EditOp::Kind::kEdgeInsert, EditOp::Kind::kEdgeDelete}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown edit operation '" + s + "'");
}

namespace {

void require_valid(const Graph& g, const char* who) {
  if (auto v = validate(g); !v.empty()) {
    throw std::invalid_argument(std::string(who) + ": invalid graph '" + g.id + "': " + v.front());
  }
}

int label_intersection(const std::vector<Label>& a, const std::vector<Label>& b) {
  std::map<Label, int> count;
  for (Label l : a) ++count[l];
  int common = 0;
  for (Label l : b) {
    auto it = count.find(l);
    if (it != count.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  return common;
}

// Search over partial assignments. Targets are g2 node ids; kDeleted marks
// a deleted g1 node and compares greater than every real target.
constexpr std::int8_t kDeleted = 127;
constexpr std::int8_t kUnset = -1;

struct SearchState {
  std::array<std::int8_t, kMaxExactGedNodes> assign;  // by processing position
  std::uint64_t used = 0;                             // g2 nodes taken
  std::int32_t g = 0;
  std::int32_t f = 0;
  std::int32_t e1_done = 0;  // g1 edges with both endpoints processed
  std::int32_t e2_done = 0;  // g2 edges with both endpoints used
  std::int8_t depth = 0;
  bool complete = false;
};

class AStarGed {
public:
  AStarGed(const Graph& g1, const Graph& g2) : g1_(g1), g2_(g2), n1_(g1.num_nodes()), n2_(g2.num_nodes()) {
    adj1_.assign(n1_, 0);
    adj2_.assign(n2_, 0);
    for (const auto& [u, v] : g1.edges) {
      adj1_[u] |= 1ULL << v;
      adj1_[v] |= 1ULL << u;
    }
    for (const auto& [u, v] : g2.edges) {
      adj2_[u] |= 1ULL << v;
      adj2_[v] |= 1ULL << u;
    }
    // Dense label ids over both graphs, for the counting heuristic.
    std::map<Label, int> dense;
    for (Label l : g1.labels) dense.emplace(l, 0);
    for (Label l : g2.labels) dense.emplace(l, 0);
    int next = 0;
    for (auto& [l, id] : dense) id = next++;
    for (Label l : g1.labels) lab1_.push_back(dense[l]);
    for (Label l : g2.labels) lab2_.push_back(dense[l]);

    const auto deg = g1.degrees();
    order_.resize(n1_);
    for (NodeId i = 0; i < n1_; ++i) order_[i] = i;
    std::stable_sort(order_.begin(), order_.end(), [&](NodeId a, NodeId b) { return deg[a] > deg[b]; });
  }

  GedResult run(std::uint64_t budget) {
    SearchState root{};
    root.assign.fill(kUnset);
    root.f = heuristic(root);

    // Incumbent from a greedy dive: always follow the best child.
    SearchState dive = root;
    while (!dive.complete) {
      std::vector<SearchState> kids;
      expand(dive, kids);
      dive = *std::min_element(kids.begin(), kids.end(), [this](const auto& a, const auto& b) { return before(a, b); });
    }
    SearchState best = dive;

    pool_.clear();
    pool_.push_back(root);
    auto cmp = [this](std::uint32_t a, std::uint32_t b) { return before(pool_[b], pool_[a]); };
    std::priority_queue<std::uint32_t, std::vector<std::uint32_t>, decltype(cmp)> open(cmp);
    open.push(0);

    std::uint64_t expansions = 0;
    std::vector<SearchState> kids;
    bool exact = false;
    while (!open.empty()) {
      const std::uint32_t top = open.top();
      open.pop();
      const SearchState cur = pool_[top];
      if (cur.complete) {
        best = cur;
        exact = true;
        break;
      }
      if (expansions >= budget) break;
      ++expansions;
      kids.clear();
      expand(cur, kids);
      for (const auto& k : kids) {
        if (k.f > best.f) continue;
        if (k.complete && before(k, best)) best = k;
        pool_.push_back(k);
        open.push(static_cast<std::uint32_t>(pool_.size() - 1));
      }
    }
    // An exhausted frontier means no state beat the incumbent.
    if (open.empty()) exact = true;

    GedResult res;
    res.cost = best.f;
    res.exact = exact;
    res.expansions = expansions;
    res.mapping.assign(n1_, -1);
    for (int d = 0; d < n1_; ++d) {
      const auto t = best.assign[d];
      res.mapping[order_[d]] = t == kDeleted ? -1 : t;
    }
    res.path = edit_path_from_mapping(g1_, g2_, res.mapping);
    return res;
  }

private:
  bool before(const SearchState& a, const SearchState& b) const {
    if (a.f != b.f) return a.f < b.f;
    if (a.g != b.g) return a.g > b.g;
    return std::memcmp(a.assign.data(), b.assign.data(), a.assign.size()) < 0;
  }

  int heuristic(const SearchState& s) const {
    std::array<int, 2 * kMaxExactGedNodes> count{};
    int rest1 = 0;
    for (int d = s.depth; d < n1_; ++d) {
      ++count[lab1_[order_[d]]];
      ++rest1;
    }
    int rest2 = 0;
    int common = 0;
    for (NodeId v = 0; v < n2_; ++v) {
      if (s.used >> v & 1ULL) continue;
      ++rest2;
      if (count[lab2_[v]] > 0) {
        --count[lab2_[v]];
        ++common;
      }
    }
    const int node_lb = std::max(rest1, rest2) - common;
    const int e1_rest = static_cast<int>(g1_.num_edges()) - s.e1_done;
    const int e2_rest = static_cast<int>(g2_.num_edges()) - s.e2_done;
    return node_lb + std::abs(e1_rest - e2_rest);
  }

  void expand(const SearchState& s, std::vector<SearchState>& out) const {
    const int d = s.depth;
    const NodeId u = order_[d];
    std::uint64_t processed = 0;
    for (int i = 0; i < d; ++i) processed |= 1ULL << order_[i];
    const int e1_new = std::popcount(adj1_[u] & processed);

    const auto make_child = [&](std::int8_t target) {
      SearchState c = s;
      c.assign[d] = target;
      c.depth = static_cast<std::int8_t>(d + 1);
      c.e1_done += e1_new;
      int step = 0;
      if (target == kDeleted) {
        step += 1 + e1_new;
      } else {
        step += lab1_[u] != lab2_[target];
        c.used |= 1ULL << target;
        c.e2_done += std::popcount(adj2_[target] & s.used);
        for (int i = 0; i < d; ++i) {
          const NodeId w = order_[i];
          const bool in1 = adj1_[u] >> w & 1ULL;
          const auto tw = s.assign[i];
          const bool in2 = tw != kDeleted && (adj2_[target] >> tw & 1ULL);
          step += in1 != in2;
        }
      }
      c.g = s.g + step;
      if (c.depth == n1_) {
        // Everything still unused in g2 is inserted, with its edges.
        const int ins_nodes = n2_ - std::popcount(c.used);
        const int ins_edges = static_cast<int>(g2_.num_edges()) - c.e2_done;
        c.g += ins_nodes + ins_edges;
        c.f = c.g;
        c.complete = true;
      } else {
        c.f = c.g + heuristic(c);
      }
      out.push_back(c);
    };

    for (NodeId v = 0; v < n2_; ++v) {
      if (!(s.used >> v & 1ULL)) make_child(static_cast<std::int8_t>(v));
    }
    make_child(kDeleted);
  }

  const Graph& g1_;
  const Graph& g2_;
  int n1_;
  int n2_;
  std::vector<std::uint64_t> adj1_, adj2_;
  std::vector<int> lab1_, lab2_;
  std::vector<NodeId> order_;
  std::vector<SearchState> pool_;
};

}  // namespace

GedResult ged_exact(const Graph& g1, const Graph& g2, std::uint64_t budget) {
  require_valid(g1, "ged_exact");
  require_valid(g2, "ged_exact");
  if (g1.num_nodes() > kMaxExactGedNodes || g2.num_nodes() > kMaxExactGedNodes) {
    throw std::invalid_argument("ged_exact: graphs are limited to " + std::to_string(kMaxExactGedNodes) +
                                " nodes");
  }
  return AStarGed(g1, g2).run(budget);
}

int ged_bruteforce(const Graph& g1, const Graph& g2) {
  require_valid(g1, "ged_bruteforce");
  require_valid(g2, "ged_bruteforce");
  if (g1.num_nodes() > 6 || g2.num_nodes() > 6) {
    throw std::invalid_argument("ged_bruteforce: graphs are limited to 6 nodes");
  }
  const NodeId n1 = g1.num_nodes();
  const NodeId n2 = g2.num_nodes();
  std::vector<NodeId> mapping(n1, -1);
  std::vector<bool> taken(n2, false);
  int best = std::numeric_limits<int>::max();
  // Every g1 node goes to a distinct g2 node or is deleted.
  auto rec = [&](auto&& self, NodeId u) -> void {
    if (u == n1) {
      best = std::min(best, mapping_cost(g1, g2, mapping));
      return;
    }
    for (NodeId v = 0; v < n2; ++v) {
      if (taken[v]) continue;
      taken[v] = true;
      mapping[u] = v;
      self(self, u + 1);
      taken[v] = false;
    }
    mapping[u] = -1;
    self(self, u + 1);
  };
  rec(rec, 0);
  return best;
}

int lower_bound_labels(const Graph& g1, const Graph& g2) {
  const int node_lb = std::max(g1.num_nodes(), g2.num_nodes()) - label_intersection(g1.labels, g2.labels);
  const int edge_lb = std::abs(static_cast<int>(g1.num_edges()) - static_cast<int>(g2.num_edges()));
  return node_lb + edge_lb;
}

int mapping_cost(const Graph& g1, const Graph& g2, const std::vector<NodeId>& mapping) {
  if (static_cast<NodeId>(mapping.size()) != g1.num_nodes()) {
    throw std::invalid_argument("mapping_cost: mapping size differs from g1 node count");
  }
  std::vector<NodeId> inverse(g2.num_nodes(), -1);
  int cost = 0;
  for (NodeId u = 0; u < g1.num_nodes(); ++u) {
    const NodeId v = mapping[u];
    if (v < 0) {
      ++cost;
      continue;
    }
    if (v >= g2.num_nodes() || inverse[v] >= 0) throw std::invalid_argument("mapping_cost: mapping not injective");
    inverse[v] = u;
    cost += g1.labels[u] != g2.labels[v];
  }
  for (NodeId v = 0; v < g2.num_nodes(); ++v) cost += inverse[v] < 0;
  for (const auto& [a, b] : g1.edges) {
    const NodeId x = mapping[a];
    const NodeId y = mapping[b];
    cost += !(x >= 0 && y >= 0 && g2.has_edge(x, y));
  }
  for (const auto& [x, y] : g2.edges) {
    const NodeId a = inverse[x];
    const NodeId b = inverse[y];
    cost += !(a >= 0 && b >= 0 && g1.has_edge(a, b));
  }
  return cost;
}

std::vector<EditOp> edit_path_from_mapping(const Graph& g1, const Graph& g2, const std::vector<NodeId>& mapping) {
  using K = EditOp::Kind;
  const NodeId n1 = g1.num_nodes();
  std::vector<EditOp> path;
  std::vector<NodeId> inverse(g2.num_nodes(), -1);
  for (NodeId u = 0; u < n1; ++u) {
    if (mapping[u] >= 0) inverse[mapping[u]] = u;
  }
  for (NodeId u = 0; u < n1; ++u) {
    const NodeId v = mapping[u];
    if (v >= 0 && g1.labels[u] != g2.labels[v]) path.push_back({K::kNodeRelabel, u, -1, g2.labels[v]});
  }
  for (const auto& [a, b] : g1.edges) {
    const NodeId x = mapping[a];
    const NodeId y = mapping[b];
    if (!(x >= 0 && y >= 0 && g2.has_edge(x, y))) path.push_back({K::kEdgeDelete, a, b, -1});
  }
  for (NodeId u = 0; u < n1; ++u) {
    if (mapping[u] < 0) path.push_back({K::kNodeDelete, u, -1, -1});
  }
  // Working id of every g2 node once insertions are done.
  std::vector<NodeId> work(g2.num_nodes(), -1);
  NodeId next = n1;
  for (NodeId v = 0; v < g2.num_nodes(); ++v) {
    if (inverse[v] >= 0) {
      work[v] = inverse[v];
    } else {
      work[v] = next++;
      path.push_back({K::kNodeInsert, work[v], -1, g2.labels[v]});
    }
  }
  for (const auto& [x, y] : g2.edges) {
    const NodeId a = inverse[x];
    const NodeId b = inverse[y];
    if (!(a >= 0 && b >= 0 && g1.has_edge(a, b))) {
      path.push_back({K::kEdgeInsert, std::min(work[x], work[y]), std::max(work[x], work[y]), -1});
    }
  }
  return path;
}

Graph apply_edit_path(const Graph& g, const std::vector<EditOp>& path) {
  using K = EditOp::Kind;
  std::vector<Label> labels = g.labels;
  std::vector<bool> alive(labels.size(), true);
  std::set<Edge> edges(g.edges.begin(), g.edges.end());
  const auto check_node = [&](NodeId x) {
    if (x < 0 || x >= static_cast<NodeId>(labels.size()) || !alive[x]) {
      throw std::invalid_argument("apply_edit_path: node " + std::to_string(x) + " does not exist");
    }
  };
  for (const auto& op : path) {
    switch (op.kind) {
      case K::kNodeInsert:
        if (op.u != static_cast<NodeId>(labels.size())) {
          throw std::invalid_argument("apply_edit_path: inserted node must take the next working id");
        }
        labels.push_back(op.label);
        alive.push_back(true);
        break;
      case K::kNodeDelete:
        check_node(op.u);
        for (const auto& [a, b] : edges) {
          if (a == op.u || b == op.u) throw std::invalid_argument("apply_edit_path: deleting a non-isolated node");
        }
        alive[op.u] = false;
        break;
      case K::kNodeRelabel:
        check_node(op.u);
        labels[op.u] = op.label;
        break;
      case K::kEdgeInsert: {
        check_node(op.u);
        check_node(op.v);
        if (op.u == op.v) throw std::invalid_argument("apply_edit_path: self-loop insertion");
        if (!edges.insert({std::min(op.u, op.v), std::max(op.u, op.v)}).second) {
          throw std::invalid_argument("apply_edit_path: edge already present");
        }
        break;
      }
      case K::kEdgeDelete:
        if (edges.erase({std::min(op.u, op.v), std::max(op.u, op.v)}) == 0) {
          throw std::invalid_argument("apply_edit_path: edge not present");
        }
        break;
    }
  }
  Graph out;
  out.id = g.id;
  std::vector<NodeId> renum(labels.size(), -1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!alive[i]) continue;
    renum[i] = static_cast<NodeId>(out.labels.size());
    out.labels.push_back(labels[i]);
  }
  for (const auto& [a, b] : edges) out.edges.emplace_back(renum[a], renum[b]);
  normalize_edges(out);
  return out;
}

double nged(int cost, NodeId n1, NodeId n2) {
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("nged: node counts must be >= 1");
  return static_cast<double>(cost) / ((static_cast<double>(n1) + static_cast<double>(n2)) / 2.0);
}

double similarity(double nged_value) {
  if (!(nged_value >= 0.0)) throw std::invalid_argument("similarity: nGED must be non-negative");
  return std::exp(-nged_value);
}

}  // namespace gsim
