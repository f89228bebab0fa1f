#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "gsim/dataset.hpp"
#include "gsim/ged.hpp"
#include "gsim/graph.hpp"
#include "gsim/rng.hpp"

using namespace gsim;

namespace {

Graph triangle() { return make_graph("tri", {0, 0, 0}, {{0, 1}, {0, 2}, {1, 2}}); }
Graph path3() { return make_graph("path", {0, 0, 0}, {{0, 1}, {1, 2}}); }

bool has_violation(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("gsim_graph_test_" + name);
}

}  // namespace

TEST(SplitMix64, ReferenceSequence) {
  // Reference outputs for seed 0 from the published SplitMix64 algorithm.
  SplitMix64 r(0);
  EXPECT_EQ(r.next(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(r.next(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(r.next(), 0x06C45D188009454FULL);
}

TEST(SplitMix64, DerivedDrawsInRange) {
  SplitMix64 r(42);
  for (int k = 0; k < 10000; ++k) {
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(r.below(7), 7u);
  }
}

TEST(Graph, ValidateExamples) {
  EXPECT_TRUE(validate(triangle()).empty());
  Graph loop{"loop", {0, 0}, {{0, 0}}};
  EXPECT_TRUE(has_violation(validate(loop), "self-loop"));
  Graph far{"far", {0, 0, 0}, {{0, 5}}};
  EXPECT_TRUE(has_violation(validate(far), "endpoint out of range"));
  Graph dup{"dup", {0, 0}, {{0, 1}, {0, 1}}};
  EXPECT_TRUE(has_violation(validate(dup), "duplicate edge"));
  EXPECT_THROW(make_graph("x", {0}, {{0, 0}}), std::invalid_argument);
}

TEST(Graph, GenerateErExamples) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Graph g = generate_er(3, 1.0, 2, seed);
    EXPECT_EQ(g.edges, (std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}}));
  }
  const Graph one = generate_er(1, 0.5, 3, 9);
  EXPECT_EQ(one.num_nodes(), 1);
  EXPECT_TRUE(one.edges.empty());
  EXPECT_EQ(generate_er(6, 0.4, 3, 7), generate_er(6, 0.4, 3, 7));
  EXPECT_THROW(generate_er(0, 0.5, 2, 1), std::invalid_argument);
  EXPECT_THROW(generate_er(3, 1.5, 2, 1), std::invalid_argument);
  EXPECT_THROW(generate_er(3, 0.5, 0, 1), std::invalid_argument);
}

TEST(Graph, GenerateErFollowsDocumentedDrawOrder) {
  // Replays the documented order: labels first, then pairs (u < v).
  SplitMix64 r(7);
  std::vector<Label> labels;
  for (int i = 0; i < 6; ++i) labels.push_back(static_cast<Label>(r.below(3)));
  std::vector<Edge> edges;
  for (NodeId u = 0; u < 6; ++u) {
    for (NodeId v = u + 1; v < 6; ++v) {
      if (r.uniform() < 0.4) edges.emplace_back(u, v);
    }
  }
  const Graph g = generate_er(6, 0.4, 3, 7);
  EXPECT_EQ(g.labels, labels);
  EXPECT_EQ(g.edges, edges);
}

TEST(Graph, PerturbZeroEditsIsIdentity) {
  const Graph g = generate_er(6, 0.4, 3, 3);
  const auto r = perturb(g, 0, 3, 11);
  EXPECT_EQ(r.graph, g);
  EXPECT_EQ(r.applied, 0);
}

TEST(Graph, PerturbTriangleSingleEdgeDeletion) {
  // Find a seed whose one edit deletes edge (0, 1), then replay it.
  std::uint64_t found = 0;
  bool ok = false;
  for (std::uint64_t seed = 0; seed < 500 && !ok; ++seed) {
    const auto r = perturb(triangle(), 1, 1, seed);
    if (r.graph.labels.size() == 3 && r.graph.edges == std::vector<Edge>{{0, 2}, {1, 2}}) {
      found = seed;
      ok = true;
    }
  }
  ASSERT_TRUE(ok);
  const auto again = perturb(triangle(), 1, 1, found);
  EXPECT_EQ(again.graph.edges, (std::vector<Edge>{{0, 2}, {1, 2}}));
  EXPECT_EQ(ged_exact(again.graph, path3()).cost, 0);
}

TEST(Graph, PerturbNeverExceedsBudgetOracle) {
  SplitMix64 r(2024);
  for (int t = 0; t < 100; ++t) {
    const Graph g = generate_er(static_cast<NodeId>(3 + r.below(4)), 0.4, 3, r.next());
    const int k = static_cast<int>(r.below(4));
    const auto p = perturb(g, k, 3, r.next());
    EXPECT_TRUE(validate(p.graph).empty());
    EXPECT_LE(p.applied, k);
    if (std::max(g.num_nodes(), p.graph.num_nodes()) <= 6) {
      EXPECT_LE(ged_bruteforce(g, p.graph), k);
    }
    EXPECT_LE(ged_exact(g, p.graph).cost, k);
  }
}

TEST(Graph, PermuteExamples) {
  const Graph g = generate_er(5, 0.5, 3, 1);
  EXPECT_EQ(permute(g, {0, 1, 2, 3, 4}), g);
  const Graph p = permute(path3(), {2, 1, 0});
  EXPECT_EQ(p.edges, path3().edges);
  EXPECT_THROW(permute(path3(), {0, 0, 1}), std::invalid_argument);
  EXPECT_THROW(permute(path3(), {0, 1}), std::invalid_argument);
  SplitMix64 r(5);
  for (int t = 0; t < 30; ++t) {
    const Graph h = generate_er(static_cast<NodeId>(2 + r.below(6)), 0.4, 3, r.next());
    EXPECT_EQ(ged_exact(h, permute(h, random_permutation(h.num_nodes(), r.next()))).cost, 0);
  }
}

TEST(Graph, PermuteMovesLabels) {
  const Graph g = make_graph("g", {0, 1, 2}, {{0, 1}});
  const Graph p = permute(g, {2, 0, 1});
  EXPECT_EQ(p.labels, (std::vector<Label>{1, 2, 0}));
  EXPECT_EQ(p.edges, (std::vector<Edge>{{0, 2}}));
}

TEST(RandomWalk, TriangleOneStepCoversBothOutcomes) {
  // N = 3 walks floor(3/2) = 1 step; from node 0 the result is {0,1} or {0,2}.
  std::set<std::vector<NodeId>> from_zero;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    const auto ex = random_walk_subgraph(triangle(), seed);
    ASSERT_EQ(ex.subgraph.num_nodes(), 2);
    EXPECT_EQ(ex.subgraph.edges, (std::vector<Edge>{{0, 1}}));
    if (ex.node_map[0] == 0) from_zero.insert(ex.node_map);
  }
  EXPECT_EQ(from_zero, (std::set<std::vector<NodeId>>{{0, 1}, {0, 2}}));
}

TEST(RandomWalk, InducedAndInjectiveOverManyDraws) {
  SplitMix64 r(99);
  for (int t = 0; t < 1000; ++t) {
    const Graph g = generate_er(static_cast<NodeId>(2 + r.below(8)), 0.35, 3, r.next());
    const auto ex = random_walk_subgraph(g, r.next());
    EXPECT_TRUE(validate_extraction(g, ex).empty());
    EXPECT_TRUE(std::is_sorted(ex.node_map.begin(), ex.node_map.end()));
  }
  EXPECT_THROW(random_walk_subgraph(generate_er(1, 0.5, 1, 1), 1), std::invalid_argument);
}

TEST(RandomWalk, ConnectedGraphGivesConnectedSubgraph) {
  SplitMix64 r(3);
  for (int t = 0; t < 200; ++t) {
    const Graph g = generate_er(7, 1.0, 2, r.next());
    const auto ex = random_walk_subgraph(g, r.next());
    EXPECT_GE(ex.subgraph.num_nodes(), 2);  // 3 steps; revisits allowed
    EXPECT_LE(ex.subgraph.num_nodes(), 4);
    EXPECT_EQ(ex.subgraph.num_edges(), static_cast<std::size_t>(ex.subgraph.num_nodes() * (ex.subgraph.num_nodes() - 1) / 2));
    EXPECT_GE(ex.subgraph.num_edges(), static_cast<std::size_t>(ex.subgraph.num_nodes() - 1));
  }
}

TEST(RemainingSubgraph, TriangleMinusEdge) {
  const Graph g = triangle();
  const auto ex = induced_subgraph(g, {0, 1});
  const auto rem = remaining_subgraph(g, ex);
  ASSERT_TRUE(rem.has_value());
  EXPECT_EQ(rem->num_nodes(), 3);
  EXPECT_EQ(rem->edges, (std::vector<Edge>{{0, 2}, {1, 2}}));
  EXPECT_EQ(ged_exact(*rem, path3()).cost, 0);
}

TEST(RemainingSubgraph, WholeEdgeIsEmpty) {
  const Graph g = make_graph("e", {0, 1}, {{0, 1}});
  EXPECT_FALSE(remaining_subgraph(g, induced_subgraph(g, {0, 1})).has_value());
}

TEST(RemainingSubgraph, EdgelessExtractionDropsIsolatedNodes) {
  const Graph g = make_graph("g", {0, 1, 2, 0}, {{0, 1}, {1, 2}});
  const auto rem = remaining_subgraph(g, induced_subgraph(g, {0, 2}));
  ASSERT_TRUE(rem.has_value());
  EXPECT_EQ(rem->labels, (std::vector<Label>{0, 1, 2}));
  EXPECT_EQ(rem->edges, (std::vector<Edge>{{0, 1}, {1, 2}}));
}

TEST(RemainingSubgraph, NeverHasIsolatedNodesAndChecksParent) {
  SplitMix64 r(8);
  for (int t = 0; t < 300; ++t) {
    const Graph g = generate_er(static_cast<NodeId>(2 + r.below(7)), 0.4, 3, r.next());
    const auto rem = remaining_subgraph(g, random_walk_subgraph(g, r.next()));
    if (!rem) continue;
    EXPECT_TRUE(validate(*rem).empty());
    for (int d : rem->degrees()) EXPECT_GT(d, 0);
  }
  auto ex = induced_subgraph(triangle(), {0, 1});
  ex.parent_id = "other";
  EXPECT_THROW(remaining_subgraph(triangle(), ex), std::invalid_argument);
}

TEST(Dataset, RoundTripAndRejections) {
  Dataset ds;
  ds.alphabet = {"C", "N"};
  ds.graphs = {make_graph("a", {0, 1, 0}, {{0, 1}, {1, 2}}), make_graph("b", {0, 0}, {{0, 1}})};
  ds.index();
  ds.pairs.push_back(make_pair_record(ds.graphs[0], ds.graphs[1], ged_exact(ds.graphs[0], ds.graphs[1]).cost, Split::kTrain));
  ds.pairs.push_back(make_pair_record(ds.graphs[1], ds.graphs[0], 2, Split::kTest));
  EXPECT_TRUE(validate(ds).empty());

  const auto path = temp_file("roundtrip.json");
  write_dataset(ds, path);
  Dataset back = read_dataset(path);
  EXPECT_EQ(back, ds);
  EXPECT_EQ(back.pairs[0].nged, ds.pairs[0].nged);
  EXPECT_EQ(back.pairs[0].sim, ds.pairs[0].sim);

  Json j = to_json(ds);
  j["pairs"][0]["sim"] = j["pairs"][0]["sim"].get<double>() + 1e-9;
  EXPECT_THROW(dataset_from_json(j), std::runtime_error);

  Json v = to_json(ds);
  v["version"] = "7";
  try {
    dataset_from_json(v);
    FAIL() << "version accepted";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("\"1\""), std::string::npos);
  }

  {
    std::ofstream out(temp_file("broken.json"));
    out << "{\"version\": \"1\", \"alphabet\": [";
  }
  EXPECT_THROW(read_dataset(temp_file("broken.json")), std::runtime_error);
  std::filesystem::remove(path);
  std::filesystem::remove(temp_file("broken.json"));
}
