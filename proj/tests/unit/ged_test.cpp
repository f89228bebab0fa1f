#include <gtest/gtest.h>

#include <cmath>

#include "gsim/ged.hpp"
#include "gsim/graph.hpp"
#include "gsim/rng.hpp"

using namespace gsim;

namespace {

Graph random_small(SplitMix64& r, NodeId lo, NodeId hi, int labels = 2) {
  const auto n = static_cast<NodeId>(lo + r.below(static_cast<std::uint64_t>(hi - lo + 1)));
  return generate_er(n, r.uniform(0.2, 0.7), labels, r.next());
}

}  // namespace

TEST(Ged, Examples) {
  const Graph tri = make_graph("t", {0, 0, 0}, {{0, 1}, {0, 2}, {1, 2}});
  const Graph path = make_graph("p", {0, 0, 0}, {{0, 1}, {1, 2}});
  EXPECT_EQ(ged_exact(tri, tri).cost, 0);
  EXPECT_EQ(ged_exact(tri, path).cost, 1);
  EXPECT_EQ(ged_bruteforce(tri, path), 1);
  const Graph a = make_graph("a", {0}, {});
  const Graph b = make_graph("b", {1}, {});
  EXPECT_EQ(ged_exact(a, b).cost, 1);
  EXPECT_EQ(ged_bruteforce(a, b), 1);
  const Graph edge = make_graph("e", {0, 0}, {{0, 1}});
  const Graph pair = make_graph("i", {0, 0}, {});
  EXPECT_EQ(ged_bruteforce(edge, pair), 1);
}

TEST(Ged, ResultInvariants) {
  SplitMix64 r(17);
  for (int t = 0; t < 100; ++t) {
    const Graph g1 = random_small(r, 1, 6, 3);
    const Graph g2 = random_small(r, 1, 6, 3);
    const auto res = ged_exact(g1, g2);
    ASSERT_TRUE(res.exact);
    EXPECT_EQ(res.cost, static_cast<int>(res.path.size()));
    EXPECT_EQ(res.cost, mapping_cost(g1, g2, res.mapping));
    const Graph replay = apply_edit_path(g1, res.path);
    EXPECT_EQ(ged_bruteforce(replay, g2), 0);
  }
}

TEST(Ged, MatchesBruteForce) {
  SplitMix64 r(1);
  for (int t = 0; t < 200; ++t) {
    const Graph g1 = random_small(r, 1, 5);
    const Graph g2 = random_small(r, 1, 5);
    EXPECT_EQ(ged_exact(g1, g2).cost, ged_bruteforce(g1, g2));
  }
}

TEST(Ged, LowerBoundAdmissible) {
  const Graph aa = make_graph("aa", {0, 0}, {{0, 1}});
  const Graph ab = make_graph("ab", {0, 1}, {{0, 1}});
  EXPECT_EQ(lower_bound_labels(aa, aa), 0);
  EXPECT_EQ(lower_bound_labels(aa, ab), 1);
  SplitMix64 r(3);
  for (int t = 0; t < 500; ++t) {
    const Graph g1 = random_small(r, 1, 5, 3);
    const Graph g2 = random_small(r, 1, 5, 3);
    EXPECT_LE(lower_bound_labels(g1, g2), ged_bruteforce(g1, g2));
  }
}

TEST(Ged, SymmetryAndTriangle) {
  SplitMix64 r(4);
  for (int t = 0; t < 50; ++t) {
    const Graph a = random_small(r, 1, 5);
    const Graph b = random_small(r, 1, 5);
    const Graph c = random_small(r, 1, 5);
    const int ab = ged_exact(a, b).cost;
    EXPECT_EQ(ab, ged_exact(b, a).cost);
    EXPECT_LE(ged_exact(a, c).cost, ab + ged_exact(b, c).cost);
  }
}

TEST(Ged, InducedSubgraphCostIsStructuralDifference) {
  SplitMix64 r(6);
  for (int t = 0; t < 50; ++t) {
    const Graph g = random_small(r, 2, 7, 3);
    const auto ex = random_walk_subgraph(g, r.next());
    const int expect = (g.num_nodes() - ex.subgraph.num_nodes()) +
                       static_cast<int>(g.num_edges() - ex.subgraph.num_edges());
    EXPECT_EQ(ged_exact(g, ex.subgraph).cost, expect);
  }
}

TEST(Ged, BudgetExceededReportsUpperBound) {
  const Graph g1 = generate_er(9, 0.5, 3, 1);
  const Graph g2 = generate_er(9, 0.5, 3, 2);
  const auto capped = ged_exact(g1, g2, 1);
  EXPECT_FALSE(capped.exact);
  const auto full = ged_exact(g1, g2);
  EXPECT_TRUE(full.exact);
  EXPECT_GE(capped.cost, full.cost);
  EXPECT_EQ(capped.cost, mapping_cost(g1, g2, capped.mapping));
}

TEST(Ged, Deterministic) {
  const Graph g1 = generate_er(7, 0.4, 2, 10);
  const Graph g2 = generate_er(7, 0.4, 2, 11);
  const auto a = ged_exact(g1, g2);
  const auto b = ged_exact(g1, g2);
  EXPECT_EQ(a.path, b.path);
  EXPECT_EQ(a.mapping, b.mapping);
  EXPECT_EQ(a.expansions, b.expansions);
}

TEST(Ged, RejectsOversizeAndInvalid) {
  EXPECT_THROW(ged_bruteforce(generate_er(7, 0.5, 1, 1), generate_er(2, 0.5, 1, 1)), std::invalid_argument);
  Graph bad{"bad", {0, 0}, {{0, 0}}};
  EXPECT_THROW(ged_exact(bad, bad), std::invalid_argument);
}

TEST(Ged, NormalizationAndSimilarity) {
  EXPECT_EQ(nged(0, 4, 4), 0.0);
  EXPECT_DOUBLE_EQ(nged(1, 3, 3), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(nged(3, 2, 4), 1.0);
  EXPECT_EQ(similarity(0.0), 1.0);
  EXPECT_NEAR(similarity(1.0 / 3.0), 0.71653131057378925, 1e-15);
  EXPECT_THROW(similarity(-0.1), std::invalid_argument);
  double prev = 2.0;
  for (double x = 0.0; x < 5.0; x += 0.25) {
    EXPECT_LT(similarity(x), prev);
    prev = similarity(x);
  }
}

TEST(Ged, EditKindNames) {
  for (auto k : {EditOp::Kind::kNodeInsert, EditOp::Kind::kNodeDelete, EditOp::Kind::kNodeRelabel,
                 EditOp::Kind::kEdgeInsert, EditOp::Kind::kEdgeDelete}) {
    EXPECT_EQ(edit_kind_from_string(to_string(k)), k);
  }
  EXPECT_EQ(to_string(EditOp::Kind::kNodeRelabel), "node-relabel");
}
