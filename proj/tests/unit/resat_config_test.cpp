#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "gsim/config.hpp"
#include "gsim/resat.hpp"

using namespace gsim;

namespace {

std::vector<Graph> bases(int count, std::uint64_t seed) {
  std::vector<Graph> out;
  SplitMix64 r(seed);
  for (int k = 0; k < count; ++k) {
    Graph g = generate_er(static_cast<NodeId>(5 + r.below(4)), 0.45, 3, r.next());
    g.id = "b" + std::to_string(k);
    out.push_back(std::move(g));
  }
  return out;
}

Matrix random_matrix(int rows, int cols, SplitMix64& r) {
  Matrix m{rows, cols, {}};
  for (int k = 0; k < rows * cols; ++k) m.values.push_back(r.uniform(-1.0, 1.0));
  return m;
}

ProbeConfig quick_probe() {
  ProbeConfig c;
  c.epochs = 40;
  c.batch_size = 32;
  c.lr = 3e-3;
  return c;
}

ModelConfig tiny_model(FusionKind kind) {
  ModelConfig m;
  m.alphabet_size = 3;
  m.hidden = 6;
  m.layers = 1;
  m.fusion.kind = kind;
  m.seed = 11;
  return m;
}

}  // namespace

TEST(ResatBuild, ZeroPerGraphIsEmpty) {
  const auto b = bases(3, 1);
  const auto out = build_resat_dataset(b, 0, 5);
  EXPECT_TRUE(out.triples.empty());
  EXPECT_TRUE(out.skipped.empty());
}

TEST(ResatBuild, RejectsSmallGraphs) {
  auto b = bases(2, 1);
  b.push_back(generate_er(3, 1.0, 1, 1));
  EXPECT_THROW(build_resat_dataset(b, 1, 1), std::invalid_argument);
}

TEST(ResatBuild, ReplaysForkedStreams) {
  // Triangle with a pendant node.
  Graph g;
  g.id = "tp";
  g.labels = {0, 1, 2, 0};
  g.edges = {{0, 1}, {0, 2}, {1, 2}, {2, 3}};
  const std::vector<Graph> one = {g};
  const auto out = build_resat_dataset(one, 5, 77);

  SplitMix64 root(77);
  SplitMix64 rng = root.fork();
  std::vector<SubgraphExtraction> expect;
  while (expect.size() < 5) {
    auto ex = random_walk_subgraph(g, rng.next());
    if (remaining_subgraph(g, ex)) expect.push_back(ex);
  }
  ASSERT_EQ(out.triples.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_EQ(out.triples[k].extraction.node_map, expect[k].node_map);
    EXPECT_EQ(out.triples[k].base_id, "tp");
  }
}

TEST(ResatBuild, TriplesPartitionParentEdges) {
  const auto b = bases(20, 3);
  const auto out = build_resat_dataset(b, 6, 9);
  ASSERT_FALSE(out.triples.empty());
  for (const auto& t : out.triples) {
    const auto& g = *std::find_if(b.begin(), b.end(), [&](const Graph& x) { return x.id == t.base_id; });
    EXPECT_TRUE(validate_extraction(g, t.extraction).empty());
    EXPECT_GT(t.remaining.num_nodes(), 0);
    EXPECT_EQ(t.extraction.subgraph.num_edges() + t.remaining.num_edges(), g.num_edges());
  }
  std::size_t per_base = 0;
  for (const auto& t : out.triples) per_base += t.base_id == out.triples.front().base_id;
  EXPECT_EQ(per_base, 6u);
}

TEST(ResatBuild, IsolatedEdgeGraphIsSkipped) {
  // Without edges every remainder is empty.
  Graph g;
  g.id = "iso";
  g.labels = {0, 0, 0, 0};
  Graph h = bases(1, 4).front();
  const std::vector<Graph> two = {g, h};
  const auto out = build_resat_dataset(two, 2, 1);
  ASSERT_EQ(out.skipped.size(), 1u);
  EXPECT_EQ(out.skipped[0].graph_id, "iso");
  for (const auto& t : out.triples) EXPECT_EQ(t.base_id, h.id);
}

TEST(ResatProbe, ZeroTargetIsLearnedAlmostExactly) {
  SplitMix64 r(1);
  const Matrix x = random_matrix(120, 4, r);
  const Matrix y{120, 3, std::vector<double>(360, 0.0)};
  const auto res = resat_probe(x, y, quick_probe(), 2);
  EXPECT_LT(res.best_val_mse, 1e-3);
  EXPECT_EQ(res.val_mse_per_multiplier.size(), 2u);
}

TEST(ResatProbe, TruePairingBeatsShuffledControl) {
  SplitMix64 r(2);
  const Matrix x = random_matrix(200, 3, r);
  Matrix y{200, 2, {}};
  for (int k = 0; k < 200; ++k) {
    const double* row = &x.values[k * 3];
    y.values.push_back(row[0] * row[1]);
    y.values.push_back(std::abs(row[2]));
  }
  Matrix shuffled = y;
  const auto perm = random_permutation(200, 3);
  for (int k = 0; k < 200; ++k) {
    shuffled.values[2 * k] = y.values[2 * perm[k]];
    shuffled.values[2 * k + 1] = y.values[2 * perm[k] + 1];
  }
  ProbeConfig c = quick_probe();
  c.epochs = 80;
  EXPECT_LT(resat_probe(x, y, c, 4).best_val_mse, resat_probe(x, shuffled, c, 4).best_val_mse);
}

TEST(ResatProbe, Deterministic) {
  SplitMix64 r(3);
  const Matrix x = random_matrix(50, 3, r);
  const Matrix y = random_matrix(50, 2, r);
  EXPECT_EQ(resat_probe(x, y, quick_probe(), 8).best_val_mse, resat_probe(x, y, quick_probe(), 8).best_val_mse);
}

TEST(ResatProbe, RejectsTinyInput) {
  SplitMix64 r(4);
  const Matrix x = random_matrix(9, 2, r);
  const Matrix y = random_matrix(9, 2, r);
  EXPECT_THROW(resat_probe(x, y, quick_probe(), 1), std::invalid_argument);
}

TEST(ResatCompare, FrozenModelsAndReport) {
  const auto b = bases(6, 5);
  const auto triples = build_resat_dataset(b, 4, 2).triples;
  Model diff(tiny_model(FusionKind::kDiffAtt));
  Model abs(tiny_model(FusionKind::kAbs));
  const auto before_d = diff.params().snapshot();
  const auto before_a = abs.params().snapshot();

  const auto feats = resat_features(diff, b, triples);
  EXPECT_EQ(feats.pre.rows, static_cast<int>(triples.size()));
  EXPECT_EQ(feats.pre.cols, feats.post.cols);
  EXPECT_EQ(feats.target.cols, 2 * 6);

  ProbeConfig c = quick_probe();
  c.epochs = 3;
  const ResatVariant vars[] = {{"diffatt", &diff, 5.0}, {"abs", &abs, 7.0}};
  const auto report = resat_compare(vars, b, triples, c, 1);
  EXPECT_EQ(diff.params().snapshot(), before_d);
  EXPECT_EQ(abs.params().snapshot(), before_a);
  ASSERT_EQ(report.rows.size(), 2u);
  EXPECT_TRUE(report.rows[0].has_before);
  EXPECT_FALSE(report.rows[1].has_before);
  EXPECT_TRUE(report.rho_defined);
  EXPECT_TRUE(std::abs(report.rho) == 1.0);
  EXPECT_TRUE(to_json(report).at("rows").at(0).contains("improvement"));

  const ResatVariant single[] = {{"abs", &abs, 7.0}};
  EXPECT_FALSE(resat_compare(single, b, triples, c, 1).rho_defined);
  const ResatVariant null_model[] = {{"abs", nullptr, 7.0}};
  EXPECT_THROW(resat_compare(null_model, b, triples, c, 1), std::invalid_argument);
}

TEST(Config, ParsesSectionsAndOverrides) {
  RunConfig c;
  apply_config_text(c,
                    "# run\n"
                    "[gen]\n"
                    "n_graphs = 50\n"
                    "p = 0.25\n"
                    "[model]\n"
                    "readout = \"max\"\n"
                    "fusion = ntn\n"
                    "[train]\n"
                    "lr = 5e-4  # comment\n"
                    "[resat]\n"
                    "width_multipliers = [1, 3]\n"
                    "graphs = all\n");
  EXPECT_EQ(c.gen.n_graphs, 50);
  EXPECT_EQ(c.gen.p, 0.25);
  EXPECT_EQ(c.model.readout, Readout::kMax);
  EXPECT_EQ(c.model.fusion.kind, FusionKind::kNtn);
  EXPECT_EQ(c.train.lr, 5e-4);
  EXPECT_EQ(c.resat.probe.width_multipliers, (std::vector<int>{1, 3}));
  EXPECT_EQ(c.resat.graphs, "all");

  apply_override(c, "diffatt.t=0.5");
  EXPECT_FALSE(c.model.fusion.learnable_temperature);
  EXPECT_EQ(c.model.fusion.temperature, 0.5);
  apply_override(c, "diffatt.t=learnable");
  EXPECT_TRUE(c.model.fusion.learnable_temperature);
}

TEST(Config, RejectsBadInput) {
  RunConfig c;
  const auto expect_error = [&](const std::string& text, const std::string& needle) {
    try {
      apply_config_text(c, text, "run.toml");
      FAIL() << "accepted: " << text;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_error("[model]\nwidth = 3\n", "unknown key 'model.width'");
  expect_error("[model]\nhidden = lots\n", "expects a number");
  expect_error("hidden = 3\n", "run.toml:1");
  expect_error("[train]\n\nepochs\n", "run.toml:3");
  expect_error("[diffatt]\nt = -1\n", "positive");
  expect_error("[resat]\ngraphs = some\n", "heldout or all");
  EXPECT_THROW(apply_override(c, "model.hidden"), ConfigError);
  const auto keys = RunConfig::keys();
  EXPECT_FALSE(keys.empty());
  EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
}
