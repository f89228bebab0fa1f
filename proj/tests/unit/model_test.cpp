#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "gsim/ged.hpp"
#include "gsim/model.hpp"

using namespace gsim;

namespace {

ModelConfig small_config(FusionKind kind = FusionKind::kDiffAtt, Readout r = Readout::kGca) {
  ModelConfig c;
  c.alphabet_size = 3;
  c.hidden = 8;
  c.layers = 2;
  c.readout = r;
  c.fusion.kind = kind;
  c.seed = 5;
  return c;
}

Dataset tiny_dataset() {
  Dataset ds;
  ds.alphabet = {"a", "b", "c"};
  for (int k = 0; k < 4; ++k) {
    Graph g = generate_er(static_cast<NodeId>(4 + k % 3), 0.5, 3, 100 + k);
    g.id = "g" + std::to_string(k);
    ds.graphs.push_back(std::move(g));
  }
  ds.index();
  for (int k = 0; k + 1 < 4; ++k) {
    ds.pairs.push_back(make_pair_record(ds.graphs[k], ds.graphs[k + 1],
                                        ged_exact(ds.graphs[k], ds.graphs[k + 1]).cost, Split::kTrain));
  }
  return ds;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("gsim_model_test_" + name);
}

}  // namespace

TEST(Model, SelfPairHasEqualAttendedEmbeddings) {
  Model m(small_config());
  const Graph g = generate_er(5, 0.5, 3, 1);
  EXPECT_TRUE(std::isfinite(m.forward(g, g)));
  const GraphPair one[] = {{&g, &g}};
  const auto fused = m.fuse(one).fused;
  const int h = m.config().hidden;
  for (int s = 0; s <= m.config().layers; ++s) {
    for (int j = 0; j < h; ++j) EXPECT_EQ(fused.at(0, s * 2 * h + j), fused.at(0, s * 2 * h + h + j));
  }
}

TEST(Model, PermutationInvariantForward) {
  SplitMix64 r(3);
  for (int t = 0; t < 40; ++t) {
    ModelConfig c = small_config(t % 2 ? FusionKind::kDiffAtt : FusionKind::kNtn, static_cast<Readout>(t % 4));
    c.seed = r.next();
    Model m(c);
    const Graph a = generate_er(static_cast<NodeId>(3 + r.below(5)), 0.4, 3, r.next());
    const Graph b = generate_er(static_cast<NodeId>(3 + r.below(5)), 0.4, 3, r.next());
    const double base = m.forward(a, b);
    const double moved = m.forward(permute(a, random_permutation(a.num_nodes(), r.next())), b);
    EXPECT_LE(std::abs(moved - base), 1e-8 * std::max(1.0, std::abs(base)));
  }
}

TEST(Model, FusedWidthAndRegressorDefaults) {
  Model m(small_config());
  EXPECT_EQ(m.fused_dim(), 3 * 16);
  EXPECT_EQ(m.regressor_width1(), 24);
  EXPECT_EQ(m.regressor_width2(), 12);
  Model n(small_config(FusionKind::kAbs));
  EXPECT_EQ(n.fused_dim(), 24);
  EXPECT_EQ(n.regressor_width2(), 8);
  EXPECT_THROW(Model(ModelConfig{.alphabet_size = 0}), std::invalid_argument);
}

TEST(Model, BatchLossExamples) {
  Dataset ds = tiny_dataset();
  Model m(small_config());
  for (auto& p : ds.pairs) {
    const double pred = m.forward(ds.graph(p.i), ds.graph(p.j));
    p.sim = pred;  // bypasses the label invariant on purpose
  }
  std::vector<const PairRecord*> all;
  for (const auto& p : ds.pairs) all.push_back(&p);
  EXPECT_NEAR(m.batch_loss(all, ds).item(), 0.0, 1e-28);

  PairRecord one = ds.pairs[0];
  one.sim = 0.25;
  const double pred = m.forward(ds.graph(one.i), ds.graph(one.j));
  const PairRecord* single[] = {&one};
  EXPECT_NEAR(m.batch_loss(single, ds).item(), (pred - 0.25) * (pred - 0.25), 1e-15);
  EXPECT_THROW(m.batch_loss({}, ds), std::invalid_argument);
}

TEST(Model, AsymmetryIsAllowed) {
  // f(a, b) and f(b, a) may differ; both must be finite.
  Model m(small_config(FusionKind::kNone));
  const Graph a = generate_er(4, 0.5, 3, 1);
  const Graph b = generate_er(6, 0.5, 3, 2);
  EXPECT_TRUE(std::isfinite(m.forward(a, b)));
  EXPECT_TRUE(std::isfinite(m.forward(b, a)));
}

TEST(Checkpoint, RoundTripIsBitExact) {
  for (auto kind : {FusionKind::kDiffAtt, FusionKind::kNtn, FusionKind::kEfn, FusionKind::kNone}) {
    Model m(small_config(kind));
    SplitMix64 r(1);
    for (auto& p : m.params().items()) {
      for (auto& v : p.tensor.mutable_values()) v += r.uniform(-1.0, 1.0) / 3.0;
    }
    std::vector<AdamState> opt(m.params().size());
    for (std::size_t k = 0; k < opt.size(); ++k) {
      opt[k].m.assign(m.params().items()[k].tensor.size(), 1.0 / 7.0);
      opt[k].v.assign(m.params().items()[k].tensor.size(), 1e-300);
      opt[k].step = 42;
    }
    const auto path = temp_file("rt.json");
    save_checkpoint(m, path, &opt);
    const auto back = load_checkpoint(path);
    EXPECT_EQ(back.model->params().snapshot(), m.params().snapshot());
    ASSERT_EQ(back.optimizer.size(), opt.size());
    EXPECT_EQ(back.optimizer[3].m, opt[3].m);
    EXPECT_EQ(back.optimizer[3].v, opt[3].v);
    EXPECT_EQ(back.optimizer[3].step, 42);
    EXPECT_EQ(dump_json(checkpoint_to_json(*back.model, &back.optimizer)), dump_json(checkpoint_to_json(m, &opt)));
    std::filesystem::remove(path);
  }
}

TEST(Checkpoint, NamedRejections) {
  Model m(small_config());
  const Json good = checkpoint_to_json(m);

  const auto expect_error = [](const Json& j, const std::string& needle) {
    try {
      checkpoint_from_json(j);
      FAIL() << "accepted; wanted " << needle;
    } catch (const std::runtime_error& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  Json v = good;
  v["version"] = "0";
  expect_error(v, "version");
  Json missing = good;
  missing["parameters"].erase("regressor.out.bias");
  expect_error(missing, "regressor.out.bias");
  Json shape = good;
  shape["config"]["hidden"] = 9;
  expect_error(shape, "shape");
  Json extra = good;
  extra["parameters"]["bogus"] = {{"shape", {1, 1}}, {"values", {0.0}}};
  expect_error(extra, "bogus");
}

TEST(Checkpoint, TruncatedFileIsParseError) {
  Model m(small_config());
  const auto path = temp_file("trunc.json");
  save_checkpoint(m, path);
  const auto full = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, full / 2);
  EXPECT_THROW(load_checkpoint(path), std::runtime_error);
  std::filesystem::remove(path);
}
