#include "gsim/gradcheck_suite.hpp"

#include "gsim/encoder.hpp"
#include "gsim/fusion.hpp"
#include "gsim/model.hpp"

namespace gsim {

using ad::Tensor;

namespace {

class Cases {
public:
  Cases(std::uint64_t seed, double h) : rng_(seed), h_(h) {}

  Tensor input(int rows, int cols) {
    std::vector<double> v(static_cast<std::size_t>(rows) * cols);
    for (auto& x : v) {
      const double mag = rng_.uniform(0.2, 1.0);
      x = rng_.below(2) ? mag : -mag;
    }
    return Tensor::from(rows, cols, std::move(v), true);
  }

  Tensor weights(int rows, int cols) {
    std::vector<double> v(static_cast<std::size_t>(rows) * cols);
    for (auto& x : v) x = rng_.uniform(-1.0, 1.0);
    return Tensor::from(rows, cols, std::move(v));
  }

  /// Checks sum(op(inputs) * R) for a fixed random R, so every output
  /// coordinate carries its own weight.
  void unary(const std::string& name, std::vector<Tensor> inputs,
             const std::function<Tensor(const std::vector<Tensor>&)>& op) {
    const Tensor probe = op(inputs);
    const Tensor w = weights(probe.rows(), probe.cols());
    run(name, std::move(inputs), [op, w](const std::vector<Tensor>& in) { return ad::sum_all(ad::hadamard(op(in), w)); });
  }

  void run(const std::string& name, std::vector<Tensor> inputs, const ScalarFn& f) {
    out_.push_back({name, grad_check(f, std::move(inputs), h_)});
  }

  SplitMix64& rng() { return rng_; }
  std::vector<GradCheckCase> take() { return std::move(out_); }

private:
  SplitMix64 rng_;
  double h_;
  std::vector<GradCheckCase> out_;
};

using In = const std::vector<Tensor>&;

Graph random_graph(SplitMix64& rng, int alphabet) {
  const auto n = static_cast<NodeId>(4 + rng.below(3));
  return generate_er(n, 0.5, alphabet, rng.next());
}

}  // namespace

std::vector<GradCheckCase> run_gradcheck_suite(std::uint64_t seed, double h) {
  Cases c(seed, h);
  const std::vector<int> offsets = {0, 2, 5};
  const std::vector<int> gather = {2, 0, 2, 1};

  c.unary("matmul", {c.input(3, 4), c.input(4, 2)}, [](In x) { return ad::matmul(x[0], x[1]); });
  c.unary("transpose", {c.input(3, 2)}, [](In x) { return ad::transpose(x[0]); });
  c.unary("add", {c.input(3, 2), c.input(3, 2)}, [](In x) { return ad::add(x[0], x[1]); });
  c.unary("add_row_broadcast", {c.input(3, 2), c.input(1, 2)}, [](In x) { return ad::add(x[0], x[1]); });
  c.unary("sub", {c.input(3, 2), c.input(3, 2)}, [](In x) { return ad::sub(x[0], x[1]); });
  c.unary("hadamard", {c.input(3, 2), c.input(3, 2)}, [](In x) { return ad::hadamard(x[0], x[1]); });
  c.unary("scale_const", {c.input(2, 3)}, [](In x) { return ad::scale(x[0], -1.7); });
  c.unary("scale_tensor", {c.input(2, 3), c.input(1, 1)}, [](In x) { return ad::scale(x[0], x[1]); });
  c.unary("scale_rows", {c.input(3, 2), c.input(3, 1)}, [](In x) { return ad::scale_rows(x[0], x[1]); });
  c.unary("abs", {c.input(3, 3)}, [](In x) { return ad::abs(x[0]); });
  c.unary("relu", {c.input(3, 3)}, [](In x) { return ad::relu(x[0]); });
  c.unary("tanh", {c.input(3, 3)}, [](In x) { return ad::tanh(x[0]); });
  c.unary("sigmoid", {c.input(3, 3)}, [](In x) { return ad::sigmoid(x[0]); });
  c.unary("exp", {c.input(3, 3)}, [](In x) { return ad::exp(x[0]); });
  c.unary("softmax_temperature", {c.input(3, 4)}, [](In x) { return ad::softmax_with_temperature(x[0], 0.7); });
  c.unary("softmax_scaled", {c.input(3, 4), Tensor::from(1, 1, {0.8}, true)}, [](In x) { return ad::softmax_scaled(x[0], x[1]); });
  c.unary("layer_norm", {c.input(3, 4), c.input(1, 4), c.input(1, 4)},
          [](In x) { return ad::layer_norm(x[0], x[1], x[2]); });
  c.unary("concat_rows", {c.input(2, 3), c.input(1, 3)}, [](In x) { return ad::concat({x[0], x[1]}, 0); });
  c.unary("concat_cols", {c.input(2, 3), c.input(2, 1)}, [](In x) { return ad::concat({x[0], x[1]}, 1); });
  for (int axis : {0, 1}) {
    const std::string a = std::to_string(axis);
    c.unary("reduce_sum_" + a, {c.input(3, 4)}, [axis](In x) { return ad::reduce_sum(x[0], axis); });
    c.unary("reduce_mean_" + a, {c.input(3, 4)}, [axis](In x) { return ad::reduce_mean(x[0], axis); });
    c.unary("reduce_max_" + a, {c.input(3, 4)}, [axis](In x) { return ad::reduce_max(x[0], axis); });
  }
  c.unary("sum_all", {c.input(3, 4)}, [](In x) { return ad::sum_all(x[0]); });
  c.unary("segment_sum", {c.input(5, 3)}, [offsets](In x) { return ad::segment_sum(x[0], offsets); });
  c.unary("segment_mean", {c.input(5, 3)}, [offsets](In x) { return ad::segment_mean(x[0], offsets); });
  c.unary("segment_max", {c.input(5, 3)}, [offsets](In x) { return ad::segment_max(x[0], offsets); });
  c.unary("gather_rows", {c.input(3, 2)}, [gather](In x) { return ad::gather_rows(x[0], gather); });
  c.run("mse_loss", {c.input(4, 1), c.input(4, 1)}, [](In x) { return ad::mse_loss(x[0], x[1]); });

  const Graph g1 = random_graph(c.rng(), 3);
  const Graph g2 = random_graph(c.rng(), 3);
  const Graph* both[] = {&g1, &g2};
  const GraphBatch batch = make_batch(both);
  const int n = batch.num_nodes();
  c.unary("gin_aggregate", {c.input(n, 3), c.input(1, 1)},
          [batch](In x) { return gin_aggregate(x[0], batch, x[1]); });
  for (auto kind : {Readout::kMean, Readout::kMax, Readout::kSum}) {
    c.unary("readout_" + to_string(kind), {c.input(n, 3)}, [batch, kind](In x) { return readout(x[0], batch, kind); });
  }
  c.unary("readout_gca", {c.input(n, 3), c.input(3, 3)},
          [batch](In x) { return readout(x[0], batch, Readout::kGca, &x[1]); });
  {
    const int hd = 3;
    std::vector<Tensor> in = {c.input(n, hd), c.input(1, 1), c.input(hd, hd), c.input(1, hd), c.input(1, hd),
                              c.input(1, hd), c.input(hd, hd), c.input(1, hd), c.input(hd, hd), c.input(1, hd)};
    c.unary("enhanced_layer", std::move(in), [batch](In x) {
      EnhancedLayerParams p{x[1], x[2], x[3], x[4], x[5], x[6], x[7], x[8], x[9]};
      return enhanced_layer(x[0], batch, p);
    });
  }
  {
    const int hd = 4;
    std::vector<Tensor> in = {c.input(3, hd), c.input(3, hd), c.input(hd, hd), c.input(1, hd),
                              c.input(hd, hd), c.input(1, hd), c.input(1, 1)};
    c.unary("diffatt", std::move(in), [](In x) {
      DiffAttParams p{{x[2], x[3], x[4], x[5]}, x[6], 1.0};
      const auto out = diffatt(x[0], x[1], p);
      return ad::concat({out.u_i, out.u_j}, 1);
    });
  }
  {
    const int hd = 3;
    std::vector<Tensor> in = {c.input(2, hd), c.input(2, hd), c.input(hd, hd), c.input(hd, hd),
                              c.input(2 * hd, 2), c.input(1, 2)};
    c.unary("ntn", std::move(in), [](In x) {
      NtnParams p{{x[2], x[3]}, x[4], x[5]};
      return ntn(x[0], x[1], p);
    });
  }
  {
    const int wide = 4;
    std::vector<Tensor> in = {c.input(2, wide), c.input(wide, 2), c.input(2, wide), c.input(wide, 2),
                              c.input(1, 2),    c.input(2, 2),    c.input(1, 2)};
    c.unary("efn", std::move(in), [](In x) {
      EfnParams p{x[1], x[2], {x[3], x[4], x[5], x[6]}};
      return efn(x[0], p);
    });
  }
  c.unary("distance_abs", {c.input(2, 3), c.input(2, 3)}, [](In x) { return distance_fusion(x[0], x[1], 1); });
  c.unary("distance_square", {c.input(2, 3), c.input(2, 3)}, [](In x) { return distance_fusion(x[0], x[1], 2); });

  {
    ModelConfig mc;
    mc.alphabet_size = 3;
    mc.hidden = 8;
    mc.layers = 2;
    mc.readout = Readout::kGca;
    mc.fusion.kind = FusionKind::kDiffAtt;
    mc.seed = c.rng().next();
    auto model = std::make_shared<Model>(mc);
    // Move every parameter off zero so bias-only paths are exercised too.
    for (auto& p : model->params().items()) {
      for (auto& v : p.tensor.mutable_values()) v += c.rng().uniform(-0.1, 0.1);
    }
    auto ds = std::make_shared<Dataset>();
    ds->alphabet = {"a", "b", "c"};
    for (int k = 0; k < 4; ++k) {
      Graph g = random_graph(c.rng(), 3);
      g.id = "q" + std::to_string(k);
      ds->graphs.push_back(std::move(g));
    }
    ds->index();
    ds->pairs.push_back(make_pair_record(ds->graphs[0], ds->graphs[1], 2, Split::kTrain));
    ds->pairs.push_back(make_pair_record(ds->graphs[2], ds->graphs[3], 3, Split::kTrain));
    std::vector<Tensor> params;
    for (const auto& p : model->params().items()) params.push_back(p.tensor);
    c.run("model_diffatt_gca", std::move(params), [model, ds](In) {
      const std::vector<const PairRecord*> batch = {&ds->pairs[0], &ds->pairs[1]};
      return model->batch_loss(batch, *ds);
    });
  }
  return c.take();
}

}  // namespace gsim
