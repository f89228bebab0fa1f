#include "gsim/encoder.hpp"

#include <stdexcept>

namespace gsim {

using ad::Tensor;

std::string to_string(Readout r) {
  switch (r) {
    case Readout::kMean: return "mean";
    case Readout::kMax: return "max";
    case Readout::kSum: return "sum";
    case Readout::kGca: return "gca";
  }
  return "?";
}

Readout readout_from_string(const std::string& s) {
  for (auto r : {Readout::kMean, Readout::kMax, Readout::kSum, Readout::kGca}) {
    if (to_string(r) == s) return r;
  }
  throw std::invalid_argument("unknown readout '" + s + "' (expected mean, max, sum or gca)");
}

GraphBatch make_batch(std::span<const Graph* const> graphs) {
  GraphBatch b;
  for (std::size_t s = 0; s < graphs.size(); ++s) {
    const Graph& g = *graphs[s];
    const int base = b.offsets.back();
    b.labels.insert(b.labels.end(), g.labels.begin(), g.labels.end());
    b.segment.insert(b.segment.end(), g.labels.size(), static_cast<int>(s));
    for (const auto& [u, v] : g.edges) b.edges.emplace_back(base + u, base + v);
    b.offsets.push_back(base + g.num_nodes());
  }
  return b;
}

GraphBatch make_batch(const Graph& g) {
  const Graph* one[] = {&g};
  return make_batch(one);
}

Tensor gin_aggregate(const Tensor& x, const GraphBatch& batch, const Tensor& eps) {
  if (x.rows() != batch.num_nodes()) {
    throw ad::ShapeError("gin_aggregate: " + std::to_string(batch.num_nodes()) + " nodes but features " +
                         x.shape_string());
  }
  if (eps.size() != 1) throw ad::ShapeError("gin_aggregate: eps must be 1 x 1, got " + eps.shape_string());
  const int h = x.cols();
  const double self_w = 1.0 + eps.item();
  const auto in = x.values();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = self_w * in[i];
  for (const auto& [u, v] : batch.edges) {
    for (int j = 0; j < h; ++j) {
      out[static_cast<std::size_t>(u) * h + j] += in[static_cast<std::size_t>(v) * h + j];
      out[static_cast<std::size_t>(v) * h + j] += in[static_cast<std::size_t>(u) * h + j];
    }
  }
  const auto edges = batch.edges;
  return ad::make_result(x.rows(), h, std::move(out), {x, eps}, [edges, h](ad::Node& self) {
    ad::Node& xn = *self.parents[0];
    ad::Node& en = *self.parents[1];
    if (xn.requires_grad) {
      const double w = 1.0 + en.value[0];
      for (std::size_t i = 0; i < self.grad.size(); ++i) xn.grad[i] += w * self.grad[i];
      // The adjacency is symmetric, so the transpose is the same scatter.
      for (const auto& [u, v] : edges) {
        for (int j = 0; j < h; ++j) {
          xn.grad[static_cast<std::size_t>(v) * h + j] += self.grad[static_cast<std::size_t>(u) * h + j];
          xn.grad[static_cast<std::size_t>(u) * h + j] += self.grad[static_cast<std::size_t>(v) * h + j];
        }
      }
    }
    if (en.requires_grad) {
      double acc = 0.0;
      for (std::size_t i = 0; i < self.grad.size(); ++i) acc += self.grad[i] * xn.value[i];
      en.grad[0] += acc;
    }
  });
}

namespace {

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) { return ad::add(ad::matmul(x, w), b); }

}  // namespace

Tensor enhanced_layer(const Tensor& x, const GraphBatch& batch, const EnhancedLayerParams& p) {
  const Tensor agg = gin_aggregate(x, batch, p.eps);
  const Tensor gin = ad::relu(ad::layer_norm(linear(agg, p.gin_weight, p.gin_bias), p.ln_gamma, p.ln_beta));
  const Tensor res = ad::add(x, gin);
  return linear(ad::relu(linear(res, p.ffn1_weight, p.ffn1_bias)), p.ffn2_weight, p.ffn2_bias);
}

Tensor readout(const Tensor& x, const GraphBatch& batch, Readout kind, const Tensor* gca_weight) {
  if (x.rows() != batch.num_nodes()) throw ad::ShapeError("readout: node count mismatch " + x.shape_string());
  const std::span<const int> offs(batch.offsets);
  switch (kind) {
    case Readout::kMean: return ad::segment_mean(x, offs);
    case Readout::kMax: return ad::segment_max(x, offs);
    case Readout::kSum: return ad::segment_sum(x, offs);
    case Readout::kGca: {
      if (!gca_weight || !gca_weight->defined()) throw std::invalid_argument("readout: gca requires a weight matrix");
      if (gca_weight->rows() != x.cols() || gca_weight->cols() != x.cols()) {
        throw ad::ShapeError("readout: gca weight " + gca_weight->shape_string() + " for features " + x.shape_string());
      }
      const Tensor context = ad::tanh(ad::matmul(ad::segment_mean(x, offs), *gca_weight));
      const Tensor per_node = ad::gather_rows(context, batch.segment);
      const Tensor score = ad::sigmoid(ad::reduce_sum(ad::hadamard(x, per_node), 1));
      return ad::segment_sum(ad::scale_rows(x, score), offs);
    }
  }
  throw std::invalid_argument("readout: unknown kind");
}

Encoder::Encoder(const EncoderConfig& cfg, ParameterStore& store, SplitMix64& rng, const std::string& prefix)
    : cfg_(cfg) {
  if (cfg.alphabet_size < 1 || cfg.hidden < 1 || cfg.layers < 1) {
    throw std::invalid_argument("encoder: alphabet_size, hidden and layers must all be >= 1");
  }
  const int h = cfg.hidden;
  input_weight_ = store.add_xavier(prefix + "input.weight", cfg.alphabet_size, h, rng);
  input_bias_ = store.add(prefix + "input.bias", 1, h);
  for (int k = 1; k <= cfg.layers; ++k) {
    const std::string p = prefix + "layer" + std::to_string(k) + ".";
    EnhancedLayerParams lp;
    lp.eps = store.add(p + "eps", 1, 1);
    lp.gin_weight = store.add_xavier(p + "gin.weight", h, h, rng);
    lp.gin_bias = store.add(p + "gin.bias", 1, h);
    lp.ln_gamma = store.add_filled(p + "gin.ln.gamma", 1, h, 1.0);
    lp.ln_beta = store.add(p + "gin.ln.beta", 1, h);
    lp.ffn1_weight = store.add_xavier(p + "ffn.fc1.weight", h, h, rng);
    lp.ffn1_bias = store.add(p + "ffn.fc1.bias", 1, h);
    lp.ffn2_weight = store.add_xavier(p + "ffn.fc2.weight", h, h, rng);
    lp.ffn2_bias = store.add(p + "ffn.fc2.bias", 1, h);
    layers_.push_back(std::move(lp));
  }
  if (cfg.readout == Readout::kGca) {
    for (int k = 0; k <= cfg.layers; ++k) {
      gca_weights_.push_back(store.add_xavier(prefix + "gca" + std::to_string(k) + ".weight", h, h, rng));
    }
  }
}

std::vector<Tensor> Encoder::node_features(const GraphBatch& batch) const {
  for (Label l : batch.labels) {
    if (l < 0 || l >= cfg_.alphabet_size) {
      throw std::invalid_argument("encoder: label " + std::to_string(l) + " outside alphabet of size " +
                                  std::to_string(cfg_.alphabet_size));
    }
  }
  std::vector<Tensor> xs;
  // one_hot(labels) W == rows of W picked by label
  xs.push_back(ad::add(ad::gather_rows(input_weight_, batch.labels), input_bias_));
  for (const auto& lp : layers_) xs.push_back(enhanced_layer(xs.back(), batch, lp));
  return xs;
}

std::vector<Tensor> Encoder::encode(const GraphBatch& batch) const {
  const auto xs = node_features(batch);
  std::vector<Tensor> out;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    out.push_back(readout(xs[k], batch, cfg_.readout, gca_weights_.empty() ? nullptr : &gca_weights_[k]));
  }
  return out;
}

std::vector<Tensor> Encoder::encode(const Graph& g) const { return encode(make_batch(g)); }

}  // namespace gsim
