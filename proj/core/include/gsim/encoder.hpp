#pragma once

#include <span>
#include <string>
#include <vector>

#include "gsim/graph.hpp"
#include "gsim/params.hpp"
#include "gsim/tensor.hpp"

namespace gsim {

enum class Readout { kMean, kMax, kSum, kGca };

std::string to_string(Readout r);
Readout readout_from_string(const std::string& s);

/// Several graphs packed into one block-diagonal graph so that a single
/// set of dense ops encodes all of them. Graph s owns nodes
/// [offsets[s], offsets[s+1]).
struct GraphBatch {
  std::vector<Label> labels;
  std::vector<Edge> edges;  // global node ids
  std::vector<int> offsets{0};
  std::vector<int> segment;  // node -> graph index

  int num_graphs() const { return static_cast<int>(offsets.size()) - 1; }
  int num_nodes() const { return offsets.back(); }
};

GraphBatch make_batch(std::span<const Graph* const> graphs);
GraphBatch make_batch(const Graph& g);

/// Row i becomes (1 + eps) x_i + sum of x_j over neighbors j.
ad::Tensor gin_aggregate(const ad::Tensor& x, const GraphBatch& batch, const ad::Tensor& eps);

struct EnhancedLayerParams {
  ad::Tensor eps;  // 1 x 1
  ad::Tensor gin_weight, gin_bias, ln_gamma, ln_beta;
  ad::Tensor ffn1_weight, ffn1_bias, ffn2_weight, ffn2_bias;
};

/// x' = FFN(x + relu(LayerNorm(aggregate(x) W + b))), FFN = linear-relu-linear.
ad::Tensor enhanced_layer(const ad::Tensor& x, const GraphBatch& batch, const EnhancedLayerParams& p);

/// Graph-level readout over node rows grouped by `batch`; one row per graph.
/// kGca needs `gca_weight` (hidden x hidden):
///   c = tanh(mean(X) W),  h = sum_i sigmoid(x_i . c) x_i
ad::Tensor readout(const ad::Tensor& x, const GraphBatch& batch, Readout kind, const ad::Tensor* gca_weight = nullptr);

struct EncoderConfig {
  int alphabet_size = 1;
  int hidden = 64;
  int layers = 3;
  Readout readout = Readout::kGca;
};

/// Permutation-invariant multi-scale encoder: a linear projection of the
/// one-hot labels (scale 0) followed by `layers` enhanced GIN layers, with a
/// readout after each, giving layers + 1 graph vectors per graph.
class Encoder {
public:
  /// Registers parameters under `prefix` in `store`.
  Encoder(const EncoderConfig& cfg, ParameterStore& store, SplitMix64& rng, const std::string& prefix = "encoder.");

  const EncoderConfig& config() const { return cfg_; }
  int scales() const { return cfg_.layers + 1; }

  /// Node features per scale (N x hidden each), mostly for tests.
  std::vector<ad::Tensor> node_features(const GraphBatch& batch) const;
  /// One (num_graphs x hidden) tensor per scale.
  std::vector<ad::Tensor> encode(const GraphBatch& batch) const;
  /// Single graph: one 1 x hidden row per scale.
  std::vector<ad::Tensor> encode(const Graph& g) const;

  const EnhancedLayerParams& layer(int k) const { return layers_.at(k); }

private:
  EncoderConfig cfg_;
  ad::Tensor input_weight_, input_bias_;
  std::vector<EnhancedLayerParams> layers_;
  std::vector<ad::Tensor> gca_weights_;
};

}  // namespace gsim
