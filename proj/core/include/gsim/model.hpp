#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "gsim/dataset.hpp"
#include "gsim/encoder.hpp"
#include "gsim/fusion.hpp"
#include "gsim/json_text.hpp"
#include "gsim/params.hpp"

namespace gsim {

struct ModelConfig {
  int alphabet_size = 1;
  int hidden = 64;
  int layers = 3;
  Readout readout = Readout::kGca;
  FusionConfig fusion;
  /// Regressor hidden widths; 0 picks fused_dim / 2 and fused_dim / 4
  /// (minimum 8).
  int regressor_hidden1 = 0;
  int regressor_hidden2 = 0;
  std::uint64_t seed = 0;
};

Json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const Json& j);

using GraphPair = std::pair<const Graph*, const Graph*>;

/// Fused rows for a batch of pairs. `pre_attention` is only filled for
/// DiffAtt and holds [h_i, h_j] per scale.
struct FusedBatch {
  ad::Tensor fused;
  ad::Tensor pre_attention;
};

/// f(G_i, G_j) = regressor(fusion(encoder(G_i), encoder(G_j))). The output
/// is an unclamped real.
class Model {
public:
  explicit Model(ModelConfig cfg);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const ModelConfig& config() const { return cfg_; }
  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }
  const Encoder& encoder() const { return encoder_; }
  const Fusion& fusion() const { return fusion_; }

  int fused_dim() const;
  int regressor_width1() const;
  int regressor_width2() const;

  /// Multi-scale graph vectors (one row per pair side) for every pair.
  struct Encoded {
    std::vector<ad::Tensor> h_i;
    std::vector<ad::Tensor> h_j;
  };
  Encoded encode_pairs(std::span<const GraphPair> pairs) const;

  /// The multi-scale concatenation of encoder outputs, one row per graph.
  ad::Tensor embed(std::span<const Graph* const> graphs) const;

  FusedBatch fuse(std::span<const GraphPair> pairs) const;
  /// (B x 1) predictions.
  ad::Tensor predict(std::span<const GraphPair> pairs) const;
  double forward(const Graph& g_i, const Graph& g_j) const;

  /// Mean squared error against the pairs' similarity labels.
  ad::Tensor batch_loss(std::span<const PairRecord* const> batch, const Dataset& ds) const;

private:
  ModelConfig cfg_;
  ParameterStore params_;
  SplitMix64 init_rng_;
  Encoder encoder_;
  Fusion fusion_;
  MlpParams reg_hidden_;
  ad::Tensor reg_out_w_, reg_out_b_;
};

inline constexpr const char* kCheckpointVersion = "1";

/// Writes config, every parameter (shape + values) and optional Adam state
/// as JSON with sorted keys and 17 significant digits.
void save_checkpoint(const Model& model, const std::filesystem::path& path,
                     const std::vector<AdamState>* optimizer = nullptr);
Json checkpoint_to_json(const Model& model, const std::vector<AdamState>* optimizer = nullptr);

struct LoadedCheckpoint {
  std::unique_ptr<Model> model;
  std::vector<AdamState> optimizer;  // empty when none was stored
};

/// Rebuilds the model from the stored config and overwrites every value.
/// Throws std::runtime_error naming the version, missing parameter, or
/// shape conflict.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);
LoadedCheckpoint checkpoint_from_json(const Json& j);

}  // namespace gsim
