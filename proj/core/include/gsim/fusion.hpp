#pragma once

#include <string>
#include <vector>

#include "gsim/params.hpp"
#include "gsim/tensor.hpp"

namespace gsim {

// Every fusion op works row-wise: h_i and h_j are (B x hidden) with one
// graph pair per row.

struct MlpParams {
  ad::Tensor w1, b1, w2, b2;
};

/// linear -> relu -> linear
ad::Tensor mlp2(const ad::Tensor& x, const MlpParams& p);

struct DiffAttParams {
  MlpParams mlp;
  /// 1 x 1 log-temperature (t = exp(theta)) when learnable, else undefined.
  ad::Tensor log_temperature;
  double fixed_temperature = 1.0;
};

struct DiffAttOutput {
  ad::Tensor u_i;
  ad::Tensor u_j;
  ad::Tensor alpha;
};

/// h_diff = MLP(|h_i - h_j|), alpha = softmax(h_diff / t),
/// u_i = alpha * h_i, u_j = alpha * h_j (element-wise).
DiffAttOutput diffatt(const ad::Tensor& h_i, const ad::Tensor& h_j, const DiffAttParams& p);

struct NtnParams {
  std::vector<ad::Tensor> slices;  // K of (hidden x hidden)
  ad::Tensor v;                    // (2 hidden x K), applied as [h_i, h_j] V
  ad::Tensor b;                    // 1 x K
};

/// tanh(h_i^T W[k] h_j + V [h_i, h_j] + b) for every slice k; (B x K).
ad::Tensor ntn(const ad::Tensor& h_i, const ad::Tensor& h_j, const NtnParams& p);

struct EfnParams {
  ad::Tensor down;  // (2 hidden x 2 hidden / r)
  ad::Tensor up;    // (2 hidden / r x 2 hidden)
  MlpParams mlp;    // 2 hidden -> hidden -> hidden
};

/// MLP(sigmoid(relu(h W_D) W_U) * h + h) over the concatenation h = [h_i, h_j].
ad::Tensor efn(const ad::Tensor& h_concat, const EfnParams& p);

/// |h_i - h_j| for p = 1, (h_i - h_j)^2 for p = 2.
ad::Tensor distance_fusion(const ad::Tensor& h_i, const ad::Tensor& h_j, int p);

/// [h_i, h_j]
ad::Tensor no_fusion(const ad::Tensor& h_i, const ad::Tensor& h_j);

enum class FusionKind { kDiffAtt, kNtn, kEfn, kAbs, kSquare, kNone };

std::string to_string(FusionKind k);
FusionKind fusion_from_string(const std::string& s);

struct FusionConfig {
  FusionKind kind = FusionKind::kDiffAtt;
  bool learnable_temperature = true;
  double temperature = 1.0;  // used when not learnable
  int ntn_slices = 16;
  int efn_reduction = 4;
};

/// Per-scale fusion modules with their own parameters.
class Fusion {
public:
  Fusion(const FusionConfig& cfg, int hidden, int scales, ParameterStore& store, SplitMix64& rng,
         const std::string& prefix = "fusion.");

  const FusionConfig& config() const { return cfg_; }
  /// Columns produced per scale.
  int width() const;

  /// Fused rows for one scale; for DiffAtt this is [u_i, u_j].
  ad::Tensor fuse(const ad::Tensor& h_i, const ad::Tensor& h_j, int scale) const;

  const DiffAttParams& diffatt_params(int scale) const { return diffatt_.at(scale); }
  DiffAttParams& diffatt_params(int scale) { return diffatt_.at(scale); }

private:
  FusionConfig cfg_;
  int hidden_;
  std::vector<DiffAttParams> diffatt_;
  std::vector<NtnParams> ntn_;
  std::vector<EfnParams> efn_;
};

}  // namespace gsim
