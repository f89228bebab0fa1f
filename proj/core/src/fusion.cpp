#include "gsim/fusion.hpp"

#include <stdexcept>

namespace gsim {

using ad::Tensor;

namespace {

void require_pair(const char* op, const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ad::ShapeError(std::string(op) + ": embedding shapes differ " + a.shape_string() + " vs " + b.shape_string());
  }
}

MlpParams make_mlp(ParameterStore& store, const std::string& p, int in, int mid, int out, SplitMix64& rng) {
  MlpParams m;
  m.w1 = store.add_xavier(p + "fc1.weight", in, mid, rng);
  m.b1 = store.add(p + "fc1.bias", 1, mid);
  m.w2 = store.add_xavier(p + "fc2.weight", mid, out, rng);
  m.b2 = store.add(p + "fc2.bias", 1, out);
  return m;
}

}  // namespace

Tensor mlp2(const Tensor& x, const MlpParams& p) {
  return ad::add(ad::matmul(ad::relu(ad::add(ad::matmul(x, p.w1), p.b1)), p.w2), p.b2);
}

DiffAttOutput diffatt(const Tensor& h_i, const Tensor& h_j, const DiffAttParams& p) {
  require_pair("diffatt", h_i, h_j);
  const Tensor diff = mlp2(ad::abs(ad::sub(h_i, h_j)), p.mlp);
  if (diff.cols() != h_i.cols()) {
    throw ad::ShapeError("diffatt: MLP output " + diff.shape_string() + " must match embedding " + h_i.shape_string());
  }
  Tensor alpha;
  if (p.log_temperature.defined()) {
    alpha = ad::softmax_scaled(diff, ad::exp(ad::scale(p.log_temperature, -1.0)));
  } else {
    alpha = ad::softmax_with_temperature(diff, p.fixed_temperature);
  }
  return {ad::hadamard(alpha, h_i), ad::hadamard(alpha, h_j), alpha};
}

Tensor ntn(const Tensor& h_i, const Tensor& h_j, const NtnParams& p) {
  require_pair("ntn", h_i, h_j);
  if (p.slices.empty()) throw std::invalid_argument("ntn: at least one slice required");
  std::vector<Tensor> bilinear;
  bilinear.reserve(p.slices.size());
  for (const auto& w : p.slices) bilinear.push_back(ad::reduce_sum(ad::hadamard(ad::matmul(h_i, w), h_j), 1));
  const Tensor lin = ad::matmul(ad::concat({h_i, h_j}, 1), p.v);
  return ad::tanh(ad::add(ad::add(ad::concat(bilinear, 1), lin), p.b));
}

Tensor efn(const Tensor& h, const EfnParams& p) {
  if (h.cols() != p.down.rows()) throw ad::ShapeError("efn: input " + h.shape_string() + " vs W_D " + p.down.shape_string());
  const Tensor gate = ad::sigmoid(ad::matmul(ad::relu(ad::matmul(h, p.down)), p.up));
  return mlp2(ad::add(ad::hadamard(gate, h), h), p.mlp);
}

Tensor distance_fusion(const Tensor& h_i, const Tensor& h_j, int p) {
  require_pair("distance_fusion", h_i, h_j);
  const Tensor d = ad::sub(h_i, h_j);
  if (p == 1) return ad::abs(d);
  if (p == 2) return ad::hadamard(d, d);
  throw std::invalid_argument("distance_fusion: order must be 1 or 2");
}

Tensor no_fusion(const Tensor& h_i, const Tensor& h_j) {
  require_pair("no_fusion", h_i, h_j);
  return ad::concat({h_i, h_j}, 1);
}

std::string to_string(FusionKind k) {
  switch (k) {
    case FusionKind::kDiffAtt: return "diffatt";
    case FusionKind::kNtn: return "ntn";
    case FusionKind::kEfn: return "efn";
    case FusionKind::kAbs: return "abs";
    case FusionKind::kSquare: return "square";
    case FusionKind::kNone: return "none";
  }
  return "?";
}

FusionKind fusion_from_string(const std::string& s) {
  for (auto k : {FusionKind::kDiffAtt, FusionKind::kNtn, FusionKind::kEfn, FusionKind::kAbs, FusionKind::kSquare,
                 FusionKind::kNone}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown fusion '" + s + "' (expected diffatt, ntn, efn, abs, square or none)");
}

Fusion::Fusion(const FusionConfig& cfg, int hidden, int scales, ParameterStore& store, SplitMix64& rng,
               const std::string& prefix)
    : cfg_(cfg), hidden_(hidden) {
  if (cfg.kind == FusionKind::kDiffAtt && !cfg.learnable_temperature && !(cfg.temperature > 0.0)) {
    throw std::invalid_argument("fusion: diffatt temperature must be > 0");
  }
  if (cfg.ntn_slices < 1) throw std::invalid_argument("fusion: ntn_slices must be >= 1");
  if (cfg.efn_reduction < 1) throw std::invalid_argument("fusion: efn_reduction must be >= 1");
  for (int s = 0; s < scales; ++s) {
    const std::string p = prefix + "scale" + std::to_string(s) + ".";
    switch (cfg.kind) {
      case FusionKind::kDiffAtt: {
        DiffAttParams d;
        d.mlp = make_mlp(store, p + "mlp.", hidden, hidden, hidden, rng);
        if (cfg.learnable_temperature) {
          d.log_temperature = store.add(p + "log_temperature", 1, 1);
        } else {
          d.fixed_temperature = cfg.temperature;
        }
        diffatt_.push_back(std::move(d));
        break;
      }
      case FusionKind::kNtn: {
        NtnParams n;
        for (int k = 0; k < cfg.ntn_slices; ++k) {
          n.slices.push_back(store.add_xavier(p + "ntn.w" + std::to_string(k), hidden, hidden, rng));
        }
        n.v = store.add_xavier(p + "ntn.v", 2 * hidden, cfg.ntn_slices, rng);
        n.b = store.add(p + "ntn.b", 1, cfg.ntn_slices);
        ntn_.push_back(std::move(n));
        break;
      }
      case FusionKind::kEfn: {
        const int wide = 2 * hidden;
        const int narrow = std::max(1, wide / cfg.efn_reduction);
        EfnParams e;
        e.down = store.add_xavier(p + "efn.down", wide, narrow, rng);
        e.up = store.add_xavier(p + "efn.up", narrow, wide, rng);
        e.mlp = make_mlp(store, p + "efn.mlp.", wide, hidden, hidden, rng);
        efn_.push_back(std::move(e));
        break;
      }
      case FusionKind::kAbs:
      case FusionKind::kSquare:
      case FusionKind::kNone:
        break;
    }
  }
}

int Fusion::width() const {
  switch (cfg_.kind) {
    case FusionKind::kDiffAtt: return 2 * hidden_;
    case FusionKind::kNtn: return cfg_.ntn_slices;
    case FusionKind::kEfn: return hidden_;
    case FusionKind::kAbs:
    case FusionKind::kSquare: return hidden_;
    case FusionKind::kNone: return 2 * hidden_;
  }
  return 0;
}

Tensor Fusion::fuse(const Tensor& h_i, const Tensor& h_j, int scale) const {
  switch (cfg_.kind) {
    case FusionKind::kDiffAtt: {
      const auto out = diffatt(h_i, h_j, diffatt_.at(scale));
      return ad::concat({out.u_i, out.u_j}, 1);
    }
    case FusionKind::kNtn: return ntn(h_i, h_j, ntn_.at(scale));
    case FusionKind::kEfn: return efn(ad::concat({h_i, h_j}, 1), efn_.at(scale));
    case FusionKind::kAbs: return distance_fusion(h_i, h_j, 1);
    case FusionKind::kSquare: return distance_fusion(h_i, h_j, 2);
    case FusionKind::kNone: return no_fusion(h_i, h_j);
  }
  throw std::invalid_argument("fusion: unknown kind");
}

}  // namespace gsim
