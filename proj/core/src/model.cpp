#include "gsim/model.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace gsim {

using ad::Tensor;

Json to_json(const ModelConfig& c) {
  return {{"alphabet_size", c.alphabet_size},
          {"hidden", c.hidden},
          {"layers", c.layers},
          {"readout", to_string(c.readout)},
          {"fusion",
           {{"kind", to_string(c.fusion.kind)},
            {"learnable_temperature", c.fusion.learnable_temperature},
            {"temperature", c.fusion.temperature},
            {"ntn_slices", c.fusion.ntn_slices},
            {"efn_reduction", c.fusion.efn_reduction}}},
          {"regressor_hidden1", c.regressor_hidden1},
          {"regressor_hidden2", c.regressor_hidden2},
          {"seed", c.seed}};
}

ModelConfig model_config_from_json(const Json& j) {
  ModelConfig c;
  c.alphabet_size = j.at("alphabet_size").get<int>();
  c.hidden = j.at("hidden").get<int>();
  c.layers = j.at("layers").get<int>();
  c.readout = readout_from_string(j.at("readout").get<std::string>());
  const auto& f = j.at("fusion");
  c.fusion.kind = fusion_from_string(f.at("kind").get<std::string>());
  c.fusion.learnable_temperature = f.at("learnable_temperature").get<bool>();
  c.fusion.temperature = f.at("temperature").get<double>();
  c.fusion.ntn_slices = f.at("ntn_slices").get<int>();
  c.fusion.efn_reduction = f.at("efn_reduction").get<int>();
  c.regressor_hidden1 = j.at("regressor_hidden1").get<int>();
  c.regressor_hidden2 = j.at("regressor_hidden2").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

namespace {

EncoderConfig encoder_config(const ModelConfig& c) { return {c.alphabet_size, c.hidden, c.layers, c.readout}; }

ModelConfig checked(ModelConfig c) {
  if (c.hidden < 1 || c.layers < 1 || c.alphabet_size < 1) {
    throw std::invalid_argument("model: hidden, layers and alphabet_size must be >= 1");
  }
  if (c.regressor_hidden1 < 0 || c.regressor_hidden2 < 0) throw std::invalid_argument("model: negative regressor width");
  return c;
}

}  // namespace

Model::Model(ModelConfig cfg)
    : cfg_(checked(cfg)),
      init_rng_(cfg_.seed),
      encoder_(encoder_config(cfg_), params_, init_rng_),
      fusion_(cfg_.fusion, cfg_.hidden, cfg_.layers + 1, params_, init_rng_) {
  const int in = fused_dim();
  const int w1 = regressor_width1();
  const int w2 = regressor_width2();
  reg_hidden_.w1 = params_.add_xavier("regressor.fc1.weight", in, w1, init_rng_);
  reg_hidden_.b1 = params_.add("regressor.fc1.bias", 1, w1);
  reg_hidden_.w2 = params_.add_xavier("regressor.fc2.weight", w1, w2, init_rng_);
  reg_hidden_.b2 = params_.add("regressor.fc2.bias", 1, w2);
  reg_out_w_ = params_.add_xavier("regressor.out.weight", w2, 1, init_rng_);
  reg_out_b_ = params_.add("regressor.out.bias", 1, 1);
}

int Model::fused_dim() const { return (cfg_.layers + 1) * fusion_.width(); }

int Model::regressor_width1() const {
  return cfg_.regressor_hidden1 > 0 ? cfg_.regressor_hidden1 : std::max(8, fused_dim() / 2);
}

int Model::regressor_width2() const {
  return cfg_.regressor_hidden2 > 0 ? cfg_.regressor_hidden2 : std::max(8, fused_dim() / 4);
}

Model::Encoded Model::encode_pairs(std::span<const GraphPair> pairs) const {
  if (pairs.empty()) throw std::invalid_argument("model: empty batch");
  std::vector<const Graph*> distinct;
  std::unordered_map<const Graph*, int> slot;
  const auto slot_of = [&](const Graph* g) {
    auto [it, fresh] = slot.emplace(g, static_cast<int>(distinct.size()));
    if (fresh) distinct.push_back(g);
    return it->second;
  };
  std::vector<int> idx_i, idx_j;
  for (const auto& [a, b] : pairs) {
    idx_i.push_back(slot_of(a));
    idx_j.push_back(slot_of(b));
  }
  const auto scales = encoder_.encode(make_batch(distinct));
  Encoded e;
  for (const auto& h : scales) {
    e.h_i.push_back(ad::gather_rows(h, idx_i));
    e.h_j.push_back(ad::gather_rows(h, idx_j));
  }
  return e;
}

Tensor Model::embed(std::span<const Graph* const> graphs) const {
  return ad::concat(encoder_.encode(make_batch(graphs)), 1);
}

FusedBatch Model::fuse(std::span<const GraphPair> pairs) const {
  const auto e = encode_pairs(pairs);
  FusedBatch out;
  std::vector<Tensor> fused, pre;
  for (std::size_t k = 0; k < e.h_i.size(); ++k) {
    fused.push_back(fusion_.fuse(e.h_i[k], e.h_j[k], static_cast<int>(k)));
    if (cfg_.fusion.kind == FusionKind::kDiffAtt) pre.push_back(ad::concat({e.h_i[k], e.h_j[k]}, 1));
  }
  out.fused = ad::concat(fused, 1);
  if (!pre.empty()) out.pre_attention = ad::concat(pre, 1);
  return out;
}

Tensor Model::predict(std::span<const GraphPair> pairs) const {
  const Tensor fused = fuse(pairs).fused;
  const Tensor hidden = ad::relu(mlp2(fused, reg_hidden_));
  return ad::add(ad::matmul(hidden, reg_out_w_), reg_out_b_);
}

double Model::forward(const Graph& g_i, const Graph& g_j) const {
  const GraphPair one[] = {{&g_i, &g_j}};
  return predict(one).item();
}

Tensor Model::batch_loss(std::span<const PairRecord* const> batch, const Dataset& ds) const {
  if (batch.empty()) throw std::invalid_argument("batch_loss: empty batch");
  std::vector<GraphPair> pairs;
  std::vector<double> labels;
  pairs.reserve(batch.size());
  for (const PairRecord* p : batch) {
    pairs.emplace_back(&ds.graph(p->i), &ds.graph(p->j));
    labels.push_back(p->sim);
  }
  const auto rows = static_cast<int>(labels.size());
  const Tensor target = Tensor::from(rows, 1, std::move(labels));
  return ad::mse_loss(predict(pairs), target);
}

Json checkpoint_to_json(const Model& model, const std::vector<AdamState>* optimizer) {
  Json params = Json::object();
  for (const auto& p : model.params().items()) {
    params[p.name] = {{"shape", {p.tensor.rows(), p.tensor.cols()}},
                      {"values", std::vector<double>(p.tensor.values().begin(), p.tensor.values().end())}};
  }
  Json j = {{"version", kCheckpointVersion}, {"config", to_json(model.config())}, {"parameters", params}};
  if (optimizer) {
    Json states = Json::object();
    const auto& items = model.params().items();
    for (std::size_t k = 0; k < optimizer->size() && k < items.size(); ++k) {
      const auto& s = (*optimizer)[k];
      states[items[k].name] = {{"m", s.m}, {"v", s.v}, {"step", s.step}};
    }
    j["optimizer"] = states;
  }
  return j;
}

void save_checkpoint(const Model& model, const std::filesystem::path& path, const std::vector<AdamState>* optimizer) {
  write_text_file(path, dump_json(checkpoint_to_json(model, optimizer), 1));
}

LoadedCheckpoint checkpoint_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("version")) throw std::runtime_error("checkpoint: missing version");
  const auto version = j.at("version").get<std::string>();
  if (version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported version '" + version + "' (expected \"" + kCheckpointVersion +
                             "\")");
  }
  LoadedCheckpoint out;
  try {
    out.model = std::make_unique<Model>(model_config_from_json(j.at("config")));
  } catch (const Json::exception& e) {
    throw std::runtime_error(std::string("checkpoint: bad config: ") + e.what());
  }
  const auto& stored = j.at("parameters");
  auto& items = out.model->params().items();
  for (auto& p : items) {
    if (!stored.contains(p.name)) throw std::runtime_error("checkpoint: missing parameter '" + p.name + "'");
    const auto& e = stored.at(p.name);
    const auto shape = e.at("shape").get<std::vector<int>>();
    if (shape.size() != 2 || shape[0] != p.tensor.rows() || shape[1] != p.tensor.cols()) {
      throw std::runtime_error("checkpoint: parameter '" + p.name + "' has shape conflicting with config, expected " +
                               p.tensor.shape_string());
    }
    const auto values = e.at("values").get<std::vector<double>>();
    if (values.size() != p.tensor.size()) {
      throw std::runtime_error("checkpoint: parameter '" + p.name + "' has " + std::to_string(values.size()) +
                               " values, expected " + std::to_string(p.tensor.size()));
    }
    std::copy(values.begin(), values.end(), p.tensor.mutable_values().begin());
  }
  for (auto it = stored.begin(); it != stored.end(); ++it) {
    if (!out.model->params().contains(it.key())) {
      throw std::runtime_error("checkpoint: unexpected parameter '" + it.key() + "' for this config");
    }
  }
  if (j.contains("optimizer")) {
    const auto& st = j.at("optimizer");
    for (const auto& p : items) {
      if (!st.contains(p.name)) throw std::runtime_error("checkpoint: optimizer state missing for '" + p.name + "'");
      const auto& e = st.at(p.name);
      AdamState s;
      s.m = e.at("m").get<std::vector<double>>();
      s.v = e.at("v").get<std::vector<double>>();
      s.step = e.at("step").get<long>();
      out.optimizer.push_back(std::move(s));
    }
  }
  return out;
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  try {
    return checkpoint_from_json(j);
  } catch (const Json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace gsim
