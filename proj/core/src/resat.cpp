#include "gsim/resat.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "gsim/metrics.hpp"
#include "gsim/params.hpp"

namespace gsim {

using ad::Tensor;

ResatBuild build_resat_dataset(std::span<const Graph> graphs, int per_graph, std::uint64_t seed) {
  if (per_graph < 0) throw std::invalid_argument("resat: per_graph must be >= 0");
  for (const auto& g : graphs) {
    if (g.num_nodes() < 4) {
      throw std::invalid_argument("resat: graph '" + g.id + "' has " + std::to_string(g.num_nodes()) +
                                  " nodes, need at least 4");
    }
  }
  ResatBuild out;
  SplitMix64 root(seed);
  for (const auto& g : graphs) {
    SplitMix64 rng = root.fork();
    std::vector<ResatTriple> mine;
    bool exhausted = false;
    for (int t = 0; t < per_graph && !exhausted; ++t) {
      exhausted = true;
      for (int attempt = 0; attempt < kResatMaxAttempts; ++attempt) {
        auto ex = random_walk_subgraph(g, rng.next());
        auto rem = remaining_subgraph(g, ex);
        if (!rem) continue;
        mine.push_back({g.id, std::move(ex), std::move(*rem)});
        exhausted = false;
        break;
      }
    }
    if (exhausted) {
      out.skipped.push_back({g.id, "remaining subgraph empty after " + std::to_string(kResatMaxAttempts) +
                                       " attempts"});
      continue;
    }
    for (auto& t : mine) out.triples.push_back(std::move(t));
  }
  return out;
}

Json to_json(const ProbeConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"lr", c.lr},
          {"val_fraction", c.val_fraction},
          {"width_multipliers", c.width_multipliers}};
}

namespace {

Matrix to_matrix(const Tensor& t) {
  return {t.rows(), t.cols(), std::vector<double>(t.values().begin(), t.values().end())};
}

Tensor rows_of(const Matrix& m, std::span<const int> idx) {
  std::vector<double> v;
  v.reserve(idx.size() * static_cast<std::size_t>(m.cols));
  for (int r : idx) {
    const auto* src = m.values.data() + static_cast<std::size_t>(r) * m.cols;
    v.insert(v.end(), src, src + m.cols);
  }
  return Tensor::from(static_cast<int>(idx.size()), m.cols, std::move(v));
}

double probe_once(const Matrix& x, const Matrix& y, std::span<const int> train_idx, std::span<const int> val_idx,
                  int width, const ProbeConfig& cfg, std::uint64_t seed) {
  ParameterStore store;
  SplitMix64 rng(seed);
  const Tensor w1 = store.add_xavier("fc1.weight", x.cols, width, rng);
  const Tensor b1 = store.add("fc1.bias", 1, width);
  const Tensor w2 = store.add_xavier("fc2.weight", width, width, rng);
  const Tensor b2 = store.add("fc2.bias", 1, width);
  const Tensor w3 = store.add_xavier("out.weight", width, y.cols, rng);
  const Tensor b3 = store.add("out.bias", 1, y.cols);
  const auto net = [&](const Tensor& in) {
    const Tensor h1 = ad::relu(ad::add(ad::matmul(in, w1), b1));
    const Tensor h2 = ad::relu(ad::add(ad::matmul(h1, w2), b2));
    return ad::add(ad::matmul(h2, w3), b3);
  };
  Adam adam(store, AdamConfig{.lr = cfg.lr});
  const Tensor vx = rows_of(x, val_idx);
  const Tensor vy = rows_of(y, val_idx);
  std::vector<int> order(train_idx.begin(), train_idx.end());
  double best = 0.0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const std::span<const int> batch(order.data() + start, end - start);
      store.zero_grad();
      auto loss = ad::mse_loss(net(rows_of(x, batch)), rows_of(y, batch));
      loss.backward();
      adam.step();
    }
    const double v = ad::mse_loss(net(vx), vy).item();
    if (epoch == 0 || v < best) best = v;
  }
  return best;
}

}  // namespace

ProbeResult resat_probe(const Matrix& inputs, const Matrix& targets, const ProbeConfig& cfg, std::uint64_t seed) {
  if (inputs.rows != targets.rows) throw std::invalid_argument("resat_probe: input/target row counts differ");
  if (inputs.rows < 10) {
    throw std::invalid_argument("resat_probe: need at least 10 triples, got " + std::to_string(inputs.rows));
  }
  if (cfg.epochs < 1 || cfg.batch_size < 1 || cfg.width_multipliers.empty()) {
    throw std::invalid_argument("resat_probe: epochs, batch_size and width_multipliers must be positive");
  }
  if (!(cfg.val_fraction > 0.0 && cfg.val_fraction < 1.0)) {
    throw std::invalid_argument("resat_probe: val_fraction must be in (0, 1)");
  }
  std::vector<int> idx(static_cast<std::size_t>(inputs.rows));
  for (int r = 0; r < inputs.rows; ++r) idx[static_cast<std::size_t>(r)] = r;
  SplitMix64 split_rng(seed);
  split_rng.shuffle(std::span(idx));
  const auto n_val = std::clamp<std::size_t>(static_cast<std::size_t>(inputs.rows * cfg.val_fraction + 0.5), 1,
                                             idx.size() - 1);
  const std::span<const int> val_idx(idx.data(), n_val);
  const std::span<const int> train_idx(idx.data() + n_val, idx.size() - n_val);

  ProbeResult res;
  const int base = std::max(inputs.cols, targets.cols);
  for (std::size_t k = 0; k < cfg.width_multipliers.size(); ++k) {
    const int mult = cfg.width_multipliers[k];
    if (mult < 1) throw std::invalid_argument("resat_probe: width multiplier must be >= 1");
    const double v = probe_once(inputs, targets, train_idx, val_idx, base * mult, cfg, seed + 1 + k);
    res.val_mse_per_multiplier.push_back(v);
    if (k == 0 || v < res.best_val_mse) {
      res.best_val_mse = v;
      res.best_multiplier = mult;
    }
  }
  return res;
}

ResatFeatures resat_features(const Model& model, std::span<const Graph> bases, std::span<const ResatTriple> triples) {
  if (triples.empty()) throw std::invalid_argument("resat: no triples");
  std::unordered_map<std::string, const Graph*> by_id;
  for (const auto& g : bases) by_id.emplace(g.id, &g);
  std::vector<GraphPair> pairs;
  std::vector<const Graph*> remaining;
  for (const auto& t : triples) {
    auto it = by_id.find(t.base_id);
    if (it == by_id.end()) throw std::invalid_argument("resat: base graph '" + t.base_id + "' not supplied");
    pairs.emplace_back(it->second, &t.extraction.subgraph);
    remaining.push_back(&t.remaining);
  }
  const FusedBatch fb = model.fuse(pairs);
  ResatFeatures f;
  f.post = to_matrix(fb.fused);
  if (fb.pre_attention.defined()) f.pre = to_matrix(fb.pre_attention);
  f.target = to_matrix(model.embed(remaining));
  return f;
}

Json to_json(const ResatReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json j = {{"variant", row.variant}, {"gsc_mse_e3", row.gsc_mse_e3}, {"resat_mse", row.resat_mse}};
    if (row.has_before) {
      j["resat_mse_before"] = row.resat_mse_before;
      j["improvement"] = row.resat_mse_before > 0.0 ? (row.resat_mse_before - row.resat_mse) / row.resat_mse_before : 0.0;
    }
    rows.push_back(std::move(j));
  }
  return {{"rows", rows}, {"rho", r.rho}, {"rho_defined", r.rho_defined}};
}

ResatReport resat_compare(std::span<const ResatVariant> variants, std::span<const Graph> bases,
                          std::span<const ResatTriple> triples, const ProbeConfig& cfg, std::uint64_t seed) {
  ResatReport report;
  for (const auto& v : variants) {
    if (!v.model) throw std::invalid_argument("resat: no trained model for variant '" + v.name + "'");
  }
  for (const auto& v : variants) {
    const auto f = resat_features(*v.model, bases, triples);
    ResatRow row;
    row.variant = v.name;
    row.gsc_mse_e3 = v.gsc_mse_e3;
    row.resat_mse = resat_probe(f.post, f.target, cfg, seed).best_val_mse;
    if (!f.pre.values.empty()) {
      row.has_before = true;
      row.resat_mse_before = resat_probe(f.pre, f.target, cfg, seed).best_val_mse;
    }
    report.rows.push_back(std::move(row));
  }
  if (report.rows.size() >= 2) {
    std::vector<double> gsc, resat;
    for (const auto& row : report.rows) {
      gsc.push_back(row.gsc_mse_e3);
      resat.push_back(row.resat_mse);
    }
    const auto rho = spearman(gsc, resat);
    report.rho = rho.value;
    report.rho_defined = rho.defined;
  }
  return report;
}

}  // namespace gsim
