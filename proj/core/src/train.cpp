#include "gsim/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace gsim {

Json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"lr", c.lr},
          {"validations", c.validations},
          {"seed", c.seed}};
}

Json to_json(const TrainHistory& h) {
  Json vals = Json::array();
  for (const auto& v : h.validations) vals.push_back({{"step", v.step}, {"loss", v.loss}});
  return {{"train_loss", h.train_loss},
          {"validations", vals},
          {"best_step", h.best_step},
          {"best_val_loss", h.best_val_loss}};
}

Json to_json(const MetricsReport& r) {
  Json p = Json::object();
  for (const auto& [k, v] : r.p_at) p[std::to_string(k)] = v;
  return {{"mse_e3", r.mse_e3},
          {"rho", r.rho},
          {"tau", r.tau},
          {"p_at", p},
          {"queries", r.queries},
          {"pairs", r.pairs},
          {"undefined_rank_queries", r.undefined_rank_queries}};
}

std::vector<long> validation_steps(long total_steps, int validations) {
  if (total_steps < 1 || validations < 1) throw std::invalid_argument("validation_steps: counts must be positive");
  std::vector<long> steps;
  const double half = static_cast<double>(total_steps) / 2.0;
  for (int k = 1; k <= validations; ++k) {
    const long s = static_cast<long>(std::ceil(half + half * k / validations));
    const long clamped = std::clamp(s, 1L, total_steps);
    if (steps.empty() || steps.back() != clamped) steps.push_back(clamped);
  }
  return steps;
}

double mean_squared_error(std::span<const double> predicted, std::span<const double> labels) {
  if (predicted.size() != labels.size()) throw std::invalid_argument("mse: length mismatch");
  if (predicted.empty()) throw std::invalid_argument("mse: empty input");
  double acc = 0.0;
  for (std::size_t n = 0; n < predicted.size(); ++n) acc += (predicted[n] - labels[n]) * (predicted[n] - labels[n]);
  return acc / static_cast<double>(predicted.size());
}

std::vector<double> predict_pairs(const Model& model, const Dataset& ds, std::span<const PairRecord* const> pairs,
                                  std::size_t chunk) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (std::size_t start = 0; start < pairs.size(); start += chunk) {
    const std::size_t end = std::min(pairs.size(), start + chunk);
    std::vector<GraphPair> batch;
    for (std::size_t n = start; n < end; ++n) batch.emplace_back(&ds.graph(pairs[n]->i), &ds.graph(pairs[n]->j));
    const auto pred = model.predict(batch);
    out.insert(out.end(), pred.values().begin(), pred.values().end());
  }
  return out;
}

namespace {

double validation_loss(const Model& model, const Dataset& ds, std::span<const PairRecord* const> val) {
  const auto pred = predict_pairs(model, ds, val);
  std::vector<double> labels;
  for (const auto* p : val) labels.push_back(p->sim);
  return mean_squared_error(pred, labels);
}

}  // namespace

TrainResult train(const ModelConfig& model_cfg, const TrainConfig& cfg, const Dataset& ds) {
  if (cfg.epochs < 1 || cfg.batch_size < 1 || cfg.validations < 1) {
    throw std::invalid_argument("train: epochs, batch_size and validations must be positive");
  }
  if (!(cfg.lr >= 0.0)) throw std::invalid_argument("train: lr must be >= 0");
  auto train_pairs = ds.pairs_in(Split::kTrain);
  const auto val_pairs = ds.pairs_in(Split::kVal);
  if (train_pairs.empty()) throw std::invalid_argument("train: dataset has no train pairs");
  if (val_pairs.empty()) throw std::invalid_argument("train: dataset has no val pairs");

  TrainResult result;
  result.model = std::make_unique<Model>(model_cfg);
  Model& model = *result.model;
  Adam adam(model.params(), AdamConfig{.lr = cfg.lr});
  SplitMix64 order_rng(cfg.seed ^ 0x5DEECE66DULL);

  const auto per_epoch = static_cast<long>((train_pairs.size() + cfg.batch_size - 1) / cfg.batch_size);
  const long total = per_epoch * cfg.epochs;
  const auto checkpoints = validation_steps(total, cfg.validations);
  auto next_check = checkpoints.begin();

  std::vector<double> best = model.params().snapshot();
  bool have_best = false;
  long step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    order_rng.shuffle(std::span(train_pairs));
    for (std::size_t start = 0; start < train_pairs.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(train_pairs.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const std::span<const PairRecord* const> batch(train_pairs.data() + start, end - start);
      model.params().zero_grad();
      auto loss = model.batch_loss(batch, ds);
      loss.backward();
      adam.step();
      ++step;
      result.history.train_loss.push_back(loss.item());
      if (next_check != checkpoints.end() && *next_check == step) {
        ++next_check;
        const double v = validation_loss(model, ds, val_pairs);
        result.history.validations.push_back({step, v});
        if (!have_best || v < result.history.best_val_loss) {
          have_best = true;
          result.history.best_val_loss = v;
          result.history.best_step = step;
          best = model.params().snapshot();
        }
      }
    }
  }
  model.params().restore(best);
  model.params().zero_grad();
  result.optimizer = adam.states();
  return result;
}

MetricsReport ranking_metrics(const Dataset& ds, std::span<const double> predictions, const std::vector<int>& ks) {
  const auto test = ds.pairs_in(Split::kTest);
  if (test.size() != predictions.size()) {
    throw std::invalid_argument("evaluate: " + std::to_string(predictions.size()) + " predictions for " +
                                std::to_string(test.size()) + " test pairs");
  }
  if (test.empty()) throw std::invalid_argument("evaluate: dataset has no test pairs");

  struct Entry {
    std::size_t corpus_index;
    double pred;
    double label;
  };
  std::map<std::size_t, std::vector<Entry>> queries;
  std::vector<double> labels;
  for (std::size_t n = 0; n < test.size(); ++n) {
    queries[ds.graph_index(test[n]->i)].push_back({ds.graph_index(test[n]->j), predictions[n], test[n]->sim});
    labels.push_back(test[n]->sim);
  }

  MetricsReport r;
  r.pairs = test.size();
  r.mse_e3 = 1000.0 * mean_squared_error(predictions, labels);
  const int max_k = ks.empty() ? 0 : *std::max_element(ks.begin(), ks.end());
  for (int k : ks) r.p_at[k] = 0.0;
  for (auto& [query, entries] : queries) {
    if (static_cast<int>(entries.size()) < max_k) {
      throw std::invalid_argument("evaluate: query '" + ds.graphs[query].id + "' has " +
                                  std::to_string(entries.size()) + " corpus graphs, fewer than k=" +
                                  std::to_string(max_k));
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.corpus_index < b.corpus_index; });
    std::vector<double> p, y;
    for (const auto& e : entries) {
      p.push_back(e.pred);
      y.push_back(e.label);
    }
    ++r.queries;
    if (entries.size() >= 2) {
      const auto rho = spearman(p, y);
      const auto tau = kendall_tau_b(p, y);
      r.rho += rho.value;
      r.tau += tau.value;
      if (!rho.defined || !tau.defined) ++r.undefined_rank_queries;
    } else {
      ++r.undefined_rank_queries;
    }
    for (int k : ks) r.p_at[k] += precision_at_k(p, y, k);
  }
  r.rho /= r.queries;
  r.tau /= r.queries;
  for (auto& [k, v] : r.p_at) v /= r.queries;
  return r;
}

MetricsReport evaluate(const Model& model, const Dataset& ds, const std::vector<int>& ks) {
  const auto test = ds.pairs_in(Split::kTest);
  const auto pred = predict_pairs(model, ds, test);
  return ranking_metrics(ds, pred, ks);
}

}  // namespace gsim
