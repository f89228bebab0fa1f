#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "gsim/dataset.hpp"
#include "gsim/metrics.hpp"
#include "gsim/model.hpp"
#include "gsim/params.hpp"

namespace gsim {

struct TrainConfig {
  int epochs = 18;
  int batch_size = 128;
  double lr = 1e-3;
  /// Validation points, spread evenly over the last half of the optimizer
  /// steps. The final step is always one of them.
  int validations = 20;
  std::uint64_t seed = 0;
};

Json to_json(const TrainConfig& c);

struct Validation {
  long step = 0;  // 1-based optimizer step after which it ran
  double loss = 0.0;
};

struct TrainHistory {
  std::vector<double> train_loss;  // one entry per optimizer step
  std::vector<Validation> validations;
  long best_step = 0;
  double best_val_loss = 0.0;
};

Json to_json(const TrainHistory& h);

struct TrainResult {
  /// Holds the parameters with the least validation loss.
  std::unique_ptr<Model> model;
  /// Optimizer state at the end of training.
  std::vector<AdamState> optimizer;
  TrainHistory history;
};

/// 1-based steps at which validation runs for a run of `total_steps`.
std::vector<long> validation_steps(long total_steps, int validations);

/// Trains a fresh model. Throws std::invalid_argument when the train or val
/// split is empty or a count is not positive.
TrainResult train(const ModelConfig& model_cfg, const TrainConfig& cfg, const Dataset& ds);

/// Raw predictions, evaluated in chunks without building a loss.
std::vector<double> predict_pairs(const Model& model, const Dataset& ds, std::span<const PairRecord* const> pairs,
                                  std::size_t chunk = 512);

double mean_squared_error(std::span<const double> predicted, std::span<const double> labels);

/// Ranking metrics over the test split. Every test pair (i, j) is query i
/// scored against corpus graph j; pairs are grouped by query, and ties in
/// the top-k break toward the corpus graph that comes first in the dataset.
/// `predictions[n]` belongs to the n-th test pair in dataset order.
/// Throws when a query has fewer corpus graphs than the largest k.
MetricsReport ranking_metrics(const Dataset& ds, std::span<const double> predictions,
                              const std::vector<int>& ks = {10, 20});

MetricsReport evaluate(const Model& model, const Dataset& ds, const std::vector<int>& ks = {10, 20});

Json to_json(const MetricsReport& r);

}  // namespace gsim
