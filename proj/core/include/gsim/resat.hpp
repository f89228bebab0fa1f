#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gsim/graph.hpp"
#include "gsim/json_text.hpp"
#include "gsim/model.hpp"

namespace gsim {

/// (G_i, G_ij, remaining) where G_ij is a random-walk subgraph of G_i.
struct ResatTriple {
  std::string base_id;
  SubgraphExtraction extraction;
  Graph remaining;
};

struct ResatSkip {
  std::string graph_id;
  std::string reason;
};

struct ResatBuild {
  std::vector<ResatTriple> triples;
  std::vector<ResatSkip> skipped;
};

inline constexpr int kResatMaxAttempts = 20;

/// Draws `per_graph` triples per base graph. A draw whose remaining
/// subgraph is empty is redrawn; a graph that needs more than
/// kResatMaxAttempts redraws for any one triple is skipped entirely and
/// recorded. Each graph gets its own forked stream, in input order.
/// Throws std::invalid_argument for graphs with fewer than 4 nodes.
ResatBuild build_resat_dataset(std::span<const Graph> graphs, int per_graph, std::uint64_t seed);

struct ProbeConfig {
  int epochs = 200;
  int batch_size = 64;
  double lr = 1e-3;
  double val_fraction = 0.2;
  /// Hidden width = max(in, out) * multiplier; the best one is reported.
  std::vector<int> width_multipliers = {1, 2};
};

Json to_json(const ProbeConfig& c);

/// Row-major (rows x cols) plain matrix; probes never see autodiff nodes of
/// the frozen model.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;
};

struct ProbeResult {
  double best_val_mse = 0.0;
  int best_multiplier = 0;
  std::vector<double> val_mse_per_multiplier;
};

/// Trains a fresh relu MLP with two hidden layers from inputs to targets
/// (Adam, mean squared error over all entries) and returns the least
/// validation MSE seen after any epoch. Throws with fewer than 10 rows.
ProbeResult resat_probe(const Matrix& inputs, const Matrix& targets, const ProbeConfig& cfg, std::uint64_t seed);

/// Frozen probe data for one model. `pre` is only filled for DiffAtt and
/// holds [h_i, h_j]; `post` holds the fused vector the regressor sees.
struct ResatFeatures {
  Matrix pre;
  Matrix post;
  Matrix target;
};

/// `bases` must contain every triple's base graph (looked up by id).
ResatFeatures resat_features(const Model& model, std::span<const Graph> bases, std::span<const ResatTriple> triples);

struct ResatVariant {
  std::string name;
  const Model* model = nullptr;
  double gsc_mse_e3 = 0.0;
};

struct ResatRow {
  std::string variant;
  double gsc_mse_e3 = 0.0;
  double resat_mse = 0.0;
  /// DiffAtt only: probe on [h_i, h_j] before attention.
  bool has_before = false;
  double resat_mse_before = 0.0;
};

struct ResatReport {
  std::vector<ResatRow> rows;
  /// Spearman rho between the GSC and RESAT columns (DiffAtt uses its
  /// post-attention value). Undefined for fewer than two variants or
  /// constant columns.
  double rho = 0.0;
  bool rho_defined = false;
};

Json to_json(const ResatReport& r);

/// Probes every variant on the same triples. Throws when a variant has no
/// model.
ResatReport resat_compare(std::span<const ResatVariant> variants, std::span<const Graph> bases,
                          std::span<const ResatTriple> triples, const ProbeConfig& cfg, std::uint64_t seed);

}  // namespace gsim
