#pragma once

#include <cstdint>

#include "gsim/dataset.hpp"
#include "gsim/ged.hpp"

namespace gsim {

/// Synthetic dataset recipe. Graphs come in families: one G(n, p) base
/// graph followed by `family_size - 1` perturbed copies with 1..max_edits
/// edits each, every graph kept within [n_min, n_max] nodes.
///
/// The split is by graph. Train pairs join each train graph with its train
/// family members and `partners` random train graphs; val pairs join each
/// val graph with `partners` train graphs; test pairs join each test graph
/// (the query) with every train and val graph (the corpus).
struct GenConfig {
  int n_graphs = 400;
  int n_min = 5;
  int n_max = 8;
  double p = 0.3;
  int labels = 4;
  int family_size = 4;
  int max_edits = 3;
  int partners = 10;
  double val_fraction = 0.1;
  double test_fraction = 0.1;
  std::uint64_t ged_budget = kDefaultGedBudget;
  int workers = 1;
  std::uint64_t seed = 0;
};

Json to_json(const GenConfig& c);

struct GenResult {
  Dataset dataset;
  /// Pairs whose exact search ran out of budget; they are not in the dataset.
  int dropped_pairs = 0;
};

/// Throws std::invalid_argument on out-of-range settings.
GenResult generate_dataset(const GenConfig& cfg);

}  // namespace gsim
