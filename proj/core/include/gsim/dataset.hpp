#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "gsim/graph.hpp"
#include "gsim/json_text.hpp"

namespace gsim {

enum class Split { kTrain, kVal, kTest };

std::string to_string(Split s);
Split split_from_string(const std::string& s);

/// One supervised pair. `i` and `j` are graph ids.
struct PairRecord {
  std::string i;
  std::string j;
  int ged = 0;
  double nged = 0.0;
  double sim = 1.0;
  Split split = Split::kTrain;

  friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

inline constexpr const char* kDatasetVersion = "1";

struct Dataset {
  std::vector<std::string> alphabet;
  std::vector<Graph> graphs;
  std::vector<PairRecord> pairs;

  /// Graph index by id; rebuilt by index().
  std::unordered_map<std::string, std::size_t> by_id;

  void index();
  const Graph& graph(const std::string& id) const;
  std::size_t graph_index(const std::string& id) const;
  std::vector<const PairRecord*> pairs_in(Split s) const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.alphabet == b.alphabet && a.graphs == b.graphs && a.pairs == b.pairs;
  }
};

/// Builds a labeled pair from a GED value.
PairRecord make_pair_record(const Graph& a, const Graph& b, int ged, Split split);

/// Every dataset invariant; messages carry the graph id or pair index.
std::vector<std::string> validate(const Dataset& ds);

Json to_json(const Dataset& ds);
/// Throws std::runtime_error on schema or invariant violations.
Dataset dataset_from_json(const Json& j);

void write_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

Json graph_to_json(const Graph& g);
Graph graph_from_json(const Json& j);

}  // namespace gsim
