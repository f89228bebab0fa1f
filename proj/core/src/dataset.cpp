#include "gsim/dataset.hpp"

#include <cmath>
#include <stdexcept>

#include "gsim/ged.hpp"

namespace gsim {

std::string to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "val") return Split::kVal;
  if (s == "test") return Split::kTest;
  throw std::invalid_argument("unknown split '" + s + "' (expected train, val or test)");
}

void Dataset::index() {
  by_id.clear();
  for (std::size_t k = 0; k < graphs.size(); ++k) by_id.emplace(graphs[k].id, k);
}

std::size_t Dataset::graph_index(const std::string& id) const {
  auto it = by_id.find(id);
  if (it == by_id.end()) throw std::out_of_range("no graph with id '" + id + "'");
  return it->second;
}

const Graph& Dataset::graph(const std::string& id) const { return graphs[graph_index(id)]; }

std::vector<const PairRecord*> Dataset::pairs_in(Split s) const {
  std::vector<const PairRecord*> out;
  for (const auto& p : pairs) {
    if (p.split == s) out.push_back(&p);
  }
  return out;
}

PairRecord make_pair_record(const Graph& a, const Graph& b, int ged, Split split) {
  PairRecord p;
  p.i = a.id;
  p.j = b.id;
  p.ged = ged;
  p.nged = nged(ged, a.num_nodes(), b.num_nodes());
  p.sim = similarity(p.nged);
  p.split = split;
  return p;
}

std::vector<std::string> validate(const Dataset& ds) {
  std::vector<std::string> out;
  std::unordered_map<std::string, std::size_t> ids;
  for (std::size_t k = 0; k < ds.graphs.size(); ++k) {
    const auto& g = ds.graphs[k];
    if (!ids.emplace(g.id, k).second) out.push_back("duplicate graph id '" + g.id + "'");
    for (const auto& v : validate(g)) out.push_back("graph '" + g.id + "': " + v);
    for (Label l : g.labels) {
      if (l >= static_cast<Label>(ds.alphabet.size())) {
        out.push_back("graph '" + g.id + "': label " + std::to_string(l) + " outside alphabet");
        break;
      }
    }
  }
  for (std::size_t k = 0; k < ds.pairs.size(); ++k) {
    const auto& p = ds.pairs[k];
    const std::string where = "pair " + std::to_string(k) + ": ";
    auto a = ids.find(p.i);
    auto b = ids.find(p.j);
    if (a == ids.end() || b == ids.end()) {
      out.push_back(where + "references unknown graph id");
      continue;
    }
    if (p.ged < 0) out.push_back(where + "negative ged");
    const double n1 = ds.graphs[a->second].num_nodes();
    const double n2 = ds.graphs[b->second].num_nodes();
    if (std::abs(p.nged - p.ged / ((n1 + n2) / 2.0)) > 1e-12) out.push_back(where + "nged != ged / mean node count");
    if (std::abs(p.sim - std::exp(-p.nged)) > 1e-12) out.push_back(where + "sim != exp(-nged)");
  }
  return out;
}

Json graph_to_json(const Graph& g) {
  Json edges = Json::array();
  for (const auto& [u, v] : g.edges) edges.push_back({u, v});
  return {{"id", g.id}, {"labels", g.labels}, {"edges", edges}};
}

Graph graph_from_json(const Json& j) {
  Graph g;
  g.id = j.at("id").get<std::string>();
  g.labels = j.at("labels").get<std::vector<Label>>();
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw std::runtime_error("graph '" + g.id + "': edge must be [u, v]");
    g.edges.emplace_back(e[0].get<NodeId>(), e[1].get<NodeId>());
  }
  return g;
}

Json to_json(const Dataset& ds) {
  Json graphs = Json::array();
  for (const auto& g : ds.graphs) graphs.push_back(graph_to_json(g));
  Json pairs = Json::array();
  for (const auto& p : ds.pairs) {
    pairs.push_back({{"i", p.i}, {"j", p.j}, {"ged", p.ged}, {"nged", p.nged}, {"sim", p.sim}, {"split", to_string(p.split)}});
  }
  return {{"version", kDatasetVersion}, {"alphabet", ds.alphabet}, {"graphs", graphs}, {"pairs", pairs}};
}

Dataset dataset_from_json(const Json& j) {
  const auto version = j.at("version").get<std::string>();
  if (version != kDatasetVersion) {
    throw std::runtime_error("unsupported dataset version '" + version + "' (expected \"" + kDatasetVersion + "\")");
  }
  Dataset ds;
  ds.alphabet = j.at("alphabet").get<std::vector<std::string>>();
  std::size_t k = 0;
  for (const auto& g : j.at("graphs")) {
    try {
      ds.graphs.push_back(graph_from_json(g));
    } catch (const Json::exception& e) {
      throw std::runtime_error("graphs[" + std::to_string(k) + "]: " + e.what());
    }
    ++k;
  }
  k = 0;
  for (const auto& p : j.at("pairs")) {
    try {
      PairRecord r;
      r.i = p.at("i").get<std::string>();
      r.j = p.at("j").get<std::string>();
      r.ged = p.at("ged").get<int>();
      r.nged = p.at("nged").get<double>();
      r.sim = p.at("sim").get<double>();
      r.split = split_from_string(p.at("split").get<std::string>());
      ds.pairs.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::runtime_error("pairs[" + std::to_string(k) + "]: " + e.what());
    }
    ++k;
  }
  if (auto v = validate(ds); !v.empty()) throw std::runtime_error("invalid dataset: " + v.front());
  ds.index();
  return ds;
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
  if (auto v = validate(ds); !v.empty()) throw std::runtime_error("refusing to write invalid dataset: " + v.front());
  write_text_file(path, dump_json(to_json(ds), 1));
}

Dataset read_dataset(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  try {
    return dataset_from_json(j);
  } catch (const Json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace gsim
