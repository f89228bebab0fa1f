#include "gsim/generate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <span>
#include <stdexcept>
#include <thread>

#include "gsim/rng.hpp"

namespace gsim {

Json to_json(const GenConfig& c) {
  return {{"n_graphs", c.n_graphs},       {"n_min", c.n_min},
          {"n_max", c.n_max},             {"p", c.p},
          {"labels", c.labels},           {"family_size", c.family_size},
          {"max_edits", c.max_edits},     {"partners", c.partners},
          {"val_fraction", c.val_fraction}, {"test_fraction", c.test_fraction},
          {"ged_budget", c.ged_budget},   {"workers", c.workers},
          {"seed", c.seed}};
}

namespace {

void check(const GenConfig& c) {
  const auto fail = [](const std::string& m) { throw std::invalid_argument("gen: " + m); };
  if (c.n_graphs < 3) fail("n_graphs must be >= 3");
  if (c.n_min < 1 || c.n_max < c.n_min) fail("need 1 <= n_min <= n_max");
  if (c.n_max > kMaxExactGedNodes) fail("n_max must be <= " + std::to_string(kMaxExactGedNodes));
  if (!(c.p >= 0.0 && c.p <= 1.0)) fail("p must be in [0, 1]");
  if (c.labels < 1) fail("labels must be >= 1");
  if (c.family_size < 1) fail("family_size must be >= 1");
  if (c.max_edits < 1) fail("max_edits must be >= 1");
  if (c.partners < 1) fail("partners must be >= 1");
  if (!(c.val_fraction > 0.0 && c.test_fraction > 0.0 && c.val_fraction + c.test_fraction < 1.0)) {
    fail("val_fraction and test_fraction must be positive with a sum below 1");
  }
  if (c.ged_budget < 1) fail("ged_budget must be >= 1");
  if (c.workers < 1) fail("workers must be >= 1");
}

std::string graph_id(int k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "g%04d", k);
  return buf;
}

Graph sized_perturbation(const Graph& base, const GenConfig& c, SplitMix64& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(c.max_edits)));
    auto res = perturb(base, k, c.labels, rng.next());
    const NodeId n = res.graph.num_nodes();
    if (n >= c.n_min && n <= c.n_max) return std::move(res.graph);
  }
  // Relabels and edge edits never change the size, so only pathological
  // settings land here; fall back to an unperturbed copy.
  return base;
}

struct Candidate {
  std::size_t a;
  std::size_t b;
  Split split;
};

}  // namespace

GenResult generate_dataset(const GenConfig& cfg) {
  check(cfg);
  SplitMix64 rng(cfg.seed);
  GenResult out;
  Dataset& ds = out.dataset;
  for (int l = 0; l < cfg.labels; ++l) ds.alphabet.push_back("L" + std::to_string(l));

  std::vector<int> family(cfg.n_graphs);
  for (int k = 0; k < cfg.n_graphs; ++k) {
    const int f = k / cfg.family_size;
    family[k] = f;
    Graph g;
    if (k % cfg.family_size == 0) {
      const auto n = static_cast<NodeId>(cfg.n_min + rng.below(static_cast<std::uint64_t>(cfg.n_max - cfg.n_min + 1)));
      g = generate_er(n, cfg.p, cfg.labels, rng.next());
    } else {
      g = sized_perturbation(ds.graphs[static_cast<std::size_t>(f) * cfg.family_size], cfg, rng);
    }
    g.id = graph_id(k);
    ds.graphs.push_back(std::move(g));
  }
  ds.index();

  std::vector<std::size_t> order(ds.graphs.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  rng.shuffle(std::span(order));
  const auto n = static_cast<double>(order.size());
  const auto n_test = static_cast<std::size_t>(std::max(1.0, std::round(n * cfg.test_fraction)));
  const auto n_val = static_cast<std::size_t>(std::max(1.0, std::round(n * cfg.val_fraction)));
  std::vector<Split> split(order.size(), Split::kTrain);
  for (std::size_t k = 0; k < n_test; ++k) split[order[k]] = Split::kTest;
  for (std::size_t k = n_test; k < n_test + n_val; ++k) split[order[k]] = Split::kVal;
  std::vector<std::size_t> train_ids, val_ids, test_ids;
  for (std::size_t k = 0; k < split.size(); ++k) {
    (split[k] == Split::kTrain ? train_ids : split[k] == Split::kVal ? val_ids : test_ids).push_back(k);
  }
  if (train_ids.size() < 2) throw std::invalid_argument("gen: too few graphs for a train split");

  std::vector<Candidate> cands;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  const auto add = [&](std::size_t a, std::size_t b, Split s) {
    if (a == b || !seen.emplace(std::min(a, b), std::max(a, b)).second) return;
    cands.push_back({a, b, s});
  };
  const auto partners = std::min<std::size_t>(static_cast<std::size_t>(cfg.partners), train_ids.size() - 1);
  for (std::size_t a : train_ids) {
    for (std::size_t b : train_ids) {
      if (b > a && family[b] == family[a]) add(a, b, Split::kTrain);
    }
    for (std::size_t drawn = 0, tries = 0; drawn < partners && tries < 50 * partners; ++tries) {
      const std::size_t b = train_ids[rng.below(train_ids.size())];
      const auto before = cands.size();
      add(a, b, Split::kTrain);
      drawn += cands.size() > before;
    }
  }
  const auto val_partners = std::min<std::size_t>(static_cast<std::size_t>(cfg.partners), train_ids.size());
  for (std::size_t a : val_ids) {
    std::vector<std::size_t> pool = train_ids;
    rng.shuffle(std::span(pool));
    for (std::size_t k = 0; k < val_partners; ++k) add(a, pool[k], Split::kVal);
  }
  for (std::size_t a : test_ids) {
    for (std::size_t b = 0; b < ds.graphs.size(); ++b) {
      if (split[b] != Split::kTest) add(a, b, Split::kTest);
    }
  }

  std::vector<GedResult> labels(cands.size());
  const auto label_range = [&](std::size_t w) {
    for (std::size_t k = w; k < cands.size(); k += static_cast<std::size_t>(cfg.workers)) {
      labels[k] = ged_exact(ds.graphs[cands[k].a], ds.graphs[cands[k].b], cfg.ged_budget);
    }
  };
  if (cfg.workers == 1) {
    label_range(0);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < cfg.workers; ++w) pool.emplace_back(label_range, static_cast<std::size_t>(w));
  }
  for (std::size_t k = 0; k < cands.size(); ++k) {
    if (!labels[k].exact) {
      ++out.dropped_pairs;
      continue;
    }
    ds.pairs.push_back(make_pair_record(ds.graphs[cands[k].a], ds.graphs[cands[k].b], labels[k].cost, cands[k].split));
  }
  return out;
}

}  // namespace gsim
