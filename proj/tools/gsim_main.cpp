// gsim: dataset generation, exact GED, training, evaluation, RESAT probing
// and gradient checks from the command line.
//
// Exit codes: 0 success, 2 usage or input error, 3 numeric failure.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gsim/config.hpp"
#include "gsim/dataset.hpp"
#include "gsim/ged.hpp"
#include "gsim/generate.hpp"
#include "gsim/gradcheck_suite.hpp"
#include "gsim/model.hpp"
#include "gsim/resat.hpp"
#include "gsim/train.hpp"

namespace {

using namespace gsim;

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kNumeric = 3;

/// Raised for results that are well-formed but fail a numeric contract.
struct NumericFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string report;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_file, "TOML-style config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", c.overrides, "Override a setting, section.key=value (repeatable)");
  cmd->add_option("--report", c.report, "Also write the JSON report to this file");
}

/// Config file first, then --set, then dedicated flags (in that order).
RunConfig resolve(const Common& c, const std::vector<std::pair<std::string, std::string>>& flags) {
  RunConfig cfg;
  if (!c.config_file.empty()) apply_config_file(cfg, c.config_file);
  for (const auto& o : c.overrides) apply_override(cfg, o);
  for (const auto& [k, v] : flags) cfg.set(k, v);
  return cfg;
}

void emit(const Json& report, const std::string& path) {
  const std::string text = dump_json(report, 1);
  std::cout << text << "\n";
  if (!path.empty()) write_text_file(path, text);
}

/// Collects "flag given -> config key" pairs for options bound to strings.
class FlagMap {
public:
  void bind(CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    auto& slot = values_[key];
    auto* opt = cmd->add_option(flag, slot, help);
    opts_.emplace_back(opt, key);
  }
  std::vector<std::pair<std::string, std::string>> given() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [opt, key] : opts_) {
      if (opt->count() > 0) out.emplace_back(key, values_.at(key));
    }
    return out;
  }

private:
  std::map<std::string, std::string> values_;
  std::vector<std::pair<CLI::Option*, std::string>> opts_;
};

Json ged_json(const GedResult& r) {
  Json path = Json::array();
  for (const auto& op : r.path) {
    Json o = {{"op", to_string(op.kind)}, {"u", op.u}};
    if (op.v >= 0) o["v"] = op.v;
    if (op.label >= 0) o["label"] = op.label;
    path.push_back(std::move(o));
  }
  return {{"cost", r.cost}, {"exact", r.exact}, {"expansions", r.expansions}, {"mapping", r.mapping}, {"path", path}};
}

Graph read_graph_file(const std::string& path) {
  const Json j = read_json_file(path);
  try {
    Graph g = graph_from_json(j);
    const auto problems = validate(g);
    if (!problems.empty()) throw std::invalid_argument(path + ": " + problems.front());
    return g;
  } catch (const Json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

Json split_counts(const Dataset& ds) {
  return {{"train", ds.pairs_in(Split::kTrain).size()},
          {"val", ds.pairs_in(Split::kVal).size()},
          {"test", ds.pairs_in(Split::kTest).size()}};
}

/// Metrics when the test split supports the largest k, otherwise the reason.
Json try_metrics(const Model& model, const Dataset& ds) {
  if (ds.pairs_in(Split::kTest).empty()) return {{"skipped", "no test pairs"}};
  try {
    return to_json(evaluate(model, ds));
  } catch (const std::invalid_argument& e) {
    return {{"skipped", e.what()}};
  }
}

void require_finite(double v, const std::string& what) {
  if (!std::isfinite(v)) throw NumericFailure(what + " is not finite");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph similarity learning toolkit"};
  app.require_subcommand(1);

  // gen
  Common gen_c;
  FlagMap gen_f;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Generate a labeled synthetic dataset");
  add_common(gen, gen_c);
  gen_f.bind(gen, "--n-graphs", "gen.n_graphs", "Number of graphs");
  gen_f.bind(gen, "--n-min", "gen.n_min", "Minimum node count");
  gen_f.bind(gen, "--n-max", "gen.n_max", "Maximum node count");
  gen_f.bind(gen, "--p", "gen.p", "Edge probability");
  gen_f.bind(gen, "--labels", "gen.labels", "Alphabet size");
  gen_f.bind(gen, "--seed", "gen.seed", "RNG seed");
  gen_f.bind(gen, "--workers", "gen.workers", "GED labeling threads");
  gen_f.bind(gen, "--budget", "gen.ged_budget", "Node expansions per GED search");
  gen->add_option("--out", gen_out, "Dataset file to write")->required();

  // ged
  std::string ged_a, ged_b;
  std::uint64_t ged_budget = kDefaultGedBudget;
  auto* ged = app.add_subcommand("ged", "Exact graph edit distance between two graph files");
  ged->add_option("--a", ged_a, "First graph (JSON: id, labels, edges)")->required()->check(CLI::ExistingFile);
  ged->add_option("--b", ged_b, "Second graph")->required()->check(CLI::ExistingFile);
  ged->add_option("--budget", ged_budget, "Maximum node expansions")->check(CLI::PositiveNumber);

  // train
  Common train_c;
  FlagMap train_f;
  std::string train_data, train_out;
  std::string train_seed;
  auto* trn = app.add_subcommand("train", "Train a model and keep the best validation checkpoint");
  add_common(trn, train_c);
  trn->add_option("--data", train_data, "Dataset file")->required()->check(CLI::ExistingFile);
  trn->add_option("--out", train_out, "Checkpoint file to write")->required();
  train_f.bind(trn, "--hidden", "model.hidden", "Hidden width");
  train_f.bind(trn, "--layers", "model.layers", "Encoder layers");
  train_f.bind(trn, "--readout", "model.readout", "mean, max, sum or gca");
  train_f.bind(trn, "--fusion", "model.fusion", "diffatt, ntn, efn, abs, square or none");
  train_f.bind(trn, "--epochs", "train.epochs", "Epochs");
  train_f.bind(trn, "--batch-size", "train.batch_size", "Pairs per step");
  train_f.bind(trn, "--lr", "train.lr", "Adam learning rate");
  trn->add_option("--seed", train_seed, "Seed for both model init and batch order");

  // eval
  std::string eval_data, eval_ckpt, eval_report;
  std::vector<int> eval_k = {10, 20};
  auto* evl = app.add_subcommand("eval", "Evaluate a checkpoint on the test split");
  evl->add_option("--data", eval_data, "Dataset file")->required()->check(CLI::ExistingFile);
  evl->add_option("--checkpoint", eval_ckpt, "Checkpoint file")->required()->check(CLI::ExistingFile);
  evl->add_option("--k", eval_k, "Precision cutoffs")->check(CLI::PositiveNumber);
  evl->add_option("--report", eval_report, "Also write the JSON report to this file");

  // resat
  Common resat_c;
  FlagMap resat_f;
  std::string resat_data;
  std::vector<std::string> resat_ckpts;
  auto* rst = app.add_subcommand("resat", "Remaining subgraph alignment test over trained variants");
  add_common(rst, resat_c);
  rst->add_option("--data", resat_data, "Dataset file")->required()->check(CLI::ExistingFile);
  rst->add_option("--checkpoint", resat_ckpts, "Variant checkpoint as name=path (repeatable)")->required();
  resat_f.bind(rst, "--per-graph", "resat.per_graph", "Triples per base graph");
  resat_f.bind(rst, "--epochs", "resat.epochs", "Probe epochs");
  resat_f.bind(rst, "--seed", "resat.seed", "Seed for triples and probes");

  // gradcheck
  std::uint64_t gc_seed = 1;
  double gc_tol = 1e-4;
  std::string gc_report;
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of every autodiff operator and the model");
  gc->add_option("--seed", gc_seed, "Seed for random operands");
  gc->add_option("--tol", gc_tol, "Maximum relative error")->check(CLI::PositiveNumber);
  gc->add_option("--report", gc_report, "Also write the JSON report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (gen->parsed()) {
      const RunConfig cfg = resolve(gen_c, gen_f.given());
      std::clog << "gsim gen: config " << dump_json(to_json(cfg.gen)) << "\n";
      auto res = generate_dataset(cfg.gen);
      write_dataset(res.dataset, gen_out);
      emit({{"config", to_json(cfg.gen)},
            {"out", gen_out},
            {"graphs", res.dataset.graphs.size()},
            {"pairs", split_counts(res.dataset)},
            {"dropped_pairs", res.dropped_pairs}},
           gen_c.report);
      return kOk;
    }
    if (ged->parsed()) {
      const Graph a = read_graph_file(ged_a);
      const Graph b = read_graph_file(ged_b);
      const auto r = ged_exact(a, b, ged_budget);
      emit(ged_json(r), "");
      if (!r.exact) {
        std::cerr << "gsim ged: budget of " << ged_budget << " expansions exceeded; cost is an upper bound\n";
        return kNumeric;
      }
      return kOk;
    }
    if (trn->parsed()) {
      auto flags = train_f.given();
      if (!train_seed.empty()) {
        flags.emplace_back("model.seed", train_seed);
        flags.emplace_back("train.seed", train_seed);
      }
      RunConfig cfg = resolve(train_c, flags);
      const Dataset ds = read_dataset(train_data);
      cfg.model.alphabet_size = static_cast<int>(ds.alphabet.size());
      std::clog << "gsim train: config " << dump_json({{"model", to_json(cfg.model)}, {"train", to_json(cfg.train)}})
                << "\n";
      auto res = train(cfg.model, cfg.train, ds);
      require_finite(res.history.best_val_loss, "validation loss");
      save_checkpoint(*res.model, train_out, &res.optimizer);
      emit({{"config", {{"model", to_json(cfg.model)}, {"train", to_json(cfg.train)}}},
            {"checkpoint", train_out},
            {"history", to_json(res.history)},
            {"metrics", try_metrics(*res.model, ds)}},
           train_c.report);
      return kOk;
    }
    if (evl->parsed()) {
      const Dataset ds = read_dataset(eval_data);
      const auto ck = load_checkpoint(eval_ckpt);
      const auto m = evaluate(*ck.model, ds, eval_k);
      require_finite(m.mse_e3, "mse");
      emit({{"checkpoint", eval_ckpt}, {"metrics", to_json(m)}}, eval_report);
      return kOk;
    }
    if (rst->parsed()) {
      const RunConfig cfg = resolve(resat_c, resat_f.given());
      std::clog << "gsim resat: config " << dump_json(to_json(cfg)["resat"]) << "\n";
      const Dataset ds = read_dataset(resat_data);
      std::set<std::string> held;
      for (const auto& p : ds.pairs) {
        if (p.split != Split::kTrain) held.insert(p.i);
      }
      std::vector<Graph> bases;
      for (const auto& g : ds.graphs) {
        if (cfg.resat.graphs == "all" || held.count(g.id)) bases.push_back(g);
      }
      const auto built = build_resat_dataset(bases, cfg.resat.per_graph, cfg.resat.seed);
      std::vector<std::unique_ptr<Model>> models;
      std::vector<ResatVariant> variants;
      for (const auto& entry : resat_ckpts) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--checkpoint", "expected name=path, got " + entry);
        auto ck = load_checkpoint(entry.substr(eq + 1));
        const double mse = evaluate(*ck.model, ds).mse_e3;
        variants.push_back({entry.substr(0, eq), ck.model.get(), mse});
        models.push_back(std::move(ck.model));
      }
      const auto report = resat_compare(variants, bases, built.triples, cfg.resat.probe, cfg.resat.seed);
      for (const auto& row : report.rows) require_finite(row.resat_mse, "alignment mse of " + row.variant);
      Json skipped = Json::array();
      for (const auto& s : built.skipped) skipped.push_back({{"graph", s.graph_id}, {"reason", s.reason}});
      emit({{"config", to_json(cfg)["resat"]},
            {"triples", built.triples.size()},
            {"skipped", skipped},
            {"report", to_json(report)}},
           resat_c.report);
      return kOk;
    }
    if (gc->parsed()) {
      const auto cases = run_gradcheck_suite(gc_seed);
      Json ops = Json::object();
      double worst = 0.0;
      for (const auto& c : cases) {
        ops[c.name] = {{"max_rel_error", c.report.max_rel_error}, {"coordinates", c.report.coordinates}};
        worst = std::max(worst, c.report.max_rel_error);
      }
      const bool ok = worst < gc_tol;
      emit({{"ops", ops}, {"max_rel_error", worst}, {"tolerance", gc_tol}, {"pass", ok}}, gc_report);
      return ok ? kOk : kNumeric;
    }
  } catch (const NumericFailure& e) {
    std::cerr << "gsim: " << e.what() << "\n";
    return kNumeric;
  } catch (const CLI::Error& e) {
    std::cerr << "gsim: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "gsim: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
