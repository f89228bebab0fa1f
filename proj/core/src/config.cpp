#include "gsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace gsim {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

template <typename T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string v = unquote(raw);
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + raw + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string v = unquote(raw);
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("config: '" + key + "' expects true or false, got '" + raw + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& raw) {
  std::string v = trim(raw);
  if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
    throw ConfigError("config: '" + key + "' expects a list like [1, 2], got '" + raw + "'");
  }
  std::vector<int> out;
  std::stringstream ss(v.substr(1, v.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_number<int>(key, item));
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

template <typename T>
Setter number(T RunConfig::*section, auto field) {
  return [section, field](RunConfig& c, const std::string& k, const std::string& v) {
    auto& dst = (c.*section).*field;
    dst = parse_number<std::remove_reference_t<decltype(dst)>>(k, v);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["gen.n_graphs"] = number(&RunConfig::gen, &GenConfig::n_graphs);
    t["gen.n_min"] = number(&RunConfig::gen, &GenConfig::n_min);
    t["gen.n_max"] = number(&RunConfig::gen, &GenConfig::n_max);
    t["gen.p"] = number(&RunConfig::gen, &GenConfig::p);
    t["gen.labels"] = number(&RunConfig::gen, &GenConfig::labels);
    t["gen.family_size"] = number(&RunConfig::gen, &GenConfig::family_size);
    t["gen.max_edits"] = number(&RunConfig::gen, &GenConfig::max_edits);
    t["gen.partners"] = number(&RunConfig::gen, &GenConfig::partners);
    t["gen.val_fraction"] = number(&RunConfig::gen, &GenConfig::val_fraction);
    t["gen.test_fraction"] = number(&RunConfig::gen, &GenConfig::test_fraction);
    t["gen.ged_budget"] = number(&RunConfig::gen, &GenConfig::ged_budget);
    t["gen.workers"] = number(&RunConfig::gen, &GenConfig::workers);
    t["gen.seed"] = number(&RunConfig::gen, &GenConfig::seed);

    t["model.hidden"] = number(&RunConfig::model, &ModelConfig::hidden);
    t["model.layers"] = number(&RunConfig::model, &ModelConfig::layers);
    t["model.readout"] = [](RunConfig& c, const std::string&, const std::string& v) {
      c.model.readout = readout_from_string(unquote(v));
    };
    t["model.fusion"] = [](RunConfig& c, const std::string&, const std::string& v) {
      c.model.fusion.kind = fusion_from_string(unquote(v));
    };
    t["model.learnable_temperature"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.model.fusion.learnable_temperature = parse_bool(k, v);
    };
    t["model.temperature"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.model.fusion.temperature = parse_number<double>(k, v);
    };
    t["model.ntn_slices"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.model.fusion.ntn_slices = parse_number<int>(k, v);
    };
    t["model.efn_reduction"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.model.fusion.efn_reduction = parse_number<int>(k, v);
    };
    t["diffatt.t"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      const std::string t = unquote(v);
      if (t == "learnable") {
        c.model.fusion.learnable_temperature = true;
        return;
      }
      const double fixed = parse_number<double>(k, t);
      if (!(fixed > 0.0)) throw ConfigError("config: '" + k + "' must be \"learnable\" or a positive number");
      c.model.fusion.learnable_temperature = false;
      c.model.fusion.temperature = fixed;
    };
    t["model.regressor_hidden1"] = number(&RunConfig::model, &ModelConfig::regressor_hidden1);
    t["model.regressor_hidden2"] = number(&RunConfig::model, &ModelConfig::regressor_hidden2);
    t["model.seed"] = number(&RunConfig::model, &ModelConfig::seed);

    t["train.epochs"] = number(&RunConfig::train, &TrainConfig::epochs);
    t["train.batch_size"] = number(&RunConfig::train, &TrainConfig::batch_size);
    t["train.lr"] = number(&RunConfig::train, &TrainConfig::lr);
    t["train.validations"] = number(&RunConfig::train, &TrainConfig::validations);
    t["train.seed"] = number(&RunConfig::train, &TrainConfig::seed);

    t["resat.per_graph"] = number(&RunConfig::resat, &ResatSettings::per_graph);
    t["resat.graphs"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      const std::string g = unquote(v);
      if (g != "heldout" && g != "all") throw ConfigError("config: '" + k + "' must be heldout or all");
      c.resat.graphs = g;
    };
    t["resat.seed"] = number(&RunConfig::resat, &ResatSettings::seed);
    t["resat.epochs"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.resat.probe.epochs = parse_number<int>(k, v);
    };
    t["resat.batch_size"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.resat.probe.batch_size = parse_number<int>(k, v);
    };
    t["resat.lr"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.resat.probe.lr = parse_number<double>(k, v);
    };
    t["resat.val_fraction"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.resat.probe.val_fraction = parse_number<double>(k, v);
    };
    t["resat.width_multipliers"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.resat.probe.width_multipliers = parse_int_list(k, v);
    };
    return t;
  }();
  return table;
}

}  // namespace

void RunConfig::set(const std::string& dotted_key, const std::string& value) {
  const auto& t = setters();
  auto it = t.find(dotted_key);
  if (it == t.end()) throw ConfigError("config: unknown key '" + dotted_key + "'");
  try {
    it->second(*this, dotted_key, trim(value));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config: '" + dotted_key + "': " + e.what());
  }
}

std::vector<std::string> RunConfig::keys() {
  std::vector<std::string> out;
  for (const auto& [k, _] : setters()) out.push_back(k);
  return out;
}

void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    // '#' starts a comment unless it sits inside quotes
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
      if (line[k] == '"') quoted = !quoted;
      if (line[k] == '#' && !quoted) {
        line.resize(k);
        break;
      }
    }
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "setting outside of a [section]");
    try {
      cfg.set(section + "." + trim(s.substr(0, eq)), s.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  apply_config_text(cfg, buf.str(), path.string());
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' must look like section.key=value");
  cfg.set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

Json to_json(const RunConfig& cfg) {
  return {{"gen", to_json(cfg.gen)},
          {"model", to_json(cfg.model)},
          {"train", to_json(cfg.train)},
          {"resat",
           {{"per_graph", cfg.resat.per_graph},
            {"graphs", cfg.resat.graphs},
            {"seed", cfg.resat.seed},
            {"probe", to_json(cfg.resat.probe)}}}};
}

}  // namespace gsim
