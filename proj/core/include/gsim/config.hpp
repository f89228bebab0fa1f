#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsim/generate.hpp"
#include "gsim/json_text.hpp"
#include "gsim/model.hpp"
#include "gsim/resat.hpp"
#include "gsim/train.hpp"

namespace gsim {

/// Bad config text, unknown key, or a value of the wrong type.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ResatSettings {
  int per_graph = 10;
  /// "heldout" uses graphs outside the train split, "all" every graph.
  std::string graphs = "heldout";
  ProbeConfig probe;
  std::uint64_t seed = 0;
};

/// Everything a command can be configured with.
///
/// File format, one setting per line:
///
///     # comment
///     [model]
///     hidden = 64
///     readout = "gca"
///     [resat]
///     width_multipliers = [1, 2]
///
/// Sections are gen, model, train and resat; keys match the struct fields
/// (model.fusion is the fusion kind, the remaining fusion options sit next
/// to it). `diffatt.t` takes "learnable" or a fixed positive temperature.
/// Strings may be quoted or bare.
struct RunConfig {
  GenConfig gen;
  ModelConfig model;
  TrainConfig train;
  ResatSettings resat;

  /// Sets "section.key" from its text form. Throws ConfigError.
  void set(const std::string& dotted_key, const std::string& value);
  /// Every known dotted key, sorted.
  static std::vector<std::string> keys();
};

/// Applies every setting of a config file's text on top of `cfg`.
/// `source` names the file in error messages.
void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& source = "<config>");
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// "section.key=value" override, as given on the command line.
void apply_override(RunConfig& cfg, const std::string& assignment);

Json to_json(const RunConfig& cfg);

}  // namespace gsim
