#pragma once

#include <string>
#include <vector>

#include "gsim/rng.hpp"
#include "gsim/tensor.hpp"

namespace gsim {

struct Parameter {
  std::string name;
  ad::Tensor tensor;
};

/// Named learnable tensors in registration order. Names are unique.
class ParameterStore {
public:
  /// Registers a zero-initialized tensor that requires a gradient.
  ad::Tensor& add(const std::string& name, int rows, int cols);
  /// Uniform Xavier init, U(-a, a) with a = sqrt(6 / (rows + cols)).
  ad::Tensor& add_xavier(const std::string& name, int rows, int cols, SplitMix64& rng);
  ad::Tensor& add_filled(const std::string& name, int rows, int cols, double value);

  const ad::Tensor& get(const std::string& name) const;
  ad::Tensor& get(const std::string& name);
  bool contains(const std::string& name) const;

  std::vector<Parameter>& items() { return items_; }
  const std::vector<Parameter>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  std::size_t scalar_count() const;

  void zero_grad();
  /// Flat copy of every value, in registration order.
  std::vector<double> snapshot() const;
  void restore(const std::vector<double>& flat);

private:
  std::vector<Parameter> items_;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;
};

/// One Adam update with bias correction:
///   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
///   theta <- theta - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
void adam_update(std::span<double> values, std::span<const double> grads, AdamState& state, const AdamConfig& cfg);

/// Adam over every tensor of a ParameterStore, reading their grads.
class Adam {
public:
  Adam(ParameterStore& params, AdamConfig cfg);
  void step();
  const AdamConfig& config() const { return cfg_; }
  const std::vector<AdamState>& states() const { return states_; }
  std::vector<AdamState>& states() { return states_; }

private:
  ParameterStore* params_;
  AdamConfig cfg_;
  std::vector<AdamState> states_;
};

}  // namespace gsim
