#include "gsim/params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gsim {

ad::Tensor& ParameterStore::add(const std::string& name, int rows, int cols) {
  return add_filled(name, rows, cols, 0.0);
}

ad::Tensor& ParameterStore::add_filled(const std::string& name, int rows, int cols, double value) {
  if (contains(name)) throw std::invalid_argument("duplicate parameter name '" + name + "'");
  items_.push_back({name, ad::Tensor::full(rows, cols, value, true)});
  return items_.back().tensor;
}

ad::Tensor& ParameterStore::add_xavier(const std::string& name, int rows, int cols, SplitMix64& rng) {
  ad::Tensor& t = add(name, rows, cols);
  const double a = std::sqrt(6.0 / (rows + cols));
  for (double& x : t.mutable_values()) x = rng.uniform(-a, a);
  return t;
}

const ad::Tensor& ParameterStore::get(const std::string& name) const {
  for (const auto& p : items_) {
    if (p.name == name) return p.tensor;
  }
  throw std::out_of_range("no parameter named '" + name + "'");
}

ad::Tensor& ParameterStore::get(const std::string& name) {
  return const_cast<ad::Tensor&>(std::as_const(*this).get(name));
}

bool ParameterStore::contains(const std::string& name) const {
  return std::any_of(items_.begin(), items_.end(), [&](const Parameter& p) { return p.name == name; });
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : items_) n += p.tensor.size();
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : items_) p.tensor.zero_grad();
}

std::vector<double> ParameterStore::snapshot() const {
  std::vector<double> flat;
  flat.reserve(scalar_count());
  for (const auto& p : items_) flat.insert(flat.end(), p.tensor.values().begin(), p.tensor.values().end());
  return flat;
}

void ParameterStore::restore(const std::vector<double>& flat) {
  if (flat.size() != scalar_count()) throw std::invalid_argument("restore: parameter count mismatch");
  std::size_t at = 0;
  for (auto& p : items_) {
    auto dst = p.tensor.mutable_values();
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(at), dst.size(), dst.begin());
    at += dst.size();
  }
}

void adam_update(std::span<double> values, std::span<const double> grads, AdamState& state, const AdamConfig& cfg) {
  if (values.size() != grads.size()) throw std::invalid_argument("adam_update: size mismatch");
  if (state.m.size() != values.size()) {
    state.m.assign(values.size(), 0.0);
    state.v.assign(values.size(), 0.0);
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double g = grads[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    values[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

Adam::Adam(ParameterStore& params, AdamConfig cfg) : params_(&params), cfg_(cfg), states_(params.size()) {}

void Adam::step() {
  auto& items = params_->items();
  for (std::size_t i = 0; i < items.size(); ++i) {
    adam_update(items[i].tensor.mutable_values(), items[i].tensor.grad(), states_[i], cfg_);
  }
}

}  // namespace gsim
