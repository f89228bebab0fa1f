#pragma once

#include <functional>
#include <vector>

#include "gsim/tensor.hpp"

namespace gsim {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_input = 0;
  std::size_t worst_index = 0;
  std::size_t coordinates = 0;
};

using ScalarFn = std::function<ad::Tensor(const std::vector<ad::Tensor>&)>;

/// Compares backward() against central differences (f(x+h) - f(x-h)) / 2h
/// on every coordinate of every input. Inputs must require gradients and
/// `f` must return a 1 x 1 tensor. The error of a coordinate is
/// |analytic - numeric| / max(1, |numeric|).
///
/// Throws std::runtime_error naming the coordinate when f is not finite.
GradCheckReport grad_check(const ScalarFn& f, std::vector<ad::Tensor> inputs, double h = 1e-5);

}  // namespace gsim
