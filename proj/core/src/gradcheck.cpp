#include "gsim/gradcheck.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gsim {

namespace {

double eval(const ScalarFn& f, const std::vector<ad::Tensor>& inputs, std::size_t k, std::size_t i) {
  const double y = f(inputs).item();
  if (!std::isfinite(y)) {
    throw std::runtime_error("grad_check: non-finite value at input " + std::to_string(k) + ", coordinate " +
                             std::to_string(i));
  }
  return y;
}

}  // namespace

GradCheckReport grad_check(const ScalarFn& f, std::vector<ad::Tensor> inputs, double h) {
  for (auto& t : inputs) {
    if (!t.requires_grad()) throw std::invalid_argument("grad_check: every input must require a gradient");
    t.zero_grad();
  }
  const ad::Tensor out = f(inputs);
  if (!std::isfinite(out.item())) throw std::runtime_error("grad_check: non-finite value at the base point");
  out.backward();

  GradCheckReport rep;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    auto vals = inputs[k].mutable_values();
    const std::vector<double> analytic(inputs[k].grad().begin(), inputs[k].grad().end());
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double x0 = vals[i];
      vals[i] = x0 + h;
      const double up = eval(f, inputs, k, i);
      vals[i] = x0 - h;
      const double down = eval(f, inputs, k, i);
      vals[i] = x0;
      const double numeric = (up - down) / (2.0 * h);
      const double err = std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(numeric));
      if (!std::isfinite(analytic[i])) {
        throw std::runtime_error("grad_check: non-finite gradient at input " + std::to_string(k) + ", coordinate " +
                                 std::to_string(i));
      }
      ++rep.coordinates;
      if (err > rep.max_rel_error) {
        rep.max_rel_error = err;
        rep.worst_input = k;
        rep.worst_index = i;
      }
    }
  }
  return rep;
}

}  // namespace gsim
