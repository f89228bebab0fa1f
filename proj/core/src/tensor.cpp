#include "gsim/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <Eigen/Core>

namespace gsim::ad {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

ConstMap as_mat(const std::vector<double>& v, int rows, int cols) { return ConstMap(v.data(), rows, cols); }
MutMap as_mat(std::vector<double>& v, int rows, int cols) { return MutMap(v.data(), rows, cols); }

std::shared_ptr<Node> new_node(int rows, int cols, std::vector<double> value, bool requires_grad) {
  if (rows < 0 || cols < 0) throw ShapeError("negative tensor dimension");
  if (value.size() != static_cast<std::size_t>(rows) * cols) {
    throw ShapeError("value count " + std::to_string(value.size()) + " does not match shape (" +
                     std::to_string(rows) + ", " + std::to_string(cols) + ")");
  }
  auto n = std::make_shared<Node>();
  n->rows = rows;
  n->cols = cols;
  n->value = std::move(value);
  n->requires_grad = requires_grad;
  if (requires_grad) n->grad.assign(n->value.size(), 0.0);
  return n;
}

[[noreturn]] void shape_fail(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " + b.shape_string());
}

void require_same(const char* op, const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) shape_fail(op, a, b);
}

Node& parent(Node& self, std::size_t i) { return *self.parents[i]; }

// Element-wise unary op with derivative expressed through input x and output y.
template <typename F, typename D>
Tensor unary(const Tensor& a, F f, D dfdx) {
  std::vector<double> out(a.size());
  const auto in = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  return make_result(a.rows(), a.cols(), std::move(out), {a}, [dfdx](Node& self) {
    Node& x = parent(self, 0);
    if (!x.requires_grad) return;
    for (std::size_t i = 0; i < self.value.size(); ++i) x.grad[i] += self.grad[i] * dfdx(x.value[i], self.value[i]);
  });
}

void check_offsets(const Tensor& a, std::span<const int> offsets, const char* op) {
  if (offsets.size() < 2 || offsets.front() != 0 || offsets.back() != a.rows()) {
    throw ShapeError(std::string(op) + ": offsets must start at 0 and end at rows " + a.shape_string());
  }
  for (std::size_t s = 0; s + 1 < offsets.size(); ++s) {
    if (offsets[s + 1] <= offsets[s]) throw ShapeError(std::string(op) + ": empty or decreasing segment");
  }
}

}  // namespace

Tensor Tensor::zeros(int rows, int cols, bool requires_grad) {
  return Tensor(new_node(rows, cols, std::vector<double>(static_cast<std::size_t>(rows) * cols, 0.0), requires_grad));
}

Tensor Tensor::full(int rows, int cols, double value, bool requires_grad) {
  return Tensor(new_node(rows, cols, std::vector<double>(static_cast<std::size_t>(rows) * cols, value), requires_grad));
}

Tensor Tensor::from(int rows, int cols, std::vector<double> values, bool requires_grad) {
  return Tensor(new_node(rows, cols, std::move(values), requires_grad));
}

Tensor Tensor::row(std::vector<double> values, bool requires_grad) {
  const int n = static_cast<int>(values.size());
  return from(1, n, std::move(values), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) { return from(1, 1, {value}, requires_grad); }

std::string Tensor::shape_string() const {
  std::ostringstream s;
  s << '(' << rows() << ", " << cols() << ')';
  return s.str();
}

double Tensor::item() const {
  if (size() != 1) throw ShapeError("item(): tensor of shape " + shape_string() + " is not a scalar");
  return node_->value[0];
}

void Tensor::zero_grad() { std::fill(node_->grad.begin(), node_->grad.end(), 0.0); }

Tensor Tensor::detach() const { return Tensor(new_node(rows(), cols(), node_->value, false)); }

void Tensor::backward() const {
  if (size() != 1) throw ShapeError("backward(): root must be a scalar, got " + shape_string());
  if (!requires_grad()) return;

  // Iterative post-order DFS; the reversed order is topological.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{node_.get(), 0}};
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->parents.size()) {
      Node* p = n->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }
  for (Node* n : order) {
    if (n->backward) std::fill(n->grad.begin(), n->grad.end(), 0.0);
  }
  node_->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward) (*it)->backward(**it);
  }
}

Tensor make_result(int rows, int cols, std::vector<double> value, std::vector<Tensor> parents, BackwardFn backward) {
  bool rg = false;
  for (const auto& p : parents) rg = rg || p.requires_grad();
  auto n = new_node(rows, cols, std::move(value), rg);
  if (rg) {
    n->parents.reserve(parents.size());
    for (auto& p : parents) n->parents.push_back(p.shared());
    n->backward = std::move(backward);
  }
  return Tensor(std::move(n));
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) shape_fail("matmul", a, b);
  const int m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<double> out(static_cast<std::size_t>(m) * n);
  as_mat(out, m, n).noalias() = as_mat(a.node()->value, m, k) * as_mat(b.node()->value, k, n);
  return make_result(m, n, std::move(out), {a, b}, [m, k, n](Node& self) {
    Node& x = parent(self, 0);
    Node& y = parent(self, 1);
    const auto g = as_mat(std::as_const(self.grad), m, n);
    if (x.requires_grad) as_mat(x.grad, m, k).noalias() += g * as_mat(std::as_const(y.value), k, n).transpose();
    if (y.requires_grad) as_mat(y.grad, k, n).noalias() += as_mat(std::as_const(x.value), m, k).transpose() * g;
  });
}

Tensor transpose(const Tensor& a) {
  const int m = a.rows(), n = a.cols();
  std::vector<double> out(a.size());
  as_mat(out, n, m) = as_mat(a.node()->value, m, n).transpose();
  return make_result(n, m, std::move(out), {a}, [m, n](Node& self) {
    Node& x = parent(self, 0);
    if (x.requires_grad) as_mat(x.grad, m, n) += as_mat(std::as_const(self.grad), n, m).transpose();
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  const bool bias = b.rows() == 1 && a.rows() != 1 && b.cols() == a.cols();
  if (!bias) require_same("add", a, b);
  const int m = a.rows(), n = a.cols();
  std::vector<double> out(a.values().begin(), a.values().end());
  const auto bv = b.values();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(i) * n + j] += bv[bias ? j : static_cast<std::size_t>(i) * n + j];
  }
  return make_result(m, n, std::move(out), {a, b}, [bias, m, n](Node& self) {
    Node& x = parent(self, 0);
    Node& y = parent(self, 1);
    if (x.requires_grad) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) x.grad[i] += self.grad[i];
    }
    if (y.requires_grad) {
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
          y.grad[bias ? j : static_cast<std::size_t>(i) * n + j] += self.grad[static_cast<std::size_t>(i) * n + j];
        }
      }
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same("sub", a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] - b.values()[i];
  return make_result(a.rows(), a.cols(), std::move(out), {a, b}, [](Node& self) {
    Node& x = parent(self, 0);
    Node& y = parent(self, 1);
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      if (x.requires_grad) x.grad[i] += self.grad[i];
      if (y.requires_grad) y.grad[i] -= self.grad[i];
    }
  });
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  require_same("hadamard", a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] * b.values()[i];
  return make_result(a.rows(), a.cols(), std::move(out), {a, b}, [](Node& self) {
    Node& x = parent(self, 0);
    Node& y = parent(self, 1);
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      if (x.requires_grad) x.grad[i] += self.grad[i] * y.value[i];
      if (y.requires_grad) y.grad[i] += self.grad[i] * x.value[i];
    }
  });
}

Tensor scale(const Tensor& a, double s) {
  return unary(a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Tensor scale(const Tensor& a, const Tensor& s) {
  if (s.size() != 1) shape_fail("scale", a, s);
  const double k = s.item();
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = k * a.values()[i];
  return make_result(a.rows(), a.cols(), std::move(out), {a, s}, [](Node& self) {
    Node& x = parent(self, 0);
    Node& k = parent(self, 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      if (x.requires_grad) x.grad[i] += self.grad[i] * k.value[0];
      acc += self.grad[i] * x.value[i];
    }
    if (k.requires_grad) k.grad[0] += acc;
  });
}

Tensor scale_rows(const Tensor& a, const Tensor& s) {
  if (s.cols() != 1 || s.rows() != a.rows()) shape_fail("scale_rows", a, s);
  const int m = a.rows(), n = a.cols();
  std::vector<double> out(a.size());
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto idx = static_cast<std::size_t>(i) * n + j;
      out[idx] = a.values()[idx] * s.values()[i];
    }
  }
  return make_result(m, n, std::move(out), {a, s}, [m, n](Node& self) {
    Node& x = parent(self, 0);
    Node& k = parent(self, 1);
    for (int i = 0; i < m; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        const auto idx = static_cast<std::size_t>(i) * n + j;
        if (x.requires_grad) x.grad[idx] += self.grad[idx] * k.value[i];
        acc += self.grad[idx] * x.value[idx];
      }
      if (k.requires_grad) k.grad[i] += acc;
    }
  });
}

Tensor abs(const Tensor& a) {
  return unary(
      a, [](double x) { return std::abs(x); },
      [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Tensor relu(const Tensor& a) {
  return unary(a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor tanh(const Tensor& a) {
  return unary(a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& a) {
  return unary(
      a,
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor exp(const Tensor& a) {
  return unary(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

namespace {

// Row-wise softmax of a * inv_t; inv_t_node is null for a fixed temperature.
Tensor softmax_impl(const Tensor& a, double inv_t, const Tensor* inv_t_tensor) {
  const int m = a.rows(), n = a.cols();
  if (n == 0) throw ShapeError("softmax: empty rows");
  std::vector<double> out(a.size());
  const auto in = a.values();
  for (int i = 0; i < m; ++i) {
    const std::size_t base = static_cast<std::size_t>(i) * n;
    double mx = -INFINITY;
    for (int j = 0; j < n; ++j) mx = std::max(mx, in[base + j] * inv_t);
    double z = 0.0;
    for (int j = 0; j < n; ++j) {
      out[base + j] = std::exp(in[base + j] * inv_t - mx);
      z += out[base + j];
    }
    for (int j = 0; j < n; ++j) out[base + j] /= z;
  }
  std::vector<Tensor> parents{a};
  if (inv_t_tensor) parents.push_back(*inv_t_tensor);
  return make_result(m, n, std::move(out), std::move(parents), [m, n, inv_t](Node& self) {
    Node& x = parent(self, 0);
    Node* k = self.parents.size() > 1 ? self.parents[1].get() : nullptr;
    for (int i = 0; i < m; ++i) {
      const std::size_t base = static_cast<std::size_t>(i) * n;
      double dot = 0.0;
      for (int j = 0; j < n; ++j) dot += self.grad[base + j] * self.value[base + j];
      for (int j = 0; j < n; ++j) {
        // d loss / d (scaled logit)
        const double dz = self.value[base + j] * (self.grad[base + j] - dot);
        if (x.requires_grad) x.grad[base + j] += dz * inv_t;
        if (k && k->requires_grad) k->grad[0] += dz * x.value[base + j];
      }
    }
  });
}

}  // namespace

Tensor softmax_with_temperature(const Tensor& a, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("softmax_with_temperature: temperature must be > 0");
  return softmax_impl(a, 1.0 / t, nullptr);
}

Tensor softmax_scaled(const Tensor& a, const Tensor& inv_t) {
  if (inv_t.size() != 1) shape_fail("softmax_scaled", a, inv_t);
  if (!(inv_t.item() > 0.0)) throw std::invalid_argument("softmax_scaled: inverse temperature must be > 0");
  return softmax_impl(a, inv_t.item(), &inv_t);
}

Tensor layer_norm(const Tensor& a, const Tensor& gamma, const Tensor& beta, double eps) {
  const int m = a.rows(), n = a.cols();
  if (gamma.rows() != 1 || gamma.cols() != n) shape_fail("layer_norm(gamma)", a, gamma);
  if (beta.rows() != 1 || beta.cols() != n) shape_fail("layer_norm(beta)", a, beta);
  std::vector<double> out(a.size());
  auto xhat = std::make_shared<std::vector<double>>(a.size());
  auto inv_std = std::make_shared<std::vector<double>>(m);
  const auto in = a.values();
  for (int i = 0; i < m; ++i) {
    const std::size_t base = static_cast<std::size_t>(i) * n;
    double mean = 0.0;
    for (int j = 0; j < n; ++j) mean += in[base + j];
    mean /= n;
    double var = 0.0;
    for (int j = 0; j < n; ++j) var += (in[base + j] - mean) * (in[base + j] - mean);
    var /= n;
    const double is = 1.0 / std::sqrt(var + eps);
    (*inv_std)[i] = is;
    for (int j = 0; j < n; ++j) {
      (*xhat)[base + j] = (in[base + j] - mean) * is;
      out[base + j] = (*xhat)[base + j] * gamma.values()[j] + beta.values()[j];
    }
  }
  return make_result(m, n, std::move(out), {a, gamma, beta}, [m, n, xhat, inv_std](Node& self) {
    Node& x = parent(self, 0);
    Node& gm = parent(self, 1);
    Node& bt = parent(self, 2);
    for (int i = 0; i < m; ++i) {
      const std::size_t base = static_cast<std::size_t>(i) * n;
      double sum_g = 0.0;
      double sum_gx = 0.0;
      for (int j = 0; j < n; ++j) {
        const double gh = self.grad[base + j] * gm.value[j];
        sum_g += gh;
        sum_gx += gh * (*xhat)[base + j];
        if (gm.requires_grad) gm.grad[j] += self.grad[base + j] * (*xhat)[base + j];
        if (bt.requires_grad) bt.grad[j] += self.grad[base + j];
      }
      if (!x.requires_grad) continue;
      for (int j = 0; j < n; ++j) {
        const double gh = self.grad[base + j] * gm.value[j];
        x.grad[base + j] += (*inv_std)[i] * (gh - sum_g / n - (*xhat)[base + j] * sum_gx / n);
      }
    }
  });
}

Tensor concat(const std::vector<Tensor>& parts, int axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  if (axis != 0 && axis != 1) throw ShapeError("concat: axis must be 0 or 1");
  int rows = 0, cols = 0;
  for (const auto& p : parts) {
    if (axis == 0) {
      if (p.cols() != parts[0].cols()) shape_fail("concat(axis 0)", parts[0], p);
      rows += p.rows();
      cols = p.cols();
    } else {
      if (p.rows() != parts[0].rows()) shape_fail("concat(axis 1)", parts[0], p);
      cols += p.cols();
      rows = p.rows();
    }
  }
  std::vector<double> out(static_cast<std::size_t>(rows) * cols);
  std::vector<int> starts;
  int at = 0;
  for (const auto& p : parts) {
    starts.push_back(at);
    const auto v = p.values();
    if (axis == 0) {
      std::copy(v.begin(), v.end(), out.begin() + static_cast<std::ptrdiff_t>(at) * cols);
      at += p.rows();
    } else {
      for (int i = 0; i < rows; ++i) {
        std::copy(v.begin() + static_cast<std::ptrdiff_t>(i) * p.cols(), v.begin() + static_cast<std::ptrdiff_t>(i + 1) * p.cols(),
                  out.begin() + static_cast<std::ptrdiff_t>(i) * cols + at);
      }
      at += p.cols();
    }
  }
  return make_result(rows, cols, std::move(out), parts, [axis, rows, cols, starts](Node& self) {
    for (std::size_t k = 0; k < self.parents.size(); ++k) {
      Node& p = *self.parents[k];
      if (!p.requires_grad) continue;
      if (axis == 0) {
        const std::size_t off = static_cast<std::size_t>(starts[k]) * cols;
        for (std::size_t i = 0; i < p.grad.size(); ++i) p.grad[i] += self.grad[off + i];
      } else {
        for (int i = 0; i < rows; ++i) {
          for (int j = 0; j < p.cols; ++j) {
            p.grad[static_cast<std::size_t>(i) * p.cols + j] += self.grad[static_cast<std::size_t>(i) * cols + starts[k] + j];
          }
        }
      }
    }
  });
}

Tensor segment_sum(const Tensor& a, std::span<const int> offsets) {
  check_offsets(a, offsets, "segment_sum");
  const int segs = static_cast<int>(offsets.size()) - 1, n = a.cols();
  std::vector<int> seg_of(a.rows());
  std::vector<double> out(static_cast<std::size_t>(segs) * n, 0.0);
  for (int s = 0; s < segs; ++s) {
    for (int r = offsets[s]; r < offsets[s + 1]; ++r) {
      seg_of[r] = s;
      for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(s) * n + j] += a.values()[static_cast<std::size_t>(r) * n + j];
    }
  }
  return make_result(segs, n, std::move(out), {a}, [seg_of, n](Node& self) {
    Node& x = parent(self, 0);
    if (!x.requires_grad) return;
    for (std::size_t r = 0; r < seg_of.size(); ++r) {
      for (int j = 0; j < n; ++j) x.grad[r * n + j] += self.grad[static_cast<std::size_t>(seg_of[r]) * n + j];
    }
  });
}

Tensor segment_mean(const Tensor& a, std::span<const int> offsets) {
  check_offsets(a, offsets, "segment_mean");
  const int segs = static_cast<int>(offsets.size()) - 1, n = a.cols();
  std::vector<int> seg_of(a.rows());
  std::vector<double> inv_count(segs);
  std::vector<double> out(static_cast<std::size_t>(segs) * n, 0.0);
  for (int s = 0; s < segs; ++s) {
    inv_count[s] = 1.0 / (offsets[s + 1] - offsets[s]);
    for (int r = offsets[s]; r < offsets[s + 1]; ++r) {
      seg_of[r] = s;
      for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(s) * n + j] += a.values()[static_cast<std::size_t>(r) * n + j];
    }
    for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(s) * n + j] *= inv_count[s];
  }
  return make_result(segs, n, std::move(out), {a}, [seg_of, inv_count, n](Node& self) {
    Node& x = parent(self, 0);
    if (!x.requires_grad) return;
    for (std::size_t r = 0; r < seg_of.size(); ++r) {
      const int s = seg_of[r];
      for (int j = 0; j < n; ++j) x.grad[r * n + j] += self.grad[static_cast<std::size_t>(s) * n + j] * inv_count[s];
    }
  });
}

Tensor segment_max(const Tensor& a, std::span<const int> offsets) {
  check_offsets(a, offsets, "segment_max");
  const int segs = static_cast<int>(offsets.size()) - 1, n = a.cols();
  std::vector<double> out(static_cast<std::size_t>(segs) * n);
  std::vector<int> argmax(static_cast<std::size_t>(segs) * n);
  for (int s = 0; s < segs; ++s) {
    for (int j = 0; j < n; ++j) {
      int best = offsets[s];
      for (int r = offsets[s] + 1; r < offsets[s + 1]; ++r) {
        // strict: the first maximal row wins ties
        if (a.values()[static_cast<std::size_t>(r) * n + j] > a.values()[static_cast<std::size_t>(best) * n + j]) best = r;
      }
      argmax[static_cast<std::size_t>(s) * n + j] = best;
      out[static_cast<std::size_t>(s) * n + j] = a.values()[static_cast<std::size_t>(best) * n + j];
    }
  }
  return make_result(segs, n, std::move(out), {a}, [argmax, n](Node& self) {
    Node& x = parent(self, 0);
    if (!x.requires_grad) return;
    for (std::size_t k = 0; k < argmax.size(); ++k) {
      x.grad[static_cast<std::size_t>(argmax[k]) * n + k % n] += self.grad[k];
    }
  });
}

Tensor reduce_sum(const Tensor& a, int axis) {
  if (axis == 0) {
    const int offs[2] = {0, a.rows()};
    return segment_sum(a, offs);
  }
  if (axis != 1) throw ShapeError("reduce_sum: axis must be 0 or 1");
  return transpose(reduce_sum(transpose(a), 0));
}

Tensor reduce_mean(const Tensor& a, int axis) {
  if (axis == 0) {
    const int offs[2] = {0, a.rows()};
    return segment_mean(a, offs);
  }
  if (axis != 1) throw ShapeError("reduce_mean: axis must be 0 or 1");
  return transpose(reduce_mean(transpose(a), 0));
}

Tensor reduce_max(const Tensor& a, int axis) {
  if (axis == 0) {
    const int offs[2] = {0, a.rows()};
    return segment_max(a, offs);
  }
  if (axis != 1) throw ShapeError("reduce_max: axis must be 0 or 1");
  return transpose(reduce_max(transpose(a), 0));
}

Tensor sum_all(const Tensor& a) {
  double s = 0.0;
  for (double x : a.values()) s += x;
  return make_result(1, 1, {s}, {a}, [](Node& self) {
    Node& x = parent(self, 0);
    if (!x.requires_grad) return;
    for (double& g : x.grad) g += self.grad[0];
  });
}

Tensor gather_rows(const Tensor& a, std::span<const int> index) {
  const int n = a.cols();
  std::vector<int> idx(index.begin(), index.end());
  std::vector<double> out(idx.size() * static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= a.rows()) throw ShapeError("gather_rows: index out of range for " + a.shape_string());
    std::copy_n(a.values().begin() + static_cast<std::ptrdiff_t>(idx[i]) * n, n, out.begin() + static_cast<std::ptrdiff_t>(i) * n);
  }
  return make_result(static_cast<int>(idx.size()), n, std::move(out), {a}, [idx, n](Node& self) {
    Node& x = parent(self, 0);
    if (!x.requires_grad) return;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      for (int j = 0; j < n; ++j) x.grad[static_cast<std::size_t>(idx[i]) * n + j] += self.grad[i * n + j];
    }
  });
}

Tensor mse_loss(const Tensor& pred, const Tensor& target) {
  require_same("mse_loss", pred, target);
  if (pred.size() == 0) throw ShapeError("mse_loss: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred.values()[i] - target.values()[i];
    s += d * d;
  }
  const double inv = 1.0 / static_cast<double>(pred.size());
  return make_result(1, 1, {s * inv}, {pred, target}, [inv](Node& self) {
    Node& p = parent(self, 0);
    Node& t = parent(self, 1);
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = 2.0 * (p.value[i] - t.value[i]) * inv * self.grad[0];
      if (p.requires_grad) p.grad[i] += g;
      if (t.requires_grad) t.grad[i] -= g;
    }
  });
}

}  // namespace gsim::ad
