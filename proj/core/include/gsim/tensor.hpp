#pragma once

#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsim::ad {

struct Node;
using BackwardFn = std::function<void(Node&)>;

/// One vertex of the differentiation graph. Values are row-major with
/// shape (rows, cols); vectors are 1 x n rows.
struct Node {
  int rows = 0;
  int cols = 0;
  std::vector<double> value;
  std::vector<double> grad;  // allocated iff requires_grad
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  BackwardFn backward;  // empty for leaves
};

/// Shared handle to a Node. Copies alias the same storage.
class Tensor {
public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Tensor zeros(int rows, int cols, bool requires_grad = false);
  static Tensor full(int rows, int cols, double value, bool requires_grad = false);
  static Tensor from(int rows, int cols, std::vector<double> values, bool requires_grad = false);
  static Tensor row(std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return static_cast<bool>(node_); }
  int rows() const { return node_->rows; }
  int cols() const { return node_->cols; }
  std::size_t size() const { return node_->value.size(); }
  std::string shape_string() const;

  std::span<const double> values() const { return node_->value; }
  std::span<double> mutable_values() { return node_->value; }
  std::span<const double> grad() const { return node_->grad; }
  std::span<double> mutable_grad() { return node_->grad; }
  double at(int r, int c) const { return node_->value[static_cast<std::size_t>(r) * cols() + c]; }
  double item() const;

  bool requires_grad() const { return node_->requires_grad; }
  void zero_grad();

  /// Accumulates d(this)/d(leaf) into the grad of every reachable leaf that
  /// requires a gradient. `this` must be 1 x 1. Gradients of intermediate
  /// nodes are reset on each call, leaf gradients accumulate across calls.
  void backward() const;

  /// Same values, cut from the graph.
  Tensor detach() const;

  Node* node() const { return node_.get(); }
  const std::shared_ptr<Node>& shared() const { return node_; }

private:
  std::shared_ptr<Node> node_;
};

/// Builds a non-leaf tensor. The result requires a gradient iff any parent
/// does; `backward` is kept only in that case.
Tensor make_result(int rows, int cols, std::vector<double> value, std::vector<Tensor> parents, BackwardFn backward);

/// Thrown for incompatible operand shapes.
class ShapeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

/// Element-wise sum; `b` may also be a 1 x cols row broadcast over rows.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
/// Multiply by a 1 x 1 tensor.
Tensor scale(const Tensor& a, const Tensor& s);
/// Row i of `a` multiplied by s(i, 0); s is rows x 1.
Tensor scale_rows(const Tensor& a, const Tensor& s);

Tensor abs(const Tensor& a);  // subgradient 0 at 0
Tensor relu(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor exp(const Tensor& a);

/// Row-wise softmax(a / t). Throws std::invalid_argument unless t > 0.
Tensor softmax_with_temperature(const Tensor& a, double t);
/// Row-wise softmax(a * inv_t) with a learnable 1 x 1 inverse temperature.
Tensor softmax_scaled(const Tensor& a, const Tensor& inv_t);

inline constexpr double kLayerNormEps = 1e-5;
/// Normalizes each row to zero mean / unit variance (biased), then applies
/// the 1 x cols affine gamma, beta.
Tensor layer_norm(const Tensor& a, const Tensor& gamma, const Tensor& beta, double eps = kLayerNormEps);

/// axis 0 stacks rows (equal cols), axis 1 stacks columns (equal rows).
Tensor concat(const std::vector<Tensor>& parts, int axis);

/// axis 0 reduces over rows (result 1 x cols), axis 1 over columns
/// (result rows x 1). reduce_max routes the gradient to the first maximum.
Tensor reduce_sum(const Tensor& a, int axis);
Tensor reduce_mean(const Tensor& a, int axis);
Tensor reduce_max(const Tensor& a, int axis);
Tensor sum_all(const Tensor& a);

/// Rows [offsets[s], offsets[s+1]) of `a` form segment s; result has one
/// row per segment. Segments must be non-empty.
Tensor segment_sum(const Tensor& a, std::span<const int> offsets);
Tensor segment_mean(const Tensor& a, std::span<const int> offsets);
Tensor segment_max(const Tensor& a, std::span<const int> offsets);

/// Row i of the result is row index[i] of `a`.
Tensor gather_rows(const Tensor& a, std::span<const int> index);

/// Mean of squared differences over all entries.
Tensor mse_loss(const Tensor& pred, const Tensor& target);

}  // namespace gsim::ad
