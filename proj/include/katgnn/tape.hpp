#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "katgnn/matrix.hpp"

namespace katgnn::ad {

// Reverse-mode tape. Operations append nodes in execution order; backward()
// walks them in exact reverse order, accumulating gradients additively so
// shared subexpressions sum their contributions. A tape belongs to a single
// thread; run independent tapes for concurrent work.
class Tape {
 public:
  using Ref = int;

  Ref leaf(Matrix value, bool requires_grad = false);
  Ref scalar(double value) { return leaf(Matrix::scalar(value)); }

  Ref matmul(Ref a, Ref b);
  Ref add(Ref a, Ref b);
  Ref mul(Ref a, Ref b);  // elementwise
  // y = alpha * x + beta, elementwise; scale/shift in one node.
  Ref affine(Ref x, double alpha, double beta);
  Ref scale(Ref x, double alpha) { return affine(x, alpha, 0.0); }
  Ref concat_cols(Ref a, Ref b);
  Ref concat_rows(Ref a, Ref b);
  Ref gather_rows(Ref x, std::vector<int> row_indices);
  Ref mean_rows(Ref x);
  Ref transpose(Ref x);
  Ref tanh(Ref x);
  Ref relu(Ref x);
  Ref sigmoid(Ref x);
  // Row-wise softmax (last axis), stabilized by row-max subtraction.
  Ref softmax(Ref x);
  // Train mode: zero entries with probability p, scale survivors by 1/(1-p).
  // Eval mode returns x unchanged.
  Ref dropout(Ref x, double p, uint64_t seed, bool train);
  // Mean binary cross-entropy of an Nx1 probability column against labels;
  // probabilities are clamped into [1e-7, 1 - 1e-7] before the logs.
  Ref bce_loss(Ref probs, const std::vector<double>& labels);
  Ref bce_loss(Ref prob, double label) { return bce_loss(prob, std::vector<double>{label}); }

  const Matrix& value(Ref t) const { return nodes_[static_cast<size_t>(t)].value; }
  const Matrix& grad(Ref t) const { return nodes_[static_cast<size_t>(t)].grad; }
  bool requires_grad(Ref t) const { return nodes_[static_cast<size_t>(t)].requires_grad; }
  size_t num_nodes() const { return nodes_.size(); }

  // Seeds d(loss)/d(loss) = 1 and back-propagates; loss must be 1x1.
  void backward(Ref loss);

 private:
  enum class Op {
    leaf, matmul, add, mul, affine, concat_cols, concat_rows, gather_rows,
    mean_rows, transpose, tanh, relu, sigmoid, softmax, dropout, bce,
  };

  struct Node {
    Op op = Op::leaf;
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    Ref a = -1, b = -1;
    double p0 = 0.0, p1 = 0.0;
    std::vector<int> indices;     // gather_rows
    std::vector<uint8_t> mask;    // dropout keep mask
    std::vector<double> labels;   // bce
  };

  Ref push(Node node);
  Node& node(Ref t) { return nodes_[static_cast<size_t>(t)]; }
  const Node& node(Ref t) const { return nodes_[static_cast<size_t>(t)]; }
  void check(Ref t) const;
  void backward_node(Node& n);
  Matrix& grad_buffer(Ref t);

  std::vector<Node> nodes_;
};

// Max relative finite-difference error of the tape gradient of `f` at `point`,
// where f builds a scalar loss from a leaf handed to it. Relative error is
// |g_ad - g_fd| / max(1e-8, |g_ad| + |g_fd|), maximized over coordinates.
double grad_check(const std::function<Tape::Ref(Tape&, Tape::Ref)>& f,
                  const Matrix& point, double eps = 1e-5);

}  // namespace katgnn::ad
