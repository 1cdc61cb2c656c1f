#include "katgnn/tape.hpp"

#include <algorithm>
#include <cmath>

#include "katgnn/rng.hpp"

namespace katgnn::ad {

namespace {
constexpr double kProbEps = 1e-7;

double clamp_prob(double p) {
  return std::min(1.0 - kProbEps, std::max(kProbEps, p));
}
}  // namespace

Tape::Ref Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<Ref>(nodes_.size() - 1);
}

void Tape::check(Ref t) const {
  if (t < 0 || static_cast<size_t>(t) >= nodes_.size())
    throw std::runtime_error("tape: invalid tensor reference");
}

Tape::Ref Tape::leaf(Matrix value, bool requires_grad) {
  Node n;
  n.op = Op::leaf;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  return push(std::move(n));
}

Tape::Ref Tape::matmul(Ref a, Ref b) {
  check(a);
  check(b);
  Node n;
  n.op = Op::matmul;
  n.a = a;
  n.b = b;
  n.value = katgnn::matmul(value(a), value(b));  // shape check inside
  n.requires_grad = requires_grad(a) || requires_grad(b);
  return push(std::move(n));
}

Tape::Ref Tape::add(Ref a, Ref b) {
  check(a);
  check(b);
  if (!value(a).same_shape(value(b)))
    throw std::runtime_error("add: shape mismatch " + value(a).shape_str() + " vs " +
                             value(b).shape_str());
  Node n;
  n.op = Op::add;
  n.a = a;
  n.b = b;
  n.value = value(a);
  for (size_t i = 0; i < n.value.size(); ++i) n.value[i] += value(b)[i];
  n.requires_grad = requires_grad(a) || requires_grad(b);
  return push(std::move(n));
}

Tape::Ref Tape::mul(Ref a, Ref b) {
  check(a);
  check(b);
  if (!value(a).same_shape(value(b)))
    throw std::runtime_error("mul: shape mismatch " + value(a).shape_str() + " vs " +
                             value(b).shape_str());
  Node n;
  n.op = Op::mul;
  n.a = a;
  n.b = b;
  n.value = value(a);
  for (size_t i = 0; i < n.value.size(); ++i) n.value[i] *= value(b)[i];
  n.requires_grad = requires_grad(a) || requires_grad(b);
  return push(std::move(n));
}

Tape::Ref Tape::affine(Ref x, double alpha, double beta) {
  check(x);
  Node n;
  n.op = Op::affine;
  n.a = x;
  n.p0 = alpha;
  n.p1 = beta;
  n.value = value(x);
  for (auto& v : n.value.values()) v = alpha * v + beta;
  n.requires_grad = requires_grad(x);
  return push(std::move(n));
}

Tape::Ref Tape::concat_cols(Ref a, Ref b) {
  check(a);
  check(b);
  const Matrix& va = value(a);
  const Matrix& vb = value(b);
  if (va.rows() != vb.rows())
    throw std::runtime_error("concat_cols: row mismatch " + va.shape_str() + " vs " +
                             vb.shape_str());
  Node n;
  n.op = Op::concat_cols;
  n.a = a;
  n.b = b;
  n.value = Matrix(va.rows(), va.cols() + vb.cols());
  for (int r = 0; r < va.rows(); ++r) {
    for (int c = 0; c < va.cols(); ++c) n.value.at(r, c) = va.at(r, c);
    for (int c = 0; c < vb.cols(); ++c) n.value.at(r, va.cols() + c) = vb.at(r, c);
  }
  n.requires_grad = requires_grad(a) || requires_grad(b);
  return push(std::move(n));
}

Tape::Ref Tape::concat_rows(Ref a, Ref b) {
  check(a);
  check(b);
  const Matrix& va = value(a);
  const Matrix& vb = value(b);
  if (va.cols() != vb.cols())
    throw std::runtime_error("concat_rows: column mismatch " + va.shape_str() + " vs " +
                             vb.shape_str());
  Node n;
  n.op = Op::concat_rows;
  n.a = a;
  n.b = b;
  n.value = Matrix(va.rows() + vb.rows(), va.cols());
  std::copy(va.values().begin(), va.values().end(), n.value.values().begin());
  std::copy(vb.values().begin(), vb.values().end(),
            n.value.values().begin() + static_cast<long>(va.size()));
  n.requires_grad = requires_grad(a) || requires_grad(b);
  return push(std::move(n));
}

Tape::Ref Tape::gather_rows(Ref x, std::vector<int> row_indices) {
  check(x);
  const Matrix& vx = value(x);
  Node n;
  n.op = Op::gather_rows;
  n.a = x;
  n.value = Matrix(static_cast<int>(row_indices.size()), vx.cols());
  for (size_t i = 0; i < row_indices.size(); ++i) {
    const int r = row_indices[i];
    if (r < 0 || r >= vx.rows()) throw std::runtime_error("gather_rows: index out of range");
    for (int c = 0; c < vx.cols(); ++c) n.value.at(static_cast<int>(i), c) = vx.at(r, c);
  }
  n.indices = std::move(row_indices);
  n.requires_grad = requires_grad(x);
  return push(std::move(n));
}

Tape::Ref Tape::mean_rows(Ref x) {
  check(x);
  const Matrix& vx = value(x);
  if (vx.rows() == 0) throw std::runtime_error("mean_rows: empty matrix");
  Node n;
  n.op = Op::mean_rows;
  n.a = x;
  n.value = Matrix(1, vx.cols());
  for (int r = 0; r < vx.rows(); ++r)
    for (int c = 0; c < vx.cols(); ++c) n.value.at(0, c) += vx.at(r, c);
  for (auto& v : n.value.values()) v /= vx.rows();
  n.requires_grad = requires_grad(x);
  return push(std::move(n));
}

Tape::Ref Tape::transpose(Ref x) {
  check(x);
  Node n;
  n.op = Op::transpose;
  n.a = x;
  n.value = katgnn::transpose(value(x));
  n.requires_grad = requires_grad(x);
  return push(std::move(n));
}

Tape::Ref Tape::tanh(Ref x) {
  check(x);
  Node n;
  n.op = Op::tanh;
  n.a = x;
  n.value = value(x);
  for (auto& v : n.value.values()) v = std::tanh(v);
  n.requires_grad = requires_grad(x);
  return push(std::move(n));
}

Tape::Ref Tape::relu(Ref x) {
  check(x);
  Node n;
  n.op = Op::relu;
  n.a = x;
  n.value = value(x);
  for (auto& v : n.value.values()) v = v > 0.0 ? v : 0.0;
  n.requires_grad = requires_grad(x);
  return push(std::move(n));
}

Tape::Ref Tape::sigmoid(Ref x) {
  check(x);
  Node n;
  n.op = Op::sigmoid;
  n.a = x;
  n.value = value(x);
  for (auto& v : n.value.values()) v = 1.0 / (1.0 + std::exp(-v));
  n.requires_grad = requires_grad(x);
  return push(std::move(n));
}

Tape::Ref Tape::softmax(Ref x) {
  check(x);
  Node n;
  n.op = Op::softmax;
  n.a = x;
  n.value = value(x);
  Matrix& out = n.value;
  for (int r = 0; r < out.rows(); ++r) {
    double mx = out.at(r, 0);
    for (int c = 1; c < out.cols(); ++c) mx = std::max(mx, out.at(r, c));
    double sum = 0.0;
    for (int c = 0; c < out.cols(); ++c) {
      out.at(r, c) = std::exp(out.at(r, c) - mx);
      sum += out.at(r, c);
    }
    for (int c = 0; c < out.cols(); ++c) out.at(r, c) /= sum;
  }
  n.requires_grad = requires_grad(x);
  return push(std::move(n));
}

Tape::Ref Tape::dropout(Ref x, double p, uint64_t seed, bool train) {
  check(x);
  if (p < 0.0 || p >= 1.0) throw std::runtime_error("dropout: p must be in [0, 1)");
  if (!train || p == 0.0) return x;
  Node n;
  n.op = Op::dropout;
  n.a = x;
  n.p0 = p;
  n.value = value(x);
  n.mask.resize(n.value.size());
  Rng rng(mix_seed(seed, 0xd20u));
  const double keep_scale = 1.0 / (1.0 - p);
  for (size_t i = 0; i < n.value.size(); ++i) {
    const bool keep = rng.uniform() >= p;
    n.mask[i] = keep ? 1 : 0;
    n.value[i] = keep ? n.value[i] * keep_scale : 0.0;
  }
  n.requires_grad = requires_grad(x);
  return push(std::move(n));
}

Tape::Ref Tape::bce_loss(Ref probs, const std::vector<double>& labels) {
  check(probs);
  const Matrix& vp = value(probs);
  if (vp.cols() != 1 || static_cast<size_t>(vp.rows()) != labels.size())
    throw std::runtime_error("bce_loss: expected " + std::to_string(labels.size()) +
                             "x1 probabilities, got " + vp.shape_str());
  Node n;
  n.op = Op::bce;
  n.a = probs;
  n.labels = labels;
  double loss = 0.0;
  for (size_t i = 0; i < labels.size(); ++i) {
    const double p = clamp_prob(vp[i]);
    loss += -(labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p));
  }
  n.value = Matrix::scalar(loss / static_cast<double>(labels.size()));
  n.requires_grad = requires_grad(probs);
  return push(std::move(n));
}

Matrix& Tape::grad_buffer(Ref t) {
  Node& n = node(t);
  if (n.grad.empty() && !n.value.empty())
    n.grad = Matrix(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::backward(Ref loss) {
  check(loss);
  if (value(loss).rows() != 1 || value(loss).cols() != 1)
    throw std::runtime_error("backward: loss must be 1x1, got " + value(loss).shape_str());
  for (auto& n : nodes_) n.grad = Matrix();
  grad_buffer(loss)[0] = 1.0;
  for (Ref t = loss; t >= 0; --t) {
    Node& n = node(t);
    if (!n.requires_grad || n.grad.empty() || n.op == Op::leaf) continue;
    backward_node(n);
  }
}

void Tape::backward_node(Node& n) {
  const Matrix& g = n.grad;
  switch (n.op) {
    case Op::leaf:
      break;
    case Op::matmul: {
      if (requires_grad(n.a)) {
        Matrix ga = katgnn::matmul(g, katgnn::transpose(value(n.b)));
        Matrix& acc = grad_buffer(n.a);
        for (size_t i = 0; i < acc.size(); ++i) acc[i] += ga[i];
      }
      if (requires_grad(n.b)) {
        Matrix gb = katgnn::matmul(katgnn::transpose(value(n.a)), g);
        Matrix& acc = grad_buffer(n.b);
        for (size_t i = 0; i < acc.size(); ++i) acc[i] += gb[i];
      }
      break;
    }
    case Op::add: {
      for (Ref in : {n.a, n.b}) {
        if (!requires_grad(in)) continue;
        Matrix& acc = grad_buffer(in);
        for (size_t i = 0; i < acc.size(); ++i) acc[i] += g[i];
      }
      break;
    }
    case Op::mul: {
      if (requires_grad(n.a)) {
        Matrix& acc = grad_buffer(n.a);
        const Matrix& vb = value(n.b);
        for (size_t i = 0; i < acc.size(); ++i) acc[i] += g[i] * vb[i];
      }
      if (requires_grad(n.b)) {
        Matrix& acc = grad_buffer(n.b);
        const Matrix& va = value(n.a);
        for (size_t i = 0; i < acc.size(); ++i) acc[i] += g[i] * va[i];
      }
      break;
    }
    case Op::affine: {
      if (!requires_grad(n.a)) break;
      Matrix& acc = grad_buffer(n.a);
      for (size_t i = 0; i < acc.size(); ++i) acc[i] += n.p0 * g[i];
      break;
    }
    case Op::concat_cols: {
      const Matrix& va = value(n.a);
      const Matrix& vb = value(n.b);
      if (requires_grad(n.a)) {
        Matrix& acc = grad_buffer(n.a);
        for (int r = 0; r < va.rows(); ++r)
          for (int c = 0; c < va.cols(); ++c) acc.at(r, c) += g.at(r, c);
      }
      if (requires_grad(n.b)) {
        Matrix& acc = grad_buffer(n.b);
        for (int r = 0; r < vb.rows(); ++r)
          for (int c = 0; c < vb.cols(); ++c) acc.at(r, c) += g.at(r, va.cols() + c);
      }
      break;
    }
    case Op::concat_rows: {
      const Matrix& va = value(n.a);
      if (requires_grad(n.a)) {
        Matrix& acc = grad_buffer(n.a);
        for (size_t i = 0; i < acc.size(); ++i) acc[i] += g[i];
      }
      if (requires_grad(n.b)) {
        Matrix& acc = grad_buffer(n.b);
        for (size_t i = 0; i < acc.size(); ++i) acc[i] += g[i + va.size()];
      }
      break;
    }
    case Op::gather_rows: {
      if (!requires_grad(n.a)) break;
      Matrix& acc = grad_buffer(n.a);
      for (size_t i = 0; i < n.indices.size(); ++i)
        for (int c = 0; c < acc.cols(); ++c)
          acc.at(n.indices[i], c) += g.at(static_cast<int>(i), c);
      break;
    }
    case Op::mean_rows: {
      if (!requires_grad(n.a)) break;
      Matrix& acc = grad_buffer(n.a);
      const double inv = 1.0 / acc.rows();
      for (int r = 0; r < acc.rows(); ++r)
        for (int c = 0; c < acc.cols(); ++c) acc.at(r, c) += g.at(0, c) * inv;
      break;
    }
    case Op::transpose: {
      if (!requires_grad(n.a)) break;
      Matrix& acc = grad_buffer(n.a);
      for (int r = 0; r < acc.rows(); ++r)
        for (int c = 0; c < acc.cols(); ++c) acc.at(r, c) += g.at(c, r);
      break;
    }
    case Op::tanh: {
      if (!requires_grad(n.a)) break;
      Matrix& acc = grad_buffer(n.a);
      for (size_t i = 0; i < acc.size(); ++i)
        acc[i] += g[i] * (1.0 - n.value[i] * n.value[i]);
      break;
    }
    case Op::relu: {
      // relu'(0) = 0 by convention.
      if (!requires_grad(n.a)) break;
      Matrix& acc = grad_buffer(n.a);
      for (size_t i = 0; i < acc.size(); ++i)
        acc[i] += n.value[i] > 0.0 ? g[i] : 0.0;
      break;
    }
    case Op::sigmoid: {
      if (!requires_grad(n.a)) break;
      Matrix& acc = grad_buffer(n.a);
      for (size_t i = 0; i < acc.size(); ++i)
        acc[i] += g[i] * n.value[i] * (1.0 - n.value[i]);
      break;
    }
    case Op::softmax: {
      if (!requires_grad(n.a)) break;
      Matrix& acc = grad_buffer(n.a);
      const Matrix& y = n.value;
      for (int r = 0; r < y.rows(); ++r) {
        double dot = 0.0;
        for (int c = 0; c < y.cols(); ++c) dot += g.at(r, c) * y.at(r, c);
        for (int c = 0; c < y.cols(); ++c)
          acc.at(r, c) += y.at(r, c) * (g.at(r, c) - dot);
      }
      break;
    }
    case Op::dropout: {
      if (!requires_grad(n.a)) break;
      Matrix& acc = grad_buffer(n.a);
      const double keep_scale = 1.0 / (1.0 - n.p0);
      for (size_t i = 0; i < acc.size(); ++i)
        acc[i] += n.mask[i] ? g[i] * keep_scale : 0.0;
      break;
    }
    case Op::bce: {
      if (!requires_grad(n.a)) break;
      Matrix& acc = grad_buffer(n.a);
      const Matrix& vp = value(n.a);
      const double g0 = g[0] / static_cast<double>(n.labels.size());
      for (size_t i = 0; i < n.labels.size(); ++i) {
        const double raw = vp[i];
        if (raw <= kProbEps || raw >= 1.0 - kProbEps) continue;  // clamped flat
        acc[i] += g0 * (raw - n.labels[i]) / (raw * (1.0 - raw));
      }
      break;
    }
  }
}

double grad_check(const std::function<Tape::Ref(Tape&, Tape::Ref)>& f,
                  const Matrix& point, double eps) {
  Tape tape;
  const Tape::Ref x = tape.leaf(point, true);
  const Tape::Ref loss = f(tape, x);
  tape.backward(loss);
  const Matrix g_ad = tape.grad(x);

  double max_rel = 0.0;
  for (size_t i = 0; i < point.size(); ++i) {
    Matrix plus = point, minus = point;
    plus[i] += eps;
    minus[i] -= eps;
    Tape tp, tm;
    const double fp = tp.value(f(tp, tp.leaf(plus))).at(0, 0);
    const double fm = tm.value(f(tm, tm.leaf(minus))).at(0, 0);
    const double g_fd = (fp - fm) / (2.0 * eps);
    const double rel = std::abs(g_ad[i] - g_fd) /
                       std::max(1e-8, std::abs(g_ad[i]) + std::abs(g_fd));
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

}  // namespace katgnn::ad
