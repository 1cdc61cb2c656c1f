#include "katgnn/optim.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "katgnn/rng.hpp"

namespace katgnn::ad {

Matrix xavier_uniform(int rows, int cols, uint64_t seed) {
  Matrix out(rows, cols);
  const double bound = std::sqrt(6.0 / (rows + cols));
  Rng rng(mix_seed(seed, 0xa71e4u));
  for (auto& v : out.values()) v = rng.uniform(-bound, bound);
  return out;
}

AdamState::AdamState(const std::vector<Parameter>& params, AdamConfig config)
    : config_(config) {
  for (const auto& p : params) {
    m_.emplace_back(p.value.rows(), p.value.cols());
    v_.emplace_back(p.value.rows(), p.value.cols());
  }
}

void AdamState::step(std::vector<Parameter>& params, const std::vector<Matrix>& grads,
                     double lr) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw std::runtime_error("adam_step: parameter/gradient count mismatch");
  ++step_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
  for (size_t p = 0; p < params.size(); ++p) {
    Matrix& w = params[p].value;
    const Matrix& g = grads[p];
    if (!w.same_shape(g))
      throw std::runtime_error("adam_step: gradient shape mismatch for " + params[p].name);
    if (config_.weight_decay != 0.0) {
      const double decay = 1.0 - lr * config_.weight_decay;
      for (auto& v : w.values()) v *= decay;
    }
    for (size_t i = 0; i < w.size(); ++i) {
      m_[p][i] = config_.beta1 * m_[p][i] + (1.0 - config_.beta1) * g[i];
      v_[p][i] = config_.beta2 * v_[p][i] + (1.0 - config_.beta2) * g[i] * g[i];
      const double m_hat = m_[p][i] / bc1;
      const double v_hat = v_[p][i] / bc2;
      w[i] -= lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
  }
}

double one_cycle_lr(int64_t step, int64_t total_steps, double max_lr) {
  if (total_steps <= 0) return max_lr;
  const double start_lr = max_lr / 25.0;
  const double final_lr = max_lr / 1e4;
  const double progress = static_cast<double>(step) / static_cast<double>(total_steps);
  if (progress <= 0.3) {
    return start_lr + (max_lr - start_lr) * (progress / 0.3);
  }
  const double c = std::min(1.0, (progress - 0.3) / 0.7);
  return final_lr + (max_lr - final_lr) * 0.5 * (1.0 + std::cos(c * 3.14159265358979323846));
}

std::string params_to_text(const std::vector<Parameter>& params) {
  std::string out;
  char buf[64];
  for (const auto& p : params) {
    out += p.name + " " + std::to_string(p.value.rows()) + " " +
           std::to_string(p.value.cols()) + "\n";
    for (size_t i = 0; i < p.value.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%a", p.value[i]);
      if (i) out += ' ';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::vector<Parameter> params_from_text(const std::string& text) {
  std::istringstream in(text);
  std::vector<Parameter> params;
  std::string name;
  while (in >> name) {
    int rows = 0, cols = 0;
    if (!(in >> rows >> cols))
      throw std::runtime_error("checkpoint: malformed header for " + name);
    Parameter p;
    p.name = name;
    p.value = Matrix(rows, cols);
    for (size_t i = 0; i < p.value.size(); ++i) {
      std::string tok;
      if (!(in >> tok)) throw std::runtime_error("checkpoint: truncated values for " + name);
      p.value[i] = std::strtod(tok.c_str(), nullptr);
    }
    params.push_back(std::move(p));
  }
  return params;
}

}  // namespace katgnn::ad
