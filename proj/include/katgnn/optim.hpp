#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "katgnn/matrix.hpp"

namespace katgnn::ad {

// Entries uniform in +-sqrt(6 / (fan_in + fan_out)); deterministic per (shape, seed).
Matrix xavier_uniform(int rows, int cols, uint64_t seed);

struct Parameter {
  std::string name;
  Matrix value;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-6;  // decoupled
};

class AdamState {
 public:
  AdamState(const std::vector<Parameter>& params, AdamConfig config);

  // Decoupled weight decay (params *= 1 - lr*wd) followed by the standard
  // bias-corrected Adam update. grads must align with params.
  void step(std::vector<Parameter>& params, const std::vector<Matrix>& grads, double lr);

  int64_t steps_taken() const { return step_; }

 private:
  AdamConfig config_;
  std::vector<Matrix> m_, v_;
  int64_t step_ = 0;
};

// Linear warmup from max_lr/25 over the first 30% of steps, then cosine decay
// to max_lr/1e4 at step == total_steps.
double one_cycle_lr(int64_t step, int64_t total_steps, double max_lr);

// Checkpoint text format: one header line per parameter ("name rows cols")
// followed by one line of hexfloat values, so round-trips are bit-exact.
std::string params_to_text(const std::vector<Parameter>& params);
std::vector<Parameter> params_from_text(const std::string& text);

}  // namespace katgnn::ad
