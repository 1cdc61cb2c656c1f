#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "katgnn/graph.hpp"
#include "katgnn/matrix.hpp"
#include "katgnn/optim.hpp"
#include "katgnn/tape.hpp"

namespace katgnn {

// D^{-1/2} (A + I) D^{-1/2} as a dense matrix; exactly symmetric.
Matrix normalize_adjacency(const PatientGraph& graph);

// Constant per-patient tensors derived from a graph once and reused across
// epochs: features, normalized adjacency, visit rows (chronological) and the
// time intervals to the index date in years.
struct PatientTensors {
  Matrix features;
  Matrix adj_norm;
  std::vector<int> visit_rows;
  std::vector<double> tau_years;
};

PatientTensors prepare_tensors(const PatientGraph& graph);

// Indices into the flat parameter vector for one modality's weights.
struct ModalityParamIds {
  int gcn0 = -1;    // feature_dim x d
  int gcn1 = -1;    // d x d
  int w1 = -1;      // 1 x time_dim
  int w2 = -1;      // time_dim x d
  int w_attn = -1;  // 2d x 1
  int wq = -1;      // d x d
};

// Every learned matrix/vector of the model. Xavier-initialized except the
// fusion logits and biases, which start at zero.
struct NetworkParams {
  int hidden_dim = 0;
  int time_dim = 0;
  std::vector<ad::Parameter> params;
  std::vector<std::string> modality_names;  // fusion order
  std::map<std::string, ModalityParamIds> modality_ids;
  int fusion_logits = -1;  // 1 x num_modalities
  int head_w = -1;         // d x 1
  int head_b = -1;         // 1 x 1

  static NetworkParams init(const std::vector<std::pair<std::string, int>>& modalities,
                            int hidden_dim, int time_dim, uint64_t seed);
};

struct AttentionDiagnostics {
  std::vector<double> alpha;         // local, per visit
  std::vector<double> beta;          // global, per visit
  std::vector<double> fusion_alpha;  // per modality
};

// Forward passes for one patient on one tape. Parameters are registered as
// leaves once per tape; gradients are read back per parameter after backward.
class ModelOnTape {
 public:
  ModelOnTape(ad::Tape& tape, const NetworkParams& params);

  // GCN encode + local/global time-aware attention -> z_time (1 x d).
  // time_aware=false replaces the temporal module with mean pooling.
  ad::Tape::Ref modality_forward(const PatientTensors& tensors,
                                 const std::string& modality, bool train,
                                 double dropout_p, uint64_t dropout_seed,
                                 bool time_aware, AttentionDiagnostics* diag = nullptr);

  // Softmax-weighted modality fusion followed by the affine+sigmoid head.
  ad::Tape::Ref fuse_and_predict(const std::vector<ad::Tape::Ref>& z_times,
                                 AttentionDiagnostics* diag = nullptr);

  // Adds scale * d(loss)/d(param) into grads (aligned with params.params).
  void accumulate_grads(std::vector<Matrix>& grads, double scale) const;

 private:
  ad::Tape::Ref gcn_forward(const PatientTensors& tensors, const ModalityParamIds& ids,
                            bool train, double dropout_p, uint64_t dropout_seed);

  ad::Tape& tape_;
  const NetworkParams& params_;
  std::vector<ad::Tape::Ref> refs_;
};

}  // namespace katgnn
