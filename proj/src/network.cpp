#include "katgnn/network.hpp"

#include <cmath>
#include <stdexcept>

#include "katgnn/rng.hpp"

namespace katgnn {

namespace {
constexpr double kDaysPerYear = 365.25;
}

Matrix normalize_adjacency(const PatientGraph& graph) {
  const int n = graph.num_nodes();
  if (n == 0) throw std::runtime_error("normalize_adjacency: empty graph");
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) a.at(i, i) = 1.0;  // self-loops
  for (const auto& e : graph.edges) {
    a.at(e.u, e.v) = 1.0;
    a.at(e.v, e.u) = 1.0;
  }
  std::vector<double> inv_sqrt_deg(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double deg = 0.0;
    for (int j = 0; j < n; ++j) deg += a.at(i, j);
    inv_sqrt_deg[static_cast<size_t>(i)] = 1.0 / std::sqrt(deg);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a.at(i, j) *= inv_sqrt_deg[static_cast<size_t>(i)] * inv_sqrt_deg[static_cast<size_t>(j)];
  return a;
}

PatientTensors prepare_tensors(const PatientGraph& graph) {
  PatientTensors t;
  t.features = materialize_features(graph);
  t.adj_norm = normalize_adjacency(graph);
  t.visit_rows = graph.visit_node_rows();
  for (int row : t.visit_rows)
    t.tau_years.push_back(
        static_cast<double>(graph.nodes[static_cast<size_t>(row)].tau_days) / kDaysPerYear);
  return t;
}

NetworkParams NetworkParams::init(
    const std::vector<std::pair<std::string, int>>& modalities, int hidden_dim,
    int time_dim, uint64_t seed) {
  if (modalities.empty()) throw std::runtime_error("NetworkParams: no modalities");
  NetworkParams net;
  net.hidden_dim = hidden_dim;
  net.time_dim = time_dim;

  const auto add_xavier = [&](const std::string& name, int rows, int cols) {
    const auto idx = static_cast<int>(net.params.size());
    net.params.push_back(
        {name, ad::xavier_uniform(rows, cols, mix_seed(seed, 0x11u, net.params.size()))});
    return idx;
  };
  const auto add_zeros = [&](const std::string& name, int rows, int cols) {
    const auto idx = static_cast<int>(net.params.size());
    net.params.push_back({name, Matrix(rows, cols)});
    return idx;
  };

  for (const auto& [name, feature_dim] : modalities) {
    ModalityParamIds ids;
    ids.gcn0 = add_xavier(name + ".gcn0", feature_dim, hidden_dim);
    ids.gcn1 = add_xavier(name + ".gcn1", hidden_dim, hidden_dim);
    ids.w1 = add_xavier(name + ".w1", 1, time_dim);
    ids.w2 = add_xavier(name + ".w2", time_dim, hidden_dim);
    ids.w_attn = add_xavier(name + ".w_attn", 2 * hidden_dim, 1);
    ids.wq = add_xavier(name + ".wq", hidden_dim, hidden_dim);
    net.modality_names.push_back(name);
    net.modality_ids[name] = ids;
  }
  net.fusion_logits =
      add_zeros("fusion_logits", 1, static_cast<int>(modalities.size()));
  net.head_w = add_xavier("head_w", hidden_dim, 1);
  net.head_b = add_zeros("head_b", 1, 1);
  return net;
}

ModelOnTape::ModelOnTape(ad::Tape& tape, const NetworkParams& params)
    : tape_(tape), params_(params) {
  refs_.reserve(params.params.size());
  for (const auto& p : params.params) refs_.push_back(tape_.leaf(p.value, true));
}

ad::Tape::Ref ModelOnTape::gcn_forward(const PatientTensors& tensors,
                                       const ModalityParamIds& ids, bool train,
                                       double dropout_p, uint64_t dropout_seed) {
  auto x = tape_.leaf(tensors.features);
  auto adj = tape_.leaf(tensors.adj_norm);
  auto h1 = tape_.relu(tape_.matmul(tape_.matmul(adj, x), refs_[static_cast<size_t>(ids.gcn0)]));
  h1 = tape_.dropout(h1, dropout_p, mix_seed(dropout_seed, 0x60cu), train);
  // Identity activation on the last layer keeps visit embeddings unsquashed.
  return tape_.matmul(tape_.matmul(adj, h1), refs_[static_cast<size_t>(ids.gcn1)]);
}

ad::Tape::Ref ModelOnTape::modality_forward(const PatientTensors& tensors,
                                            const std::string& modality, bool train,
                                            double dropout_p, uint64_t dropout_seed,
                                            bool time_aware, AttentionDiagnostics* diag) {
  if (tensors.visit_rows.empty())
    throw std::runtime_error("modality_forward: graph has no visit nodes");
  auto it = params_.modality_ids.find(modality);
  if (it == params_.modality_ids.end())
    throw std::runtime_error("modality_forward: unknown modality '" + modality + "'");
  const ModalityParamIds& ids = it->second;

  const auto embeddings = gcn_forward(tensors, ids, train, dropout_p, dropout_seed);
  const auto x = tape_.gather_rows(embeddings, tensors.visit_rows);  // N x d

  if (!time_aware) return tape_.mean_rows(x);

  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(params_.hidden_dim));
  const auto n_visits = static_cast<int>(tensors.visit_rows.size());

  // Temporal embeddings: t_raw = 1 - tanh(w1 * tau^2), projected to d dims.
  Matrix tau_sq(n_visits, 1);
  for (int i = 0; i < n_visits; ++i)
    tau_sq.at(i, 0) = tensors.tau_years[static_cast<size_t>(i)] *
                      tensors.tau_years[static_cast<size_t>(i)];
  const auto t_raw = tape_.affine(
      tape_.tanh(tape_.matmul(tape_.leaf(tau_sq), refs_[static_cast<size_t>(ids.w1)])),
      -1.0, 1.0);  // N x time_dim
  const auto t_proj = tape_.matmul(t_raw, refs_[static_cast<size_t>(ids.w2)]);  // N x d

  // Local attention over visits.
  const auto scores = tape_.matmul(tape_.concat_cols(x, t_proj),
                                   refs_[static_cast<size_t>(ids.w_attn)]);  // N x 1
  const auto alpha =
      tape_.softmax(tape_.scale(tape_.transpose(scores), inv_sqrt_d));  // 1 x N
  const auto z_local = tape_.matmul(alpha, x);  // 1 x d

  // Global attention: query from the mean visit embedding, scores against the
  // projected temporal embeddings (the d-dimensional form keeps q^T t typed).
  const auto q = tape_.relu(
      tape_.matmul(tape_.mean_rows(x), refs_[static_cast<size_t>(ids.wq)]));  // 1 x d
  const auto beta = tape_.softmax(
      tape_.scale(tape_.matmul(q, tape_.transpose(t_proj)), inv_sqrt_d));  // 1 x N
  const auto z_global = tape_.matmul(beta, t_proj);  // 1 x d

  if (diag) {
    diag->alpha = tape_.value(alpha).values();
    diag->beta = tape_.value(beta).values();
  }
  return tape_.add(z_local, z_global);
}

ad::Tape::Ref ModelOnTape::fuse_and_predict(const std::vector<ad::Tape::Ref>& z_times,
                                            AttentionDiagnostics* diag) {
  if (z_times.empty()) throw std::runtime_error("fuse_and_predict: no modalities");
  if (z_times.size() != params_.modality_names.size())
    throw std::runtime_error("fuse_and_predict: expected " +
                             std::to_string(params_.modality_names.size()) +
                             " modality outputs, got " + std::to_string(z_times.size()));
  auto stacked = z_times[0];
  for (size_t v = 1; v < z_times.size(); ++v)
    stacked = tape_.concat_rows(stacked, z_times[v]);  // V x d

  const auto fusion_alpha =
      tape_.softmax(refs_[static_cast<size_t>(params_.fusion_logits)]);  // 1 x V
  const auto z_fused = tape_.matmul(fusion_alpha, stacked);              // 1 x d
  const auto logit = tape_.add(tape_.matmul(z_fused, refs_[static_cast<size_t>(params_.head_w)]),
                               refs_[static_cast<size_t>(params_.head_b)]);
  if (diag) diag->fusion_alpha = tape_.value(fusion_alpha).values();
  return tape_.sigmoid(logit);
}

void ModelOnTape::accumulate_grads(std::vector<Matrix>& grads, double scale) const {
  if (grads.size() != refs_.size())
    throw std::runtime_error("accumulate_grads: buffer count mismatch");
  for (size_t p = 0; p < refs_.size(); ++p) {
    const Matrix& g = tape_.grad(refs_[p]);
    if (g.empty()) continue;  // parameter unused by this patient's forward
    Matrix& acc = grads[p];
    if (acc.empty()) acc = Matrix(g.rows(), g.cols());
    for (size_t i = 0; i < acc.size(); ++i) acc[i] += scale * g[i];
  }
}

}  // namespace katgnn
