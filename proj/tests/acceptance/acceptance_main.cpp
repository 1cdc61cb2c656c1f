// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "katgnn/metrics.hpp"
#include "katgnn/network.hpp"
#include "katgnn/rng.hpp"
#include "katgnn/tape.hpp"
#include "katgnn/trainer.hpp"

using namespace katgnn;
using ad::Tape;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& msg) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += msg;
    }
  }
};

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

int hardware_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(8u, hw == 0 ? 1u : hw));
}

Matrix random_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (auto& v : m.values()) v = rng.uniform(-scale, scale);
  return m;
}

Tape::Ref weighted_sum(Tape& t, Tape::Ref x) {
  const Matrix& v = t.value(x);
  Matrix right(v.cols(), 1);
  for (int i = 0; i < v.cols(); ++i) right.at(i, 0) = 0.3 + 0.1 * i;
  Matrix left(1, v.rows());
  for (int i = 0; i < v.rows(); ++i) left.at(0, i) = 0.7 - 0.05 * i;
  return t.matmul(t.leaf(left), t.matmul(x, t.leaf(right)));
}

// ---------------------------------------------------------------- criterion 1
Check autodiff_correctness() {
  Check check;
  Rng rng(101);
  const double smooth = 1e-6;
  const double kinked = 1e-4;

  using Fn = std::function<Tape::Ref(Tape&, Tape::Ref)>;
  const auto op_cases = [&](const Matrix& other, const Matrix& right) {
    return std::vector<std::pair<std::pair<const char*, double>, Fn>>{
        {{"matmul", smooth}, [&](Tape& t, Tape::Ref x) {
           return weighted_sum(t, t.matmul(x, t.leaf(right)));
         }},
        {{"add", smooth}, [&](Tape& t, Tape::Ref x) {
           return weighted_sum(t, t.add(x, t.leaf(other)));
         }},
        {{"mul", smooth}, [&](Tape& t, Tape::Ref x) {
           return weighted_sum(t, t.mul(x, t.leaf(other)));
         }},
        {{"scale", smooth}, [&](Tape& t, Tape::Ref x) {
           return weighted_sum(t, t.affine(x, -2.1, 0.3));
         }},
        {{"concat", smooth}, [&](Tape& t, Tape::Ref x) {
           return weighted_sum(t, t.concat_cols(x, t.leaf(other)));
         }},
        {{"concat_rows", smooth}, [&](Tape& t, Tape::Ref x) {
           return weighted_sum(t, t.concat_rows(x, t.leaf(other)));
         }},
        {{"mean_rows", smooth}, [&](Tape& t, Tape::Ref x) {
           return weighted_sum(t, t.mean_rows(x));
         }},
        {{"transpose", smooth}, [&](Tape& t, Tape::Ref x) {
           return weighted_sum(t, t.transpose(x));
         }},
        {{"tanh", smooth}, [&](Tape& t, Tape::Ref x) {
           return weighted_sum(t, t.tanh(x));
         }},
        {{"sigmoid", smooth}, [&](Tape& t, Tape::Ref x) {
           return weighted_sum(t, t.sigmoid(x));
         }},
        {{"softmax", smooth}, [&](Tape& t, Tape::Ref x) {
           return weighted_sum(t, t.softmax(x));
         }},
        {{"relu", kinked}, [&](Tape& t, Tape::Ref x) {
           return weighted_sum(t, t.relu(x));
         }},
        {{"dropout", kinked}, [&](Tape& t, Tape::Ref x) {
           return weighted_sum(t, t.dropout(x, 0.35, 7, true));
         }},
        {{"gather_rows", smooth}, [&](Tape& t, Tape::Ref x) {
           std::vector<int> rows;
           for (int r = 0; r <= t.value(x).rows(); ++r)
             rows.push_back(r % t.value(x).rows());
           return weighted_sum(t, t.gather_rows(x, rows));
         }},
    };
  };

  for (int point = 0; point < 20; ++point) {
    const int n = static_cast<int>(rng.uniform_int(1, 4));
    const int m = static_cast<int>(rng.uniform_int(1, 4));
    const Matrix x = random_matrix(rng, n, m);
    const Matrix other = random_matrix(rng, n, m);
    const Matrix right = random_matrix(rng, m, 3);
    for (const auto& [meta, fn] : op_cases(other, right)) {
      const double err = ad::grad_check(fn, x);
      if (err >= meta.second)
        check.expect(false, std::string(meta.first) + " rel err " +
                                std::to_string(err) + " at point " +
                                std::to_string(point));
    }
    const Matrix z = random_matrix(rng, 1, 1, 2.0);
    const double label = rng.bernoulli(0.5) ? 1.0 : 0.0;
    const double bce_err = ad::grad_check(
        [&](Tape& t, Tape::Ref v) { return t.bce_loss(t.sigmoid(v), label); }, z);
    check.expect(bce_err < smooth, "bce rel err " + std::to_string(bce_err));
  }

  // End-to-end loss through the real forward path on a 3-patient toy batch.
  Vocabulary vocab;
  vocab.diagnosis_codes = {"A", "B", "C"};
  for (int i = 0; i < 3; ++i) vocab.diagnosis_index[vocab.diagnosis_codes[i]] = i;
  const DemoStats stats{55.0, 8.0};
  std::vector<PatientTensors> tensors;
  std::vector<double> labels{1.0, 0.0, 1.0};
  for (int v = 1; v <= 3; ++v) {
    PatientRecord rec;
    rec.patient_id = "P" + std::to_string(v);
    rec.demographics.age = 50 + v;
    rec.demographics.sex = v % 2 ? Sex::female : Sex::male;
    const std::vector<std::vector<std::string>> fills{{"A"}, {"A", "B"}, {"C"}};
    for (int i = 0; i < v; ++i)
      rec.visits.push_back({"V" + std::to_string(i), i * 90, fills[i % 3], {}});
    rec.index_date = (v - 1) * 90 + 30;
    tensors.push_back(prepare_tensors(build_diagnosis_graph(rec, vocab, stats)));
  }
  NetworkParams net = NetworkParams::init({{"diag", 3 + kDemoDim}}, 4, 6, 17);
  const auto total_loss = [&](const NetworkParams& p) {
    double total = 0.0;
    for (size_t i = 0; i < tensors.size(); ++i) {
      Tape t;
      ModelOnTape model(t, p);
      const auto z = model.modality_forward(tensors[i], "diag", false, 0.0, 0, true);
      total += t.value(t.bce_loss(model.fuse_and_predict({z}), labels[i])).at(0, 0);
    }
    return total / 3.0;
  };
  std::vector<Matrix> grads(net.params.size());
  for (size_t i = 0; i < tensors.size(); ++i) {
    Tape t;
    ModelOnTape model(t, net);
    const auto z = model.modality_forward(tensors[i], "diag", false, 0.0, 0, true);
    const auto loss = t.bce_loss(model.fuse_and_predict({z}), labels[i]);
    t.backward(loss);
    model.accumulate_grads(grads, 1.0 / 3.0);
  }
  const double eps = 1e-5;
  for (size_t p = 0; p < net.params.size(); ++p) {
    for (size_t i = 0; i < net.params[p].value.size(); ++i) {
      NetworkParams plus = net, minus = net;
      plus.params[p].value[i] += eps;
      minus.params[p].value[i] -= eps;
      const double g_fd = (total_loss(plus) - total_loss(minus)) / (2.0 * eps);
      const double g_ad = grads[p].empty() ? 0.0 : grads[p][i];
      const double rel =
          std::abs(g_ad - g_fd) / std::max(1e-8, std::abs(g_ad) + std::abs(g_fd));
      if (rel >= 1e-4)
        check.expect(false, net.params[p].name + "[" + std::to_string(i) +
                                "] end-to-end rel err " + std::to_string(rel));
    }
  }
  return check;
}

// ---------------------------------------------------------------- criterion 2
struct DagOracle {
  std::map<int, std::set<int>> parents;

  std::map<int, int> up_hops(int node) const {
    std::map<int, int> dist{{node, 0}};
    std::deque<int> queue{node};
    while (!queue.empty()) {
      const int cur = queue.front();
      queue.pop_front();
      auto it = parents.find(cur);
      if (it == parents.end()) continue;
      for (int p : it->second)
        if (!dist.count(p)) {
          dist[p] = dist.at(cur) + 1;
          queue.push_back(p);
        }
    }
    return dist;
  }

  int longest_depth(int node) const {
    int best = 0;
    auto it = parents.find(node);
    if (it == parents.end()) return 0;
    for (int p : it->second) best = std::max(best, longest_depth(p) + 1);
    return best;
  }

  int lcs_depth(int a, int b) const {
    const auto da = up_hops(a);
    const auto db = up_hops(b);
    int best = 0;
    for (const auto& [c, hops] : da) {
      (void)hops;
      if (db.count(c)) best = std::max(best, longest_depth(c));
    }
    return best;
  }

  int lcs_path(int a, int b) const {
    const auto da = up_hops(a);
    const auto db = up_hops(b);
    int best = -1;
    for (const auto& [c, ha] : da) {
      auto it = db.find(c);
      if (it == db.end()) continue;
      if (best < 0 || ha + it->second < best) best = ha + it->second;
    }
    return best;
  }
};

Check lcs_oracle_equivalence() {
  Check check;
  Rng rng(202);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(2, 200));
    std::vector<std::pair<std::string, std::string>> edges;
    DagOracle oracle;
    for (int i = 1; i < n; ++i) {
      const int n_parents = static_cast<int>(rng.uniform_int(1, std::min(3, i)));
      std::set<int> chosen;
      while (static_cast<int>(chosen.size()) < n_parents)
        chosen.insert(static_cast<int>(rng.uniform_int(0, i - 1)));
      for (int p : chosen) {
        edges.emplace_back("C" + std::to_string(i), "C" + std::to_string(p));
        oracle.parents[i].insert(p);
      }
    }
    const Ontology onto = Ontology::build(edges);
    for (int q = 0; q < 100; ++q) {
      const int a = static_cast<int>(rng.uniform_int(0, n - 1));
      const int b = static_cast<int>(rng.uniform_int(0, n - 1));
      const std::string sa = "C" + std::to_string(a);
      const std::string sb = "C" + std::to_string(b);
      if (onto.lcs_depth(sa, sb) != oracle.lcs_depth(a, b))
        check.expect(false, "lcs_depth mismatch trial " + std::to_string(trial));
      if (onto.lcs_path(sa, sb) != oracle.lcs_path(a, b))
        check.expect(false, "lcs_path mismatch trial " + std::to_string(trial));
      if (!check.ok) return check;
    }
  }
  return check;
}

// ---------------------------------------------------------------- criterion 3
Check lift_oracle_equivalence() {
  Check check;
  Rng rng(303);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n_visits = static_cast<size_t>(rng.uniform_int(1, 1000));
    const int n_items = static_cast<int>(rng.uniform_int(2, 50));
    TransactionSet tx;
    std::vector<std::vector<int>> raw;
    for (size_t v = 0; v < n_visits; ++v) {
      std::set<int> visit;
      const int k = static_cast<int>(rng.uniform_int(0, 8));
      for (int i = 0; i < k; ++i)
        visit.insert(static_cast<int>(rng.uniform_int(0, n_items - 1)));
      raw.emplace_back(visit.begin(), visit.end());
      std::set<std::string> named;
      for (int item : visit) named.insert("I" + std::to_string(item));
      tx.transactions.push_back(std::move(named));
    }
    const LiftTable table = mine(tx, 1);

    // Exhaustive O(items^2 * visits) integer counting.
    std::vector<int64_t> single(static_cast<size_t>(n_items), 0);
    for (const auto& visit : raw)
      for (int item : visit) ++single[static_cast<size_t>(item)];
    for (int a = 0; a < n_items; ++a) {
      for (int b = a + 1; b < n_items; ++b) {
        int64_t joint = 0;
        for (const auto& visit : raw)
          joint += std::binary_search(visit.begin(), visit.end(), a) &&
                   std::binary_search(visit.begin(), visit.end(), b);
        const std::string sa = "I" + std::to_string(a);
        const std::string sb = "I" + std::to_string(b);
        const auto key = sa < sb ? std::make_pair(sa, sb) : std::make_pair(sb, sa);
        const auto it = table.pairs.find(key);
        const int64_t mined = it == table.pairs.end() ? 0 : it->second.count_ab;
        if (mined != joint) {
          check.expect(false, "joint count mismatch for " + sa + "," + sb);
          return check;
        }
        if (single[static_cast<size_t>(a)] > 0 &&
            table.item_counts.count(sa) &&
            table.item_counts.at(sa) != single[static_cast<size_t>(a)]) {
          check.expect(false, "single count mismatch for " + sa);
          return check;
        }
      }
    }
  }
  return check;
}

// ---------------------------------------------------------------- criterion 4
Check metrics_oracle_equivalence() {
  Check check;
  Rng rng(404);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<size_t>(rng.uniform_int(2, 500));
    const int grid = static_cast<int>(rng.uniform_int(2, 25));
    ScoredLabels data;
    for (size_t i = 0; i < n; ++i) {
      data.scores.push_back(static_cast<double>(rng.uniform_int(0, grid - 1)) / grid);
      data.labels.push_back(rng.bernoulli(0.3) ? 1 : 0);
    }
    data.labels[0] = 1;
    if (n > 1) data.labels[1] = 0;

    double wins = 0, ties = 0;
    size_t pairs = 0;
    for (size_t i = 0; i < n; ++i) {
      if (data.labels[i] == 0) continue;
      for (size_t j = 0; j < n; ++j) {
        if (data.labels[j] != 0) continue;
        ++pairs;
        wins += data.scores[i] > data.scores[j];
        ties += data.scores[i] == data.scores[j];
      }
    }
    const double roc_oracle = (wins + 0.5 * ties) / static_cast<double>(pairs);
    if (std::abs(auroc(data) - roc_oracle) > 1e-9)
      check.expect(false, "auroc mismatch trial " + std::to_string(trial));

    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return data.scores[a] > data.scores[b];
    });
    size_t total_pos = 0;
    for (int y : data.labels) total_pos += (y != 0);
    double ap = 0.0;
    size_t tp = 0, seen = 0, i = 0;
    while (i < n) {
      size_t j = i, tp_group = 0;
      while (j < n && data.scores[order[j]] == data.scores[order[i]]) {
        tp_group += (data.labels[order[j]] != 0);
        ++j;
      }
      tp += tp_group;
      seen += j - i;
      if (tp_group > 0)
        ap += (static_cast<double>(tp) / static_cast<double>(seen)) *
              (static_cast<double>(tp_group) / static_cast<double>(total_pos));
      i = j;
    }
    if (std::abs(auprc(data) - ap) > 1e-9)
      check.expect(false, "auprc mismatch trial " + std::to_string(trial));
    if (!check.ok) return check;
  }
  return check;
}

// ---------------------------------------------------------------- criterion 5
Check normalization_invariants() {
  Check check;
  Rng rng(505);

  // Symmetry and dense closed form on random graphs with n <= 20 nodes.
  for (int trial = 0; trial < 40; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 20));
    PatientGraph g;
    g.modality = GraphModality::diagnosis;
    g.entity_dim = n;
    for (int i = 0; i < n; ++i) {
      GraphNode node;
      node.type = NodeType::entity;
      node.vocab_index = i;
      g.nodes.push_back(node);
    }
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (rng.bernoulli(0.25)) g.edges.push_back({u, v, EdgeKind::bipartite});
    std::sort(g.edges.begin(), g.edges.end());

    const Matrix a = normalize_adjacency(g);
    Matrix raw(n, n);
    for (int i = 0; i < n; ++i) raw.at(i, i) = 1.0;
    for (const auto& e : g.edges) {
      raw.at(e.u, e.v) = 1.0;
      raw.at(e.v, e.u) = 1.0;
    }
    std::vector<double> deg(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) deg[static_cast<size_t>(i)] += raw.at(i, j);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (std::abs(a.at(i, j) - a.at(j, i)) > 1e-15)
          check.expect(false, "asymmetry at trial " + std::to_string(trial));
        const double expect = raw.at(i, j) / std::sqrt(deg[static_cast<size_t>(i)]) /
                              std::sqrt(deg[static_cast<size_t>(j)]);
        if (std::abs(a.at(i, j) - expect) > 1e-14)
          check.expect(false, "closed-form mismatch at trial " + std::to_string(trial));
      }
    if (!check.ok) return check;
  }

  // Attention and fusion weights on every forward pass of a 100-patient run.
  SynthConfig synth;
  synth.n_patients = 100;
  synth.signal = SignalMode::parse("diagnosis_cluster+lab_extreme");
  synth.seed = 55;
  const SynthCohort cohort = generate_synthetic(synth);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.hidden_dim = 8;
  cfg.time_dim = 8;
  cfg.bins = 4;
  cfg.threads = 1;
  const PreparedCohort prep =
      prepare_cohort(cohort.records, cohort.ontology, cohort.mapping, cfg, 1);
  NetworkParams trained;
  train_one(prep, cfg, 1, &trained);

  std::vector<PatientTensors> diag_tensors, meas_tensors;
  for (const auto& g : prep.diag_graphs) diag_tensors.push_back(prepare_tensors(g));
  for (const auto& g : prep.meas_graphs) meas_tensors.push_back(prepare_tensors(g));
  for (size_t i = 0; i < prep.records.size(); ++i) {
    Tape t;
    ModelOnTape model(t, trained);
    AttentionDiagnostics diag_d, diag_m, fusion;
    const auto zd = model.modality_forward(diag_tensors[i], "diag", false, 0, 0, true, &diag_d);
    const auto zm = model.modality_forward(meas_tensors[i], "meas", false, 0, 0, true, &diag_m);
    model.fuse_and_predict({zd, zm}, &fusion);
    for (const auto* weights : {&diag_d.alpha, &diag_d.beta, &diag_m.alpha,
                                &diag_m.beta, &fusion.fusion_alpha}) {
      double sum = 0.0;
      for (double w : *weights) {
        sum += w;
        if (w < 0.0) check.expect(false, "negative attention weight");
      }
      if (std::abs(sum - 1.0) > 1e-9)
        check.expect(false, "attention sum " + std::to_string(sum));
    }
    if (!check.ok) return check;
  }
  return check;
}

// ---------------------------------------------------------------- criterion 6
Check equation_spot_values() {
  Check check;
  Vocabulary vocab;
  vocab.diagnosis_codes = {"A", "B"};
  vocab.diagnosis_index = {{"A", 0}, {"B", 1}};
  vocab.measurement_items = {"alb", "crea"};
  vocab.measurement_index = {{"alb", 0}, {"crea", 1}};
  const DemoStats stats{60.0, 5.0};
  const NetworkParams net = NetworkParams::init({{"diag", 2 + kDemoDim}}, 6, 8, 3);
  const ModalityParamIds& ids = net.modality_ids.at("diag");

  // tau = 0 -> t_raw is the all-ones vector, exactly.
  {
    Tape t;
    const auto t_raw = t.affine(
        t.tanh(t.matmul(t.leaf(Matrix(1, 1)), t.leaf(net.params[ids.w1].value))), -1, 1);
    for (double v : t.value(t_raw).values())
      check.expect(std::abs(v - 1.0) <= 1e-12, "t_raw entry != 1 at tau=0");
  }

  // Single-modality fusion is the identity regardless of the logit value.
  {
    NetworkParams mutated = net;
    mutated.params[mutated.fusion_logits].value.at(0, 0) = 3.7;
    Tape ta, tb;
    ModelOnTape ma(ta, net), mb(tb, mutated);
    const Matrix z = Matrix::row({0.3, -1.0, 2.0, 0.1, 0.0, -0.4});
    const double pa = ta.value(ma.fuse_and_predict({ta.leaf(z)})).at(0, 0);
    const double pb = tb.value(mb.fuse_and_predict({tb.leaf(z)})).at(0, 0);
    check.expect(std::abs(pa - pb) <= 1e-12, "single-modality fusion not identity");
  }

  // Single-visit patient: z_time = x_1 + t_proj_1 exactly (within 1e-12).
  {
    PatientRecord rec;
    rec.patient_id = "P";
    rec.demographics.age = 61;
    rec.demographics.sex = Sex::female;
    rec.visits = {{"V0", 0, {"A", "B"}, {}}};
    rec.index_date = 200;
    const PatientTensors tensors =
        prepare_tensors(build_diagnosis_graph(rec, vocab, stats));
    Tape t;
    ModelOnTape model(t, net);
    const auto z_time = model.modality_forward(tensors, "diag", false, 0, 0, true);

    Tape ref;
    const auto h1 = ref.relu(ref.matmul(
        ref.matmul(ref.leaf(tensors.adj_norm), ref.leaf(tensors.features)),
        ref.leaf(net.params[ids.gcn0].value)));
    const auto h2 = ref.matmul(ref.matmul(ref.leaf(tensors.adj_norm), h1),
                               ref.leaf(net.params[ids.gcn1].value));
    const auto x1 = ref.gather_rows(h2, tensors.visit_rows);
    Matrix tau_sq(1, 1);
    tau_sq.at(0, 0) = tensors.tau_years[0] * tensors.tau_years[0];
    const auto t_proj = ref.matmul(
        ref.affine(ref.tanh(ref.matmul(ref.leaf(tau_sq),
                                       ref.leaf(net.params[ids.w1].value))), -1, 1),
        ref.leaf(net.params[ids.w2].value));
    const auto expected = ref.add(x1, t_proj);
    for (size_t i = 0; i < ref.value(expected).size(); ++i)
      check.expect(std::abs(t.value(z_time)[i] - ref.value(expected)[i]) <= 1e-12,
                   "z_time != x_1 + t_proj_1");
  }

  // B = 1 measurement graph is isomorphic to the presence/absence graph.
  {
    PatientRecord rec;
    rec.patient_id = "P";
    rec.demographics.age = 61;
    rec.demographics.sex = Sex::female;
    rec.visits = {{"V0", 0, {}, {{"alb", 0.4}, {"crea", 9.0}, {"crea", 1.0}}},
                  {"V1", 90, {}, {{"alb", 3.0}}}};
    rec.index_date = 120;
    const BinSpec spec = fit_bins({{"alb", {0.4, 3.0}}, {"crea", {1.0, 9.0}}}, 1);
    const PatientGraph g = build_measurement_graph(rec, vocab, spec, stats);

    // Presence graph: one entity per item observed, bipartite edges per visit.
    check.expect(g.num_nodes() == 4, "B=1 node count");  // alb, crea, v0, v1
    for (const auto& node : g.nodes)
      if (node.type == NodeType::entity)
        check.expect(node.bin == 0, "B=1 bin index nonzero");
    check.expect(g.has_edge(0, 2, EdgeKind::bipartite), "alb-v0 edge");
    check.expect(g.has_edge(1, 2, EdgeKind::bipartite), "crea-v0 edge");
    check.expect(g.has_edge(0, 3, EdgeKind::bipartite), "alb-v1 edge");
    check.expect(!g.has_edge(1, 3, EdgeKind::bipartite), "crea-v1 edge absent");
    check.expect(g.has_edge(2, 3, EdgeKind::sequential), "sequential edge");
    // Same-visit repeats of one item collapse to a single node under B=1.
    size_t entities = 0;
    for (const auto& node : g.nodes) entities += node.type == NodeType::entity;
    check.expect(entities == 2, "B=1 entity dedupe");
  }
  return check;
}

// ---------------------------------------------------------------- criterion 7
Check end_to_end_learnability() {
  Check check;
  SynthConfig synth;
  synth.n_patients = 2000;
  synth.signal = SignalMode::parse("diagnosis_cluster+lab_extreme");
  synth.seed = 4242;
  const SynthCohort cohort = generate_synthetic(synth);

  TrainConfig cfg;
  cfg.bins = 10;
  cfg.diag_percent = 3;
  cfg.meas_percent = 5;
  cfg.cooccur = true;
  cfg.time_aware = true;
  cfg.epochs = 30;
  cfg.hidden_dim = 32;
  cfg.time_dim = 64;
  cfg.threads = hardware_threads();

  std::vector<double> model_auroc, baseline_auroc;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const PreparedCohort prep =
        prepare_cohort(cohort.records, cohort.ontology, cohort.mapping, cfg, seed);
    model_auroc.push_back(train_one(prep, cfg, seed).test_auroc);
    baseline_auroc.push_back(baseline_logistic(prep, cfg, seed).test_auroc);
  }
  const double model_med = median(model_auroc);
  const double base_med = median(baseline_auroc);
  check.detail = "model median AUROC " + std::to_string(model_med) +
                 ", baseline " + std::to_string(base_med);
  check.expect(model_med >= 0.85, "model median below 0.85");
  check.expect(model_med - base_med >= 0.03, "margin over baseline below 0.03");
  return check;
}

// ---------------------------------------------------------------- criterion 8
Check directional_ablations() {
  Check check;
  SynthConfig synth;
  synth.n_patients = 800;
  synth.signal = SignalMode::parse("ontology_informative");
  synth.seed = 777;
  synth.signal_strength = 0.85;
  synth.decoy_rate = 0.5;
  const SynthCohort cohort = generate_synthetic(synth);

  TrainConfig cfg;
  cfg.modality = ModalityChoice::diagnosis;
  cfg.diag_percent = 3;
  cfg.cooccur = false;
  cfg.epochs = 22;
  cfg.batch = 64;
  cfg.hidden_dim = 16;
  cfg.time_dim = 32;
  cfg.threads = hardware_threads();

  std::vector<uint64_t> seeds{1, 2, 3, 4, 5, 6, 7};
  const auto medians_by_setting =
      [&](AblationAxis axis, const std::vector<double>& values, const TrainConfig& base) {
        std::map<std::string, std::vector<double>> per_setting;
        for (const auto& row : ablate(cohort.records, cohort.ontology, cohort.mapping,
                                      base, axis, values, seeds))
          per_setting[row.setting].push_back(row.auroc);
        std::map<std::string, double> out;
        for (auto& [name, xs] : per_setting) out[name] = median(xs);
        return out;
      };

  // (a) ontology edges at 3% vs the 0% arm.
  const auto arms_a = medians_by_setting(AblationAxis::diag_percent, {0, 3}, cfg);
  const double at0 = arms_a.at("diag_percent=0");
  const double at3 = arms_a.at("diag_percent=3");
  check.detail = "0%=" + std::to_string(at0) + " 3%=" + std::to_string(at3);
  check.expect(at3 >= at0, "(a) ontology edges at 3% below the 0% arm");

  // (b) ontology edges vs random edges of equal count.
  const auto arms_b = medians_by_setting(AblationAxis::random_vs_ontology, {}, cfg);
  const double onto_med = arms_b.at("edges=ontology");
  const double rand_med = arms_b.at("edges=random");
  check.detail += " | ontology=" + std::to_string(onto_med) +
                  " random=" + std::to_string(rand_med);
  check.expect(onto_med >= rand_med, "(b) ontology edges below random edges");

  // (c) time-aware attention vs mean pooling, with co-occurrence on.
  TrainConfig cfg_c = cfg;
  cfg_c.cooccur = true;
  const auto arms_c = medians_by_setting(AblationAxis::time_aware_on_off, {}, cfg_c);
  const double on_med = arms_c.at("time_aware=on");
  const double off_med = arms_c.at("time_aware=off");
  check.detail += " | time_aware on=" + std::to_string(on_med) +
                  " off=" + std::to_string(off_med);
  check.expect(on_med >= off_med, "(c) time-aware below mean pooling");
  return check;
}

// ---------------------------------------------------------------- criterion 9
Check determinism_and_leakage() {
  Check check;
  SynthConfig synth;
  synth.n_patients = 200;
  synth.signal = SignalMode::parse("diagnosis_cluster+lab_extreme");
  synth.seed = 99;
  const SynthCohort cohort = generate_synthetic(synth);

  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.hidden_dim = 8;
  cfg.time_dim = 8;
  cfg.bins = 4;
  cfg.threads = 1;

  // Bit-identical repetition with --threads 1.
  const PreparedCohort prep =
      prepare_cohort(cohort.records, cohort.ontology, cohort.mapping, cfg, 7);
  NetworkParams params_a, params_b;
  const RunResult a = train_one(prep, cfg, 7, &params_a);
  const RunResult b = train_one(prep, cfg, 7, &params_b);
  check.expect(a.test_auroc == b.test_auroc && a.test_auprc == b.test_auprc &&
                   a.selected_epoch == b.selected_epoch,
               "repeated run differs");
  check.expect(ad::params_to_text(params_a.params) == ad::params_to_text(params_b.params),
               "trained parameters differ bitwise");

  // Mutating test labels must change neither mined edges, bins, nor selection.
  std::vector<std::string> ids;
  std::vector<int> labels;
  for (const auto& r : cohort.records) {
    ids.push_back(r.patient_id);
    labels.push_back(r.label);
  }
  const CohortSplit split = split_cohort(ids, labels, 7);
  const PreparedCohort base = prepare_cohort_with_split(
      cohort.records, cohort.ontology, cohort.mapping, cfg, split, 7);
  std::vector<PatientRecord> mutated = cohort.records;
  const std::set<std::string> test_ids(split.test_ids.begin(), split.test_ids.end());
  for (auto& rec : mutated)
    if (test_ids.count(rec.patient_id)) rec.label = 1 - rec.label;
  const PreparedCohort corrupted = prepare_cohort_with_split(
      mutated, cohort.ontology, cohort.mapping, cfg, split, 7);

  check.expect(base.bins.boundaries == corrupted.bins.boundaries,
               "bin boundaries changed");
  check.expect(base.diag_cooc_pairs == corrupted.diag_cooc_pairs &&
                   base.meas_cooc_pairs == corrupted.meas_cooc_pairs,
               "mined edges changed");
  const RunResult run_base = train_one(base, cfg, 7);
  const RunResult run_corrupt = train_one(corrupted, cfg, 7);
  check.expect(run_base.selected_epoch == run_corrupt.selected_epoch,
               "selected epoch changed");
  return check;
}

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // 0 = unbounded
  std::function<Check()> fn;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "autodiff gradient checks", 30.0, autodiff_correctness},
      {2, "LCS oracle equivalence", 10.0, lcs_oracle_equivalence},
      {3, "lift oracle equivalence", 10.0, lift_oracle_equivalence},
      {4, "metrics oracle equivalence", 5.0, metrics_oracle_equivalence},
      {5, "normalization invariants", 0.0, normalization_invariants},
      {6, "equation spot values", 0.0, equation_spot_values},
      {7, "end-to-end learnability", 600.0, end_to_end_learnability},
      {8, "directional ablations", 0.0, directional_ablations},
      {9, "determinism and leakage guards", 0.0, determinism_and_leakage},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Check check;
    try {
      check = criterion.fn();
    } catch (const std::exception& e) {
      check.ok = false;
      check.detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criterion.time_limit_s > 0 && elapsed > criterion.time_limit_s) {
      check.ok = false;
      check.detail += (check.detail.empty() ? "" : "; ") + std::string("over time limit ") +
                      std::to_string(criterion.time_limit_s) + "s";
    }
    std::printf("%s criterion %d: %s (%.1fs)%s%s\n", check.ok ? "PASS" : "FAIL",
                criterion.id, criterion.name.c_str(), elapsed,
                check.detail.empty() ? "" : " -- ", check.detail.c_str());
    std::fflush(stdout);
    failures += !check.ok;
  }
  return failures;
}
