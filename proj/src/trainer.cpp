#include "katgnn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "katgnn/csv.hpp"
#include "katgnn/metrics.hpp"
#include "katgnn/parallel.hpp"
#include "katgnn/rng.hpp"

namespace katgnn {

namespace {

std::vector<size_t> indices_of(const std::vector<PatientRecord>& records,
                               const std::vector<std::string>& ids) {
  std::map<std::string, size_t> pos;
  for (size_t i = 0; i < records.size(); ++i) pos[records[i].patient_id] = i;
  std::vector<size_t> out;
  for (const auto& id : ids) {
    auto it = pos.find(id);
    if (it == pos.end()) throw std::runtime_error("split references unknown patient " + id);
    out.push_back(it->second);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Vocabulary filtered_vocabulary(const std::vector<PatientRecord>& records,
                               const TrainConfig& cfg) {
  Vocabulary vocab = build_vocabulary(records);
  if (!cfg.lab_filter || vocab.n_meas() == 0) return vocab;

  std::map<std::string, size_t> patients_with_item;
  for (const auto& rec : records) {
    std::set<std::string> items;
    for (const auto& visit : rec.visits)
      for (const auto& m : visit.measurements) items.insert(m.item_id);
    for (const auto& item : items) ++patients_with_item[item];
  }
  const double n = static_cast<double>(records.size());
  std::vector<std::string> kept;
  for (const auto& item : vocab.measurement_items) {
    const auto it = patients_with_item.find(item);
    const double prevalence = it == patients_with_item.end()
                                  ? 0.0
                                  : static_cast<double>(it->second) / n;
    if (prevalence >= cfg.lab_filter_threshold) kept.push_back(item);
  }
  vocab.measurement_items = std::move(kept);
  vocab.measurement_index.clear();
  for (int i = 0; i < vocab.n_meas(); ++i)
    vocab.measurement_index[vocab.measurement_items[static_cast<size_t>(i)]] = i;
  return vocab;
}

// Uniformly random distinct same-modality pairs of equal count, seeded.
std::vector<std::pair<std::string, std::string>> random_pairs(
    const std::vector<std::string>& entities, size_t count, uint64_t seed) {
  const size_t n = entities.size();
  const size_t total = n < 2 ? 0 : n * (n - 1) / 2;
  count = std::min(count, total);
  std::set<std::pair<size_t, size_t>> chosen;
  Rng rng(mix_seed(seed, 0xed6e5u));
  while (chosen.size() < count) {
    const auto a = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(n) - 1));
    const auto b = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(n) - 1));
    if (a == b) continue;
    chosen.insert({std::min(a, b), std::max(a, b)});
  }
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [a, b] : chosen) out.emplace_back(entities[a], entities[b]);
  return out;
}

}  // namespace

PreparedCohort prepare_cohort(const std::vector<PatientRecord>& records,
                              const Ontology& onto, const ConceptMapping& mapping,
                              const TrainConfig& cfg, uint64_t seed) {
  std::vector<std::string> ids;
  std::vector<int> labels;
  for (const auto& r : records) {
    ids.push_back(r.patient_id);
    labels.push_back(r.label);
  }
  return prepare_cohort_with_split(records, onto, mapping, cfg,
                                   split_cohort(ids, labels, seed), seed);
}

PreparedCohort prepare_cohort_with_split(const std::vector<PatientRecord>& records,
                                         const Ontology& onto,
                                         const ConceptMapping& mapping,
                                         const TrainConfig& cfg, CohortSplit split,
                                         uint64_t seed) {
  cfg.validate();
  if (records.empty()) throw std::runtime_error("empty cohort");

  PreparedCohort prep;
  prep.records = records;
  prep.use_diag = cfg.modality != ModalityChoice::measurement;
  prep.use_meas = cfg.modality != ModalityChoice::diagnosis;
  prep.vocab = filtered_vocabulary(prep.records, cfg);
  prep.split = std::move(split);
  prep.train_idx = indices_of(prep.records, prep.split.train_ids);
  prep.val_idx = indices_of(prep.records, prep.split.val_ids);
  prep.test_idx = indices_of(prep.records, prep.split.test_ids);
  prep.demo_stats = compute_demo_stats(prep.records, prep.split.train_ids);

  // Training-split statistics only: bin boundaries and co-occurrence counts.
  if (prep.use_meas) {
    std::map<std::string, std::vector<double>> train_values;
    for (size_t idx : prep.train_idx)
      for (const auto& visit : prep.records[idx].visits)
        for (const auto& m : visit.measurements)
          if (prep.vocab.measurement_index.count(m.item_id))
            train_values[m.item_id].push_back(m.value);
    prep.bins = fit_bins(train_values, cfg.bins);
  } else {
    prep.bins.max_bins = cfg.bins;
  }

  if (prep.use_diag && cfg.diag_percent > 0.0) {
    prep.diag_plan = plan_augmentation(prep.vocab.diagnosis_codes, onto, mapping,
                                       GraphModality::diagnosis, cfg.diag_percent,
                                       cfg.metric_mode,
                                       static_cast<size_t>(cfg.pair_cap));
    prep.diag_onto_pairs = prep.diag_plan.selected_pairs();
  }
  if (prep.use_meas && cfg.meas_percent > 0.0) {
    prep.meas_plan = plan_augmentation(prep.vocab.measurement_items, onto, mapping,
                                       GraphModality::measurement, cfg.meas_percent,
                                       cfg.metric_mode,
                                       static_cast<size_t>(cfg.pair_cap));
    prep.meas_onto_pairs = prep.meas_plan.selected_pairs();
  }
  if (cfg.random_edges) {
    prep.diag_onto_pairs = random_pairs(prep.vocab.diagnosis_codes,
                                        prep.diag_onto_pairs.size(),
                                        mix_seed(seed, 0x7a2du, 1));
    prep.meas_onto_pairs = random_pairs(prep.vocab.measurement_items,
                                        prep.meas_onto_pairs.size(),
                                        mix_seed(seed, 0x7a2du, 2));
  }

  if (cfg.cooccur) {
    if (prep.use_diag) {
      TransactionSet tx;
      for (size_t idx : prep.train_idx)
        for (const auto& visit : prep.records[idx].visits)
          tx.transactions.emplace_back(visit.diagnoses.begin(), visit.diagnoses.end());
      prep.diag_lift = mine(tx, cfg.min_pair_count);
      prep.diag_cooc_pairs = cooccurrence_edges(prep.diag_lift);
    }
    if (prep.use_meas) {
      TransactionSet tx;
      for (size_t idx : prep.train_idx)
        for (const auto& visit : prep.records[idx].visits) {
          std::set<std::string> items;
          for (const auto& m : visit.measurements)
            if (prep.vocab.measurement_index.count(m.item_id)) items.insert(m.item_id);
          tx.transactions.push_back(std::move(items));
        }
      prep.meas_lift = mine(tx, cfg.min_pair_count);
      prep.meas_cooc_pairs = cooccurrence_edges(prep.meas_lift);
    }
  }

  if (prep.use_diag) {
    prep.diag_graphs.reserve(prep.records.size());
    for (const auto& rec : prep.records) {
      PatientGraph graph = build_diagnosis_graph(rec, prep.vocab, prep.demo_stats);
      add_entity_pair_edges(graph, prep.vocab, prep.diag_onto_pairs, EdgeKind::ontology);
      apply_cooccurrence(graph, prep.vocab, prep.diag_cooc_pairs);
      prep.diag_graphs.push_back(std::move(graph));
    }
  }
  if (prep.use_meas) {
    prep.meas_graphs.reserve(prep.records.size());
    for (const auto& rec : prep.records) {
      PatientGraph graph = build_measurement_graph(rec, prep.vocab, prep.bins,
                                                   prep.demo_stats);
      add_entity_pair_edges(graph, prep.vocab, prep.meas_onto_pairs, EdgeKind::ontology);
      apply_cooccurrence(graph, prep.vocab, prep.meas_cooc_pairs);
      prep.meas_graphs.push_back(std::move(graph));
    }
  }
  return prep;
}

namespace {

struct ModelData {
  std::vector<std::string> modality_names;
  std::vector<const std::vector<PatientTensors>*> tensors;  // aligned with names
};

// Probability for one patient; optionally backward + gradient accumulation.
double run_patient(const NetworkParams& net, const ModelData& data, size_t idx,
                   int label, bool train, const TrainConfig& cfg,
                   uint64_t dropout_seed, std::vector<Matrix>* grads,
                   double grad_scale,
                   std::vector<AttentionDiagnostics>* diag_out = nullptr) {
  ad::Tape tape;
  ModelOnTape model(tape, net);
  std::vector<ad::Tape::Ref> z_times;
  if (diag_out) diag_out->resize(data.modality_names.size());
  for (size_t m = 0; m < data.modality_names.size(); ++m) {
    AttentionDiagnostics* diag = diag_out ? &(*diag_out)[m] : nullptr;
    z_times.push_back(model.modality_forward(
        (*data.tensors[m])[idx], data.modality_names[m], train, cfg.dropout,
        mix_seed(dropout_seed, m), cfg.time_aware, diag));
  }
  AttentionDiagnostics* fusion_diag = diag_out ? &(*diag_out)[0] : nullptr;
  const auto prob = model.fuse_and_predict(z_times, fusion_diag);
  if (grads) {
    const auto loss = tape.bce_loss(prob, static_cast<double>(label));
    tape.backward(loss);
    model.accumulate_grads(*grads, grad_scale);
  }
  return tape.value(prob).at(0, 0);
}

ModelData model_data_for(const PreparedCohort& prepared,
                         const std::vector<PatientTensors>& diag_tensors,
                         const std::vector<PatientTensors>& meas_tensors) {
  ModelData data;
  if (prepared.use_diag) {
    data.modality_names.push_back("diag");
    data.tensors.push_back(&diag_tensors);
  }
  if (prepared.use_meas) {
    data.modality_names.push_back("meas");
    data.tensors.push_back(&meas_tensors);
  }
  return data;
}

ScoredLabels score_subset(const NetworkParams& net, const ModelData& data,
                          const PreparedCohort& prepared,
                          const std::vector<size_t>& subset, const TrainConfig& cfg) {
  ScoredLabels out;
  out.scores.resize(subset.size());
  out.labels.resize(subset.size());
  parallel_for(subset.size(), cfg.threads, [&](size_t i) {
    const size_t idx = subset[i];
    out.scores[i] = run_patient(net, data, idx, prepared.records[idx].label,
                                /*train=*/false, cfg, 0, nullptr, 0.0);
    out.labels[i] = prepared.records[idx].label;
  });
  return out;
}

std::vector<PatientTensors> tensors_for(const std::vector<PatientGraph>& graphs,
                                        int threads) {
  std::vector<PatientTensors> tensors(graphs.size());
  parallel_for(graphs.size(), threads, [&](size_t i) {
    tensors[i] = prepare_tensors(graphs[i]);
  });
  return tensors;
}

}  // namespace

RunResult train_one(const PreparedCohort& prepared, const TrainConfig& cfg,
                    uint64_t seed, NetworkParams* trained) {
  cfg.validate();
  const auto diag_tensors =
      prepared.use_diag ? tensors_for(prepared.diag_graphs, cfg.threads)
                        : std::vector<PatientTensors>{};
  const auto meas_tensors =
      prepared.use_meas ? tensors_for(prepared.meas_graphs, cfg.threads)
                        : std::vector<PatientTensors>{};
  const ModelData data = model_data_for(prepared, diag_tensors, meas_tensors);

  std::vector<std::pair<std::string, int>> modalities;
  for (const auto& name : data.modality_names) {
    const auto& graphs = name == "diag" ? prepared.diag_graphs : prepared.meas_graphs;
    modalities.emplace_back(name, graphs.front().feature_dim());
  }
  NetworkParams net = NetworkParams::init(modalities, cfg.hidden_dim, cfg.time_dim,
                                          mix_seed(seed, 0x1217u));

  ad::AdamConfig adam_cfg;
  adam_cfg.weight_decay = cfg.weight_decay;
  ad::AdamState adam(net.params, adam_cfg);

  std::vector<size_t> train_order = prepared.train_idx;
  const auto n_train = train_order.size();
  const int64_t batches_per_epoch =
      static_cast<int64_t>((n_train + cfg.batch - 1) / static_cast<size_t>(cfg.batch));
  const int64_t total_steps = batches_per_epoch * cfg.epochs;

  double best_val_auprc = -1.0;
  int best_epoch = 0;
  std::vector<ad::Parameter> best_params = net.params;

  int64_t step = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng shuffle_rng(mix_seed(seed, 0x5bafu, static_cast<uint64_t>(epoch)));
    shuffle_rng.shuffle(train_order);

    for (size_t start = 0; start < n_train; start += static_cast<size_t>(cfg.batch)) {
      const size_t batch_end = std::min(n_train, start + static_cast<size_t>(cfg.batch));
      const size_t batch_size = batch_end - start;
      const double grad_scale = 1.0 / static_cast<double>(batch_size);

      std::vector<Matrix> grads(net.params.size());
      double batch_loss = 0.0;
      // Sub-chunks bound the per-patient gradient buffers in flight; the
      // reduction below stays in batch order for any thread count.
      const size_t chunk = std::max<size_t>(1, static_cast<size_t>(cfg.threads)) * 4;
      for (size_t chunk_start = start; chunk_start < batch_end; chunk_start += chunk) {
        const size_t chunk_end = std::min(batch_end, chunk_start + chunk);
        std::vector<std::vector<Matrix>> patient_grads(chunk_end - chunk_start);
        std::vector<double> patient_loss(chunk_end - chunk_start, 0.0);
        parallel_for(chunk_end - chunk_start, cfg.threads, [&](size_t k) {
          const size_t idx = train_order[chunk_start + k];
          patient_grads[k].assign(net.params.size(), Matrix());
          const uint64_t dropout_seed =
              mix_seed(mix_seed(seed, 0xd407u, static_cast<uint64_t>(epoch)), idx);
          ad::Tape tape;
          ModelOnTape model(tape, net);
          std::vector<ad::Tape::Ref> z_times;
          for (size_t m = 0; m < data.modality_names.size(); ++m)
            z_times.push_back(model.modality_forward(
                (*data.tensors[m])[idx], data.modality_names[m], /*train=*/true,
                cfg.dropout, mix_seed(dropout_seed, m), cfg.time_aware));
          const auto prob = model.fuse_and_predict(z_times);
          const auto loss =
              tape.bce_loss(prob, static_cast<double>(prepared.records[idx].label));
          patient_loss[k] = tape.value(loss).at(0, 0);
          tape.backward(loss);
          model.accumulate_grads(patient_grads[k], 1.0);
        });
        for (size_t k = 0; k < patient_grads.size(); ++k) {
          batch_loss += patient_loss[k];
          for (size_t p = 0; p < grads.size(); ++p) {
            const Matrix& g = patient_grads[k][p];
            if (g.empty()) continue;
            Matrix& acc = grads[p];
            if (acc.empty()) acc = Matrix(g.rows(), g.cols());
            for (size_t i = 0; i < acc.size(); ++i) acc[i] += grad_scale * g[i];
          }
        }
      }
      batch_loss *= grad_scale;
      if (!std::isfinite(batch_loss))
        throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                 std::to_string(epoch) + ", seed " + std::to_string(seed));

      // Parameters untouched this batch (e.g. temporal weights under mean
      // pooling) step with a zero gradient.
      for (size_t p = 0; p < grads.size(); ++p)
        if (!grads[p].same_shape(net.params[p].value))
          grads[p] = Matrix(net.params[p].value.rows(), net.params[p].value.cols());

      const double lr = ad::one_cycle_lr(step, total_steps, cfg.lr);
      adam.step(net.params, grads, lr);
      ++step;
    }

    const ScoredLabels val = score_subset(net, data, prepared, prepared.val_idx, cfg);
    const double val_auprc = auprc(val);
    if (val_auprc > best_val_auprc) {
      best_val_auprc = val_auprc;
      best_epoch = epoch;
      best_params = net.params;
    }
  }

  net.params = best_params;
  const ScoredLabels test = score_subset(net, data, prepared, prepared.test_idx, cfg);

  RunResult result;
  result.seed = seed;
  result.selected_epoch = best_epoch;
  result.test_auroc = auroc(test);
  result.test_auprc = auprc(test);
  if (trained) *trained = std::move(net);
  return result;
}

EvalOutput evaluate_model(const PreparedCohort& prepared, const NetworkParams& params,
                          const TrainConfig& cfg, bool dump_attention) {
  const auto diag_tensors =
      prepared.use_diag ? tensors_for(prepared.diag_graphs, cfg.threads)
                        : std::vector<PatientTensors>{};
  const auto meas_tensors =
      prepared.use_meas ? tensors_for(prepared.meas_graphs, cfg.threads)
                        : std::vector<PatientTensors>{};
  const ModelData data = model_data_for(prepared, diag_tensors, meas_tensors);

  EvalOutput out;
  out.test_scores = score_subset(params, data, prepared, prepared.test_idx, cfg);
  out.auroc = auroc(out.test_scores);
  out.auprc = auprc(out.test_scores);

  if (dump_attention) {
    out.attention_csv = "patient_id,visit_ordinal,alpha,beta\n";
  }
  if (dump_attention && cfg.time_aware) {
    for (size_t idx : prepared.test_idx) {
      std::vector<AttentionDiagnostics> diags;
      run_patient(params, data, idx, prepared.records[idx].label, false, cfg, 0,
                  nullptr, 0.0, &diags);
      for (const auto& diag : diags)
        for (size_t v = 0; v < diag.alpha.size(); ++v)
          out.attention_csv += prepared.records[idx].patient_id + "," +
                               std::to_string(v) + "," + format_double(diag.alpha[v]) +
                               "," + format_double(diag.beta[v]) + "\n";
    }
  }
  return out;
}

RunResult baseline_logistic(const PreparedCohort& prepared, const TrainConfig& cfg,
                            uint64_t seed) {
  const Vocabulary& vocab = prepared.vocab;
  const int n_diag = vocab.n_diag();
  const int n_meas = vocab.n_meas();
  const int dim = n_diag + n_meas + kDemoDim;  // + trailing bias column

  // Bag-of-codes counts, per-item mean bin (0.5 when unobserved), demographics.
  const auto featurize = [&](const PatientRecord& rec) {
    std::vector<double> f(static_cast<size_t>(dim) + 1, 0.0);
    std::map<int, std::pair<double, int>> bin_sums;
    for (const auto& visit : rec.visits) {
      for (const auto& code : visit.diagnoses)
        f[static_cast<size_t>(vocab.diagnosis_index.at(code))] += 1.0;
      for (const auto& m : visit.measurements) {
        auto it = vocab.measurement_index.find(m.item_id);
        if (it == vocab.measurement_index.end() || !prepared.bins.has_item(m.item_id))
          continue;
        auto& [sum, count] = bin_sums[it->second];
        sum += assign_bin(m.item_id, m.value, prepared.bins);
        ++count;
      }
    }
    for (int i = 0; i < n_meas; ++i) {
      const auto it = bin_sums.find(i);
      const double denom = std::max(1, prepared.bins.max_bins - 1);
      f[static_cast<size_t>(n_diag + i)] =
          it == bin_sums.end() ? 0.5
                               : (it->second.first / it->second.second) / denom;
    }
    const auto demo = encode_demographics(rec.demographics, prepared.demo_stats.age_mean,
                                          prepared.demo_stats.age_std);
    for (int k = 0; k < kDemoDim; ++k)
      f[static_cast<size_t>(n_diag + n_meas + k)] = demo[static_cast<size_t>(k)];
    f.back() = 1.0;  // bias column
    return f;
  };

  std::vector<std::vector<double>> features(prepared.records.size());
  for (size_t i = 0; i < prepared.records.size(); ++i)
    features[i] = featurize(prepared.records[i]);

  // Column z-scoring with training statistics (bias column untouched).
  std::vector<double> mean(static_cast<size_t>(dim), 0.0), sd(static_cast<size_t>(dim), 0.0);
  for (size_t idx : prepared.train_idx)
    for (int c = 0; c < dim; ++c) mean[static_cast<size_t>(c)] += features[idx][static_cast<size_t>(c)];
  for (auto& m : mean) m /= static_cast<double>(prepared.train_idx.size());
  for (size_t idx : prepared.train_idx)
    for (int c = 0; c < dim; ++c) {
      const double d = features[idx][static_cast<size_t>(c)] - mean[static_cast<size_t>(c)];
      sd[static_cast<size_t>(c)] += d * d;
    }
  for (auto& s : sd) {
    s = std::sqrt(s / static_cast<double>(prepared.train_idx.size()));
    if (s < 1e-12) s = 1.0;
  }
  for (auto& f : features)
    for (int c = 0; c < dim; ++c)
      f[static_cast<size_t>(c)] = (f[static_cast<size_t>(c)] - mean[static_cast<size_t>(c)]) / sd[static_cast<size_t>(c)];

  std::vector<ad::Parameter> params{{"w", Matrix(dim + 1, 1)}};
  ad::AdamConfig adam_cfg;
  adam_cfg.weight_decay = cfg.weight_decay;
  ad::AdamState adam(params, adam_cfg);

  const auto score_set = [&](const std::vector<size_t>& subset) {
    ScoredLabels out;
    for (size_t idx : subset) {
      double z = 0.0;
      for (int c = 0; c <= dim; ++c)
        z += features[idx][static_cast<size_t>(c)] * params[0].value[static_cast<size_t>(c)];
      out.scores.push_back(1.0 / (1.0 + std::exp(-z)));
      out.labels.push_back(prepared.records[idx].label);
    }
    return out;
  };

  std::vector<size_t> train_order = prepared.train_idx;
  const int64_t batches_per_epoch = static_cast<int64_t>(
      (train_order.size() + cfg.batch - 1) / static_cast<size_t>(cfg.batch));
  const int64_t total_steps = batches_per_epoch * cfg.epochs;

  double best_val_auprc = -1.0;
  int best_epoch = 0;
  Matrix best_w = params[0].value;

  int64_t step = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng shuffle_rng(mix_seed(seed, 0xba5eu, static_cast<uint64_t>(epoch)));
    shuffle_rng.shuffle(train_order);
    for (size_t start = 0; start < train_order.size();
         start += static_cast<size_t>(cfg.batch)) {
      const size_t end = std::min(train_order.size(), start + static_cast<size_t>(cfg.batch));
      Matrix x(static_cast<int>(end - start), dim + 1);
      std::vector<double> labels;
      for (size_t k = start; k < end; ++k) {
        const size_t idx = train_order[k];
        for (int c = 0; c <= dim; ++c)
          x.at(static_cast<int>(k - start), c) = features[idx][static_cast<size_t>(c)];
        labels.push_back(static_cast<double>(prepared.records[idx].label));
      }
      ad::Tape tape;
      const auto w = tape.leaf(params[0].value, true);
      const auto loss = tape.bce_loss(tape.sigmoid(tape.matmul(tape.leaf(x), w)), labels);
      if (!std::isfinite(tape.value(loss).at(0, 0)))
        throw std::runtime_error("baseline diverged: non-finite loss");
      tape.backward(loss);
      const double lr = ad::one_cycle_lr(step, total_steps, cfg.lr);
      adam.step(params, {tape.grad(w)}, lr);
      ++step;
    }
    const double val_auprc = auprc(score_set(prepared.val_idx));
    if (val_auprc > best_val_auprc) {
      best_val_auprc = val_auprc;
      best_epoch = epoch;
      best_w = params[0].value;
    }
  }
  params[0].value = best_w;

  const ScoredLabels test = score_set(prepared.test_idx);
  RunResult result;
  result.seed = seed;
  result.selected_epoch = best_epoch;
  result.test_auroc = auroc(test);
  result.test_auprc = auprc(test);
  return result;
}

AblationAxis ablation_axis_from_string(const std::string& s) {
  if (s == "bins") return AblationAxis::bins;
  if (s == "diag_percent") return AblationAxis::diag_percent;
  if (s == "meas_percent") return AblationAxis::meas_percent;
  if (s == "cooccur_on_off") return AblationAxis::cooccur_on_off;
  if (s == "time_aware_on_off") return AblationAxis::time_aware_on_off;
  if (s == "random_vs_ontology") return AblationAxis::random_vs_ontology;
  throw std::runtime_error("unknown ablation axis '" + s + "'");
}

std::vector<AblationRow> ablate(const std::vector<PatientRecord>& records,
                                const Ontology& onto, const ConceptMapping& mapping,
                                const TrainConfig& base_cfg, AblationAxis axis,
                                const std::vector<double>& values,
                                const std::vector<uint64_t>& seeds) {
  std::vector<std::pair<std::string, TrainConfig>> settings;
  const auto fmt_value = [](double v) {
    if (v == std::floor(v)) return std::to_string(static_cast<long long>(v));
    return format_double(v);
  };

  switch (axis) {
    case AblationAxis::bins:
      for (double v : values) {
        TrainConfig c = base_cfg;
        c.bins = static_cast<int>(v);
        c.modality = ModalityChoice::measurement;
        settings.emplace_back("bins=" + fmt_value(v), c);
      }
      break;
    case AblationAxis::diag_percent:
      for (double v : values) {
        TrainConfig c = base_cfg;
        c.diag_percent = v;
        c.modality = ModalityChoice::diagnosis;
        settings.emplace_back("diag_percent=" + fmt_value(v), c);
      }
      break;
    case AblationAxis::meas_percent:
      for (double v : values) {
        TrainConfig c = base_cfg;
        c.meas_percent = v;
        c.modality = ModalityChoice::measurement;
        settings.emplace_back("meas_percent=" + fmt_value(v), c);
      }
      break;
    case AblationAxis::cooccur_on_off: {
      TrainConfig off = base_cfg, on = base_cfg;
      off.cooccur = false;
      on.cooccur = true;
      settings.emplace_back("cooccur=off", off);
      settings.emplace_back("cooccur=on", on);
      break;
    }
    case AblationAxis::time_aware_on_off: {
      TrainConfig off = base_cfg, on = base_cfg;
      off.time_aware = false;
      on.time_aware = true;
      settings.emplace_back("time_aware=off", off);
      settings.emplace_back("time_aware=on", on);
      break;
    }
    case AblationAxis::random_vs_ontology: {
      TrainConfig ontology_cfg = base_cfg, random_cfg = base_cfg;
      ontology_cfg.random_edges = false;
      random_cfg.random_edges = true;
      settings.emplace_back("edges=ontology", ontology_cfg);
      settings.emplace_back("edges=random", random_cfg);
      break;
    }
  }

  std::vector<AblationRow> rows;
  for (const auto& [name, cfg] : settings) {
    for (uint64_t seed : seeds) {
      const PreparedCohort prep = prepare_cohort(records, onto, mapping, cfg, seed);
      const RunResult r = train_one(prep, cfg, seed);
      rows.push_back({name, seed, r.test_auroc, r.test_auprc, r.selected_epoch});
    }
  }
  return rows;
}

std::string results_to_csv(const std::vector<AblationRow>& rows) {
  std::string out = "setting,seed,auroc,auprc,epoch\n";
  for (const auto& r : rows)
    out += r.setting + "," + std::to_string(r.seed) + "," + format_fixed(r.auroc, 6) +
           "," + format_fixed(r.auprc, 6) + "," + std::to_string(r.epoch) + "\n";
  return out;
}

std::string summary_to_json(const std::vector<AblationRow>& rows) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const AblationRow*>> groups;
  for (const auto& r : rows) {
    if (!groups.count(r.setting)) order.push_back(r.setting);
    groups[r.setting].push_back(&r);
  }
  const auto mean_std = [](const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    const double sd = xs.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    return std::make_pair(mean, sd);
  };

  nlohmann::json summary = nlohmann::json::array();
  for (const auto& name : order) {
    std::vector<double> aurocs, auprcs;
    for (const auto* r : groups[name]) {
      aurocs.push_back(r->auroc);
      auprcs.push_back(r->auprc);
    }
    const auto [roc_mean, roc_sd] = mean_std(aurocs);
    const auto [prc_mean, prc_sd] = mean_std(auprcs);
    summary.push_back({{"setting", name},
                       {"n_seeds", aurocs.size()},
                       {"auroc_mean", roc_mean},
                       {"auroc_std", roc_sd},
                       {"auprc_mean", prc_mean},
                       {"auprc_std", prc_sd}});
  }
  return nlohmann::json{{"settings", summary}}.dump(2) + "\n";
}

}  // namespace katgnn
