#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "katgnn/config.hpp"
#include "katgnn/cooccurrence.hpp"
#include "katgnn/graph.hpp"
#include "katgnn/metrics.hpp"
#include "katgnn/network.hpp"
#include "katgnn/synth.hpp"

namespace katgnn {

struct RunResult {
  uint64_t seed = 0;
  double test_auroc = 0.0;
  double test_auprc = 0.0;
  int selected_epoch = 0;  // argmax validation AUPRC, ties to earliest; 0 = init
};

// Everything derived from (cohort, config, split): vocabulary after the lab
// prevalence filter, training-split statistics (demo stats, bins, mined
// co-occurrence), augmentation pair lists and the fully augmented graphs.
struct PreparedCohort {
  std::vector<PatientRecord> records;
  Vocabulary vocab;
  CohortSplit split;
  std::vector<size_t> train_idx, val_idx, test_idx;
  DemoStats demo_stats;
  BinSpec bins;
  AugmentationPlan diag_plan, meas_plan;
  std::vector<std::pair<std::string, std::string>> diag_onto_pairs, meas_onto_pairs;
  LiftTable diag_lift, meas_lift;
  std::vector<std::pair<std::string, std::string>> diag_cooc_pairs, meas_cooc_pairs;
  std::vector<PatientGraph> diag_graphs, meas_graphs;  // aligned with records
  bool use_diag = true;
  bool use_meas = true;
};

// Splits with the given seed, then derives all training-split statistics and
// builds augmented graphs per cfg.
PreparedCohort prepare_cohort(const std::vector<PatientRecord>& records,
                              const Ontology& onto, const ConceptMapping& mapping,
                              const TrainConfig& cfg, uint64_t seed);

// Same, but with an externally fixed split (leakage guards inject label
// mutations on a frozen split through this entry point).
PreparedCohort prepare_cohort_with_split(const std::vector<PatientRecord>& records,
                                         const Ontology& onto,
                                         const ConceptMapping& mapping,
                                         const TrainConfig& cfg, CohortSplit split,
                                         uint64_t seed);

// Shuffled seeded mini-batches, mean BCE per batch, Adam with the one-cycle
// schedule, model selection on validation AUPRC with best-epoch restore, then
// test metrics. Deterministic given seed (any thread count: per-patient
// gradients are reduced in batch order).
RunResult train_one(const PreparedCohort& prepared, const TrainConfig& cfg,
                    uint64_t seed, NetworkParams* trained = nullptr);

// Test-set probabilities of a trained model plus optional attention dump rows.
struct EvalOutput {
  ScoredLabels test_scores;
  double auroc = 0.0;
  double auprc = 0.0;
  std::string attention_csv;  // patient_id,visit_ordinal,alpha,beta per modality row
};
EvalOutput evaluate_model(const PreparedCohort& prepared, const NetworkParams& params,
                          const TrainConfig& cfg, bool dump_attention = false);

// Logistic regression on bag-of-codes + per-item mean bins + demographics,
// trained with the same optimizer, schedule, splits and selection rule.
RunResult baseline_logistic(const PreparedCohort& prepared, const TrainConfig& cfg,
                            uint64_t seed);

struct AblationRow {
  std::string setting;
  uint64_t seed = 0;
  double auroc = 0.0;
  double auprc = 0.0;
  int epoch = 0;
};

enum class AblationAxis {
  bins,
  diag_percent,
  meas_percent,
  cooccur_on_off,
  time_aware_on_off,
  random_vs_ontology,
};

AblationAxis ablation_axis_from_string(const std::string& s);

// Runs the grid for one axis across seeds. Axes with fixed arms
// (cooccur/time_aware/random_vs_ontology) ignore `values`.
std::vector<AblationRow> ablate(const std::vector<PatientRecord>& records,
                                const Ontology& onto, const ConceptMapping& mapping,
                                const TrainConfig& base_cfg, AblationAxis axis,
                                const std::vector<double>& values,
                                const std::vector<uint64_t>& seeds);

std::string results_to_csv(const std::vector<AblationRow>& rows);
std::string summary_to_json(const std::vector<AblationRow>& rows);

}  // namespace katgnn
