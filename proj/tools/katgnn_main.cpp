#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "katgnn/cohort_io.hpp"
#include "katgnn/config.hpp"
#include "katgnn/csv.hpp"
#include "katgnn/synth.hpp"
#include "katgnn/trainer.hpp"

namespace fs = std::filesystem;
using namespace katgnn;

namespace {

struct DataDir {
  std::vector<PatientRecord> records;
  std::optional<Ontology> ontology;
  ConceptMapping mapping;
};

DataDir load_data_dir(const std::string& dir) {
  DataDir data;
  data.records = load_cohort(CohortFiles::in_dir(dir));
  const std::string onto_path = dir + "/ontology.csv";
  if (fs::exists(onto_path)) {
    data.ontology = load_ontology(onto_path);
    const std::string mapping_path = dir + "/mapping.csv";
    if (fs::exists(mapping_path))
      data.mapping = load_mapping(mapping_path, *data.ontology);
  }
  return data;
}

const Ontology& ontology_or_fail(const DataDir& data, const TrainConfig& cfg,
                                 const std::string& dir) {
  static const Ontology dummy = Ontology::build({{"N1", "N0"}});
  const bool needs_ontology = cfg.diag_percent > 0.0 || cfg.meas_percent > 0.0;
  if (data.ontology) return *data.ontology;
  if (needs_ontology)
    throw std::runtime_error(dir + "/ontology.csv required for edge augmentation "
                             "(set --diag-percent 0 and --meas-percent 0 to skip)");
  return dummy;
}

// Flags shared by the pipeline subcommands; CLI values override the config file.
struct CommonOpts {
  std::string data_dir;
  std::string config_path;
  std::string out_dir = ".";
  uint64_t seed = 1;
  int seeds = 1;
  int threads = 1;
  std::optional<int> bins;
  std::optional<double> diag_percent;
  std::optional<double> meas_percent;
  std::optional<std::string> metric_mode;
  bool no_cooccur = false;
  bool no_time_aware = false;
  bool random_edges = false;
  std::optional<int> epochs;
  std::optional<int> hidden_dim;
  std::optional<std::string> modality;

  void add_to(CLI::App* cmd, bool with_seeds = true) {
    cmd->add_option("--data", data_dir, "Data directory with the cohort CSVs")
        ->required();
    cmd->add_option("--config", config_path, "Config file (key = value lines)");
    cmd->add_option("--out-dir", out_dir, "Output directory (default: current)");
    cmd->add_option("--seed", seed, "Base random seed (default 1)");
    if (with_seeds)
      cmd->add_option("--seeds", seeds, "Number of seeded repetitions (default 1)");
    cmd->add_option("--threads", threads,
                    "Worker threads; 1 is the deterministic reference path");
    cmd->add_option("--bins", bins, "Quantile bins B (overrides config)");
    cmd->add_option("--diag-percent", diag_percent,
                    "Top ontology pair percent for diagnosis graphs");
    cmd->add_option("--meas-percent", meas_percent,
                    "Top ontology pair percent for measurement graphs");
    cmd->add_option("--metric-mode", metric_mode,
                    "Ontology metric: lcs_path (default) or lcs_depth");
    cmd->add_flag("--no-cooccur", no_cooccur, "Disable co-occurrence edges");
    cmd->add_flag("--no-time-aware", no_time_aware,
                  "Replace temporal attention with mean pooling");
    cmd->add_flag("--random-edges", random_edges,
                  "Replace ontology pairs with random pairs of equal count");
    cmd->add_option("--epochs", epochs, "Training epochs (overrides config)");
    cmd->add_option("--hidden-dim", hidden_dim, "GCN hidden width d (overrides config)");
    cmd->add_option("--modality", modality, "Graphs to use: both, diag or meas");
  }

  TrainConfig config() const {
    TrainConfig cfg = config_path.empty() ? TrainConfig{} : load_config(config_path);
    if (bins) cfg.bins = *bins;
    if (diag_percent) cfg.diag_percent = *diag_percent;
    if (meas_percent) cfg.meas_percent = *meas_percent;
    if (metric_mode) cfg.metric_mode = metric_mode_from_string(*metric_mode);
    if (no_cooccur) cfg.cooccur = false;
    if (no_time_aware) cfg.time_aware = false;
    if (random_edges) cfg.random_edges = true;
    if (epochs) cfg.epochs = *epochs;
    if (hidden_dim) cfg.hidden_dim = *hidden_dim;
    if (modality) cfg.modality = modality_from_string(*modality);
    cfg.threads = threads;
    cfg.validate();
    return cfg;
  }

  std::vector<uint64_t> seed_list() const {
    std::vector<uint64_t> out;
    for (int i = 0; i < seeds; ++i) out.push_back(seed + static_cast<uint64_t>(i));
    return out;
  }
};

void write_file(const std::string& dir, const std::string& name,
                const std::string& content) {
  fs::create_directories(dir);
  write_text_file(dir + "/" + name, content);
}

int cmd_gen_synth(const SynthConfig& cfg, const std::string& out_dir) {
  const SynthCohort cohort = generate_synthetic(cfg);
  save_synthetic(cohort, out_dir);
  std::cerr << "wrote " << cohort.records.size() << " patients to " << out_dir << "\n";
  return 0;
}

int cmd_build_graphs(const CommonOpts& opts) {
  const TrainConfig cfg = opts.config();
  const DataDir data = load_data_dir(opts.data_dir);
  TrainConfig no_edges = cfg;  // base graphs only
  no_edges.diag_percent = 0.0;
  no_edges.meas_percent = 0.0;
  no_edges.cooccur = false;
  const PreparedCohort prep = prepare_cohort(data.records, ontology_or_fail(data, no_edges, opts.data_dir),
                                             data.mapping, no_edges, opts.seed);
  const std::string graph_dir = opts.out_dir + "/graphs";
  fs::create_directories(graph_dir);
  for (size_t i = 0; i < prep.records.size(); ++i) {
    const std::string& id = prep.records[i].patient_id;
    if (prep.use_diag)
      write_text_file(graph_dir + "/" + id + ".diag.csv",
                      graph_to_csv(prep.diag_graphs[i], prep.vocab));
    if (prep.use_meas)
      write_text_file(graph_dir + "/" + id + ".meas.csv",
                      graph_to_csv(prep.meas_graphs[i], prep.vocab));
  }
  write_file(opts.out_dir, "binspec.csv", binspec_to_csv(prep.bins));
  int dropped = 0;
  for (const auto& g : prep.meas_graphs) dropped += g.dropped_observations;
  std::cerr << "wrote graphs for " << prep.records.size() << " patients";
  if (dropped > 0) std::cerr << " (" << dropped << " observations without fitted bins dropped)";
  std::cerr << "\n";
  return 0;
}

int cmd_augment(const CommonOpts& opts) {
  const TrainConfig cfg = opts.config();
  const DataDir data = load_data_dir(opts.data_dir);
  const PreparedCohort prep = prepare_cohort(data.records, ontology_or_fail(data, cfg, opts.data_dir),
                                             data.mapping, cfg, opts.seed);
  if (prep.use_diag) {
    write_file(opts.out_dir, "diag_plan.csv", plan_to_csv(prep.diag_plan));
    if (cfg.cooccur)
      write_file(opts.out_dir, "diag_cooccurrence.csv", lift_table_to_csv(prep.diag_lift));
  }
  if (prep.use_meas) {
    write_file(opts.out_dir, "meas_plan.csv", plan_to_csv(prep.meas_plan));
    if (cfg.cooccur)
      write_file(opts.out_dir, "meas_cooccurrence.csv", lift_table_to_csv(prep.meas_lift));
  }
  return 0;
}

int cmd_train(const CommonOpts& opts, bool with_baseline) {
  const TrainConfig cfg = opts.config();
  const DataDir data = load_data_dir(opts.data_dir);
  const Ontology& onto = ontology_or_fail(data, cfg, opts.data_dir);

  std::vector<AblationRow> rows;
  for (uint64_t seed : opts.seed_list()) {
    const PreparedCohort prep = prepare_cohort(data.records, onto, data.mapping, cfg, seed);
    NetworkParams trained;
    const RunResult r = train_one(prep, cfg, seed, &trained);
    rows.push_back({"default", seed, r.test_auroc, r.test_auprc, r.selected_epoch});
    write_file(opts.out_dir, "checkpoint_seed" + std::to_string(seed) + ".txt",
               ad::params_to_text(trained.params));
    if (with_baseline) {
      const RunResult b = baseline_logistic(prep, cfg, seed);
      rows.push_back({"baseline", seed, b.test_auroc, b.test_auprc, b.selected_epoch});
    }
  }
  write_file(opts.out_dir, "results.csv", results_to_csv(rows));
  write_file(opts.out_dir, "summary.json", summary_to_json(rows));
  return 0;
}

int cmd_eval(const CommonOpts& opts, const std::string& checkpoint_path,
             bool dump_attention) {
  const TrainConfig cfg = opts.config();
  const DataDir data = load_data_dir(opts.data_dir);
  const Ontology& onto = ontology_or_fail(data, cfg, opts.data_dir);
  const PreparedCohort prep =
      prepare_cohort(data.records, onto, data.mapping, cfg, opts.seed);

  NetworkParams net;
  net.hidden_dim = cfg.hidden_dim;
  net.time_dim = cfg.time_dim;
  net.params = ad::params_from_text(read_text_file(checkpoint_path));
  // Rebuild the name -> parameter-id maps from the checkpoint layout.
  std::vector<std::pair<std::string, int>> modalities;
  if (prep.use_diag) modalities.emplace_back("diag", prep.diag_graphs.front().feature_dim());
  if (prep.use_meas) modalities.emplace_back("meas", prep.meas_graphs.front().feature_dim());
  NetworkParams expect = NetworkParams::init(modalities, cfg.hidden_dim, cfg.time_dim, 0);
  if (expect.params.size() != net.params.size())
    throw std::runtime_error("checkpoint does not match the configured model");
  for (size_t i = 0; i < expect.params.size(); ++i) {
    if (expect.params[i].name != net.params[i].name ||
        !expect.params[i].value.same_shape(net.params[i].value))
      throw std::runtime_error("checkpoint parameter mismatch at " + net.params[i].name);
  }
  net.modality_names = expect.modality_names;
  net.modality_ids = expect.modality_ids;
  net.fusion_logits = expect.fusion_logits;
  net.head_w = expect.head_w;
  net.head_b = expect.head_b;

  const EvalOutput out = evaluate_model(prep, net, cfg, dump_attention);
  std::string csv = "auroc,auprc\n" + format_fixed(out.auroc, 6) + "," +
                    format_fixed(out.auprc, 6) + "\n";
  write_file(opts.out_dir, "eval.csv", csv);
  if (dump_attention) write_file(opts.out_dir, "attention.csv", out.attention_csv);
  std::cout << csv;
  return 0;
}

int cmd_ablate(const CommonOpts& opts, const std::string& axis_name,
               const std::string& values_csv) {
  const TrainConfig cfg = opts.config();
  const DataDir data = load_data_dir(opts.data_dir);
  const AblationAxis axis = ablation_axis_from_string(axis_name);

  std::vector<double> values;
  if (!values_csv.empty())
    for (const auto& tok : split_csv_line(values_csv))
      values.push_back(std::stod(tok));

  const std::vector<AblationRow> rows =
      ablate(data.records, ontology_or_fail(data, cfg, opts.data_dir), data.mapping,
             cfg, axis, values, opts.seed_list());
  write_file(opts.out_dir, "ablation.csv", results_to_csv(rows));
  write_file(opts.out_dir, "summary.json", summary_to_json(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KAT-GNN: knowledge-augmented temporal GNN risk prediction pipeline"};
  app.require_subcommand(1);

  // gen-synth
  auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic cohort");
  SynthConfig synth_cfg;
  std::string signal = "none";
  std::string gen_out = ".";
  gen->add_option("--n", synth_cfg.n_patients, "Number of patients (default 1000)");
  gen->add_option("--signal", signal,
                  "Planted signal: none, diagnosis_cluster, lab_extreme, "
                  "ontology_informative, or combinations joined with '+'");
  gen->add_option("--seed", synth_cfg.seed, "Generator seed (default 1)");
  gen->add_option("--out-dir", gen_out, "Output directory");
  gen->add_option("--positive-rate", synth_cfg.positive_rate,
                  "Positive label rate (default 0.25)");
  gen->add_option("--diag-codes", synth_cfg.n_diag_codes,
                  "Diagnosis vocabulary size (default 60)");
  gen->add_option("--meas-items", synth_cfg.n_meas_items,
                  "Measurement item count (default 15)");
  gen->add_option("--visits-min", synth_cfg.visits_min, "Minimum visits per patient");
  gen->add_option("--visits-max", synth_cfg.visits_max, "Maximum visits per patient");
  gen->add_option("--decoy-rate", synth_cfg.decoy_rate,
                  "Fraction of negatives carrying the pattern in an early visit");
  gen->add_option("--signal-strength", synth_cfg.signal_strength,
                  "Fraction of positives carrying the pattern");

  // pipeline subcommands
  auto* build = app.add_subcommand("build-graphs", "Build and dump patient graphs");
  CommonOpts build_opts;
  build_opts.add_to(build, /*with_seeds=*/false);

  auto* augment = app.add_subcommand("augment", "Score and dump augmentation edges");
  CommonOpts augment_opts;
  augment_opts.add_to(augment, /*with_seeds=*/false);

  auto* train = app.add_subcommand("train", "Train and evaluate over seeds");
  CommonOpts train_opts;
  train_opts.add_to(train);
  bool with_baseline = false;
  train->add_flag("--baseline", with_baseline,
                  "Also train the logistic-regression baseline per seed");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the test split");
  CommonOpts eval_opts;
  eval_opts.add_to(eval, /*with_seeds=*/false);
  std::string checkpoint;
  bool dump_attention = false;
  eval->add_option("--checkpoint", checkpoint, "Checkpoint file from train")->required();
  eval->add_flag("--dump-attention", dump_attention,
                 "Write attention.csv with per-visit alpha/beta");

  auto* ablate_cmd = app.add_subcommand("ablate", "Run an ablation axis");
  CommonOpts ablate_opts;
  ablate_opts.add_to(ablate_cmd);
  std::string axis;
  std::string values;
  ablate_cmd->add_option("--axis", axis,
                         "bins | diag_percent | meas_percent | cooccur_on_off | "
                         "time_aware_on_off | random_vs_ontology")
      ->required();
  ablate_cmd->add_option("--values", values, "Comma-separated grid values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors -> 1, --help -> 0
  }

  try {
    if (gen->parsed()) {
      synth_cfg.signal = SignalMode::parse(signal);
      return cmd_gen_synth(synth_cfg, gen_out);
    }
    if (build->parsed()) return cmd_build_graphs(build_opts);
    if (augment->parsed()) return cmd_augment(augment_opts);
    if (train->parsed()) return cmd_train(train_opts, with_baseline);
    if (eval->parsed()) return cmd_eval(eval_opts, checkpoint, dump_attention);
    if (ablate_cmd->parsed()) return cmd_ablate(ablate_opts, axis, values);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
