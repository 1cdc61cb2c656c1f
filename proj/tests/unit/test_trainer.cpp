#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "katgnn/rng.hpp"
#include "katgnn/trainer.hpp"

using namespace katgnn;

namespace {

TrainConfig tiny_config() {
  TrainConfig cfg;
  cfg.hidden_dim = 8;
  cfg.time_dim = 8;
  cfg.epochs = 3;
  cfg.batch = 64;
  cfg.bins = 4;
  cfg.threads = 1;
  return cfg;
}

SynthCohort small_cohort(const std::string& signal, int n = 150, uint64_t seed = 3) {
  SynthConfig cfg;
  cfg.n_patients = n;
  cfg.signal = SignalMode::parse(signal);
  cfg.seed = seed;
  cfg.positive_rate = 0.3;
  return generate_synthetic(cfg);
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

TEST_CASE("epochs = 0 evaluates the initialized model") {
  const SynthCohort cohort = small_cohort("none", 120);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 0;
  const PreparedCohort prep =
      prepare_cohort(cohort.records, cohort.ontology, cohort.mapping, cfg, 1);
  const RunResult r = train_one(prep, cfg, 1);
  CHECK(r.selected_epoch == 0);
  CHECK(r.test_auroc >= 0.0);
  CHECK(r.test_auroc <= 1.0);
}

TEST_CASE("training is bit-identical across runs and thread counts") {
  const SynthCohort cohort = small_cohort("diagnosis_cluster", 120);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 2;
  const PreparedCohort prep =
      prepare_cohort(cohort.records, cohort.ontology, cohort.mapping, cfg, 7);
  const RunResult a = train_one(prep, cfg, 7);
  const RunResult b = train_one(prep, cfg, 7);
  CHECK(a.test_auroc == b.test_auroc);  // exact, not approximate
  CHECK(a.test_auprc == b.test_auprc);
  CHECK(a.selected_epoch == b.selected_epoch);

  TrainConfig threaded = cfg;
  threaded.threads = 4;
  const RunResult c = train_one(prep, threaded, 7);
  CHECK(a.test_auroc == c.test_auroc);
  CHECK(a.test_auprc == c.test_auprc);
  CHECK(a.selected_epoch == c.selected_epoch);
}

TEST_CASE("prepared statistics come from the training split only") {
  const SynthCohort cohort = small_cohort("diagnosis_cluster+lab_extreme", 200);
  const TrainConfig cfg = tiny_config();

  std::vector<std::string> ids;
  std::vector<int> labels;
  for (const auto& r : cohort.records) {
    ids.push_back(r.patient_id);
    labels.push_back(r.label);
  }
  const CohortSplit split = split_cohort(ids, labels, 5);

  const PreparedCohort base = prepare_cohort_with_split(
      cohort.records, cohort.ontology, cohort.mapping, cfg, split, 5);

  // Mutate every test patient: flip labels AND rewrite their visit contents.
  std::vector<PatientRecord> mutated = cohort.records;
  std::set<std::string> test_ids(split.test_ids.begin(), split.test_ids.end());
  for (auto& rec : mutated) {
    if (!test_ids.count(rec.patient_id)) continue;
    rec.label = 1 - rec.label;
    for (auto& visit : rec.visits) {
      visit.diagnoses.clear();
      for (auto& m : visit.measurements) m.value += 1000.0;
    }
  }
  const PreparedCohort changed = prepare_cohort_with_split(
      mutated, cohort.ontology, cohort.mapping, cfg, split, 5);

  CHECK(base.bins.boundaries == changed.bins.boundaries);
  CHECK(base.diag_cooc_pairs == changed.diag_cooc_pairs);
  CHECK(base.meas_cooc_pairs == changed.meas_cooc_pairs);
}

TEST_CASE("flipping test labels never changes the selected epoch") {
  const SynthCohort cohort = small_cohort("diagnosis_cluster", 150);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 3;

  std::vector<std::string> ids;
  std::vector<int> labels;
  for (const auto& r : cohort.records) {
    ids.push_back(r.patient_id);
    labels.push_back(r.label);
  }
  const CohortSplit split = split_cohort(ids, labels, 2);
  const PreparedCohort base = prepare_cohort_with_split(
      cohort.records, cohort.ontology, cohort.mapping, cfg, split, 2);

  std::vector<PatientRecord> mutated = cohort.records;
  std::set<std::string> test_ids(split.test_ids.begin(), split.test_ids.end());
  for (auto& rec : mutated)
    if (test_ids.count(rec.patient_id)) rec.label = 1 - rec.label;
  const PreparedCohort corrupted = prepare_cohort_with_split(
      mutated, cohort.ontology, cohort.mapping, cfg, split, 2);

  const RunResult a = train_one(base, cfg, 2);
  const RunResult b = train_one(corrupted, cfg, 2);
  CHECK(a.selected_epoch == b.selected_epoch);  // selection reads val only
}

TEST_CASE("selected epoch stays within the budget") {
  const SynthCohort cohort = small_cohort("diagnosis_cluster", 120);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 3;
  const PreparedCohort prep =
      prepare_cohort(cohort.records, cohort.ontology, cohort.mapping, cfg, 11);
  const RunResult r = train_one(prep, cfg, 11);
  CHECK(r.selected_epoch >= 1);
  CHECK(r.selected_epoch <= 3);
}

TEST_CASE("baseline: chance level without signal, deterministic per seed") {
  const SynthCohort cohort = small_cohort("none", 1000, 21);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 10;
  std::vector<double> aurocs;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const PreparedCohort prep =
        prepare_cohort(cohort.records, cohort.ontology, cohort.mapping, cfg, seed);
    aurocs.push_back(baseline_logistic(prep, cfg, seed).test_auroc);
  }
  const double med = median(aurocs);
  CHECK(med >= 0.45);
  CHECK(med <= 0.55);

  const PreparedCohort prep =
      prepare_cohort(cohort.records, cohort.ontology, cohort.mapping, cfg, 1);
  const RunResult a = baseline_logistic(prep, cfg, 1);
  const RunResult b = baseline_logistic(prep, cfg, 1);
  CHECK(a.test_auroc == b.test_auroc);
}

TEST_CASE("baseline nails a label-determining code") {
  // Hand-built cohort: code X present iff positive, plus background noise.
  std::vector<PatientRecord> records;
  Rng rng(99);
  for (int i = 0; i < 300; ++i) {
    PatientRecord rec;
    rec.patient_id = "P" + std::to_string(1000 + i);
    rec.demographics.age = rng.uniform(40, 80);
    rec.demographics.sex = rng.bernoulli(0.5) ? Sex::female : Sex::male;
    rec.label = rng.bernoulli(0.4) ? 1 : 0;
    Visit v;
    v.visit_id = "V0";
    v.time = 0;
    v.diagnoses.push_back("BG" + std::to_string(rng.uniform_int(0, 9)));
    if (rec.label == 1) v.diagnoses.push_back("X");
    std::sort(v.diagnoses.begin(), v.diagnoses.end());
    v.diagnoses.erase(std::unique(v.diagnoses.begin(), v.diagnoses.end()),
                      v.diagnoses.end());
    v.measurements.push_back({"lab0", rng.normal(5.0, 1.0)});
    rec.visits.push_back(v);
    rec.index_date = 30;
    records.push_back(rec);
  }
  TrainConfig cfg = tiny_config();
  cfg.epochs = 40;
  cfg.batch = 32;
  cfg.diag_percent = 0;
  cfg.meas_percent = 0;
  const Ontology onto = Ontology::build({{"c", "root"}});
  const PreparedCohort prep = prepare_cohort(records, onto, {}, cfg, 3);
  CHECK(baseline_logistic(prep, cfg, 3).test_auroc > 0.95);
}

TEST_CASE("model learns a planted cluster signal on a small cohort") {
  const SynthCohort cohort = small_cohort("diagnosis_cluster", 400, 13);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 25;
  cfg.batch = 32;
  cfg.hidden_dim = 16;
  cfg.time_dim = 16;
  cfg.modality = ModalityChoice::diagnosis;
  const PreparedCohort prep =
      prepare_cohort(cohort.records, cohort.ontology, cohort.mapping, cfg, 1);
  const RunResult r = train_one(prep, cfg, 1);
  CHECK(r.test_auroc > 0.7);
}

TEST_CASE("ablation rows mirror the requested grid") {
  const SynthCohort cohort = small_cohort("lab_extreme", 120);
  TrainConfig cfg = tiny_config();
  cfg.epochs = 1;
  const auto rows = ablate(cohort.records, cohort.ontology, cohort.mapping, cfg,
                           AblationAxis::bins, {1, 2, 4}, {1, 2});
  REQUIRE(rows.size() == 6);  // 3 settings x 2 seeds
  CHECK(rows[0].setting == "bins=1");
  CHECK(rows[5].setting == "bins=4");

  const std::string csv = results_to_csv(rows);
  CHECK(csv.substr(0, csv.find('\n')) == "setting,seed,auroc,auprc,epoch");
  const std::string json = summary_to_json(rows);
  CHECK(json.find("\"setting\": \"bins=2\"") != std::string::npos);
  CHECK(json.find("auroc_mean") != std::string::npos);

  // random_vs_ontology at percent 0: both arms see identical graphs.
  TrainConfig zero = cfg;
  zero.diag_percent = 0;
  zero.meas_percent = 0;
  const auto arms = ablate(cohort.records, cohort.ontology, cohort.mapping, zero,
                           AblationAxis::random_vs_ontology, {}, {1});
  REQUIRE(arms.size() == 2);
  CHECK(arms[0].auroc == arms[1].auroc);
}
