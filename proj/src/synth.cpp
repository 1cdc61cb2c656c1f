#include "katgnn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <stdexcept>

#include "katgnn/cohort_io.hpp"
#include "katgnn/rng.hpp"

namespace katgnn {

namespace {

constexpr int kSiblingBlock = 8;       // reserved codes 0..7 under the deep parent
constexpr int kClusterSize = 3;        // diagnosis_cluster draws from codes 0..2
constexpr int kClusterDraw = 2;        // planted codes per patient
constexpr double kItemSd = 2.0;

std::string pad_id(const std::string& prefix, int value, int width) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%0*d", prefix.c_str(), std::min(width, 16), value);
  return std::string(buf);
}

std::string diag_code(int i) { return pad_id("D", i, 3); }
std::string meas_item(int i) { return pad_id("L", i, 3); }

double item_mean(int i) { return 10.0 * (i + 1); }

}  // namespace

SignalMode SignalMode::parse(const std::string& s) {
  SignalMode mode;
  if (s == "none" || s.empty()) return mode;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t end = s.find('+', pos);
    if (end == std::string::npos) end = s.size();
    const std::string part = s.substr(pos, end - pos);
    if (part == "diagnosis_cluster") mode.diagnosis_cluster = true;
    else if (part == "lab_extreme") mode.lab_extreme = true;
    else if (part == "ontology_informative") mode.ontology_informative = true;
    else if (part != "none")
      throw std::runtime_error("unknown signal mode '" + part + "'");
    pos = end + 1;
  }
  return mode;
}

std::string SignalMode::to_string() const {
  std::vector<std::string> parts;
  if (diagnosis_cluster) parts.push_back("diagnosis_cluster");
  if (lab_extreme) parts.push_back("lab_extreme");
  if (ontology_informative) parts.push_back("ontology_informative");
  if (parts.empty()) return "none";
  std::string out = parts[0];
  for (size_t i = 1; i < parts.size(); ++i) out += "+" + parts[i];
  return out;
}

void SynthConfig::validate() const {
  if (n_patients < 5) throw std::runtime_error("synth: n_patients must be >= 5");
  if (!(positive_rate > 0.0 && positive_rate < 1.0))
    throw std::runtime_error("synth: positive_rate must be in (0, 1)");
  if (n_diag_codes < kSiblingBlock + 4)
    throw std::runtime_error("synth: n_diag_codes must be >= " +
                             std::to_string(kSiblingBlock + 4));
  if (n_meas_items < 2) throw std::runtime_error("synth: n_meas_items must be >= 2");
  if (visits_min < 1 || visits_max < visits_min)
    throw std::runtime_error("synth: invalid visits range");
  if (decoy_rate < 0.0 || decoy_rate > 1.0)
    throw std::runtime_error("synth: decoy_rate must be in [0, 1]");
  if (signal_strength < 0.0 || signal_strength > 1.0)
    throw std::runtime_error("synth: signal_strength must be in [0, 1]");
}

std::vector<std::string> synth_cluster_codes(const SynthConfig& cfg) {
  const int size = cfg.signal.ontology_informative ? kSiblingBlock : kClusterSize;
  std::vector<std::string> codes;
  for (int i = 0; i < size; ++i) codes.push_back(diag_code(i));
  return codes;
}

std::string synth_extreme_item() { return meas_item(0); }

SynthCohort generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();

  // --- ontology + mapping, independent of patient draws ---
  std::vector<std::pair<std::string, std::string>> edges;
  ConceptMapping mapping;
  // Deep chain with one diamond: root -> SX000 -> SX001 -> SX002, plus the
  // shortcut SX000 -> SX002; sibling concepts for the reserved codes attach
  // below SX002 at longest-path depth 4.
  edges.push_back({"SX000", "SROOT"});
  edges.push_back({"SX001", "SX000"});
  edges.push_back({"SX002", "SX001"});
  edges.push_back({"SX002", "SX000"});
  edges.push_back({"SX003", "SX002"});
  for (int i = 0; i < kSiblingBlock; ++i) {
    const std::string concept_id = pad_id("SC", i, 3);
    edges.push_back({concept_id, "SX003"});
    mapping.ccs_to_concepts[diag_code(i)] = {concept_id};
  }
  // Every other diagnosis code gets a private two-step chain so no two of
  // them are siblings and all cross-chain pair distances are equal.
  for (int i = kSiblingBlock; i < cfg.n_diag_codes; ++i) {
    const std::string mid = pad_id("SDM", i, 3);
    const std::string leaf = pad_id("SD", i, 3);
    edges.push_back({mid, "SROOT"});
    edges.push_back({leaf, mid});
    mapping.ccs_to_concepts[diag_code(i)] = {leaf};
  }
  for (int i = 0; i < cfg.n_meas_items; ++i) {
    const std::string mid = pad_id("SLM", i, 3);
    const std::string leaf = pad_id("SL", i, 3);
    edges.push_back({mid, "SROOT"});
    edges.push_back({leaf, mid});
    mapping.meas_to_concept[meas_item(i)] = leaf;
  }

  SynthCohort cohort;
  cohort.ontology = Ontology::build(edges);
  cohort.mapping = std::move(mapping);

  // --- patients ---
  const int id_width = std::max(4, static_cast<int>(std::to_string(cfg.n_patients).size()));
  const int cluster_size = cfg.signal.ontology_informative ? kSiblingBlock : kClusterSize;

  for (int i = 0; i < cfg.n_patients; ++i) {
    Rng rng(mix_seed(cfg.seed, 0x5f1u, static_cast<uint64_t>(i)));
    PatientRecord rec;
    rec.patient_id = pad_id("P", i, id_width);
    rec.label = rng.bernoulli(cfg.positive_rate) ? 1 : 0;
    rec.demographics.age = std::round(rng.uniform(40.0, 85.0) * 10.0) / 10.0;
    const double sex_draw = rng.uniform();
    rec.demographics.sex =
        sex_draw < 0.48 ? Sex::female : (sex_draw < 0.96 ? Sex::male : Sex::unknown);

    const int n_visits = static_cast<int>(rng.uniform_int(cfg.visits_min, cfg.visits_max));
    int64_t t = 0;
    for (int v = 0; v < n_visits; ++v) {
      Visit visit;
      visit.visit_id = pad_id("V", v, 2);
      visit.time = t;
      t += rng.uniform_int(30, 180);
      rec.visits.push_back(std::move(visit));
    }
    rec.index_date = rec.visits.back().time + 30;

    // Background diagnoses from the non-reserved pool.
    for (auto& visit : rec.visits) {
      const int n_bg = static_cast<int>(rng.uniform_int(1, 4));
      std::set<std::string> codes;
      while (static_cast<int>(codes.size()) < n_bg)
        codes.insert(diag_code(static_cast<int>(
            rng.uniform_int(kSiblingBlock, cfg.n_diag_codes - 1))));
      visit.diagnoses.assign(codes.begin(), codes.end());
    }
    // Background measurements; the designated item is always observed so its
    // bin boundaries are well estimated.
    for (auto& visit : rec.visits) {
      const int n_items = static_cast<int>(
          rng.uniform_int(2, std::min(5, cfg.n_meas_items)));
      std::vector<int> items = rng.sample_without_replacement(cfg.n_meas_items, n_items);
      if (std::find(items.begin(), items.end(), 0) == items.end()) items.push_back(0);
      std::sort(items.begin(), items.end());
      for (int item : items)
        visit.measurements.push_back(
            {meas_item(item), rng.normal(item_mean(item), kItemSd)});
    }

    // Planted signal: positives carry the pattern in their most recent visit;
    // a fraction of negatives carry the identical pattern in their first
    // visit, which only time-aware models can discount.
    const bool wants_diag = cfg.signal.diagnosis_cluster || cfg.signal.ontology_informative;
    const bool is_positive_carrier = rec.label == 1 && rng.bernoulli(cfg.signal_strength);
    const bool is_decoy_carrier =
        rec.label == 0 && rec.visits.size() >= 2 && rng.bernoulli(cfg.decoy_rate);
    const size_t target_visit = is_positive_carrier ? rec.visits.size() - 1 : 0;

    if ((is_positive_carrier || is_decoy_carrier) && cfg.signal.any()) {
      Visit& visit = rec.visits[target_visit];
      if (wants_diag) {
        std::vector<int> picks =
            rng.sample_without_replacement(cluster_size, kClusterDraw);
        for (int p : picks) {
          const std::string code = diag_code(p);
          if (std::find(visit.diagnoses.begin(), visit.diagnoses.end(), code) ==
              visit.diagnoses.end())
            visit.diagnoses.push_back(code);
        }
        std::sort(visit.diagnoses.begin(), visit.diagnoses.end());
      }
      if (cfg.signal.lab_extreme) {
        const double extreme =
            item_mean(0) + 4.0 * kItemSd + std::abs(rng.normal(0.0, kItemSd));
        visit.measurements.push_back({synth_extreme_item(), extreme});
      }
    }
    validate_record(rec);
    cohort.records.push_back(std::move(rec));
  }
  return cohort;
}

void save_synthetic(const SynthCohort& cohort, const std::string& dir) {
  std::filesystem::create_directories(dir);
  save_cohort(cohort.records, dir);
  save_ontology(cohort.ontology, dir + "/ontology.csv");
  save_mapping(cohort.mapping, dir + "/mapping.csv");
}

}  // namespace katgnn
