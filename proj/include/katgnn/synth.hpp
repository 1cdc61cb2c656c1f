#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "katgnn/cohort.hpp"
#include "katgnn/ontology.hpp"

namespace katgnn {

// Planted-signal flags; modes combine (e.g. diagnosis_cluster + lab_extreme).
struct SignalMode {
  bool diagnosis_cluster = false;
  bool lab_extreme = false;
  bool ontology_informative = false;

  bool any() const { return diagnosis_cluster || lab_extreme || ontology_informative; }
  // "none" or "+"-joined mode names.
  static SignalMode parse(const std::string& s);
  std::string to_string() const;
};

struct SynthConfig {
  int n_patients = 1000;
  double positive_rate = 0.25;
  int n_diag_codes = 60;
  int n_meas_items = 15;
  int visits_min = 2;
  int visits_max = 6;
  SignalMode signal;
  uint64_t seed = 1;
  // Fraction of negatives that carry the planted pattern in their FIRST visit
  // instead of the most recent one. Bag-of-feature models cannot tell these
  // apart from positives; time-aware models can.
  double decoy_rate = 0.4;
  // Probability that a positive actually receives the planted pattern.
  double signal_strength = 0.95;

  void validate() const;
};

struct SynthCohort {
  std::vector<PatientRecord> records;
  Ontology ontology;
  ConceptMapping mapping;
};

// Deterministic per config; per-patient streams derive from (seed, patient
// index) so generation order is irrelevant. The emitted ontology places the
// reserved signal codes as siblings under one deep ancestor while every other
// code/item concept sits on its own shallow chain.
SynthCohort generate_synthetic(const SynthConfig& cfg);

// Writes patients/diagnoses/measurements/ontology/mapping CSVs into dir.
void save_synthetic(const SynthCohort& cohort, const std::string& dir);

// The reserved diagnosis codes carrying the planted cluster/sibling signal.
std::vector<std::string> synth_cluster_codes(const SynthConfig& cfg);
// The designated lab item for lab_extreme signals.
std::string synth_extreme_item();

}  // namespace katgnn
