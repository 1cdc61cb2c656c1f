#pragma once

#include <string>
#include <vector>

#include "katgnn/cohort.hpp"
#include "katgnn/ontology.hpp"

namespace katgnn {

struct CohortFiles {
  std::string patients_path;
  std::string diagnoses_path;
  std::string measurements_path;

  // Conventional layout inside a data directory.
  static CohortFiles in_dir(const std::string& dir);
};

// Loads and validates a cohort. Visits are sorted by time per patient;
// duplicate (visit, code) diagnosis rows are deduplicated; malformed numerics
// and schema violations raise errors naming file, line and column.
std::vector<PatientRecord> load_cohort(const CohortFiles& files);

// Inverse of load_cohort, written so a dump/load cycle reproduces the cohort
// field by field (doubles use shortest round-trip formatting).
void save_cohort(const std::vector<PatientRecord>& records, const std::string& dir);

Ontology load_ontology(const std::string& path);
void save_ontology(const Ontology& onto, const std::string& path);

ConceptMapping load_mapping(const std::string& path, const Ontology& onto);
void save_mapping(const ConceptMapping& mapping, const std::string& path);

}  // namespace katgnn
