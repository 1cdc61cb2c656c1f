#include "katgnn/cohort_io.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <stdexcept>

#include "katgnn/csv.hpp"

namespace katgnn {

CohortFiles CohortFiles::in_dir(const std::string& dir) {
  CohortFiles files;
  files.patients_path = dir + "/patients.csv";
  files.diagnoses_path = dir + "/diagnoses.csv";
  files.measurements_path = dir + "/measurements.csv";
  return files;
}

namespace {

struct VisitKey {
  std::string patient_id;
  std::string visit_id;
  bool operator<(const VisitKey& o) const {
    if (patient_id != o.patient_id) return patient_id < o.patient_id;
    return visit_id < o.visit_id;
  }
};

}  // namespace

std::vector<PatientRecord> load_cohort(const CohortFiles& files) {
  const CsvTable patients = CsvTable::read(
      files.patients_path, {"patient_id", "age", "sex", "index_date", "label"});
  const CsvTable diagnoses = CsvTable::read(
      files.diagnoses_path, {"patient_id", "visit_id", "time", "ccs_code"});
  const CsvTable measurements = CsvTable::read(
      files.measurements_path, {"patient_id", "visit_id", "time", "item_id", "value"});

  std::map<std::string, PatientRecord> by_id;
  for (size_t r = 0; r < patients.num_rows(); ++r) {
    PatientRecord rec;
    rec.patient_id = patients.field(r, "patient_id");
    if (by_id.count(rec.patient_id))
      throw std::runtime_error(patients.path() + ": line " +
                               std::to_string(patients.line(r)) +
                               ": duplicate patient_id " + rec.patient_id);
    rec.demographics.age = patients.field_double(r, "age");
    rec.demographics.sex = sex_from_string(patients.field(r, "sex"));
    rec.index_date = patients.field_int(r, "index_date");
    const int64_t label = patients.field_int(r, "label");
    if (label != 0 && label != 1)
      throw std::runtime_error(patients.path() + ": line " +
                               std::to_string(patients.line(r)) +
                               ": label must be 0 or 1");
    rec.label = static_cast<int>(label);
    by_id[rec.patient_id] = std::move(rec);
  }

  // Visit shells keyed by (patient, visit); time must be consistent across rows.
  std::map<VisitKey, Visit> visits;
  const auto visit_for = [&](const CsvTable& t, size_t r) -> Visit& {
    VisitKey key{t.field(r, "patient_id"), t.field(r, "visit_id")};
    if (!by_id.count(key.patient_id))
      throw std::runtime_error(t.path() + ": line " + std::to_string(t.line(r)) +
                               ": unknown patient_id " + key.patient_id);
    const int64_t time = t.field_int(r, "time");
    auto [it, inserted] = visits.try_emplace(key);
    if (inserted) {
      it->second.visit_id = key.visit_id;
      it->second.time = time;
    } else if (it->second.time != time) {
      throw std::runtime_error(t.path() + ": line " + std::to_string(t.line(r)) +
                               ": inconsistent time for visit " + key.visit_id);
    }
    return it->second;
  };

  for (size_t r = 0; r < diagnoses.num_rows(); ++r) {
    Visit& v = visit_for(diagnoses, r);
    const std::string code = diagnoses.field(r, "ccs_code");
    if (std::find(v.diagnoses.begin(), v.diagnoses.end(), code) == v.diagnoses.end())
      v.diagnoses.push_back(code);
  }
  for (size_t r = 0; r < measurements.num_rows(); ++r) {
    Visit& v = visit_for(measurements, r);
    v.measurements.push_back(
        {measurements.field(r, "item_id"), measurements.field_double(r, "value")});
  }

  for (auto& [key, visit] : visits) {
    std::sort(visit.diagnoses.begin(), visit.diagnoses.end());
    by_id[key.patient_id].visits.push_back(std::move(visit));
  }

  std::vector<PatientRecord> records;
  for (auto& [id, rec] : by_id) {
    std::stable_sort(rec.visits.begin(), rec.visits.end(),
                     [](const Visit& a, const Visit& b) {
                       if (a.time != b.time) return a.time < b.time;
                       return a.visit_id < b.visit_id;
                     });
    validate_record(rec);  // raises "future visit" and friends
    records.push_back(std::move(rec));
  }
  return records;
}

void save_cohort(const std::vector<PatientRecord>& records, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::string patients = "patient_id,age,sex,index_date,label\n";
  std::string diagnoses = "patient_id,visit_id,time,ccs_code\n";
  std::string measurements = "patient_id,visit_id,time,item_id,value\n";
  for (const auto& rec : records) {
    patients += rec.patient_id + "," + format_double(rec.demographics.age) + "," +
                sex_to_string(rec.demographics.sex) + "," +
                std::to_string(rec.index_date) + "," + std::to_string(rec.label) + "\n";
    for (const auto& v : rec.visits) {
      for (const auto& code : v.diagnoses)
        diagnoses += rec.patient_id + "," + v.visit_id + "," + std::to_string(v.time) +
                     "," + code + "\n";
      for (const auto& m : v.measurements)
        measurements += rec.patient_id + "," + v.visit_id + "," + std::to_string(v.time) +
                        "," + m.item_id + "," + format_double(m.value) + "\n";
    }
  }
  write_text_file(dir + "/patients.csv", patients);
  write_text_file(dir + "/diagnoses.csv", diagnoses);
  write_text_file(dir + "/measurements.csv", measurements);
}

Ontology load_ontology(const std::string& path) {
  const CsvTable table = CsvTable::read(path, {"child_id", "parent_id"});
  std::vector<std::pair<std::string, std::string>> edges;
  for (size_t r = 0; r < table.num_rows(); ++r)
    edges.emplace_back(table.field(r, "child_id"), table.field(r, "parent_id"));
  return Ontology::build(edges);
}

void save_ontology(const Ontology& onto, const std::string& path) {
  std::string out = "child_id,parent_id\n";
  auto edges = onto.parent_edges();
  std::sort(edges.begin(), edges.end());
  for (const auto& [child, parent] : edges) out += child + "," + parent + "\n";
  write_text_file(path, out);
}

ConceptMapping load_mapping(const std::string& path, const Ontology& onto) {
  const CsvTable table = CsvTable::read(path, {"source_kind", "source_id", "concept_id"});
  ConceptMapping mapping;
  std::map<std::string, std::vector<std::string>> meas_candidates;
  for (size_t r = 0; r < table.num_rows(); ++r) {
    const std::string kind = table.field(r, "source_kind");
    const std::string source = table.field(r, "source_id");
    const std::string concept_id = table.field(r, "concept_id");
    if (!onto.has_concept(concept_id))
      throw std::runtime_error(path + ": line " + std::to_string(table.line(r)) +
                               ": concept '" + concept_id + "' not in ontology");
    if (kind == "ccs") {
      auto& v = mapping.ccs_to_concepts[source];
      if (std::find(v.begin(), v.end(), concept_id) == v.end()) v.push_back(concept_id);
    } else if (kind == "meas") {
      auto& v = meas_candidates[source];
      if (std::find(v.begin(), v.end(), concept_id) == v.end()) v.push_back(concept_id);
    } else {
      throw std::runtime_error(path + ": line " + std::to_string(table.line(r)) +
                               ": source_kind must be ccs or meas, got '" + kind + "'");
    }
  }
  for (auto& [ccs, concepts] : mapping.ccs_to_concepts)
    std::sort(concepts.begin(), concepts.end());
  // Measurement candidates collapse to the most general concept (one-to-one
  // mapping after redundancy removal).
  for (const auto& [item, candidates] : meas_candidates) {
    bool used_fallback = false;
    mapping.meas_to_concept[item] = most_general_concept(onto, candidates, &used_fallback);
    if (used_fallback)
      std::cerr << "warning: " << path << ": no candidate concept for '" << item
                << "' subsumes the others; using the minimum-depth candidate\n";
  }
  return mapping;
}

void save_mapping(const ConceptMapping& mapping, const std::string& path) {
  std::string out = "source_kind,source_id,concept_id\n";
  for (const auto& [ccs, concepts] : mapping.ccs_to_concepts)
    for (const auto& c : concepts) out += "ccs," + ccs + "," + c + "\n";
  for (const auto& [item, c] : mapping.meas_to_concept)
    out += "meas," + item + "," + c + "\n";
  write_text_file(path, out);
}

}  // namespace katgnn
