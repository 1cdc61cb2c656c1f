#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace katgnn {

enum class Sex { female, male, unknown };

Sex sex_from_string(const std::string& s);
std::string sex_to_string(Sex s);

// Encoded demographic vector layout: [z-scored age, onehot(F), onehot(M), onehot(U)].
constexpr int kDemoDim = 4;

struct Demographics {
  double age = 0.0;  // years
  Sex sex = Sex::unknown;
};

struct Measurement {
  std::string item_id;
  double value = 0.0;
};

struct Visit {
  std::string visit_id;
  int64_t time = 0;  // day offset from a fixed epoch
  std::vector<std::string> diagnoses;  // sorted, no duplicates
  std::vector<Measurement> measurements;  // repeats allowed
};

struct PatientRecord {
  std::string patient_id;
  Demographics demographics;
  std::vector<Visit> visits;  // strictly ordered by time ascending
  int64_t index_date = 0;
  int label = 0;
};

// Global code/item index assignment, lexicographic so it is identical across
// runs and across serialize/reload cycles.
struct Vocabulary {
  std::vector<std::string> diagnosis_codes;
  std::vector<std::string> measurement_items;
  std::map<std::string, int> diagnosis_index;
  std::map<std::string, int> measurement_index;

  int n_diag() const { return static_cast<int>(diagnosis_codes.size()); }
  int n_meas() const { return static_cast<int>(measurement_items.size()); }
};

struct CohortSplit {
  std::vector<std::string> train_ids;
  std::vector<std::string> val_ids;
  std::vector<std::string> test_ids;
};

// Age normalization statistics, computed on the training split only.
struct DemoStats {
  double age_mean = 0.0;
  double age_std = 1.0;
};

Vocabulary build_vocabulary(const std::vector<PatientRecord>& records);

// Stratified 64/16/20 split; per label class, val and test sizes are rounded
// to nearest and the remainder goes to train. Deterministic given seed.
CohortSplit split_cohort(const std::vector<std::string>& ids,
                         const std::vector<int>& labels, uint64_t seed);

DemoStats compute_demo_stats(const std::vector<PatientRecord>& records,
                             const std::vector<std::string>& train_ids);

std::array<double, kDemoDim> encode_demographics(const Demographics& d,
                                                 double age_mean, double age_std);

// Checks the PatientRecord invariants (>= 1 visit, times ascending and
// <= index_date, no duplicate diagnoses within a visit). Throws on violation.
void validate_record(const PatientRecord& record);

}  // namespace katgnn
