#include "katgnn/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "katgnn/rng.hpp"

namespace katgnn {

Sex sex_from_string(const std::string& s) {
  if (s == "F") return Sex::female;
  if (s == "M") return Sex::male;
  if (s == "U") return Sex::unknown;
  throw std::runtime_error("invalid sex value '" + s + "' (expected F, M or U)");
}

std::string sex_to_string(Sex s) {
  switch (s) {
    case Sex::female: return "F";
    case Sex::male: return "M";
    default: return "U";
  }
}

Vocabulary build_vocabulary(const std::vector<PatientRecord>& records) {
  if (records.empty()) throw std::runtime_error("empty cohort");
  std::set<std::string> codes, items;
  for (const auto& r : records) {
    for (const auto& v : r.visits) {
      codes.insert(v.diagnoses.begin(), v.diagnoses.end());
      for (const auto& m : v.measurements) items.insert(m.item_id);
    }
  }
  Vocabulary vocab;
  vocab.diagnosis_codes.assign(codes.begin(), codes.end());
  vocab.measurement_items.assign(items.begin(), items.end());
  for (int i = 0; i < vocab.n_diag(); ++i)
    vocab.diagnosis_index[vocab.diagnosis_codes[static_cast<size_t>(i)]] = i;
  for (int i = 0; i < vocab.n_meas(); ++i)
    vocab.measurement_index[vocab.measurement_items[static_cast<size_t>(i)]] = i;
  return vocab;
}

CohortSplit split_cohort(const std::vector<std::string>& ids,
                         const std::vector<int>& labels, uint64_t seed) {
  if (ids.size() != labels.size())
    throw std::runtime_error("split_cohort: ids and labels differ in length");
  if (ids.size() < 5) throw std::runtime_error("cohort too small to split");
  {
    std::set<std::string> uniq(ids.begin(), ids.end());
    if (uniq.size() != ids.size())
      throw std::runtime_error("split_cohort: duplicate patient ids");
  }

  // Group by label, sort for a seed-independent starting order, then shuffle.
  std::map<int, std::vector<std::string>> by_label;
  for (size_t i = 0; i < ids.size(); ++i) by_label[labels[i]].push_back(ids[i]);

  CohortSplit split;
  for (auto& [label, group] : by_label) {
    std::sort(group.begin(), group.end());
    Rng rng(mix_seed(seed, 0x5eedu, static_cast<uint64_t>(label)));
    rng.shuffle(group);

    const auto n = static_cast<double>(group.size());
    const auto n_val = static_cast<size_t>(std::llround(0.16 * n));
    const auto n_test = static_cast<size_t>(std::llround(0.20 * n));
    for (size_t i = 0; i < group.size(); ++i) {
      if (i < n_val)
        split.val_ids.push_back(group[i]);
      else if (i < n_val + n_test)
        split.test_ids.push_back(group[i]);
      else
        split.train_ids.push_back(group[i]);
    }
  }
  std::sort(split.train_ids.begin(), split.train_ids.end());
  std::sort(split.val_ids.begin(), split.val_ids.end());
  std::sort(split.test_ids.begin(), split.test_ids.end());
  return split;
}

DemoStats compute_demo_stats(const std::vector<PatientRecord>& records,
                             const std::vector<std::string>& train_ids) {
  std::set<std::string> train(train_ids.begin(), train_ids.end());
  double sum = 0.0, sum_sq = 0.0;
  size_t n = 0;
  for (const auto& r : records) {
    if (!train.count(r.patient_id)) continue;
    sum += r.demographics.age;
    sum_sq += r.demographics.age * r.demographics.age;
    ++n;
  }
  if (n == 0) throw std::runtime_error("compute_demo_stats: no training patients");
  DemoStats stats;
  stats.age_mean = sum / static_cast<double>(n);
  const double var = sum_sq / static_cast<double>(n) - stats.age_mean * stats.age_mean;
  stats.age_std = var > 1e-12 ? std::sqrt(var) : 1.0;
  return stats;
}

std::array<double, kDemoDim> encode_demographics(const Demographics& d,
                                                 double age_mean, double age_std) {
  if (!(age_std > 0)) throw std::runtime_error("encode_demographics: age_std must be > 0");
  std::array<double, kDemoDim> out{};
  out[0] = (d.age - age_mean) / age_std;
  switch (d.sex) {
    case Sex::female: out[1] = 1.0; break;
    case Sex::male: out[2] = 1.0; break;
    case Sex::unknown: out[3] = 1.0; break;
  }
  return out;
}

void validate_record(const PatientRecord& record) {
  if (record.visits.empty())
    throw std::runtime_error("patient " + record.patient_id + " has no visits");
  if (!(record.demographics.age >= 0) || !std::isfinite(record.demographics.age))
    throw std::runtime_error("patient " + record.patient_id + ": invalid age");
  int64_t prev_time = INT64_MIN;
  for (const auto& v : record.visits) {
    if (v.time < prev_time)
      throw std::runtime_error("patient " + record.patient_id + ": visits out of order");
    prev_time = v.time;
    if (v.time > record.index_date)
      throw std::runtime_error("future visit: patient " + record.patient_id +
                               " visit " + v.visit_id + " is after the index date");
    std::set<std::string> seen;
    for (const auto& code : v.diagnoses)
      if (!seen.insert(code).second)
        throw std::runtime_error("patient " + record.patient_id + " visit " +
                                 v.visit_id + ": duplicate diagnosis " + code);
    for (const auto& m : v.measurements)
      if (!std::isfinite(m.value))
        throw std::runtime_error("patient " + record.patient_id + " visit " +
                                 v.visit_id + ": non-finite value for " + m.item_id);
  }
}

}  // namespace katgnn
