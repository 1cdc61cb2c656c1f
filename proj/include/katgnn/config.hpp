#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "katgnn/ontology.hpp"

namespace katgnn {

enum class ModalityChoice { both, diagnosis, measurement };

// Every hyperparameter of the pipeline in one flat structure. Defaults here
// are the documented defaults; load_config rejects unknown keys and bad types.
struct TrainConfig {
  double lr = 0.01;            // one-cycle peak learning rate
  int batch = 128;
  double dropout = 0.5;
  int bins = 10;               // B
  double weight_decay = 1e-6;
  int epochs = 30;
  int hidden_dim = 128;        // d
  int time_dim = 64;           // temporal embedding width
  double diag_percent = 3.0;
  double meas_percent = 5.0;
  MetricMode metric_mode = MetricMode::lcs_path;
  int64_t min_pair_count = 5;
  std::string encoder = "gcn";
  ModalityChoice modality = ModalityChoice::both;
  bool cooccur = true;
  bool time_aware = true;
  bool cross_modality = false;   // co-occurrence pairs stay within one modality
  bool lab_filter = true;        // drop items recorded in < lab_filter_threshold of patients
  double lab_filter_threshold = 0.2;
  int64_t pair_cap = 5'000'000;  // augmentation pair enumeration cap
  bool random_edges = false;     // replace ontology pairs with random ones
  int threads = 1;

  void validate() const;
};

// `key = value` lines with `#` comments. Unknown keys and bins < 1 are
// rejected; `encoder = gat`/`gatv2` reports the unimplemented extension point.
TrainConfig load_config(const std::string& path);
TrainConfig parse_config_text(const std::string& text, const std::string& source_name);

std::string modality_to_string(ModalityChoice m);
ModalityChoice modality_from_string(const std::string& s);

}  // namespace katgnn
