#include "katgnn/config.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include "katgnn/csv.hpp"

namespace katgnn {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  size_t e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw std::runtime_error("config: key '" + key + "': cannot parse '" + v +
                             "' as a number");
  return out;
}

int64_t to_int(const std::string& key, const std::string& v) {
  int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw std::runtime_error("config: key '" + key + "': cannot parse '" + v +
                             "' as an integer");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw std::runtime_error("config: key '" + key + "': cannot parse '" + v +
                           "' as a boolean (use on/off)");
}

}  // namespace

void TrainConfig::validate() const {
  if (bins < 1) throw std::runtime_error("config: bins must be >= 1");
  if (batch < 1) throw std::runtime_error("config: batch must be >= 1");
  if (epochs < 0) throw std::runtime_error("config: epochs must be >= 0");
  if (!(lr > 0)) throw std::runtime_error("config: lr must be > 0");
  if (dropout < 0 || dropout >= 1)
    throw std::runtime_error("config: dropout must be in [0, 1)");
  if (hidden_dim < 1 || time_dim < 1)
    throw std::runtime_error("config: hidden_dim and time_dim must be >= 1");
  if (diag_percent < 0 || diag_percent > 100 || meas_percent < 0 || meas_percent > 100)
    throw std::runtime_error("config: edge percents must be in [0, 100]");
  if (weight_decay < 0) throw std::runtime_error("config: weight_decay must be >= 0");
  if (min_pair_count < 1) throw std::runtime_error("config: min_pair_count must be >= 1");
  if (lab_filter_threshold < 0 || lab_filter_threshold > 1)
    throw std::runtime_error("config: lab_filter_threshold must be in [0, 1]");
  if (threads < 1) throw std::runtime_error("config: threads must be >= 1");
  if (encoder != "gcn") {
    if (encoder == "gat" || encoder == "gatv2")
      throw std::runtime_error("encoder variant not implemented: " + encoder);
    throw std::runtime_error("config: unknown encoder '" + encoder + "'");
  }
}

TrainConfig parse_config_text(const std::string& text, const std::string& source_name) {
  TrainConfig cfg;
  size_t pos = 0, line_no = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(source_name + ": line " + std::to_string(line_no) +
                               ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "lr") cfg.lr = to_double(key, value);
    else if (key == "batch") cfg.batch = static_cast<int>(to_int(key, value));
    else if (key == "dropout") cfg.dropout = to_double(key, value);
    else if (key == "bins") cfg.bins = static_cast<int>(to_int(key, value));
    else if (key == "weight_decay") cfg.weight_decay = to_double(key, value);
    else if (key == "epochs") cfg.epochs = static_cast<int>(to_int(key, value));
    else if (key == "hidden_dim") cfg.hidden_dim = static_cast<int>(to_int(key, value));
    else if (key == "time_dim") cfg.time_dim = static_cast<int>(to_int(key, value));
    else if (key == "diag_percent") cfg.diag_percent = to_double(key, value);
    else if (key == "meas_percent") cfg.meas_percent = to_double(key, value);
    else if (key == "metric_mode") cfg.metric_mode = metric_mode_from_string(value);
    else if (key == "min_pair_count") cfg.min_pair_count = to_int(key, value);
    else if (key == "encoder") cfg.encoder = value;
    else if (key == "modality") cfg.modality = modality_from_string(value);
    else if (key == "cooccur") cfg.cooccur = to_bool(key, value);
    else if (key == "time_aware") cfg.time_aware = to_bool(key, value);
    else if (key == "cross_modality") cfg.cross_modality = to_bool(key, value);
    else if (key == "lab_filter") cfg.lab_filter = to_bool(key, value);
    else if (key == "lab_filter_threshold") cfg.lab_filter_threshold = to_double(key, value);
    else if (key == "pair_cap") cfg.pair_cap = to_int(key, value);
    else if (key == "random_edges") cfg.random_edges = to_bool(key, value);
    else if (key == "threads") cfg.threads = static_cast<int>(to_int(key, value));
    else
      throw std::runtime_error(source_name + ": line " + std::to_string(line_no) +
                               ": unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

TrainConfig load_config(const std::string& path) {
  return parse_config_text(read_text_file(path), path);
}

std::string modality_to_string(ModalityChoice m) {
  switch (m) {
    case ModalityChoice::diagnosis: return "diag";
    case ModalityChoice::measurement: return "meas";
    default: return "both";
  }
}

ModalityChoice modality_from_string(const std::string& s) {
  if (s == "both") return ModalityChoice::both;
  if (s == "diag" || s == "diagnosis") return ModalityChoice::diagnosis;
  if (s == "meas" || s == "measurement") return ModalityChoice::measurement;
  throw std::runtime_error("config: unknown modality '" + s + "'");
}

}  // namespace katgnn
