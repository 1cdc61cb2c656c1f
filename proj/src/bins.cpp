#include "katgnn/bins.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "katgnn/csv.hpp"

namespace katgnn {

int BinSpec::effective_bins(const std::string& item_id) const {
  auto it = boundaries.find(item_id);
  if (it == boundaries.end())
    throw std::runtime_error("bin spec has no item '" + item_id + "'");
  return static_cast<int>(it->second.size()) + 1;
}

BinSpec fit_bins(const std::map<std::string, std::vector<double>>& train_values,
                 int max_bins) {
  if (max_bins < 1) throw std::runtime_error("fit_bins: B must be >= 1");
  BinSpec spec;
  spec.max_bins = max_bins;
  for (const auto& [item, values] : train_values) {
    if (values.empty()) continue;  // item omitted; observations dropped downstream
    for (double v : values)
      if (!std::isfinite(v))
        throw std::runtime_error("fit_bins: non-finite training value for " + item);
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<long long>(sorted.size());
    std::vector<double> bounds;
    for (int k = 1; k < max_bins; ++k) {
      const long long pos = (static_cast<long long>(k) * n + max_bins - 1) / max_bins - 1;
      const double b = sorted[static_cast<size_t>(pos)];
      if (bounds.empty() || b > bounds.back()) bounds.push_back(b);
    }
    // A boundary at the training maximum would leave an empty top bin (the
    // interval is right-closed); constant-valued items collapse to one bin.
    if (!bounds.empty() && bounds.back() >= sorted.back()) bounds.pop_back();
    spec.boundaries[item] = std::move(bounds);
  }
  return spec;
}

int assign_bin(const std::string& item_id, double value, const BinSpec& spec) {
  if (!std::isfinite(value))
    throw std::runtime_error("assign_bin: non-finite value for " + item_id);
  auto it = spec.boundaries.find(item_id);
  if (it == spec.boundaries.end())
    throw std::runtime_error("assign_bin: item '" + item_id + "' not in bin spec");
  const auto& bounds = it->second;
  return static_cast<int>(std::lower_bound(bounds.begin(), bounds.end(), value) -
                          bounds.begin());
}

std::string binspec_to_csv(const BinSpec& spec) {
  std::string out;
  for (const auto& [item, bounds] : spec.boundaries) {
    out += item;
    for (double b : bounds) {
      out += ',';
      out += format_double(b);
    }
    out += '\n';
  }
  return out;
}

}  // namespace katgnn
