#pragma once

#include <map>
#include <string>
#include <vector>

namespace katgnn {

// Per-item quantile bin boundaries fitted on training values. Boundaries are
// strictly increasing after duplicate collapse, so the effective bin count per
// item is boundaries.size() + 1 <= max_bins.
struct BinSpec {
  int max_bins = 1;  // B
  std::map<std::string, std::vector<double>> boundaries;

  bool has_item(const std::string& item_id) const { return boundaries.count(item_id) > 0; }
  int effective_bins(const std::string& item_id) const;
};

// Nearest-rank quantile boundaries: boundary k (1-based, k = 1..B-1) is the
// sorted value at 0-based position ceil(k*n/B) - 1. Items without training
// values are omitted from the bin spec.
BinSpec fit_bins(const std::map<std::string, std::vector<double>>& train_values, int max_bins);

// Right-closed bins: the bin index is the count of boundaries strictly less
// than the value, so a value equal to boundary k lands in bin k-1.
int assign_bin(const std::string& item_id, double value, const BinSpec& spec);

// Audit dump, one line per item: item_id,b1,b2,...
std::string binspec_to_csv(const BinSpec& spec);

}  // namespace katgnn
