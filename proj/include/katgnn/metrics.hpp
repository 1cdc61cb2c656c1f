#pragma once

#include <vector>

namespace katgnn {

// Scores with parallel binary labels. Both metrics require at least one
// positive; AUROC additionally requires at least one negative.
struct ScoredLabels {
  std::vector<double> scores;
  std::vector<int> labels;
};

// Mann-Whitney AUROC: (wins + 0.5 * ties) / (P * N) over all positive-negative
// pairs, computed via average rank sums in O(n log n).
double auroc(const ScoredLabels& data);

// Average precision with tied scores treated as one threshold group.
double auprc(const ScoredLabels& data);

}  // namespace katgnn
