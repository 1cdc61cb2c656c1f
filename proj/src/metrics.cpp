#include "katgnn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace katgnn {

namespace {

void validate(const ScoredLabels& data) {
  if (data.scores.size() != data.labels.size())
    throw std::runtime_error("metrics: scores and labels differ in length");
  if (data.scores.empty()) throw std::runtime_error("metrics: empty input");
  for (double s : data.scores)
    if (!std::isfinite(s)) throw std::runtime_error("metrics: non-finite score");
}

}  // namespace

double auroc(const ScoredLabels& data) {
  validate(data);
  const size_t n = data.scores.size();
  size_t pos = 0;
  for (int y : data.labels) pos += (y != 0);
  const size_t neg = n - pos;
  if (pos == 0 || neg == 0) throw std::runtime_error("undefined metric: single-class input");

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return data.scores[a] < data.scores[b];
  });

  // Average ranks within tie groups, 1-based.
  double rank_sum_pos = 0.0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j < n && data.scores[order[j]] == data.scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of i+1..j
    for (size_t k = i; k < j; ++k)
      if (data.labels[order[k]] != 0) rank_sum_pos += avg_rank;
    i = j;
  }

  const double p = static_cast<double>(pos);
  const double u = rank_sum_pos - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(neg));
}

double auprc(const ScoredLabels& data) {
  validate(data);
  const size_t n = data.scores.size();
  size_t pos = 0;
  for (int y : data.labels) pos += (y != 0);
  if (pos == 0) throw std::runtime_error("undefined metric: no positives");

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return data.scores[a] > data.scores[b];
  });

  // Step-wise AP over threshold groups: each group contributes
  // (tp_in_group / P) * precision at the group's inclusive cutoff.
  double ap = 0.0;
  size_t tp = 0, fp = 0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    size_t tp_group = 0, fp_group = 0;
    while (j < n && data.scores[order[j]] == data.scores[order[i]]) {
      if (data.labels[order[j]] != 0)
        ++tp_group;
      else
        ++fp_group;
      ++j;
    }
    tp += tp_group;
    fp += fp_group;
    if (tp_group > 0) {
      const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
      ap += precision * static_cast<double>(tp_group) / static_cast<double>(pos);
    }
    i = j;
  }
  return ap;
}

}  // namespace katgnn
