#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace katgnn {

// One transaction per training visit; items are deduplicated within a visit.
struct TransactionSet {
  std::vector<std::set<std::string>> transactions;
};

struct PairStats {
  int64_t count_ab = 0;
  double support_ab = 0.0;
  double lift = 0.0;
};

struct LiftTable {
  int64_t total_visits = 0;
  std::map<std::string, int64_t> item_counts;
  std::map<std::pair<std::string, std::string>, PairStats> pairs;  // a < b

  double support(const std::string& item) const;
};

// support(A,B) = joint visit count / total visits, lift = support(A,B) /
// (support(A) * support(B)). Pairs with joint count below min_pair_count are
// excluded from the table.
LiftTable mine(const TransactionSet& transactions, int64_t min_pair_count);

// Unordered pairs with lift strictly greater than 1, sorted. The strict
// inequality is evaluated on integer counts (count_ab * total > count_a *
// count_b) so the independence boundary is exact.
std::vector<std::pair<std::string, std::string>> cooccurrence_edges(const LiftTable& table);

// Dump: a,b,support_ab,lift,selected
std::string lift_table_to_csv(const LiftTable& table);

}  // namespace katgnn
