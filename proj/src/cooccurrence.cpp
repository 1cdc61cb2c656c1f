#include "katgnn/cooccurrence.hpp"

#include <stdexcept>

#include "katgnn/csv.hpp"

namespace katgnn {

double LiftTable::support(const std::string& item) const {
  auto it = item_counts.find(item);
  if (it == item_counts.end()) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(total_visits);
}

LiftTable mine(const TransactionSet& transactions, int64_t min_pair_count) {
  if (transactions.transactions.empty())
    throw std::runtime_error("mine: zero total visits");

  LiftTable table;
  table.total_visits = static_cast<int64_t>(transactions.transactions.size());

  std::map<std::pair<std::string, std::string>, int64_t> pair_counts;
  for (const auto& t : transactions.transactions) {
    for (auto it = t.begin(); it != t.end(); ++it) {
      ++table.item_counts[*it];
      auto jt = it;
      for (++jt; jt != t.end(); ++jt) ++pair_counts[{*it, *jt}];  // *it < *jt in a set
    }
  }

  for (const auto& [key, count_ab] : pair_counts) {
    if (count_ab < min_pair_count) continue;
    const int64_t count_a = table.item_counts.at(key.first);
    const int64_t count_b = table.item_counts.at(key.second);
    PairStats stats;
    stats.count_ab = count_ab;
    stats.support_ab = static_cast<double>(count_ab) / static_cast<double>(table.total_visits);
    stats.lift = static_cast<double>(count_ab * table.total_visits) /
                 (static_cast<double>(count_a) * static_cast<double>(count_b));
    table.pairs[key] = stats;
  }
  return table;
}

std::vector<std::pair<std::string, std::string>> cooccurrence_edges(const LiftTable& table) {
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& [key, stats] : table.pairs) {
    const int64_t count_a = table.item_counts.at(key.first);
    const int64_t count_b = table.item_counts.at(key.second);
    if (stats.count_ab * table.total_visits > count_a * count_b) edges.push_back(key);
  }
  return edges;  // std::map iteration is already sorted
}

std::string lift_table_to_csv(const LiftTable& table) {
  std::string out = "a,b,support_ab,lift,selected\n";
  for (const auto& [key, stats] : table.pairs) {
    const int64_t count_a = table.item_counts.at(key.first);
    const int64_t count_b = table.item_counts.at(key.second);
    const bool selected = stats.count_ab * table.total_visits > count_a * count_b;
    out += key.first + "," + key.second + "," + format_double(stats.support_ab) + "," +
           format_double(stats.lift) + "," + (selected ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace katgnn
