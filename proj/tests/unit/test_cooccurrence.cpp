#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "katgnn/cooccurrence.hpp"
#include "katgnn/rng.hpp"

using namespace katgnn;

namespace {

TransactionSet tx(std::vector<std::vector<std::string>> visits) {
  TransactionSet out;
  for (auto& v : visits) out.transactions.emplace_back(v.begin(), v.end());
  return out;
}

// Exhaustive O(universe^2 * transactions) counting oracle on integers.
struct CountOracle {
  std::map<std::string, int64_t> singles;
  std::map<std::pair<std::string, std::string>, int64_t> pairs;
  int64_t total = 0;

  explicit CountOracle(const TransactionSet& t) {
    total = static_cast<int64_t>(t.transactions.size());
    std::set<std::string> universe;
    for (const auto& visit : t.transactions) universe.insert(visit.begin(), visit.end());
    for (const auto& a : universe)
      for (const auto& visit : t.transactions) singles[a] += visit.count(a);
    for (auto ia = universe.begin(); ia != universe.end(); ++ia)
      for (auto ib = std::next(ia); ib != universe.end(); ++ib)
        for (const auto& visit : t.transactions)
          pairs[{*ia, *ib}] += visit.count(*ia) && visit.count(*ib) ? 1 : 0;
  }
};

}  // namespace

TEST_CASE("support and lift on the worked example") {
  // {AB, AB, A, B}: support(A,B) = 0.5, support(A) = support(B) = 0.75.
  const LiftTable table = mine(tx({{"A", "B"}, {"A", "B"}, {"A"}, {"B"}}), 1);
  const auto& stats = table.pairs.at({"A", "B"});
  CHECK(stats.support_ab == doctest::Approx(0.5));
  CHECK(table.support("A") == doctest::Approx(0.75));
  CHECK(stats.lift == doctest::Approx(8.0 / 9.0));
  // lift < 1: excluded from edges.
  CHECK(cooccurrence_edges(table).empty());
}

TEST_CASE("never co-occurring pairs and the independence boundary") {
  // A and B never together: the pair is absent from the table (count 0).
  const LiftTable separate = mine(tx({{"A"}, {"B"}, {"A"}, {"B"}}), 1);
  CHECK(separate.pairs.count({"A", "B"}) == 0);

  // Both in every visit: lift exactly 1, strict rule excludes it.
  const LiftTable always = mine(tx({{"A", "B"}, {"A", "B"}, {"A", "B"}}), 1);
  CHECK(always.pairs.at({"A", "B"}).lift == doctest::Approx(1.0));
  CHECK(cooccurrence_edges(always).empty());
}

TEST_CASE("positive association is included") {
  // {AB, AB, AC, C}: lift(A,B) = 0.5 / (0.75 * 0.5) = 4/3.
  const LiftTable table = mine(tx({{"A", "B"}, {"A", "B"}, {"A", "C"}, {"C"}}), 1);
  CHECK(table.pairs.at({"A", "B"}).lift == doctest::Approx(4.0 / 3.0));
  const auto edges = cooccurrence_edges(table);
  REQUIRE(edges.size() == 1);
  CHECK(edges[0] == std::pair<std::string, std::string>{"A", "B"});
}

TEST_CASE("min_pair_count filters rare pairs") {
  const LiftTable table = mine(tx({{"A", "B"}, {"A"}, {"B"}, {"C", "D"},
                                   {"C", "D"}, {"C", "D"}}), 2);
  CHECK(table.pairs.count({"A", "B"}) == 0);  // joint count 1 < 2
  CHECK(table.pairs.count({"C", "D"}) == 1);
}

TEST_CASE("empty transaction set is rejected, empty visits are fine") {
  CHECK_THROWS_WITH_AS(mine(TransactionSet{}, 1), doctest::Contains("zero total"),
                       std::runtime_error);
  const LiftTable table = mine(tx({{}, {"A", "B"}, {}}), 1);
  CHECK(table.pairs.at({"A", "B"}).support_ab == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("mine matches the exhaustive counting oracle exactly") {
  Rng rng(808);
  for (int trial = 0; trial < 25; ++trial) {
    const auto n_visits = static_cast<size_t>(rng.uniform_int(1, 400));
    const int n_items = static_cast<int>(rng.uniform_int(2, 30));
    TransactionSet t;
    for (size_t v = 0; v < n_visits; ++v) {
      std::set<std::string> visit;
      const int k = static_cast<int>(rng.uniform_int(0, 6));
      for (int i = 0; i < k; ++i)
        visit.insert("I" + std::to_string(rng.uniform_int(0, n_items - 1)));
      t.transactions.push_back(std::move(visit));
    }
    const CountOracle oracle(t);
    const LiftTable table = mine(t, 1);
    CHECK(table.total_visits == oracle.total);
    for (const auto& [item, count] : oracle.singles)
      CHECK(table.item_counts.at(item) == count);
    for (const auto& [key, count] : oracle.pairs) {
      if (count == 0) {
        CHECK(table.pairs.count(key) == 0);
        continue;
      }
      const auto& stats = table.pairs.at(key);
      CHECK(stats.count_ab == count);  // integer-exact
      // lift symmetry is structural (unordered keys); check the value too.
      const double expected_lift =
          static_cast<double>(count * oracle.total) /
          (static_cast<double>(oracle.singles.at(key.first)) *
           static_cast<double>(oracle.singles.at(key.second)));
      CHECK(stats.lift == doctest::Approx(expected_lift).epsilon(1e-12));
    }
  }
}
