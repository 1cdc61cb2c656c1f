#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace katgnn {

// Rooted is-a concept DAG. Depth is the LONGEST root-to-concept path, so a
// deeper subsumer is always the more specific one even with multiple parents.
class Ontology {
 public:
  // parent_edges: (child, parent). The root is the unique concept that never
  // appears as a child. Throws on cycles (listing one) or multiple roots.
  static Ontology build(const std::vector<std::pair<std::string, std::string>>& parent_edges);

  int num_concepts() const { return static_cast<int>(ids_.size()); }
  const std::string& root() const { return ids_[static_cast<size_t>(root_)]; }
  const std::vector<std::string>& concepts() const { return ids_; }
  bool has_concept(const std::string& id) const { return index_.count(id) > 0; }
  int depth(const std::string& id) const;
  const std::vector<std::pair<std::string, std::string>>& parent_edges() const {
    return parent_edges_;
  }

  // Depth of the lowest common subsumer (ancestors include the node itself).
  int lcs_depth(const std::string& a, const std::string& b) const;
  // Minimum over common ancestors c of hops(a->c) + hops(b->c).
  int lcs_path(const std::string& a, const std::string& b) const;
  // True iff ancestor lies on some parent chain from descendant (or equals it).
  bool is_ancestor(const std::string& ancestor, const std::string& descendant) const;

 private:
  int index_of(const std::string& id) const;
  void compute_depths();
  void compute_ancestors();

  std::vector<std::string> ids_;
  std::map<std::string, int> index_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::pair<std::string, std::string>> parent_edges_;
  int root_ = -1;
  std::vector<int> depth_;
  // Per concept: ancestor -> upward hop distance (shortest), including self at 0.
  std::vector<std::map<int, int>> up_dist_;
};

enum class MetricMode { lcs_depth, lcs_path };

MetricMode metric_mode_from_string(const std::string& s);
std::string metric_mode_to_string(MetricMode m);

// CCS codes map to non-empty concept sets; measurement items map to a single
// concept each (after redundancy removal).
struct ConceptMapping {
  std::map<std::string, std::vector<std::string>> ccs_to_concepts;
  std::map<std::string, std::string> meas_to_concept;
};

// Collapses a candidate set to the one concept that subsumes all others. When
// no candidate does, falls back to the minimum-depth candidate (ties to the
// smallest id) and reports it through used_fallback.
std::string most_general_concept(const Ontology& onto,
                                 const std::vector<std::string>& candidates,
                                 bool* used_fallback = nullptr);

// Mean of the pairwise metric over the two mapped concept sets.
double ccs_distance(const Ontology& onto, const ConceptMapping& mapping,
                    const std::string& ccs_i, const std::string& ccs_j, MetricMode mode);

// Single-pair metric on the two mapped concepts.
double meas_distance(const Ontology& onto, const ConceptMapping& mapping,
                     const std::string& item_i, const std::string& item_j, MetricMode mode);

enum class GraphModality { diagnosis, measurement };

struct ScoredPair {
  std::string entity_a;  // lexicographically <= entity_b
  std::string entity_b;
  double score = 0.0;
  bool selected = false;
};

struct AugmentationPlan {
  GraphModality modality = GraphModality::diagnosis;
  MetricMode metric_mode = MetricMode::lcs_path;
  double percent = 0.0;
  std::vector<ScoredPair> scored_pairs;  // sorted best-first
  size_t skipped_unmapped = 0;

  std::vector<std::pair<std::string, std::string>> selected_pairs() const;
};

// Scores all unordered pairs of mapped entities (capped at max_pairs in
// lexicographic enumeration order), sorts ascending by (distance, a, b) with
// the depth metric negated so "top" means deepest subsumer, and selects the
// first floor(percent/100 * total) pairs.
AugmentationPlan plan_augmentation(const std::vector<std::string>& entities,
                                   const Ontology& onto, const ConceptMapping& mapping,
                                   GraphModality modality, double percent,
                                   MetricMode mode, size_t max_pairs = 5'000'000);

std::string plan_to_csv(const AugmentationPlan& plan);

}  // namespace katgnn
