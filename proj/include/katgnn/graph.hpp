#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "katgnn/bins.hpp"
#include "katgnn/cohort.hpp"
#include "katgnn/matrix.hpp"
#include "katgnn/ontology.hpp"

namespace katgnn {

enum class NodeType { entity, visit };
enum class EdgeKind { bipartite, sequential, ontology, cooccurrence };

std::string edge_kind_to_string(EdgeKind k);

struct GraphNode {
  NodeType type = NodeType::entity;
  // Entity nodes: vocabulary index, plus the bin for measurement entities
  // (diagnosis entities keep bin = -1).
  int vocab_index = -1;
  int bin = -1;
  // Visit nodes: chronological ordinal and days to the index date.
  int visit_ordinal = -1;
  int64_t tau_days = -1;
};

struct GraphEdge {
  int u = 0;  // u < v, node indices
  int v = 0;
  EdgeKind kind = EdgeKind::bipartite;

  friend bool operator<(const GraphEdge& a, const GraphEdge& b) {
    if (a.u != b.u) return a.u < b.u;
    if (a.v != b.v) return a.v < b.v;
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  }
  friend bool operator==(const GraphEdge& a, const GraphEdge& b) {
    return a.u == b.u && a.v == b.v && a.kind == b.kind;
  }
};

// Patient-specific graph: entity nodes first (sorted by vocab index then bin),
// then visit nodes in chronological order. Feature rows follow the one-hot +
// demographics layout described by the builders below.
struct PatientGraph {
  GraphModality modality = GraphModality::diagnosis;
  std::string patient_id;
  int label = 0;
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;  // sorted, unique
  int entity_dim = 0;            // N_diag, or N_meas * B
  int max_bins = 1;              // B; 1 for diagnosis graphs
  std::array<double, kDemoDim> demo{};
  int dropped_observations = 0;  // measurements without a fitted bin spec

  int feature_dim() const { return entity_dim + kDemoDim; }
  int num_nodes() const { return static_cast<int>(nodes.size()); }
  std::vector<int> visit_node_rows() const;  // chronological order
  bool has_edge(int u, int v, EdgeKind kind) const;
  // Copy without ontology/cooccurrence edges (the base bipartite+sequential graph).
  PatientGraph without_augmented_edges() const;
};

// One visit node per visit, one entity node per distinct CCS code in the
// record, bipartite (visit, code) edges and sequential edges between
// consecutive visits. Features: entity -> [one_hot(code), 0_demo], visit ->
// [0_diag, encoded demographics].
PatientGraph build_diagnosis_graph(const PatientRecord& record, const Vocabulary& vocab,
                                   const DemoStats& demo_stats);

// Entity identity is (item, bin); repeat same-bin labs within a visit dedupe,
// repeat labs landing in different bins yield multiple entities. One-hot index
// is item_index * B + bin within the N_meas * B block.
PatientGraph build_measurement_graph(const PatientRecord& record, const Vocabulary& vocab,
                                     const BinSpec& spec, const DemoStats& demo_stats);

Matrix materialize_features(const PatientGraph& graph);

// Adds an edge of `kind` for each global entity pair with BOTH endpoints
// present in this graph; idempotent. Diagnosis pairs are code pairs;
// measurement pairs are item pairs instantiated across all present bin nodes.
void add_entity_pair_edges(PatientGraph& graph, const Vocabulary& vocab,
                           const std::vector<std::pair<std::string, std::string>>& pairs,
                           EdgeKind kind);

void apply_augmentation(PatientGraph& graph, const Vocabulary& vocab,
                        const AugmentationPlan& plan);

void apply_cooccurrence(PatientGraph& graph, const Vocabulary& vocab,
                        const std::vector<std::pair<std::string, std::string>>& pairs);

// Debug dump: u_kind,u_id,v_kind,v_id,edge_kind
std::string graph_to_csv(const PatientGraph& graph, const Vocabulary& vocab);

}  // namespace katgnn
