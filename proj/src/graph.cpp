#include "katgnn/graph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace katgnn {

std::string edge_kind_to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::bipartite: return "bipartite";
    case EdgeKind::sequential: return "sequential";
    case EdgeKind::ontology: return "ontology";
    default: return "cooccurrence";
  }
}

std::vector<int> PatientGraph::visit_node_rows() const {
  std::vector<int> rows;
  for (int i = 0; i < num_nodes(); ++i)
    if (nodes[static_cast<size_t>(i)].type == NodeType::visit) rows.push_back(i);
  return rows;  // visit nodes are stored in chronological order
}

bool PatientGraph::has_edge(int u, int v, EdgeKind kind) const {
  GraphEdge e{std::min(u, v), std::max(u, v), kind};
  return std::binary_search(edges.begin(), edges.end(), e);
}

PatientGraph PatientGraph::without_augmented_edges() const {
  PatientGraph out = *this;
  out.edges.clear();
  for (const auto& e : edges)
    if (e.kind == EdgeKind::bipartite || e.kind == EdgeKind::sequential)
      out.edges.push_back(e);
  return out;
}

namespace {

void finalize_edges(PatientGraph& graph) {
  std::sort(graph.edges.begin(), graph.edges.end());
  graph.edges.erase(std::unique(graph.edges.begin(), graph.edges.end()),
                    graph.edges.end());
}

void add_sequential_edges(PatientGraph& graph, int first_visit_row, int num_visits) {
  for (int i = 0; i + 1 < num_visits; ++i)
    graph.edges.push_back(
        {first_visit_row + i, first_visit_row + i + 1, EdgeKind::sequential});
}

}  // namespace

PatientGraph build_diagnosis_graph(const PatientRecord& record, const Vocabulary& vocab,
                                   const DemoStats& demo_stats) {
  PatientGraph graph;
  graph.modality = GraphModality::diagnosis;
  graph.patient_id = record.patient_id;
  graph.label = record.label;
  graph.entity_dim = vocab.n_diag();
  graph.demo = encode_demographics(record.demographics, demo_stats.age_mean,
                                   demo_stats.age_std);

  // Distinct codes in record order of vocab index.
  std::set<int> code_indices;
  for (const auto& visit : record.visits)
    for (const auto& code : visit.diagnoses) {
      auto it = vocab.diagnosis_index.find(code);
      if (it == vocab.diagnosis_index.end())
        throw std::runtime_error("diagnosis code '" + code + "' not in vocabulary");
      code_indices.insert(it->second);
    }

  std::map<int, int> code_row;
  for (int idx : code_indices) {
    code_row[idx] = graph.num_nodes();
    GraphNode n;
    n.type = NodeType::entity;
    n.vocab_index = idx;
    graph.nodes.push_back(n);
  }

  const int first_visit_row = graph.num_nodes();
  for (size_t i = 0; i < record.visits.size(); ++i) {
    GraphNode n;
    n.type = NodeType::visit;
    n.visit_ordinal = static_cast<int>(i);
    n.tau_days = record.index_date - record.visits[i].time;
    graph.nodes.push_back(n);
  }

  for (size_t i = 0; i < record.visits.size(); ++i) {
    const int visit_row = first_visit_row + static_cast<int>(i);
    for (const auto& code : record.visits[i].diagnoses) {
      const int row = code_row.at(vocab.diagnosis_index.at(code));
      graph.edges.push_back({row, visit_row, EdgeKind::bipartite});
    }
  }
  add_sequential_edges(graph, first_visit_row, static_cast<int>(record.visits.size()));
  finalize_edges(graph);
  return graph;
}

PatientGraph build_measurement_graph(const PatientRecord& record, const Vocabulary& vocab,
                                     const BinSpec& spec, const DemoStats& demo_stats) {
  PatientGraph graph;
  graph.modality = GraphModality::measurement;
  graph.patient_id = record.patient_id;
  graph.label = record.label;
  graph.entity_dim = vocab.n_meas() * spec.max_bins;
  graph.max_bins = spec.max_bins;
  graph.demo = encode_demographics(record.demographics, demo_stats.age_mean,
                                   demo_stats.age_std);

  // (item index, bin) pairs observed per visit, deduplicated.
  std::vector<std::set<std::pair<int, int>>> per_visit(record.visits.size());
  std::set<std::pair<int, int>> all_entities;
  for (size_t i = 0; i < record.visits.size(); ++i) {
    for (const auto& m : record.visits[i].measurements) {
      auto it = vocab.measurement_index.find(m.item_id);
      if (it == vocab.measurement_index.end() || !spec.has_item(m.item_id)) {
        ++graph.dropped_observations;
        continue;
      }
      const int bin = assign_bin(m.item_id, m.value, spec);
      per_visit[i].insert({it->second, bin});
      all_entities.insert({it->second, bin});
    }
  }

  std::map<std::pair<int, int>, int> entity_row;
  for (const auto& e : all_entities) {
    entity_row[e] = graph.num_nodes();
    GraphNode n;
    n.type = NodeType::entity;
    n.vocab_index = e.first;
    n.bin = e.second;
    graph.nodes.push_back(n);
  }

  const int first_visit_row = graph.num_nodes();
  for (size_t i = 0; i < record.visits.size(); ++i) {
    GraphNode n;
    n.type = NodeType::visit;
    n.visit_ordinal = static_cast<int>(i);
    n.tau_days = record.index_date - record.visits[i].time;
    graph.nodes.push_back(n);
  }

  for (size_t i = 0; i < record.visits.size(); ++i) {
    const int visit_row = first_visit_row + static_cast<int>(i);
    for (const auto& e : per_visit[i])
      graph.edges.push_back({entity_row.at(e), visit_row, EdgeKind::bipartite});
  }
  add_sequential_edges(graph, first_visit_row, static_cast<int>(record.visits.size()));
  finalize_edges(graph);
  return graph;
}

Matrix materialize_features(const PatientGraph& graph) {
  Matrix features(graph.num_nodes(), graph.feature_dim());
  for (int i = 0; i < graph.num_nodes(); ++i) {
    const GraphNode& n = graph.nodes[static_cast<size_t>(i)];
    if (n.type == NodeType::entity) {
      const int col = graph.modality == GraphModality::measurement
                          ? n.vocab_index * graph.max_bins + n.bin
                          : n.vocab_index;
      features.at(i, col) = 1.0;
    } else {
      for (int k = 0; k < kDemoDim; ++k)
        features.at(i, graph.entity_dim + k) = graph.demo[static_cast<size_t>(k)];
    }
  }
  return features;
}

void add_entity_pair_edges(PatientGraph& graph, const Vocabulary& vocab,
                           const std::vector<std::pair<std::string, std::string>>& pairs,
                           EdgeKind kind) {
  // Rows of present entity nodes per vocab index.
  std::map<int, std::vector<int>> rows_by_index;
  for (int i = 0; i < graph.num_nodes(); ++i) {
    const GraphNode& n = graph.nodes[static_cast<size_t>(i)];
    if (n.type == NodeType::entity) rows_by_index[n.vocab_index].push_back(i);
  }

  const auto& index = graph.modality == GraphModality::diagnosis
                          ? vocab.diagnosis_index
                          : vocab.measurement_index;
  std::vector<GraphEdge> added;
  for (const auto& [a, b] : pairs) {
    auto ia = index.find(a);
    auto ib = index.find(b);
    if (ia == index.end() || ib == index.end()) continue;
    auto ra = rows_by_index.find(ia->second);
    auto rb = rows_by_index.find(ib->second);
    if (ra == rows_by_index.end() || rb == rows_by_index.end()) continue;
    for (int u : ra->second)
      for (int v : rb->second)
        added.push_back({std::min(u, v), std::max(u, v), kind});
  }
  graph.edges.insert(graph.edges.end(), added.begin(), added.end());
  std::sort(graph.edges.begin(), graph.edges.end());
  graph.edges.erase(std::unique(graph.edges.begin(), graph.edges.end()),
                    graph.edges.end());
}

void apply_augmentation(PatientGraph& graph, const Vocabulary& vocab,
                        const AugmentationPlan& plan) {
  if (plan.modality != graph.modality)
    throw std::runtime_error("apply_augmentation: plan modality does not match graph");
  add_entity_pair_edges(graph, vocab, plan.selected_pairs(), EdgeKind::ontology);
}

void apply_cooccurrence(PatientGraph& graph, const Vocabulary& vocab,
                        const std::vector<std::pair<std::string, std::string>>& pairs) {
  add_entity_pair_edges(graph, vocab, pairs, EdgeKind::cooccurrence);
}

std::string graph_to_csv(const PatientGraph& graph, const Vocabulary& vocab) {
  const auto node_kind = [&](const GraphNode& n) {
    if (n.type == NodeType::visit) return std::string("visit");
    return std::string(graph.modality == GraphModality::diagnosis ? "diag" : "meas");
  };
  const auto node_id = [&](const GraphNode& n) {
    if (n.type == NodeType::visit) return std::to_string(n.visit_ordinal);
    if (graph.modality == GraphModality::diagnosis)
      return vocab.diagnosis_codes[static_cast<size_t>(n.vocab_index)];
    return vocab.measurement_items[static_cast<size_t>(n.vocab_index)] + ":b" +
           std::to_string(n.bin);
  };
  std::string out = "u_kind,u_id,v_kind,v_id,edge_kind\n";
  for (const auto& e : graph.edges) {
    const GraphNode& u = graph.nodes[static_cast<size_t>(e.u)];
    const GraphNode& v = graph.nodes[static_cast<size_t>(e.v)];
    out += node_kind(u) + "," + node_id(u) + "," + node_kind(v) + "," + node_id(v) +
           "," + edge_kind_to_string(e.kind) + "\n";
  }
  return out;
}

}  // namespace katgnn
