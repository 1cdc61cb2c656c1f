#include "katgnn/ontology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "katgnn/csv.hpp"

namespace katgnn {

Ontology Ontology::build(
    const std::vector<std::pair<std::string, std::string>>& parent_edges) {
  Ontology onto;
  onto.parent_edges_ = parent_edges;

  std::set<std::string> ids;
  for (const auto& [child, parent] : parent_edges) {
    ids.insert(child);
    ids.insert(parent);
  }
  if (ids.empty()) throw std::runtime_error("ontology: no concepts");
  onto.ids_.assign(ids.begin(), ids.end());
  for (int i = 0; i < onto.num_concepts(); ++i)
    onto.index_[onto.ids_[static_cast<size_t>(i)]] = i;

  onto.parents_.assign(ids.size(), {});
  std::vector<char> is_child(ids.size(), 0);
  for (const auto& [child, parent] : parent_edges) {
    const int c = onto.index_.at(child);
    const int p = onto.index_.at(parent);
    auto& ps = onto.parents_[static_cast<size_t>(c)];
    if (std::find(ps.begin(), ps.end(), p) == ps.end()) ps.push_back(p);
    is_child[static_cast<size_t>(c)] = 1;
  }
  for (auto& ps : onto.parents_) std::sort(ps.begin(), ps.end());

  std::vector<int> roots;
  for (int i = 0; i < onto.num_concepts(); ++i)
    if (!is_child[static_cast<size_t>(i)]) roots.push_back(i);
  if (roots.empty())
    throw std::runtime_error("ontology: no root (every concept appears as a child)");
  if (roots.size() > 1) {
    std::string msg = "ontology: multiple roots:";
    for (int r : roots) msg += " " + onto.ids_[static_cast<size_t>(r)];
    throw std::runtime_error(msg);
  }
  onto.root_ = roots[0];

  onto.compute_depths();
  onto.compute_ancestors();
  return onto;
}

int Ontology::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::runtime_error("unknown concept '" + id + "'");
  return it->second;
}

int Ontology::depth(const std::string& id) const {
  return depth_[static_cast<size_t>(index_of(id))];
}

void Ontology::compute_depths() {
  const auto n = static_cast<size_t>(num_concepts());
  // Kahn's algorithm over child->parent edges, processing parents first.
  std::vector<std::vector<int>> children(n);
  std::vector<int> pending(n, 0);  // unprocessed parents per concept
  for (size_t c = 0; c < n; ++c) {
    pending[c] = static_cast<int>(parents_[c].size());
    for (int p : parents_[c]) children[static_cast<size_t>(p)].push_back(static_cast<int>(c));
  }

  depth_.assign(n, 0);
  std::deque<int> queue{root_};
  size_t processed = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    ++processed;
    for (int c : children[static_cast<size_t>(u)]) {
      auto& d = depth_[static_cast<size_t>(c)];
      d = std::max(d, depth_[static_cast<size_t>(u)] + 1);
      if (--pending[static_cast<size_t>(c)] == 0) queue.push_back(c);
    }
  }
  if (processed != n) {
    // Some concept never reached zero pending parents: walk the unprocessed
    // region until a node repeats, then report that cycle.
    int start = -1;
    for (size_t i = 0; i < n; ++i)
      if (pending[i] > 0) { start = static_cast<int>(i); break; }
    std::vector<int> path;
    std::vector<int> seen_at(n, -1);
    int cur = start;
    while (seen_at[static_cast<size_t>(cur)] < 0) {
      seen_at[static_cast<size_t>(cur)] = static_cast<int>(path.size());
      path.push_back(cur);
      int next = -1;
      for (int p : parents_[static_cast<size_t>(cur)])
        if (pending[static_cast<size_t>(p)] > 0 || seen_at[static_cast<size_t>(p)] >= 0) {
          next = p;
          break;
        }
      if (next < 0) break;
      cur = next;
    }
    std::string msg = "ontology: cycle detected:";
    const int loop_start = seen_at[static_cast<size_t>(cur)] >= 0
                               ? seen_at[static_cast<size_t>(cur)]
                               : 0;
    for (size_t i = static_cast<size_t>(loop_start); i < path.size(); ++i)
      msg += " " + ids_[static_cast<size_t>(path[i])];
    msg += " -> " + ids_[static_cast<size_t>(cur)];
    throw std::runtime_error(msg);
  }
}

void Ontology::compute_ancestors() {
  const auto n = static_cast<size_t>(num_concepts());
  up_dist_.assign(n, {});
  for (size_t s = 0; s < n; ++s) {
    auto& dist = up_dist_[s];
    dist[static_cast<int>(s)] = 0;
    std::deque<int> queue{static_cast<int>(s)};
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      const int du = dist[u];
      for (int p : parents_[static_cast<size_t>(u)]) {
        if (dist.count(p)) continue;
        dist[p] = du + 1;
        queue.push_back(p);
      }
    }
  }
}

int Ontology::lcs_depth(const std::string& a, const std::string& b) const {
  const auto& da = up_dist_[static_cast<size_t>(index_of(a))];
  const auto& db = up_dist_[static_cast<size_t>(index_of(b))];
  int best = 0;  // root is always common
  for (const auto& [anc, hops] : da) {
    (void)hops;
    if (db.count(anc)) best = std::max(best, depth_[static_cast<size_t>(anc)]);
  }
  return best;
}

int Ontology::lcs_path(const std::string& a, const std::string& b) const {
  const auto& da = up_dist_[static_cast<size_t>(index_of(a))];
  const auto& db = up_dist_[static_cast<size_t>(index_of(b))];
  int best = -1;
  for (const auto& [anc, hops_a] : da) {
    auto it = db.find(anc);
    if (it == db.end()) continue;
    const int total = hops_a + it->second;
    if (best < 0 || total < best) best = total;
  }
  return best;  // >= 0: root is always common
}

MetricMode metric_mode_from_string(const std::string& s) {
  if (s == "lcs_depth") return MetricMode::lcs_depth;
  if (s == "lcs_path") return MetricMode::lcs_path;
  throw std::runtime_error("unknown metric mode '" + s + "' (expected lcs_depth or lcs_path)");
}

std::string metric_mode_to_string(MetricMode m) {
  return m == MetricMode::lcs_depth ? "lcs_depth" : "lcs_path";
}

bool Ontology::is_ancestor(const std::string& ancestor,
                           const std::string& descendant) const {
  const int a = index_of(ancestor);
  const auto& dd = up_dist_[static_cast<size_t>(index_of(descendant))];
  return dd.count(a) > 0;
}

std::string most_general_concept(const Ontology& onto,
                                 const std::vector<std::string>& candidates,
                                 bool* used_fallback) {
  if (candidates.empty())
    throw std::runtime_error("most_general_concept: empty candidate set");
  if (used_fallback) *used_fallback = false;
  for (const auto& c : candidates) {
    bool subsumes_all = true;
    for (const auto& other : candidates) {
      if (other != c && !onto.is_ancestor(c, other)) {
        subsumes_all = false;
        break;
      }
    }
    if (subsumes_all) return c;
  }
  // Fallback: minimum-depth candidate, ties to smallest id.
  std::string best = candidates[0];
  for (const auto& c : candidates) {
    if (onto.depth(c) < onto.depth(best) ||
        (onto.depth(c) == onto.depth(best) && c < best))
      best = c;
  }
  if (used_fallback) *used_fallback = true;
  return best;
}

double ccs_distance(const Ontology& onto, const ConceptMapping& mapping,
                    const std::string& ccs_i, const std::string& ccs_j,
                    MetricMode mode) {
  auto it_i = mapping.ccs_to_concepts.find(ccs_i);
  auto it_j = mapping.ccs_to_concepts.find(ccs_j);
  if (it_i == mapping.ccs_to_concepts.end() || it_j == mapping.ccs_to_concepts.end())
    throw std::runtime_error("ccs_distance: unmapped CCS id");
  const auto& ei = it_i->second;
  const auto& ej = it_j->second;
  if (ei.empty() || ej.empty()) throw std::runtime_error("ccs_distance: empty concept set");
  double sum = 0.0;
  for (const auto& a : ei)
    for (const auto& b : ej)
      sum += mode == MetricMode::lcs_depth ? onto.lcs_depth(a, b) : onto.lcs_path(a, b);
  return sum / (static_cast<double>(ei.size()) * static_cast<double>(ej.size()));
}

double meas_distance(const Ontology& onto, const ConceptMapping& mapping,
                     const std::string& item_i, const std::string& item_j,
                     MetricMode mode) {
  auto it_i = mapping.meas_to_concept.find(item_i);
  auto it_j = mapping.meas_to_concept.find(item_j);
  if (it_i == mapping.meas_to_concept.end() || it_j == mapping.meas_to_concept.end())
    throw std::runtime_error("meas_distance: unmapped measurement item");
  return mode == MetricMode::lcs_depth ? onto.lcs_depth(it_i->second, it_j->second)
                                       : onto.lcs_path(it_i->second, it_j->second);
}

std::vector<std::pair<std::string, std::string>> AugmentationPlan::selected_pairs() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& p : scored_pairs)
    if (p.selected) out.emplace_back(p.entity_a, p.entity_b);
  return out;
}

AugmentationPlan plan_augmentation(const std::vector<std::string>& entities,
                                   const Ontology& onto, const ConceptMapping& mapping,
                                   GraphModality modality, double percent,
                                   MetricMode mode, size_t max_pairs) {
  if (percent < 0.0 || percent > 100.0)
    throw std::runtime_error("plan_augmentation: percent must be in [0, 100]");
  AugmentationPlan plan;
  plan.modality = modality;
  plan.metric_mode = mode;
  plan.percent = percent;

  const bool diag = modality == GraphModality::diagnosis;
  std::vector<std::string> mapped;
  for (const auto& e : entities) {
    const bool ok = diag ? mapping.ccs_to_concepts.count(e) > 0
                         : mapping.meas_to_concept.count(e) > 0;
    if (ok)
      mapped.push_back(e);
    else
      ++plan.skipped_unmapped;
  }
  std::sort(mapped.begin(), mapped.end());

  for (size_t i = 0; i < mapped.size() && plan.scored_pairs.size() < max_pairs; ++i) {
    for (size_t j = i + 1; j < mapped.size() && plan.scored_pairs.size() < max_pairs; ++j) {
      ScoredPair p;
      p.entity_a = mapped[i];
      p.entity_b = mapped[j];
      p.score = diag ? ccs_distance(onto, mapping, p.entity_a, p.entity_b, mode)
                     : meas_distance(onto, mapping, p.entity_a, p.entity_b, mode);
      plan.scored_pairs.push_back(std::move(p));
    }
  }

  const double sign = mode == MetricMode::lcs_depth ? -1.0 : 1.0;
  std::sort(plan.scored_pairs.begin(), plan.scored_pairs.end(),
            [sign](const ScoredPair& a, const ScoredPair& b) {
              if (sign * a.score != sign * b.score) return sign * a.score < sign * b.score;
              if (a.entity_a != b.entity_a) return a.entity_a < b.entity_a;
              return a.entity_b < b.entity_b;
            });

  // Multiply before dividing so integral shares (e.g. 30% of 10) stay exact.
  const auto n_select = static_cast<size_t>(std::floor(
      percent * static_cast<double>(plan.scored_pairs.size()) / 100.0));
  for (size_t i = 0; i < n_select; ++i) plan.scored_pairs[i].selected = true;
  return plan;
}

std::string plan_to_csv(const AugmentationPlan& plan) {
  std::string out = "entity_a,entity_b,score,selected\n";
  for (const auto& p : plan.scored_pairs) {
    out += p.entity_a + "," + p.entity_b + "," + format_double(p.score) + "," +
           (p.selected ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace katgnn
