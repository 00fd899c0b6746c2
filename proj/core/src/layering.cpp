#include "strata/layering.hpp"

#include <algorithm>
#include <numeric>

namespace strata {

void HierarchySpec::check() const {
  auto overlap = [](const std::set<std::string>& a, const std::set<std::string>& b) -> const std::string* {
    for (const auto& k : a) {
      if (b.count(k)) return &k;
    }
    return nullptr;
  };
  if (auto* k = overlap(generational_kinds, co_level_kinds)) {
    throw SpecError("kind '" + *k + "' is both generational and co-level");
  }
  if (auto* k = overlap(generational_kinds, free_kinds)) {
    throw SpecError("kind '" + *k + "' is both generational and free");
  }
  if (auto* k = overlap(co_level_kinds, free_kinds)) {
    throw SpecError("kind '" + *k + "' is both co-level and free");
  }
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // The smaller index stays root, so roots are canonical minima.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

struct Clustering {
  std::vector<std::size_t> cluster_of;              // per person
  std::vector<std::vector<std::size_t>> members;    // per cluster, canonical order
};

Clustering cluster(const GraphDataset& dataset, const HierarchySpec& spec) {
  DisjointSets sets(dataset.size());
  for (const auto& e : dataset.edges()) {
    if (spec.is_co_level(dataset.relations()[e.relation].kind)) sets.unite(e.source, e.target);
  }
  Clustering c;
  c.cluster_of.assign(dataset.size(), 0);
  std::vector<std::size_t> id_of_root(dataset.size(), SIZE_MAX);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto root = sets.find(i);
    if (id_of_root[root] == SIZE_MAX) {
      id_of_root[root] = c.members.size();
      c.members.emplace_back();
    }
    c.cluster_of[i] = id_of_root[root];
    c.members[id_of_root[root]].push_back(i);
  }
  return c;
}

struct ClusterEdge {
  std::size_t to;
  std::size_t relation;
  bool removed = false;
};

}  // namespace

std::vector<std::vector<std::size_t>> co_level_clusters(const GraphDataset& dataset, const HierarchySpec& spec) {
  return cluster(dataset, spec).members;
}

LayerAssignment assign_layers(const GraphDataset& dataset, const HierarchySpec& spec, CyclePolicy policy) {
  spec.check();
  const auto clusters = cluster(dataset, spec);
  const std::size_t n = clusters.members.size();

  std::vector<std::vector<ClusterEdge>> out(n);
  for (const auto& e : dataset.edges()) {
    const auto& rel = dataset.relations()[e.relation];
    if (!spec.is_generational(rel.kind)) continue;
    const auto from = clusters.cluster_of[e.source];
    const auto to = clusters.cluster_of[e.target];
    if (from == to) {
      throw SpecError("generational relation " + rel.source + " " + rel.kind + " " + rel.target +
                      " joins two persons constrained to the same layer");
    }
    out[from].push_back({to, e.relation});
  }

  // Canonical-order DFS: detects back edges and yields a postorder.
  enum class Color { white, gray, black };
  std::vector<Color> color(n, Color::white);
  std::vector<std::size_t> postorder;
  postorder.reserve(n);
  std::vector<std::size_t> broken;

  struct Frame {
    std::size_t cluster;
    std::size_t next_edge;
    std::size_t via_relation;  // relation that entered this cluster
  };
  std::vector<Frame> stack;
  for (std::size_t root = 0; root < n; ++root) {
    if (color[root] != Color::white) continue;
    stack.push_back({root, 0, SIZE_MAX});
    color[root] = Color::gray;
    while (!stack.empty()) {
      auto& frame = stack.back();
      if (frame.next_edge == out[frame.cluster].size()) {
        color[frame.cluster] = Color::black;
        postorder.push_back(frame.cluster);
        stack.pop_back();
        continue;
      }
      auto& edge = out[frame.cluster][frame.next_edge++];
      if (color[edge.to] == Color::white) {
        color[edge.to] = Color::gray;
        stack.push_back({edge.to, 0, edge.relation});
      } else if (color[edge.to] == Color::gray) {
        if (policy == CyclePolicy::reject) {
          std::vector<std::string> cycle;
          auto start = std::find_if(stack.begin(), stack.end(), [&](const Frame& f) { return f.cluster == edge.to; });
          for (auto it = std::next(start); it != stack.end(); ++it) {
            cycle.push_back(dataset.relations()[it->via_relation].source);
          }
          cycle.push_back(dataset.relations()[edge.relation].source);
          throw CycleError(std::move(cycle));
        }
        edge.removed = true;
        broken.push_back(edge.relation);
      }
    }
  }

  // Reverse postorder is a topological order of the remaining DAG.
  std::vector<int> layer(n, 0);
  for (auto it = postorder.rbegin(); it != postorder.rend(); ++it) {
    for (const auto& edge : out[*it]) {
      if (!edge.removed) layer[edge.to] = std::max(layer[edge.to], layer[*it] + 1);
    }
  }

  LayerAssignment raw;
  raw.layer_of.resize(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) raw.layer_of[i] = layer[clusters.cluster_of[i]];
  std::sort(broken.begin(), broken.end());
  raw.broken_relations = std::move(broken);
  return compact_layers(raw);
}

LayerAssignment compact_layers(const LayerAssignment& raw) {
  std::vector<int> values = raw.layer_of;
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  LayerAssignment out;
  out.layer_of.reserve(raw.layer_of.size());
  for (int v : raw.layer_of) {
    out.layer_of.push_back(static_cast<int>(std::lower_bound(values.begin(), values.end(), v) - values.begin()));
  }
  out.layer_count = static_cast<int>(values.size());
  out.broken_relations = raw.broken_relations;
  return out;
}

}  // namespace strata
